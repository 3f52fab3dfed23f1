#include "qplateau/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qp {

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json report_envelope(const std::string& command, std::uint64_t seed, int mesh_level,
                               const nlohmann::json& config) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["mesh_level"] = mesh_level;
    j["config"] = config;
    j["config_hash"] = config_hash(config);
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
}

std::string svg_line_chart(const std::string& title, const std::vector<double>& x,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const int W = 720, H = 480, ML = 60, MR = 20, MT = 40, MB = 40;
    double xmin = x.empty() ? 0 : x.front(), xmax = x.empty() ? 1 : x.front();
    for (double v : x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series)
        for (double v : s.second) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymin -= 1;
        ymax += 1;
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    char buf[64];
    os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << (W - ML - MR) << "\" height=\""
       << (H - MT - MB) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size() && i < series[s].second.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x[i]), py(series[s].second[i]));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << (ML + 8) << "\" y=\"" << (MT + 18 + 18 * s) << "\" fill=\""
           << colors[s % 4] << "\" font-size=\"13\">" << series[s].first << "</text>\n";
    }
    std::snprintf(buf, sizeof(buf), "%.3g", ymin);
    os << "<text x=\"8\" y=\"" << (H - MB) << "\" font-size=\"12\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymax);
    os << "<text x=\"8\" y=\"" << (MT + 6) << "\" font-size=\"12\">" << buf << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string csv_table(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns) {
    std::ostringstream os;
    for (std::size_t i = 0; i < headers.size(); ++i)
        os << headers[i] << (i + 1 < headers.size() ? "," : "\n");
    std::size_t rows = 0;
    for (const auto& c : columns) rows = std::max(rows, c.size());
    char buf[48];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (r < columns[c].size()) {
                std::snprintf(buf, sizeof(buf), "%.12g", columns[c][r]);
                os << buf;
            }
            os << (c + 1 < columns.size() ? "," : "\n");
        }
    }
    return os.str();
}

}  // namespace qp
