// End-to-end checks of the command line tool: file formats, exit codes and
// byte-level determinism across thread counts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string g_cli;
int g_failures = 0;

void expect(bool ok, const std::string& what) {
    std::printf("%s %s\n", ok ? "[ok]" : "[FAIL]", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-qplateau>\n");
        return 2;
    }
    g_cli = argv[1];
    const fs::path work = fs::temp_directory_path() / "qplateau_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string w = work.string();

    // mesh export and the level guard
    expect(run(g_cli + " mesh --level 3 --out " + w + "/m3.qpmesh") == 0, "mesh exits 0");
    {
        std::ifstream is(w + "/m3.qpmesh");
        std::string tag, ver;
        int nv, nt, nb;
        is >> tag >> ver >> nv >> nt >> nb;
        expect(tag == "qpmesh" && ver == "v1" && nb == 48, "qpmesh header");
    }
    expect(run(g_cli + " mesh --level 99 --out " + w + "/bad.qpmesh 2>/dev/null") == 2,
           "level guard exits 2");

    // dirichlet baseline report
    expect(run(g_cli + " dirichlet --boundary re-z --level 4 --restarts 1 --out-dir " + w +
               "/rez") == 0,
           "dirichlet re-z exits 0");
    {
        json r = json::parse(slurp(w + "/rez/report.json"));
        expect(r["tool"] == "qplateau" && r.contains("version") && r.contains("config_hash") &&
                   r.contains("seed") && r["mesh_level"] == 4,
               "report envelope fields");
        const double e = r["dirichlet_energy"].get<double>();
        expect(std::abs(e - 3.14159265) < 0.04, "re-z energy near pi");
    }

    // determinism: same seed, different thread counts, byte-identical output
    const std::string det =
        " dirichlet --boundary sqrt-z --level 4 --restarts 2 --seed 7 --out-dir ";
    expect(run("QP_THREADS=1 " + g_cli + det + w + "/d1") == 0, "determinism run 1");
    expect(run("QP_THREADS=2 " + g_cli + det + w + "/d2") == 0, "determinism run 2");
    expect(slurp(w + "/d1/report.json") == slurp(w + "/d2/report.json"),
           "reports byte-identical across QP_THREADS");
    expect(!slurp(w + "/d1/field.qpfield").empty() &&
               slurp(w + "/d1/field.qpfield") == slurp(w + "/d2/field.qpfield"),
           "fields byte-identical across QP_THREADS");

    // rerun with the same seed reproduces the same bytes
    expect(run("QP_THREADS=3 " + g_cli + det + w + "/d3") == 0, "determinism run 3");
    expect(slurp(w + "/d1/report.json") == slurp(w + "/d3/report.json"), "reports reproducible");

    // analyze the sqrt-z minimizer: one branch cluster, boundary split fails
    expect(run(g_cli + " analyze --field " + w + "/d1/field.qpfield --band 0.85 --out-dir " + w +
               "/an") == 0,
           "analyze exits 0");
    {
        json a = json::parse(slurp(w + "/an/analysis.json"));
        expect(a["branches"]["count"] == 1, "analyze finds one branch cluster");
        expect(a["band_decomposition"]["ok"] == true &&
                   a["band_decomposition"]["multiplicities"].size() == 1,
               "sqrt-z band stays one multiplicity-2 component");
    }

    // constant two-sheet field: no branches, two separated components
    expect(run(g_cli + " dirichlet --boundary two-points --level 3 --restarts 1 --out-dir " + w +
               "/tp") == 0,
           "dirichlet two-points exits 0");
    expect(run(g_cli + " analyze --field " + w + "/tp/field.qpfield --out-dir " + w + "/antp") ==
               0,
           "analyze constant field exits 0");
    {
        json a = json::parse(slurp(w + "/antp/analysis.json"));
        expect(a["branches"]["count"] == 0 && a["branches"]["vertices"].empty(),
               "constant field has an empty branch report");
        expect(a["band_decomposition"]["multiplicities"].size() == 2,
               "constant field splits into two components");
    }

    // verify suites usable from the CLI
    expect(run(g_cli + " verify metric-oracle --out-dir " + w + "/v1") == 0,
           "verify metric-oracle exits 0");
    expect(run(g_cli + " verify degeneracy --level 3 --out-dir " + w + "/v2") == 0,
           "verify degeneracy exits 0");
    expect(run(g_cli + " verify mass-formula --level 3 --out-dir " + w + "/v3") == 0,
           "verify mass-formula exits 0");
    expect(run(g_cli + " verify sqrt-variety --level 4 --out-dir " + w + "/v4") == 0,
           "verify sqrt-variety exits 0");
    expect(fs::exists(w + "/v4/sqrt-variety-selection.csv") &&
               fs::exists(w + "/v4/sqrt-variety-re.svg") &&
               fs::exists(w + "/v4/sqrt-variety-im.svg"),
           "sqrt-variety emits CSV and SVG plots");
    {
        const std::string svg = slurp(w + "/v4/sqrt-variety-re.svg");
        expect(svg.find("<svg") != std::string::npos && svg.find("polyline") != std::string::npos,
               "selection SVG contains polylines");
    }

    // explicit boundary values through a problem file: constant two-sheet
    // data must solve to zero energy
    {
        json prob;
        prob["values"] = json::array();
        for (int j = 0; j < 48; ++j)
            prob["values"].push_back(json::array({json::array({1.0, 2.0}),
                                                  json::array({-1.0, 0.5})}));
        std::ofstream os(w + "/const.json");
        os << prob.dump();
    }
    expect(run(g_cli + " dirichlet --problem " + w + "/const.json --level 3 --restarts 1 "
               "--out-dir " + w + "/cp") == 0,
           "dirichlet --problem exits 0");
    {
        json r = json::parse(slurp(w + "/cp/report.json"));
        expect(r["dirichlet_energy"].get<double>() < 1e-12, "constant problem solves to zero");
    }

    // plateau: builtin export, solve, invalid multiplicities
    expect(run(g_cli + " plateau --builtin circle-r1 --level 2 --write-problem " + w +
               "/circle.json") == 0,
           "plateau --write-problem exits 0");
    {
        json p = json::parse(slurp(w + "/circle.json"));
        expect(p["curves"].size() == 1 && p["multiplicities"] == json::array({1}),
               "exported problem shape");
        p["multiplicities"] = {0};
        std::ofstream os(w + "/bad.json");
        os << p.dump();
    }
    expect(run(g_cli + " plateau --problem " + w + "/bad.json --level 2 --out-dir " + w +
               "/pbad 2>/dev/null") == 2,
           "invalid multiplicities exit 2");
    expect(run(g_cli + " plateau --builtin circle-r1 --level 2 --param-iters 8 --out-dir " + w +
               "/pc") == 0,
           "plateau circle exits 0");
    {
        json r = json::parse(slurp(w + "/pc/report.json"));
        expect(r["homeo"][0]["ok"] == true, "plateau homeo verdict");
        const double e = r["dirichlet_energy"].get<double>();
        expect(std::abs(e - 2.0 * 3.14159265) / (2.0 * 3.14159265) < 0.05,
               "circle energy near 2 pi");
    }

    std::printf("%s: %d failure(s)\n", g_failures ? "FAILURE" : "SUCCESS", g_failures);
    return g_failures ? 1 : 0;
}
