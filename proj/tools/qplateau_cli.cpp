// qplateau: Q-valued Dirichlet and Plateau solves on the unit disk.
//
// Commands: mesh, dirichlet, plateau, verify, analyze. All reports embed the
// tool version, the seed and a hash of the configuration; identical inputs
// give byte-identical outputs regardless of QP_THREADS.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "qplateau/analysis.hpp"
#include "qplateau/dirichlet_solver.hpp"
#include "qplateau/examples_lab.hpp"
#include "qplateau/parallel.hpp"
#include "qplateau/plateau_solver.hpp"
#include "qplateau/report.hpp"

using json = nlohmann::json;
using namespace qp;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2d(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

std::vector<QValue> builtin_boundary(const std::string& name, const DiskMesh& mesh) {
    const int B = mesh.boundary_count();
    std::vector<QValue> out(B);
    for (int j = 0; j < B; ++j) {
        const Vec2& p = mesh.vertices[mesh.boundary_loop[j]];
        if (name == "re-z") {
            Vec v(1);
            v << p.x();
            out[j].points = {v};
        } else if (name == "sqrt-z") {
            const std::complex<double> w = std::sqrt(std::complex<double>(p.x(), p.y()));
            out[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
        } else if (name == "variety") {
            const std::complex<double> z(p.x(), p.y());
            const std::complex<double> w = std::sqrt(z * z - 0.25);
            out[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
        } else if (name == "two-points") {
            out[j].points = {vec2d(0, 0), vec2d(3, 0)};
        } else {
            throw CLI::ValidationError("--boundary",
                                       "unknown builtin boundary '" + name + "'");
        }
    }
    return out;
}

std::vector<QValue> boundary_from_json(const json& j, const DiskMesh& mesh) {
    const auto& rows = j.at("values");
    if (static_cast<int>(rows.size()) != mesh.boundary_count())
        throw std::invalid_argument("problem file: need one value row per boundary vertex");
    std::vector<QValue> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& pt : rows[r]) {
            Vec v(pt.size());
            for (std::size_t k = 0; k < pt.size(); ++k) v[k] = pt[k].get<double>();
            out[r].points.push_back(std::move(v));
        }
    }
    return out;
}

json solve_options_json(const SolveOptions& o) {
    return json{{"max_outer_iters", o.max_outer_iters}, {"energy_tol", o.energy_tol},
                {"matching_refresh", o.matching_refresh}, {"restarts", o.restarts},
                {"seed", o.seed},    {"annealing", o.annealing}};
}

json report_json(const SolveReport& r) {
    return json{{"final_energy", r.final_energy},
                {"iterations", r.iterations},
                {"restart_index", r.restart_index},
                {"converged", r.converged},
                {"energy_history", r.energy_history}};
}

BoundaryProblem problem_from_json(const json& j) {
    BoundaryProblem p;
    for (const auto& cj : j.at("curves")) {
        JordanCurve c;
        if (cj.contains("lnr_radius")) c.lnr_radius = cj["lnr_radius"].get<double>();
        for (const auto& pt : cj.at("points")) {
            Vec v(pt.size());
            for (std::size_t k = 0; k < pt.size(); ++k) v[k] = pt[k].get<double>();
            c.samples.push_back(std::move(v));
        }
        c.finalize();
        p.curves.push_back(std::move(c));
    }
    p.multiplicities = j.at("multiplicities").get<std::vector<int>>();
    if (j.contains("params")) {
        for (const auto& pj : j["params"]) {
            MonotoneParam m;
            m.increments = pj.at("increments").get<std::vector<double>>();
            m.offset = pj.value("offset", 0.0);
            p.params.push_back(std::move(m));
        }
    }
    if (j.contains("pins")) p.pins = j["pins"].get<std::vector<std::vector<int>>>();
    return p;
}

json problem_to_json(const BoundaryProblem& p) {
    json j;
    j["curves"] = json::array();
    for (const auto& c : p.curves) {
        json cj;
        cj["lnr_radius"] = c.lnr_radius;
        cj["points"] = json::array();
        for (const auto& s : c.samples) {
            json pt = json::array();
            for (int k = 0; k < s.size(); ++k) pt.push_back(s[k]);
            cj["points"].push_back(pt);
        }
        j["curves"].push_back(cj);
    }
    j["multiplicities"] = p.multiplicities;
    j["params"] = json::array();
    for (const auto& m : p.params)
        j["params"].push_back(json{{"increments", m.increments}, {"offset", m.offset}});
    j["pins"] = p.pins;
    return j;
}

BoundaryProblem builtin_problem(const std::string& name, const DiskMesh& mesh) {
    if (name == "circle-r1") return make_circle_problem(1.0, mesh);
    if (name == "circle-r2") return make_circle_problem(2.0, mesh);
    if (name == "variety") return make_variety_problem(mesh);
    throw CLI::ValidationError("--builtin", "unknown builtin problem '" + name + "'");
}

void dump_json(const json& j, const std::string& path) {
    write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- verify

json verify_metric_oracle() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    int checked = 0;
    for (int q = 2; q <= 6; ++q)
        for (int n = 1; n <= 3; ++n)
            for (int trial = 0; trial < 500; ++trial) {
                QValue a, b;
                for (int i = 0; i < q; ++i) {
                    Vec pa(n), pb(n);
                    for (int k = 0; k < n; ++k) {
                        pa[k] = gauss(rng);
                        pb[k] = gauss(rng);
                    }
                    a.points.push_back(pa);
                    b.points.push_back(pb);
                }
                std::vector<int> perm(q);
                for (int i = 0; i < q; ++i) perm[i] = i;
                double brute = std::numeric_limits<double>::infinity();
                do {
                    double c = 0.0;
                    for (int i = 0; i < q; ++i)
                        c += (a.points[i] - b.points[perm[i]]).squaredNorm();
                    brute = std::min(brute, c);
                } while (std::next_permutation(perm.begin(), perm.end()));
                const double direct = metric_g(a, b);
                worst = std::max(worst,
                                 std::abs(direct - std::sqrt(brute)) /
                                     std::max(1e-30, std::sqrt(brute)));
                ++checked;
            }
    return json{{"pairs_checked", checked},
                {"max_relative_error", worst},
                {"pass", worst <= 1e-12}};
}

json verify_sqrt_variety(int level, const std::string& out_dir) {
    json j;
    // selection formulas against the sampled roots
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(level));
    auto field = sample_variety(VarietySpec{}, mesh);
    double worst_root = 0.0;
    for (int k = 0; k < mesh->boundary_count(); ++k) {
        const double theta = 2.0 * kPi * k / mesh->boundary_count();
        auto [f1, f2] = boundary_selection_formulas(theta);
        QValue expect;
        expect.points = {vec2d(f1.x(), f1.y()), vec2d(f2.x(), f2.y())};
        worst_root =
            std::max(worst_root, metric_g(expect, field.values[mesh->boundary_loop[k]]));
    }
    j["selection_vs_roots_max_err"] = worst_root;

    // glued continuity
    double worst_jump = 0.0;
    for (double angle : {kPi / 2.0, 3.0 * kPi / 2.0}) {
        const auto lo = glued_boundary_selection(angle - 1e-10).first;
        const auto hi = glued_boundary_selection(angle + 1e-10).first;
        worst_jump = std::max(worst_jump, (lo - hi).norm());
    }
    j["glued_jump"] = worst_jump;

    // crossing conditions on the glued selections over a fine grid
    const int grid = 10000;
    int re_flips = 0, im_flips = 0;
    bool located = true;
    for (int i = 0; i < grid; ++i) {
        const double t0 = 2.0 * kPi * i / grid, t1 = 2.0 * kPi * (i + 1) / grid;
        const Vec2 a = glued_boundary_selection(t0).first;
        const Vec2 b = glued_boundary_selection(t1).first;
        const double mid = 0.5 * (t0 + t1);
        if ((a.x() > 0) != (b.x() > 0)) {
            ++re_flips;
            located = located && std::min(std::abs(mid - kPi / 2.0),
                                          std::abs(mid - 3.0 * kPi / 2.0)) < 2.0 * kPi / grid;
        }
        if ((a.y() > 0) != (b.y() > 0)) {
            ++im_flips;
            located = located &&
                      std::min({mid, 2.0 * kPi - mid, std::abs(mid - kPi)}) < 2.0 * kPi / grid;
        }
    }
    j["re_crossings"] = re_flips;
    j["im_crossings"] = im_flips;
    j["crossings_located"] = located;

    // boundary band decomposition
    auto dec = decompose_graph(field, annulus_band(*mesh, 0.9), 0.5);
    j["band_components"] = static_cast<int>(dec.components.size());
    const bool band_ok = dec.ok && dec.components.size() == 2 &&
                         dec.components[0].multiplicity == 1 &&
                         dec.components[1].multiplicity == 1;
    j["band_multiplicities_one"] = band_ok;

    j["pass"] = worst_root < 1e-9 && worst_jump < 1e-9 && re_flips == 2 && im_flips == 2 &&
                located && band_ok;

    // the two selection component curves as data
    std::vector<double> ths, re1, im1, re2, im2;
    for (int i = 0; i < 1024; ++i) {
        const double theta = 2.0 * kPi * i / 1024;
        auto [f1, f2] = boundary_selection_formulas(theta);
        ths.push_back(theta);
        re1.push_back(f1.x());
        im1.push_back(f1.y());
        re2.push_back(f2.x());
        im2.push_back(f2.y());
    }
    write_text_file(out_dir + "/sqrt-variety-selection.csv",
                    csv_table({"theta", "re_f1", "im_f1", "re_f2", "im_f2"},
                              {ths, re1, im1, re2, im2}));
    write_text_file(out_dir + "/sqrt-variety-re.svg",
                    svg_line_chart("third-coordinate real parts", ths,
                                   {{"re f1", re1}, {"re f2", re2}}));
    write_text_file(out_dir + "/sqrt-variety-im.svg",
                    svg_line_chart("third-coordinate imaginary parts", ths,
                                   {{"im f1", im1}, {"im f2", im2}}));
    return j;
}

json verify_degeneracy(int level) {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(level));
    auto [field, rep] = build_degenerate_example(mesh);
    return json{{"dir_base", rep.dir_f},
                {"dir_harmonic", rep.dir_h},
                {"dir_shifted", rep.dir_shifted},
                {"identity_rel_err", rep.identity_rel_err},
                {"trace_max_err", rep.trace_max_err},
                {"witness_vertex", rep.witness_vertex},
                {"witness_dist", rep.witness_dist},
                {"pass", rep.ok}};
}

json verify_mass_formula(int level) {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(level));
    auto field = sample_variety(VarietySpec{}, mesh);
    const double dir = dirichlet_energy(field);
    const double base = 2.0 * mesh->total_area();
    auto slope = [&](double l) { return (graph_mass(field, l) - base) / (l * l); };
    const double s1 = slope(0.1), s2 = slope(0.05), s3 = slope(0.025);
    const double extrap = (4.0 * s3 - s2) / 3.0;
    const double rel = std::abs(extrap - dir / 2.0) / (dir / 2.0);

    bool ineq_ok = mass_inequality_check(field).holds;
    std::vector<QValue> iv(mesh->vertex_count());
    for (int v = 0; v < mesh->vertex_count(); ++v)
        iv[v].points = {vec2d(mesh->vertices[v].x(), mesh->vertices[v].y())};
    ineq_ok = ineq_ok && mass_inequality_check(make_qfield(mesh, std::move(iv))).holds;
    std::vector<QValue> cv(mesh->vertex_count());
    for (auto& v : cv) v.points = {vec2d(1, 2), vec2d(-1, 0)};
    ineq_ok = ineq_ok && mass_inequality_check(make_qfield(mesh, std::move(cv))).holds;

    return json{{"slopes", {s1, s2, s3}},
                {"richardson", extrap},
                {"half_dir", dir / 2.0},
                {"richardson_rel_err", rel},
                {"inequality_holds", ineq_ok},
                {"pass", rel < 0.05 && ineq_ok}};
}

json verify_conformal_invariance(int level, std::uint64_t seed) {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(level));
    SolveOptions opts;
    opts.restarts = 2;
    opts.seed = seed;
    auto [f0, r0] = solve_dirichlet(mesh, builtin_boundary("sqrt-z", *mesh), opts);
    std::vector<QValue> pulled(mesh->boundary_count());
    for (int j = 0; j < mesh->boundary_count(); ++j) {
        const Vec2 m = mobius_apply(Vec2(0.3, 0.0), 0.0,
                                    mesh->vertices[mesh->boundary_loop[j]]);
        const std::complex<double> w = std::sqrt(std::complex<double>(m.x(), m.y()));
        pulled[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
    }
    auto [f1, r1] = solve_dirichlet(mesh, pulled, opts);
    const double rel = std::abs(r1.final_energy - r0.final_energy) / r0.final_energy;
    return json{{"base_energy", r0.final_energy},
                {"pulled_energy", r1.final_energy},
                {"relative_change", rel},
                {"pass", rel < 0.01}};
}

json branch_report_json(const BranchReport& br, const DiskMesh& mesh) {
    json j;
    j["count"] = br.count;
    j["annulus_clear"] = br.annulus_clear;
    j["boundary_warnings"] = br.boundary_warnings;
    j["vertices"] = json::array();
    for (const auto& bv : br.branch_vertices)
        j["vertices"].push_back(json{{"vertex", bv.vertex},
                                     {"x", mesh.vertices[bv.vertex].x()},
                                     {"y", mesh.vertices[bv.vertex].y()},
                                     {"cycle_type", bv.cycle_type}});
    j["clusters"] = br.clusters;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-valued Dirichlet energies and the multiple-valued Plateau problem on the disk"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = QP_THREADS env or hardware)");

    // mesh
    auto* cmd_mesh = app.add_subcommand("mesh", "build and export a disk mesh");
    int mesh_level = 3;
    std::string mesh_out = "mesh.qpmesh";
    cmd_mesh->add_option("--level", mesh_level, "refinement level (0..10)");
    cmd_mesh->add_option("--out", mesh_out, "output path");

    // dirichlet
    auto* cmd_dir = app.add_subcommand("dirichlet", "minimize Dirichlet energy for fixed trace");
    int dir_level = 5;
    std::string dir_boundary = "sqrt-z", dir_problem, dir_out = ".";
    SolveOptions dir_opts;
    cmd_dir->add_option("--level", dir_level, "mesh level");
    cmd_dir->add_option("--boundary", dir_boundary,
                        "builtin boundary: re-z | sqrt-z | variety | two-points");
    cmd_dir->add_option("--problem", dir_problem, "JSON file with explicit boundary values");
    cmd_dir->add_option("--out-dir", dir_out, "output directory");
    cmd_dir->add_option("--restarts", dir_opts.restarts, "solver restarts");
    cmd_dir->add_option("--seed", dir_opts.seed, "random seed");
    cmd_dir->add_option("--max-iters", dir_opts.max_outer_iters, "outer iteration cap");
    cmd_dir->add_option("--tol", dir_opts.energy_tol, "relative energy tolerance");
    cmd_dir->add_flag("--annealing", dir_opts.annealing, "enable matching annealing");

    // plateau
    auto* cmd_pl = app.add_subcommand("plateau", "solve the multiple-valued Plateau problem");
    int pl_level = 4;
    std::string pl_problem, pl_builtin, pl_out = ".", pl_write;
    PlateauOptions pl_opts;
    cmd_pl->add_option("--level", pl_level, "mesh level");
    cmd_pl->add_option("--problem", pl_problem, "problem JSON (curves, multiplicities, ...)");
    cmd_pl->add_option("--builtin", pl_builtin, "builtin problem: circle-r1 | circle-r2 | variety");
    cmd_pl->add_option("--out-dir", pl_out, "output directory");
    cmd_pl->add_option("--write-problem", pl_write, "export the problem JSON and exit");
    cmd_pl->add_option("--seed", pl_opts.inner.seed, "random seed");
    cmd_pl->add_option("--restarts", pl_opts.inner.restarts, "inner restarts for the first solve");
    cmd_pl->add_option("--param-iters", pl_opts.max_param_iters, "outer parameter iterations");
    cmd_pl->add_flag("--fd-gradient", pl_opts.use_fd_gradient,
                     "finite-difference parameter gradients");

    // verify
    auto* cmd_ver = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    int ver_level = 0;
    std::string ver_out = ".";
    std::uint64_t ver_seed = 0;
    cmd_ver->add_option("suite", suite,
                        "sqrt-variety | degeneracy | mass-formula | metric-oracle | "
                        "conformal-invariance")
        ->required();
    cmd_ver->add_option("--level", ver_level, "mesh level override");
    cmd_ver->add_option("--out-dir", ver_out, "output directory");
    cmd_ver->add_option("--seed", ver_seed, "random seed");

    // analyze
    auto* cmd_an = app.add_subcommand("analyze", "branch/conformality reports for a field file");
    std::string an_field, an_out = ".";
    bool an_csv = false;
    double an_band = 0.9, an_alpha = 0.5;
    cmd_an->add_option("--field", an_field, "qpfield file")->required();
    cmd_an->add_option("--out-dir", an_out, "output directory");
    cmd_an->add_flag("--csv", an_csv, "also emit per-triangle residual CSV");
    cmd_an->add_option("--band", an_band, "annulus inner radius for decomposition");
    cmd_an->add_option("--alpha", an_alpha, "separation parameter for decomposition");

    CLI11_PARSE(app, argc, argv);
    thread_override() = threads;

    try {
        if (*cmd_mesh) {
            auto mesh = build_disk_mesh(mesh_level);
            std::ofstream os(mesh_out, std::ios::binary);
            if (!os) throw std::invalid_argument("cannot open " + mesh_out);
            save_mesh(mesh, os);
            return 0;
        }

        if (*cmd_dir) {
            std::filesystem::create_directories(dir_out);
            auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(dir_level));
            std::vector<QValue> boundary;
            json config{{"level", dir_level}, {"options", solve_options_json(dir_opts)}};
            if (!dir_problem.empty()) {
                std::ifstream is(dir_problem);
                if (!is) throw std::invalid_argument("cannot open " + dir_problem);
                json pj = json::parse(is);
                boundary = boundary_from_json(pj, *mesh);
                config["problem"] = dir_problem;
            } else {
                boundary = builtin_boundary(dir_boundary, *mesh);
                config["boundary"] = dir_boundary;
            }
            auto [field, rep] = solve_dirichlet(mesh, boundary, dir_opts);
            {
                std::ofstream os(dir_out + "/field.qpfield", std::ios::binary);
                save_field(field, os);
            }
            json out = report_envelope("dirichlet", dir_opts.seed, dir_level, config);
            out["report"] = report_json(rep);
            out["dirichlet_energy"] = rep.final_energy;
            out["mv_area"] = mv_area(field);
            dump_json(out, dir_out + "/report.json");
            return 0;
        }

        if (*cmd_pl) {
            std::filesystem::create_directories(pl_out);
            auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(pl_level));
            BoundaryProblem problem;
            json config{{"level", pl_level},
                        {"options", solve_options_json(pl_opts.inner)},
                        {"param_iters", pl_opts.max_param_iters}};
            if (!pl_problem.empty()) {
                std::ifstream is(pl_problem);
                if (!is) throw std::invalid_argument("cannot open " + pl_problem);
                problem = problem_from_json(json::parse(is));
                config["problem"] = pl_problem;
            } else if (!pl_builtin.empty()) {
                problem = builtin_problem(pl_builtin, *mesh);
                config["builtin"] = pl_builtin;
            } else {
                throw CLI::ValidationError("plateau", "need --problem or --builtin");
            }
            if (!pl_write.empty()) {
                dump_json(problem_to_json(problem), pl_write);
                return 0;
            }
            auto result = solve_plateau(problem, mesh, pl_opts);
            {
                std::ofstream os(pl_out + "/field.qpfield", std::ios::binary);
                save_field(result.field, os);
            }
            dump_json(problem_to_json(result.problem), pl_out + "/params.json");
            json out = report_envelope("plateau", pl_opts.inner.seed, pl_level, config);
            out["report"] = report_json(result.report);
            out["dirichlet_energy"] = result.report.final_energy;
            out["mv_area"] = mv_area(result.field);
            out["wrapped"] = json::array();
            for (const auto& w : result.wrapped)
                out["wrapped"].push_back(json{{"curve", w.curve},
                                              {"longest_const_arc", w.longest_const_arc},
                                              {"threshold", w.threshold},
                                              {"passes", w.passes}});
            out["homeo"] = json::array();
            for (const auto& h : result.homeo)
                out["homeo"].push_back(json{
                    {"curve", h.curve}, {"ok", h.ok}, {"min_increment", h.min_increment}});
            dump_json(out, pl_out + "/report.json");
            return 0;
        }

        if (*cmd_ver) {
            std::filesystem::create_directories(ver_out);
            json result;
            int level = ver_level;
            if (suite == "metric-oracle") {
                result = verify_metric_oracle();
            } else if (suite == "sqrt-variety") {
                if (level == 0) level = 5;
                result = verify_sqrt_variety(level, ver_out);
            } else if (suite == "degeneracy") {
                if (level == 0) level = 4;
                result = verify_degeneracy(level);
            } else if (suite == "mass-formula") {
                if (level == 0) level = 4;
                result = verify_mass_formula(level);
            } else if (suite == "conformal-invariance") {
                if (level == 0) level = 5;
                result = verify_conformal_invariance(level, ver_seed);
            } else {
                throw CLI::ValidationError("verify", "unknown suite '" + suite + "'");
            }
            json out = report_envelope("verify " + suite, ver_seed, level,
                                       json{{"suite", suite}, {"level", level}});
            out["result"] = result;
            dump_json(out, ver_out + "/" + suite + "-verdict.json");
            return result.at("pass").get<bool>() ? 0 : 1;
        }

        if (*cmd_an) {
            std::filesystem::create_directories(an_out);
            std::ifstream is(an_field);
            if (!is) throw std::invalid_argument("cannot open " + an_field);
            auto field = load_field(is);
            json out = report_envelope("analyze", 0, field.mesh->level,
                                       json{{"field", an_field}, {"band", an_band},
                                            {"alpha", an_alpha}});
            auto br = detect_branches(field);
            out["branches"] = branch_report_json(br, *field.mesh);
            auto conf = conformality_residual(field);
            out["conformality"] = json{{"aggregate", conf.aggregate},
                                       {"normalized", conf.normalized}};
            json dec_j;
            try {
                auto dec = decompose_graph(field, annulus_band(*field.mesh, an_band), an_alpha);
                dec_j["ok"] = dec.ok;
                dec_j["failure"] = dec.failure;
                dec_j["gap"] = dec.ok ? dec.gap : 0.0;
                json comps = json::array();
                for (const auto& c : dec.components) comps.push_back(c.multiplicity);
                dec_j["multiplicities"] = comps;
            } catch (const std::invalid_argument& e) {
                dec_j["ok"] = false;
                dec_j["failure"] = e.what();
            }
            out["band_decomposition"] = dec_j;
            if (an_csv) {
                std::vector<double> idx(conf.per_triangle.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
                write_text_file(an_out + "/conformality.csv",
                                csv_table({"triangle", "residual"}, {idx, conf.per_triangle}));
            }
            dump_json(out, an_out + "/analysis.json");
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
