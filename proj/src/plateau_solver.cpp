#include "qplateau/plateau_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qplateau/examples_lab.hpp"

namespace qp {

namespace {

constexpr double kPi = std::numbers::pi;

double seg_seg_distance(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1) {
    // coarse but adequate: sample-based lower envelope over both segments
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4; ++i) {
        const Vec p = a0 + (a1 - a0) * (i / 4.0);
        for (int j = 0; j <= 4; ++j)
            best = std::min(best, (p - (b0 + (b1 - b0) * (j / 4.0))).norm());
    }
    return best;
}

bool segments_cross_2d(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1) {
    auto orient = [](const Vec& p, const Vec& q, const Vec& r) {
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    const double d1 = orient(b0, b1, a0), d2 = orient(b0, b1, a1);
    const double d3 = orient(a0, a1, b0), d4 = orient(a0, a1, b1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

void JordanCurve::finalize() {
    const int m = static_cast<int>(samples.size());
    if (m < 3) throw std::invalid_argument("JordanCurve: need at least 3 samples");
    if (lnr_radius <= 0) throw std::invalid_argument("JordanCurve: lnr_radius must be positive");
    for (const auto& p : samples)
        if (static_cast<int>(p.size()) != dim())
            throw std::invalid_argument("JordanCurve: inconsistent sample dimensions");
    cum_len.assign(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        const double seg = (samples[(i + 1) % m] - samples[i]).norm();
        if (seg <= 0) throw std::invalid_argument("JordanCurve: repeated consecutive samples");
        cum_len[i + 1] = cum_len[i] + seg;
    }
    total_len = cum_len[m];
    // simplicity: non-adjacent segments must not cross (planar case) nor touch
    for (int i = 0; i < m; ++i)
        for (int j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;  // adjacent around the wrap
            const Vec &a0 = samples[i], &a1 = samples[(i + 1) % m];
            const Vec &b0 = samples[j], &b1 = samples[(j + 1) % m];
            if (dim() == 2 && segments_cross_2d(a0, a1, b0, b1))
                throw std::invalid_argument("JordanCurve: polyline self-intersects");
            if (dim() > 2 && seg_seg_distance(a0, a1, b0, b1) < 1e-12)
                throw std::invalid_argument("JordanCurve: polyline self-intersects");
        }
}

Vec JordanCurve::point_at_tau(double tau) const {
    double u = std::fmod(tau, 2.0 * kPi);
    if (u < 0) u += 2.0 * kPi;
    const double s = u / (2.0 * kPi) * total_len;
    const int m = static_cast<int>(samples.size());
    auto it = std::upper_bound(cum_len.begin(), cum_len.end(), s);
    int seg = std::clamp(static_cast<int>(it - cum_len.begin()) - 1, 0, m - 1);
    const double t = (s - cum_len[seg]) / (cum_len[seg + 1] - cum_len[seg]);
    return samples[seg] + t * (samples[(seg + 1) % m] - samples[seg]);
}

Vec JordanCurve::tangent_at_tau(double tau) const {
    double u = std::fmod(tau, 2.0 * kPi);
    if (u < 0) u += 2.0 * kPi;
    const double s = u / (2.0 * kPi) * total_len;
    const int m = static_cast<int>(samples.size());
    auto it = std::upper_bound(cum_len.begin(), cum_len.end(), s);
    int seg = std::clamp(static_cast<int>(it - cum_len.begin()) - 1, 0, m - 1);
    const Vec d = samples[(seg + 1) % m] - samples[seg];
    return d / d.norm() * (total_len / (2.0 * kPi));
}

Vec JordanCurve::project(const Vec& p, double* dist) const {
    const int m = static_cast<int>(samples.size());
    double best = std::numeric_limits<double>::infinity();
    Vec arg = samples[0];
    for (int i = 0; i < m; ++i) {
        const Vec& a = samples[i];
        const Vec d = samples[(i + 1) % m] - a;
        const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        const Vec cand = a + t * d;
        const double dd = (p - cand).norm();
        if (dd < best) {
            best = dd;
            arg = cand;
        }
    }
    if (dist) *dist = best;
    return arg;
}

MonotoneParam MonotoneParam::uniform(int grid_size) {
    MonotoneParam p;
    p.increments.resize(grid_size);
    for (int l = 0; l < grid_size; ++l)
        p.increments[l] = 2.0 * kPi * (l + 1) / grid_size - 2.0 * kPi * l / grid_size;
    return p;
}

double MonotoneParam::tau_at(int grid_index) const {
    double tau = offset;
    for (int m = 0; m < grid_index; ++m) tau += increments[m];
    return tau;
}

void MonotoneParam::validate(double tol) const {
    double sum = 0.0;
    for (double inc : increments) {
        if (inc < -1e-12) throw std::invalid_argument("MonotoneParam: negative increment");
        sum += inc;
    }
    if (std::abs(sum - 2.0 * kPi) > tol)
        throw std::invalid_argument("MonotoneParam: increments must sum to 2 pi");
}

int BoundaryProblem::total_q() const {
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

void BoundaryProblem::validate() const {
    if (curves.empty() || curves.size() != multiplicities.size())
        throw std::invalid_argument("BoundaryProblem: need one multiplicity per curve");
    for (int k : multiplicities)
        if (k <= 0) throw std::invalid_argument("BoundaryProblem: multiplicities must be positive");
    const int n = curves[0].dim();
    double max_lnr = 0.0;
    for (const auto& c : curves) {
        if (c.dim() != n)
            throw std::invalid_argument("BoundaryProblem: curves must share the ambient dimension");
        if (c.total_len <= 0)
            throw std::invalid_argument("BoundaryProblem: curves must be finalized");
        max_lnr = std::max(max_lnr, c.lnr_radius);
    }
    for (std::size_t i = 0; i < curves.size(); ++i)
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : curves[i].samples) {
                double d;
                curves[j].project(p, &d);
                best = std::min(best, d);
            }
            if (best <= 2.0 * max_lnr)
                throw std::invalid_argument(
                    "BoundaryProblem: curves must stay farther apart than twice the retract radius");
        }
    if (!params.empty() && params.size() != curves.size())
        throw std::invalid_argument("BoundaryProblem: need one MonotoneParam per curve");
}

std::vector<QValue> boundary_trace(const BoundaryProblem& problem, const DiskMesh& mesh) {
    problem.validate();
    if (problem.params.empty())
        throw std::invalid_argument("boundary_trace: problem has no parameterizations");
    const int B = mesh.boundary_count();
    const int K = static_cast<int>(problem.curves.size());
    for (int i = 0; i < K; ++i) {
        if (problem.params[i].grid_size() != B * problem.multiplicities[i])
            throw std::invalid_argument("boundary_trace: parameter grid must have B * k_i points");
        problem.params[i].validate();
    }
    std::vector<QValue> trace(B);
    for (int i = 0; i < K; ++i) {
        const int k = problem.multiplicities[i];
        const int Bi = B * k;
        // prefix sums once per curve
        std::vector<double> tau(Bi);
        double acc = problem.params[i].offset;
        for (int l = 0; l < Bi; ++l) {
            tau[l] = acc;
            acc += problem.params[i].increments[l];
        }
        for (int j = 0; j < B; ++j)
            for (int m = 0; m < k; ++m)
                trace[j].points.push_back(problem.curves[i].point_at_tau(tau[j + m * B]));
    }
    return trace;
}

std::vector<double> project_simplex(std::vector<double> x, double target) {
    if (target < 0) throw std::invalid_argument("project_simplex: negative target");
    std::vector<double> sorted = x;
    std::sort(sorted.rbegin(), sorted.rend());
    double prefix = 0.0, lambda = 0.0;
    int k = 0;
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) {
        prefix += sorted[i];
        const double cand = (prefix - target) / (i + 1);
        if (sorted[i] - cand > 0) {
            lambda = cand;
            k = i + 1;
        }
    }
    if (k == 0) lambda = (prefix - target) / sorted.size();
    for (auto& v : x) v = std::max(0.0, v - lambda);
    return x;
}

namespace {

struct ParamBlocks {
    // cyclic [begin, end) index blocks with fixed increment sums
    std::vector<std::pair<int, int>> blocks;
    std::vector<double> targets;
    bool offset_free = true;
};

ParamBlocks make_blocks(const MonotoneParam& p, const std::vector<int>& pins) {
    ParamBlocks out;
    const int B = p.grid_size();
    if (pins.empty()) {
        out.blocks.emplace_back(0, B);
        out.targets.push_back(2.0 * kPi);
        out.offset_free = true;
        return out;
    }
    std::vector<int> sorted = pins;
    std::sort(sorted.begin(), sorted.end());
    out.offset_free = false;  // pinned tau values anchor the phase
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const int a = sorted[i];
        const int b = (i + 1 < sorted.size()) ? sorted[i + 1] : sorted[0] + B;
        double sum = 0.0;
        for (int l = a; l < b; ++l) sum += p.increments[l % B];
        out.blocks.emplace_back(a, b);
        out.targets.push_back(sum);
    }
    return out;
}

void project_param(MonotoneParam& p, const ParamBlocks& blocks) {
    const int B = p.grid_size();
    for (std::size_t bi = 0; bi < blocks.blocks.size(); ++bi) {
        const auto [a, b] = blocks.blocks[bi];
        std::vector<double> x;
        x.reserve(b - a);
        for (int l = a; l < b; ++l) x.push_back(p.increments[l % B]);
        x = project_simplex(std::move(x), blocks.targets[bi]);
        for (int l = a; l < b; ++l) p.increments[l % B] = x[l - a];
    }
}

// dE / d(boundary slot value) at the inner optimum: the residual of the
// frozen-alignment quadratic form at the boundary slots.
std::vector<std::vector<Vec>> boundary_value_gradient(const QField& field) {
    const DiskMesh& mesh = *field.mesh;
    std::vector<std::vector<Vec>> grad(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.on_boundary[v]) grad[v].assign(field.q, Vec::Zero(field.n));

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto sheets = sheet_selection(field, t);
        const auto& tri = mesh.triangles[t];
        // 0.5 cot(angle at corner c) couples the two other corners
        for (int c = 0; c < 3; ++c) {
            const int a = (c + 1) % 3, b = (c + 2) % 3;
            const int va = tri[a], vb = tri[b];
            Vec2 u = mesh.vertices[va] - mesh.vertices[tri[c]];
            Vec2 w2 = mesh.vertices[vb] - mesh.vertices[tri[c]];
            const double cross = u.x() * w2.y() - u.y() * w2.x();
            const double w = 0.5 * u.dot(w2) / std::abs(cross);
            for (int s = 0; s < field.q; ++s) {
                const Vec& pa = field.values[va].points[sheets.slots[s][a]];
                const Vec& pb = field.values[vb].points[sheets.slots[s][b]];
                if (mesh.on_boundary[va])
                    grad[va][sheets.slots[s][a]] += 2.0 * w * (pa - pb);
                if (mesh.on_boundary[vb])
                    grad[vb][sheets.slots[s][b]] += 2.0 * w * (pb - pa);
            }
        }
    }
    return grad;
}

double gradient_norm(const ParamGradient& g) {
    double s = g.d_offset * g.d_offset;
    for (double v : g.d_inc) s += v * v;
    return std::sqrt(s);
}

}  // namespace

// Chain rule through the trace: boundary slot (vertex j, curve i, wrap m)
// moves along the curve tangent at tau(j + m B); tau(l) depends on
// increments below l and on the offset.
std::vector<ParamGradient> boundary_param_gradient(const QField& field,
                                                   const BoundaryProblem& problem) {
    const DiskMesh& mesh = *field.mesh;
    const int B = mesh.boundary_count();
    const int K = static_cast<int>(problem.curves.size());
    const auto val_grad = boundary_value_gradient(field);

    std::vector<ParamGradient> out(K);
    int slot0 = 0;
    for (int i = 0; i < K; ++i) {
        const int k = problem.multiplicities[i];
        const int Bi = B * k;
        std::vector<double> g_tau(Bi, 0.0);
        std::vector<double> tau(Bi);
        double acc = problem.params[i].offset;
        for (int l = 0; l < Bi; ++l) {
            tau[l] = acc;
            acc += problem.params[i].increments[l];
        }
        for (int j = 0; j < B; ++j) {
            const int v = mesh.boundary_loop[j];
            for (int m = 0; m < k; ++m) {
                const int l = j + m * B;
                const Vec tang = problem.curves[i].tangent_at_tau(tau[l]);
                g_tau[l] = val_grad[v][slot0 + m].dot(tang);
            }
        }
        // tau(l) = offset + sum_{m < l} inc[m]
        out[i].d_inc.assign(Bi, 0.0);
        double suffix = 0.0;
        for (int l = Bi - 1; l >= 1; --l) {
            suffix += g_tau[l];
            out[i].d_inc[l - 1] = suffix;
        }
        out[i].d_offset = suffix + g_tau[0];
        slot0 += k;
    }
    return out;
}

std::vector<WrappedVerdict> wrapped_check(const BoundaryProblem& problem, double tol) {
    std::vector<WrappedVerdict> out;
    const int K = static_cast<int>(problem.curves.size());
    for (int i = 0; i < K; ++i) {
        const int Bi = problem.params[i].grid_size();
        const double step = 2.0 * kPi / Bi;
        std::vector<Vec> image(Bi);
        double acc = problem.params[i].offset;
        for (int l = 0; l < Bi; ++l) {
            image[l] = problem.curves[i].point_at_tau(acc);
            acc += problem.params[i].increments[l];
        }
        double longest = 0.0;
        for (int start = 0; start < Bi; ++start) {
            int len = 0;
            while (len < Bi && (image[(start + len) % Bi] - image[start]).norm() <= tol) ++len;
            longest = std::max(longest, (len - 1) * step);
        }
        WrappedVerdict v;
        v.curve = i;
        v.longest_const_arc = longest;
        v.threshold = 2.0 * kPi / problem.multiplicities[i];
        v.passes = longest < v.threshold;
        out.push_back(v);
    }
    return out;
}

std::vector<HomeoVerdict> boundary_homeo_check(const BoundaryProblem& problem, double tol) {
    std::vector<HomeoVerdict> out;
    for (std::size_t i = 0; i < problem.curves.size(); ++i) {
        HomeoVerdict v;
        v.curve = static_cast<int>(i);
        const auto& inc = problem.params[i].increments;
        v.min_increment = *std::min_element(inc.begin(), inc.end());
        double sum = std::accumulate(inc.begin(), inc.end(), 0.0);
        v.ok = v.min_increment >= tol / inc.size() && std::abs(sum - 2.0 * kPi) <= 1e-9;
        out.push_back(v);
    }
    return out;
}

PlateauResult solve_plateau(const BoundaryProblem& problem_in,
                            std::shared_ptr<const DiskMesh> mesh, const PlateauOptions& opts) {
    BoundaryProblem problem = problem_in;
    problem.validate();
    const int B = mesh->boundary_count();
    const int K = static_cast<int>(problem.curves.size());
    if (problem.params.empty()) {
        for (int i = 0; i < K; ++i)
            problem.params.push_back(MonotoneParam::uniform(B * problem.multiplicities[i]));
    }
    if (problem.pins.empty()) problem.pins.resize(K);
    for (int i = 0; i < K; ++i) {
        const bool wants_default = problem.pins[i].empty() && (i == 0 || opts.pin_all_curves);
        if (wants_default) {
            const int Bi = B * problem.multiplicities[i];
            problem.pins[i] = {0, Bi / 3, 2 * Bi / 3};
        }
    }
    std::vector<ParamBlocks> blocks;
    for (int i = 0; i < K; ++i) blocks.push_back(make_blocks(problem.params[i], problem.pins[i]));

    auto [field, inner_rep] = solve_dirichlet(mesh, boundary_trace(problem, *mesh), opts.inner);
    double energy = inner_rep.final_energy;

    SolveOptions probe_opts = opts.inner;
    probe_opts.restarts = 1;

    SolveReport rep;
    rep.restart_index = inner_rep.restart_index;
    rep.energy_history.push_back(energy);

    double step = opts.step0;
    bool converged = false;
    for (int outer = 1; outer <= opts.max_param_iters; ++outer) {
        const double energy_before = energy;

        for (int i = 0; i < K; ++i) {
            ParamGradient grad;
            if (opts.use_fd_gradient) {
                // forward differences on each increment (and the offset)
                const int Bi = problem.params[i].grid_size();
                grad.d_inc.assign(Bi, 0.0);
                auto probe_energy = [&](const MonotoneParam& cand) {
                    BoundaryProblem tmp = problem;
                    tmp.params[i] = cand;
                    auto [f2, r2] =
                        solve_dirichlet_warm(mesh, boundary_trace(tmp, *mesh), probe_opts, field);
                    return r2.final_energy;
                };
                for (int l = 0; l < Bi; ++l) {
                    MonotoneParam cand = problem.params[i];
                    cand.increments[l] += opts.fd_step;
                    project_param(cand, blocks[i]);
                    grad.d_inc[l] = (probe_energy(cand) - energy) / opts.fd_step;
                }
                if (blocks[i].offset_free) {
                    MonotoneParam cand = problem.params[i];
                    cand.offset += opts.fd_step;
                    grad.d_offset = (probe_energy(cand) - energy) / opts.fd_step;
                }
            } else {
                grad = boundary_param_gradient(field, problem)[i];
                if (!blocks[i].offset_free) grad.d_offset = 0.0;
            }
            const double gnorm = gradient_norm(grad);
            if (gnorm < 1e-14 * std::max(1.0, energy)) continue;

            // projected backtracking step along -grad
            const double scale = step * (2.0 * kPi / problem.params[i].grid_size()) / gnorm;
            bool accepted = false;
            double alpha = scale;
            for (int tries = 0; tries < 8 && !accepted; ++tries, alpha *= 0.25) {
                MonotoneParam cand = problem.params[i];
                for (int l = 0; l < cand.grid_size(); ++l)
                    cand.increments[l] -= alpha * grad.d_inc[l];
                if (blocks[i].offset_free) cand.offset -= alpha * grad.d_offset;
                project_param(cand, blocks[i]);
                BoundaryProblem tmp = problem;
                tmp.params[i] = cand;
                auto [f2, r2] =
                    solve_dirichlet_warm(mesh, boundary_trace(tmp, *mesh), probe_opts, field);
                if (r2.final_energy < energy - 1e-14 * std::max(1.0, energy)) {
                    problem.params[i] = std::move(cand);
                    field = std::move(f2);
                    energy = r2.final_energy;
                    accepted = true;
                }
            }
            if (accepted) continue;

            // derivative-free fallback: golden section on the steepest coordinate
            int lmax = 0;
            for (int l = 1; l < static_cast<int>(grad.d_inc.size()); ++l)
                if (std::abs(grad.d_inc[l]) > std::abs(grad.d_inc[lmax])) lmax = l;
            const double range = 2.0 * kPi / problem.params[i].grid_size();
            auto eval_at = [&](double t, MonotoneParam* keep) {
                MonotoneParam cand = problem.params[i];
                cand.increments[lmax] = std::max(0.0, cand.increments[lmax] + t);
                project_param(cand, blocks[i]);
                BoundaryProblem tmp = problem;
                tmp.params[i] = cand;
                auto [f2, r2] =
                    solve_dirichlet_warm(mesh, boundary_trace(tmp, *mesh), probe_opts, field);
                if (keep) *keep = std::move(cand);
                return r2.final_energy;
            };
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double lo = -range, hi = range;
            double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
            double e1 = eval_at(c1, nullptr), e2 = eval_at(c2, nullptr);
            for (int it = 0; it < 6; ++it) {
                if (e1 < e2) {
                    hi = c2;
                    c2 = c1;
                    e2 = e1;
                    c1 = hi - gr * (hi - lo);
                    e1 = eval_at(c1, nullptr);
                } else {
                    lo = c1;
                    c1 = c2;
                    e1 = e2;
                    c2 = lo + gr * (hi - lo);
                    e2 = eval_at(c2, nullptr);
                }
            }
            const double tbest = e1 < e2 ? c1 : c2;
            MonotoneParam cand;
            const double ebest = eval_at(tbest, &cand);
            if (ebest < energy - 1e-14 * std::max(1.0, energy)) {
                problem.params[i] = std::move(cand);
                auto [f2, r2] =
                    solve_dirichlet_warm(mesh, boundary_trace(problem, *mesh), probe_opts, field);
                field = std::move(f2);
                energy = r2.final_energy;
            }
        }

        rep.energy_history.push_back(energy);
        rep.iterations = outer;
        const double drop = energy_before - energy;
        if (drop <= opts.param_tol * std::max(energy, 1e-300)) {
            converged = true;
            break;
        }
    }
    rep.final_energy = energy;
    rep.converged = converged;

    PlateauResult result{std::move(field), std::move(problem), std::move(rep), {}, {}};
    const double wrap_tol = 1e-6 * result.problem.curves[0].total_len;
    result.wrapped = wrapped_check(result.problem, std::max(wrap_tol, 1e-9));
    result.homeo = boundary_homeo_check(result.problem, 1e-6);
    return result;
}

PlateauResult solve_plateau(const BoundaryProblem& problem, std::shared_ptr<const DiskMesh> mesh,
                            const SolveOptions& inner) {
    PlateauOptions opts;
    opts.inner = inner;
    return solve_plateau(problem, std::move(mesh), opts);
}

JordanCurve make_circle_curve(double radius, int samples, int dim, const Vec* center) {
    JordanCurve c;
    c.lnr_radius = 0.25 * radius;
    for (int i = 0; i < samples; ++i) {
        const double a = 2.0 * kPi * i / samples;
        Vec p = Vec::Zero(dim);
        p[0] = radius * std::cos(a);
        p[1] = radius * std::sin(a);
        if (center) p += *center;
        c.samples.push_back(std::move(p));
    }
    c.finalize();
    return c;
}

BoundaryProblem make_circle_problem(double radius, const DiskMesh& mesh, int curve_samples) {
    if (curve_samples <= 0) curve_samples = 4 * mesh.boundary_count();
    BoundaryProblem p;
    p.curves.push_back(make_circle_curve(radius, curve_samples));
    p.multiplicities = {1};
    return p;
}

BoundaryProblem make_variety_problem(const DiskMesh& mesh, int curve_samples) {
    if (curve_samples <= 0) curve_samples = 4 * mesh.boundary_count();
    BoundaryProblem p;
    for (int comp = 0; comp < 2; ++comp) {
        JordanCurve c;
        c.lnr_radius = 0.2;
        for (int i = 0; i < curve_samples; ++i) {
            const double theta = 2.0 * kPi * i / curve_samples;
            const auto g = glued_boundary_selection(theta);
            const Vec2 w = comp == 0 ? g.first : g.second;
            Vec pt(4);
            pt << std::cos(theta), std::sin(theta), w.x(), w.y();
            c.samples.push_back(std::move(pt));
        }
        c.finalize();
        p.curves.push_back(std::move(c));
    }
    p.multiplicities = {1, 1};
    return p;
}

}  // namespace qp
