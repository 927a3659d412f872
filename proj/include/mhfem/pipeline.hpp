#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mhfem/assembly.hpp"
#include "mhfem/flux.hpp"
#include "mhfem/fourier.hpp"
#include "mhfem/linalg.hpp"
#include "mhfem/majorant.hpp"
#include "mhfem/mesh.hpp"

namespace mhfem {

// ---------------------------------------------------------------------------
// Named spatial/time factors. Custom problems pick factors from this registry
// instead of parsing expressions.
// ---------------------------------------------------------------------------

struct SpatialFactorDef {
    SpatialFn value;
    SpatialGrad gradient;  // empty when the factor never describes a solution
};

inline const std::map<std::string, SpatialFactorDef>& spatial_registry() {
    static const std::map<std::string, SpatialFactorDef> registry = [] {
        std::map<std::string, SpatialFactorDef> r;
        r["one"] = {[](Vec2) { return 1.0; }, [](Vec2) { return Vec2{0.0, 0.0}; }};
        r["bubble"] = {[](Vec2 p) { return p.x * (1.0 - p.x) * p.y * (1.0 - p.y); },
                       [](Vec2 p) {
                           return Vec2{(1.0 - 2.0 * p.x) * p.y * (1.0 - p.y),
                                       p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y)};
                       }};
        // -laplace(bubble); the natural forcing partner of "bubble"
        r["bubble_forcing"] = {[](Vec2 p) { return 2.0 * (p.x * (1.0 - p.x) + p.y * (1.0 - p.y)); },
                               [](Vec2 p) {
                                   return Vec2{2.0 * (1.0 - 2.0 * p.x), 2.0 * (1.0 - 2.0 * p.y)};
                               }};
        const double pi = 3.14159265358979323846;
        r["sine"] = {[pi](Vec2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); },
                     [pi](Vec2 p) {
                         return Vec2{pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                                     pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
                     }};
        return r;
    }();
    return registry;
}

/// Time factors; "cos"/"sin" take the harmonic index k, the exp_* factors are
/// the closed forms of the second numerical example.
inline std::function<double(double)> make_time_factor(const std::string& name, int k, double omega) {
    if (name == "one") return [](double) { return 1.0; };
    if (name == "cos") return [k, omega](double t) { return std::cos(k * omega * t); };
    if (name == "sin") return [k, omega](double t) { return std::sin(k * omega * t); };
    if (name == "exp_sin3") {
        return [](double t) {
            const double s = std::sin(t);
            return std::exp(t) * s * s * s;
        };
    }
    if (name == "exp_sin3_forcing") {
        const double pi = 3.14159265358979323846;
        return [pi](double t) {
            const double s = std::sin(t);
            return std::exp(t) * s * s * ((1.0 + 2.0 * pi * pi) * s + 3.0 * std::cos(t));
        };
    }
    throw std::invalid_argument("unknown time factor: " + name);
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct TermConfig {
    std::string spatial;
    std::string time;
    int k = 1;           // harmonic index for cos/sin factors
    double scale = 1.0;  // multiplies the spatial factor
};

struct RunConfig {
    enum class Problem { example1, example2, custom };
    Problem problem = Problem::custom;
    std::string problem_name = "custom";
    std::vector<int> levels{9, 27, 81};
    int truncation = 0;  // N
    double omega = 1.0;
    double sigma = 1.0;
    double nu = 1.0;
    double rel_tol = 1e-6;
    int max_iterations = 500;
    int time_samples = 1 << 14;
    int tail_modes = 1024;  // harmonic horizon for the exact-solution tail
    std::string out = "-";
    std::string format = "table";
    std::vector<TermConfig> source_terms;
    std::vector<TermConfig> exact_terms;

    void validate() const {
        if (levels.empty()) throw std::invalid_argument("levels: at least one level required");
        int prev = 0;
        for (int n : levels) {
            if (n < 1) throw std::invalid_argument("levels: entries must be positive");
            if (n <= prev) throw std::invalid_argument("levels: entries must be ascending");
            prev = n;
        }
        if (truncation < 0) throw std::invalid_argument("N: must be >= 0");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("tol: must lie in (0,1)");
        if (sigma <= 0.0 || nu <= 0.0) throw std::invalid_argument("sigma/nu: must be positive");
        if (omega <= 0.0) throw std::invalid_argument("omega: must be positive");
        if (format != "csv" && format != "table") throw std::invalid_argument("format: csv or table");
        for (const auto& t : source_terms) {
            if (spatial_registry().find(t.spatial) == spatial_registry().end()) {
                throw std::invalid_argument("source spatial factor unknown: " + t.spatial);
            }
            make_time_factor(t.time, t.k, omega);
        }
        for (const auto& t : exact_terms) {
            if (spatial_registry().find(t.spatial) == spatial_registry().end()) {
                throw std::invalid_argument("exact spatial factor unknown: " + t.spatial);
            }
            make_time_factor(t.time, t.k, omega);
        }
    }
};

inline RunConfig example1_config(std::vector<int> levels = {9, 27, 81, 243}) {
    RunConfig cfg;
    cfg.problem = RunConfig::Problem::example1;
    cfg.problem_name = "example1";
    cfg.levels = std::move(levels);
    cfg.truncation = 1;
    cfg.source_terms = {{"bubble_forcing", "cos", 1, 1.0}, {"bubble", "sin", 1, -1.0}};
    cfg.exact_terms = {{"bubble", "cos", 1, 1.0}};
    return cfg;
}

inline RunConfig example2_config(std::vector<int> levels = {9, 27, 81, 243}, int truncation = 8) {
    RunConfig cfg;
    cfg.problem = RunConfig::Problem::example2;
    cfg.problem_name = "example2";
    cfg.levels = std::move(levels);
    cfg.truncation = truncation;
    cfg.source_terms = {{"sine", "exp_sin3_forcing", 1, 1.0}};
    cfg.exact_terms = {{"sine", "exp_sin3", 1, 1.0}};
    return cfg;
}

inline SeparableSource build_source(const std::vector<TermConfig>& terms, double omega) {
    SeparableSource src;
    for (const auto& tc : terms) {
        const auto& def = spatial_registry().at(tc.spatial);
        const double scale = tc.scale;
        SeparableTerm term;
        term.spatial = [scale, value = def.value](Vec2 x) { return scale * value(x); };
        term.spatial_gradient = [scale, grad = def.gradient](Vec2 x) { return scale * grad(x); };
        term.time = make_time_factor(tc.time, tc.k, omega);
        src.terms.push_back(std::move(term));
    }
    return src;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

struct RunOutcome {
    MajorantReport report;
    bool solver_failure = false;
    std::string failure_detail;
};

namespace detail {

struct ModeSolution {
    CoefficientPair eta;
    std::vector<Vec2> grad_c;
    std::vector<Vec2> grad_s;
    RT0FluxField tau_c;
    RT0FluxField tau_s;
    int iterations = 0;
    double seconds = 0.0;
    bool converged = true;
};

inline ExactModePair exact_mode_pair(const SeparableSource& exact, int k,
                                     const std::vector<TimeCoefficients>& coeffs) {
    ExactModePair pair;
    pair.value_c = [&exact, k, &coeffs](Vec2 x) { return exact.mode_value(x, k, true, coeffs); };
    pair.grad_c = [&exact, k, &coeffs](Vec2 x) { return exact.mode_gradient(x, k, true, coeffs); };
    pair.value_s = [&exact, k, &coeffs](Vec2 x) { return exact.mode_value(x, k, false, coeffs); };
    pair.grad_s = [&exact, k, &coeffs](Vec2 x) { return exact.mode_gradient(x, k, false, coeffs); };
    return pair;
}

}  // namespace detail

class ProblemRunner {
public:
    explicit ProblemRunner(RunConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        source_ = build_source(cfg_.source_terms, cfg_.omega);
        if (!cfg_.exact_terms.empty()) exact_ = build_source(cfg_.exact_terms, cfg_.omega);
        sigma_ = CoefficientField::constant(cfg_.sigma);
        nu_ = CoefficientField::constant(cfg_.nu);
        const int horizon = std::max(cfg_.truncation, 1);
        for (const auto& term : source_.terms) {
            source_coeffs_.push_back(
                time_fourier_coefficients(term.time, cfg_.omega, horizon, cfg_.time_samples));
        }
        if (exact_) {
            const int tail_horizon = std::max(cfg_.tail_modes, cfg_.truncation);
            const int samples = std::max(cfg_.time_samples, 4 * tail_horizon);
            for (const auto& term : exact_->terms) {
                exact_coeffs_.push_back(
                    time_fourier_coefficients(term.time, cfg_.omega, tail_horizon, samples));
            }
        }
    }

    const RunConfig& config() const { return cfg_; }

    RunOutcome run() {
        RunOutcome out;
        for (int level : cfg_.levels) {
            if (!run_level(level, out)) break;
        }
        return out;
    }

private:
    using Clock = std::chrono::steady_clock;

    bool run_level(int n, RunOutcome& out) {
        const QuadratureRule rule = QuadratureRule::seven_point();
        const Mesh mesh(n);
        const DirichletMap dmap(mesh);
        const SparseMatrix K = assemble_stiffness(mesh, nu_, dmap);
        const SparseMatrix M = assemble_mass(mesh, sigma_, dmap);
        const double period = kTwoPi / cfg_.omega;

        const double e_n =
            remainder_EN(source_, cfg_.truncation, cfg_.omega, cfg_.time_samples, mesh, rule);

        std::vector<double> r1_sq, r2_sq;
        double err_global_sq = 0.0;
        bool have_errors = exact_.has_value();

        // assemble every mode load first so negligible modes (numerical dust
        // from the time quadrature) can be skipped relative to the others
        std::vector<Vector> loads_c(cfg_.truncation + 1), loads_s(cfg_.truncation + 1);
        double max_load = 0.0;
        for (int k = 0; k <= cfg_.truncation; ++k) {
            const SpatialFn f_c = [this, k](Vec2 x) {
                return source_.mode_value(x, k, true, source_coeffs_);
            };
            const SpatialFn f_s = [this, k](Vec2 x) {
                return source_.mode_value(x, k, false, source_coeffs_);
            };
            loads_c[k] = assemble_load(mesh, f_c, rule, dmap);
            loads_s[k] = k == 0 ? Vector::Zero(dmap.dof_count())
                                : assemble_load(mesh, f_s, rule, dmap);
            max_load = std::max({max_load, loads_c[k].norm(), loads_s[k].norm()});
        }

        for (int k = 0; k <= cfg_.truncation; ++k) {
            const SpatialFn f_c = [this, k](Vec2 x) {
                return source_.mode_value(x, k, true, source_coeffs_);
            };
            const SpatialFn f_s = [this, k](Vec2 x) {
                return source_.mode_value(x, k, false, source_coeffs_);
            };
            const bool negligible =
                std::max(loads_c[k].norm(), loads_s[k].norm()) <= 1e-14 * max_load;
            detail::ModeSolution sol =
                solve_mode(k, mesh, dmap, K, M, loads_c[k], loads_s[k], negligible);
            if (!sol.converged) {
                ReportRow row;
                row.level = n;
                row.mode = k;
                row.r1 = row.r2 = row.majorant_semi = row.majorant_norm =
                    std::numeric_limits<double>::quiet_NaN();
                row.iterations = sol.iterations;
                out.report.rows.push_back(row);
                out.solver_failure = true;
                out.failure_detail = "level " + std::to_string(n) + ", mode " + std::to_string(k) +
                                     ": no convergence within " +
                                     std::to_string(cfg_.max_iterations) + " iterations";
                return false;
            }

            const ConstantsBundle constants =
                ConstantsBundle::make(sigma_, nu_, cfg_.omega, std::max(cfg_.truncation, 1));
            const double r1 = residual1_mode(k, cfg_.omega, sigma_, mesh, dmap, sol.eta, sol.tau_c,
                                             k >= 1 ? &sol.tau_s : nullptr, f_c, f_s, rule);
            const double r2 =
                residual2_mode(mesh, sol.grad_c, k >= 1 ? &sol.grad_s : nullptr, sol.tau_c,
                               k >= 1 ? &sol.tau_s : nullptr, nu_, rule);

            ReportRow row;
            row.level = n;
            row.mode = k;
            row.r1 = r1;
            row.r2 = r2;
            row.majorant_semi = majorant_seminorm_mode(k, r1, r2, constants);
            row.majorant_norm = majorant_norm_mode(k, r1, r2, constants);
            row.iterations = sol.iterations;
            row.solve_seconds = sol.seconds;

            if (exact_) {
                const ExactModePair pair = detail::exact_mode_pair(*exact_, k, exact_coeffs_);
                const double err_semi =
                    exact_error_mode(mesh, dmap, sol.eta, sol.grad_c, k >= 1 ? &sol.grad_s : nullptr,
                                     pair, rule, ErrorKind::seminorm);
                const double err_l2 = exact_error_l2_mode(mesh, dmap, sol.eta, pair, rule, k >= 1);
                row.exact_error = err_semi;
                // suppress the index when both sides are at round-off level
                if (err_semi > 1e-13 * std::max(1.0, row.majorant_semi)) {
                    row.eff_index = row.majorant_semi / err_semi;
                }
                const double weight = (k == 0) ? period : 0.5 * period;
                err_global_sq += weight * (err_semi * err_semi + k * cfg_.omega * err_l2 * err_l2);
            }
            r1_sq.push_back(row.r1 * row.r1);
            r2_sq.push_back(row.r2 * row.r2);
            out.report.rows.push_back(row);
        }

        // combined space-time row
        const ConstantsBundle constants =
            ConstantsBundle::make(sigma_, nu_, cfg_.omega, std::max(cfg_.truncation, 1));
        ReportRow global;
        global.level = n;
        global.mode = -1;
        double R1 = period * r1_sq[0], R2 = period * r2_sq[0];
        for (std::size_t k = 1; k < r1_sq.size(); ++k) {
            R1 += 0.5 * period * r1_sq[k];
            R2 += 0.5 * period * r2_sq[k];
        }
        global.r1 = std::sqrt(R1 + e_n);
        global.r2 = std::sqrt(R2);
        global.e_n = e_n;
        global.majorant_semi =
            majorant_global(r1_sq, r2_sq, e_n, period, constants, ErrorKind::seminorm);
        global.majorant_norm = majorant_global(r1_sq, r2_sq, e_n, period, constants, ErrorKind::norm);
        if (have_errors) {
            err_global_sq += exact_tail_sq(mesh);
            const double err = std::sqrt(err_global_sq);
            global.exact_error = err;
            if (err > 0.0) global.eff_index = global.majorant_semi / err;
        }
        out.report.rows.push_back(global);
        return true;
    }

    /// Space-time seminorm content of the exact solution beyond mode N
    /// (the part the truncated approximation cannot represent).
    double exact_tail_sq(const Mesh& mesh) const {
        if (!exact_) return 0.0;
        const QuadratureRule rule = QuadratureRule::seven_point();
        const std::size_t m = exact_->terms.size();
        const auto gram_val = spatial_gram(*exact_, mesh, rule);
        std::vector<std::vector<double>> gram_grad(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                gram_grad[i][j] = gram_grad[j][i] =
                    integrate(mesh, rule, [&](int, Vec2 x, const std::array<double, 3>&) {
                        return dot(exact_->terms[i].spatial_gradient(x),
                                   exact_->terms[j].spatial_gradient(x));
                    });
            }
        }
        const double period = kTwoPi / cfg_.omega;
        double tail = 0.0;
        const int horizon = exact_coeffs_.empty() ? 0 : exact_coeffs_[0].max_mode();
        for (int k = cfg_.truncation + 1; k <= horizon; ++k) {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const double cc = exact_coeffs_[i].cos_part(k) * exact_coeffs_[j].cos_part(k) +
                                      exact_coeffs_[i].sin_part(k) * exact_coeffs_[j].sin_part(k);
                    tail += 0.5 * period * cc *
                            (gram_grad[i][j] + k * cfg_.omega * gram_val[i][j]);
                }
            }
        }
        return tail;
    }

    detail::ModeSolution solve_mode(int k, const Mesh& mesh, const DirichletMap& dmap,
                                    const SparseMatrix& K, const SparseMatrix& M, const Vector& bc,
                                    const Vector& bs, bool negligible) {
        detail::ModeSolution sol;
        const int n_dof = dmap.dof_count();
        const auto t0 = Clock::now();
        if (negligible) {
            sol.eta.c = Vector::Zero(n_dof);
            sol.eta.s = Vector::Zero(n_dof);
        } else if (k == 0) {
            const CholeskyFactor factor(K);
            const SolveResult r = pcg_solve(K, bc, cfg_.rel_tol, cfg_.max_iterations, &factor);
            sol.converged = r.converged;
            sol.iterations = r.iterations;
            sol.eta.c = r.x;
            sol.eta.s = Vector::Zero(n_dof);
        } else {
            const BlockSystem system = build_mode_system(k, cfg_.omega, M, K, bc, bs);
            const BlockDiagPreconditioner precond(k, cfg_.omega, M, K);
            const SolveResult r = minres_solve(system, precond, cfg_.rel_tol, cfg_.max_iterations);
            sol.converged = r.converged;
            sol.iterations = r.iterations;
            sol.eta.s = r.x.head(n_dof);
            sol.eta.c = r.x.tail(n_dof);
        }
        sol.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (!sol.converged) return sol;

        sol.grad_c = element_gradients(mesh, dmap, sol.eta.c);
        sol.tau_c = reconstruct_flux(mesh, sol.grad_c, nu_);
        if (k >= 1) {
            sol.grad_s = element_gradients(mesh, dmap, sol.eta.s);
            sol.tau_s = reconstruct_flux(mesh, sol.grad_s, nu_);
        }
        return sol;
    }

    RunConfig cfg_;
    SeparableSource source_;
    std::optional<SeparableSource> exact_;
    std::vector<TimeCoefficients> source_coeffs_;
    std::vector<TimeCoefficients> exact_coeffs_;
    CoefficientField sigma_ = CoefficientField::constant(1.0);
    CoefficientField nu_ = CoefficientField::constant(1.0);
};

inline RunOutcome run_example1(std::vector<int> levels = {9, 27, 81, 243}) {
    return ProblemRunner(example1_config(std::move(levels))).run();
}

inline RunOutcome run_example2(std::vector<int> levels = {9, 27, 81, 243}, int truncation = 8) {
    return ProblemRunner(example2_config(std::move(levels), truncation)).run();
}

inline RunOutcome run_custom(const RunConfig& cfg) { return ProblemRunner(cfg).run(); }

// ---------------------------------------------------------------------------
// key=value config files for the custom runner
// ---------------------------------------------------------------------------

struct ConfigParseResult {
    bool ok = false;
    RunConfig config;
    std::string error;
};

inline ConfigParseResult parse_config(std::istream& in) {
    ConfigParseResult res;
    RunConfig cfg;
    std::map<int, TermConfig> sources, exacts;
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& msg) {
        res.ok = false;
        res.error = "line " + std::to_string(lineno) + ": " + msg;
        return res;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) return fail("expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key.empty() || value.empty()) return fail("empty key or value");

        try {
            if (key == "problem") {
                cfg.problem_name = value;
                if (value == "example1") cfg.problem = RunConfig::Problem::example1;
                else if (value == "example2") cfg.problem = RunConfig::Problem::example2;
                else if (value == "custom") cfg.problem = RunConfig::Problem::custom;
                else return fail("problem: expected example1|example2|custom");
            } else if (key == "levels") {
                cfg.levels.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ',')) cfg.levels.push_back(std::stoi(tok));
            } else if (key == "N") {
                cfg.truncation = std::stoi(value);
            } else if (key == "omega") {
                cfg.omega = std::stod(value);
            } else if (key == "sigma") {
                cfg.sigma = std::stod(value);
            } else if (key == "nu") {
                cfg.nu = std::stod(value);
            } else if (key == "tol") {
                cfg.rel_tol = std::stod(value);
            } else if (key == "format") {
                cfg.format = value;
            } else if (key == "out") {
                cfg.out = value;
            } else if (key.rfind("source.", 0) == 0 || key.rfind("exact.", 0) == 0) {
                const bool is_source = key.rfind("source.", 0) == 0;
                const std::string rest = key.substr(is_source ? 7 : 6);
                const auto dot = rest.find('.');
                if (dot == std::string::npos) return fail(key + ": expected source.<i>.<field>");
                const int idx = std::stoi(rest.substr(0, dot));
                const std::string field = rest.substr(dot + 1);
                TermConfig& term = (is_source ? sources : exacts)[idx];
                if (field == "spatial") term.spatial = value;
                else if (field == "time") term.time = value;
                else if (field == "k") term.k = std::stoi(value);
                else if (field == "scale") term.scale = std::stod(value);
                else return fail(key + ": unknown term field '" + field + "'");
            } else {
                return fail("unknown key '" + key + "'");
            }
        } catch (const std::exception&) {
            return fail(key + ": malformed value '" + value + "'");
        }
    }

    if (cfg.problem == RunConfig::Problem::example1) {
        RunConfig base = example1_config(cfg.levels);
        base.rel_tol = cfg.rel_tol;
        base.out = cfg.out;
        base.format = cfg.format;
        cfg = base;
    } else if (cfg.problem == RunConfig::Problem::example2) {
        RunConfig base = example2_config(cfg.levels, cfg.truncation > 0 ? cfg.truncation : 8);
        base.rel_tol = cfg.rel_tol;
        base.out = cfg.out;
        base.format = cfg.format;
        cfg = base;
    } else {
        for (const auto& [idx, term] : sources) {
            if (term.spatial.empty() || term.time.empty()) {
                return fail("source." + std::to_string(idx) + ": needs spatial and time factors");
            }
            cfg.source_terms.push_back(term);
        }
        for (const auto& [idx, term] : exacts) {
            if (term.spatial.empty() || term.time.empty()) {
                return fail("exact." + std::to_string(idx) + ": needs spatial and time factors");
            }
            cfg.exact_terms.push_back(term);
        }
    }

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
        return res;
    }
    res.ok = true;
    res.config = cfg;
    return res;
}

}  // namespace mhfem
