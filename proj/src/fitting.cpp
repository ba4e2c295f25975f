#include "withinhost/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "withinhost/errors.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/pde_model.hpp"

namespace withinhost {

namespace {

using Point = std::array<double, 3>;

Point clamp_to_box(Point x, const Point& lo, const Point& hi) {
    for (int j = 0; j < 3; ++j) {
        x[j] = std::clamp(x[j], lo[j], hi[j]);
    }
    return x;
}

bool lex_less(const Point& a, const Point& b) {
    for (int j = 0; j < 3; ++j) {
        if (a[j] != b[j]) {
            return a[j] < b[j];
        }
    }
    return false;
}

struct SearchResult {
    Point x{};  // log10 coordinates
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
    long evals = 0;
};

/// Nelder-Mead with every trial point projected onto the bound box. The
/// simplex is seeded from x0 with seed_frac-of-box steps per coordinate,
/// flipped when the step would leave the box.
template <typename F>
SearchResult nelder_mead(F&& func, const Point& x0, const Point& lo, const Point& hi,
                         int max_evals, double seed_frac) {
    constexpr double reflect_c = 1.0, expand_c = 2.0, contract_c = 0.5, shrink_c = 0.5;
    struct Vertex {
        Point x;
        double f;
    };
    std::array<Vertex, 4> simplex;
    SearchResult out;

    auto eval = [&](const Point& x) {
        ++out.evals;
        return func(x);
    };

    simplex[0] = {clamp_to_box(x0, lo, hi), 0.0};
    simplex[0].f = eval(simplex[0].x);
    for (int j = 0; j < 3; ++j) {
        Point x = simplex[0].x;
        double step = seed_frac * (hi[j] - lo[j]);
        if (x[j] + step > hi[j]) {
            step = -step;
        }
        x[j] += step;
        simplex[static_cast<std::size_t>(j) + 1] = {clamp_to_box(x, lo, hi), 0.0};
        simplex[static_cast<std::size_t>(j) + 1].f = eval(simplex[static_cast<std::size_t>(j) + 1].x);
    }

    auto order = [&simplex] {
        std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) {
            if (a.f != b.f) {
                return a.f < b.f;
            }
            return lex_less(a.x, b.x);
        });
    };

    while (out.evals < max_evals) {
        order();
        const double spread = simplex[3].f - simplex[0].f;
        if (spread <= 1e-12 * (1.0 + std::abs(simplex[0].f))) {
            out.converged = true;
            break;
        }

        Point centroid{};
        for (int v = 0; v < 3; ++v) {
            for (int j = 0; j < 3; ++j) {
                centroid[j] += simplex[static_cast<std::size_t>(v)].x[j] / 3.0;
            }
        }
        auto along = [&centroid, &simplex, &lo, &hi](double coeff) {
            Point x;
            for (int j = 0; j < 3; ++j) {
                x[j] = centroid[j] + coeff * (centroid[j] - simplex[3].x[j]);
            }
            return clamp_to_box(x, lo, hi);
        };

        const Point xr = along(reflect_c);
        const double fr = eval(xr);
        if (fr < simplex[0].f) {
            const Point xe = along(reflect_c * expand_c);
            const double fe = eval(xe);
            simplex[3] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < simplex[2].f) {
            simplex[3] = {xr, fr};
            continue;
        }
        const bool outside = fr < simplex[3].f;
        const Point xc = along(outside ? reflect_c * contract_c : -contract_c);
        const double fc = eval(xc);
        if (fc < std::min(fr, simplex[3].f)) {
            simplex[3] = {xc, fc};
            continue;
        }
        // Shrink toward the best vertex.
        for (int v = 1; v < 4; ++v) {
            auto& vert = simplex[static_cast<std::size_t>(v)];
            for (int j = 0; j < 3; ++j) {
                vert.x[j] = simplex[0].x[j] + shrink_c * (vert.x[j] - simplex[0].x[j]);
            }
            vert.x = clamp_to_box(vert.x, lo, hi);
            vert.f = eval(vert.x);
            if (out.evals >= max_evals) {
                break;
            }
        }
    }
    order();
    out.x = simplex[0].x;
    out.f = simplex[0].f;
    return out;
}

void validate_problem(const FitProblem& problem) {
    if (problem.data.days.size() < 5 ||
        problem.data.days.size() != problem.data.gametocyte_density.size()) {
        throw ConfigError("fit: need at least 5 observation points");
    }
    for (std::size_t i = 0; i < problem.data.days.size(); ++i) {
        if (problem.data.days[i] < 0) {
            throw ConfigError("fit: observation days must be nonnegative");
        }
        if (i > 0 && problem.data.days[i] <= problem.data.days[i - 1]) {
            throw ConfigError("fit: observation days must be strictly increasing");
        }
    }
    for (const auto& bound : problem.bounds) {
        if (!(bound[0] > 0.0) || !(bound[1] > bound[0]) || !std::isfinite(bound[1])) {
            throw ConfigError("fit: bounds must be positive, finite, and ordered");
        }
    }
    if (problem.k_range[0] < 1 || problem.k_range[1] > 200 ||
        problem.k_range[0] > problem.k_range[1]) {
        throw ConfigError("fit: k_range must lie within [1, 200]");
    }
}

double sample_scale(double g, ObjectiveScale scale) {
    // +1 keeps the log defined at zero density; one cell/ml is far below
    // any measurable signal so the offset does not distort the fit.
    return scale == ObjectiveScale::log10 ? std::log10(g + 1.0) : g;
}

} // namespace

double objective(const std::array<double, 3>& free_params, int k,
                 const FitProblem& problem) {
    for (int j = 0; j < 3; ++j) {
        if (free_params[static_cast<std::size_t>(j)] < problem.bounds[static_cast<std::size_t>(j)][0] ||
            free_params[static_cast<std::size_t>(j)] > problem.bounds[static_cast<std::size_t>(j)][1]) {
            throw ConfigError("objective: free parameters must lie within bounds");
        }
    }
    ModelParams params = problem.base_params;
    params.alpha_g = free_params[0];
    params.m0 = free_params[1];
    params.mu_g = free_params[2];

    const int max_day = problem.data.days.back();
    SimConfig config;
    config.dt = problem.dt;
    config.t_end = 24.0 * static_cast<double>(max_day);
    config.record_every = 24.0;
    config.clamp_negative = true;

    Trajectory traj;
    try {
        if (problem.model_kind == ModelKind::ode) {
            params.set_equal_stages(k);
            traj = simulate_ode(default_ode_init(params), config, params);
        } else {
            const AgeMesh mesh = AgeMesh::make(problem.da, problem.a_max, params.dev_time);
            const RuptureFunction rf{params.dev_time, params.mu_bar};
            config.dt = problem.da;  // unit Courant number
            traj = simulate_pde(default_pde_init(params, mesh), config, params, mesh, rf);
        }
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }

    double sse = 0.0;
    for (std::size_t i = 0; i < problem.data.days.size(); ++i) {
        const auto day = static_cast<std::size_t>(problem.data.days[i]);
        const double diff = sample_scale(traj.gametocytes[day], problem.objective_scale) -
                            sample_scale(problem.data.gametocyte_density[i],
                                         problem.objective_scale);
        sse += diff * diff;
    }
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

FitResult fit(const FitProblem& problem) {
    validate_problem(problem);

    Point lo_log, hi_log;
    for (int j = 0; j < 3; ++j) {
        lo_log[j] = std::log10(problem.bounds[static_cast<std::size_t>(j)][0]);
        hi_log[j] = std::log10(problem.bounds[static_cast<std::size_t>(j)][1]);
    }

    // Deterministic multistart lattice: both quartile points per coordinate.
    std::vector<Point> starts;
    starts.reserve(8);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                const double fa = a == 0 ? 0.25 : 0.75;
                const double fb = b == 0 ? 0.25 : 0.75;
                const double fc = c == 0 ? 0.25 : 0.75;
                starts.push_back({lo_log[0] + fa * (hi_log[0] - lo_log[0]),
                                  lo_log[1] + fb * (hi_log[1] - lo_log[1]),
                                  lo_log[2] + fc * (hi_log[2] - lo_log[2])});
            }
        }
    }

    auto pow10_point = [](const Point& x) {
        return Point{std::pow(10.0, x[0]), std::pow(10.0, x[1]), std::pow(10.0, x[2])};
    };

    auto search_one_k = [&](int k) {
        SearchResult best;
        long total_evals = 0;
        auto func = [&](const Point& x_log) {
            return objective(pow10_point(x_log), k, problem);
        };
        for (const Point& start : starts) {
            const SearchResult run = nelder_mead(func, start, lo_log, hi_log,
                                                 problem.max_evals_per_start, 0.10);
            total_evals += run.evals;
            if (run.f < best.f || (run.f == best.f && lex_less(run.x, best.x))) {
                best.x = run.x;
                best.f = run.f;
            }
        }
        // Polish: re-descend from the incumbent with progressively tighter
        // simplex seeds. A single pass per start routinely stalls partway
        // down the correlated (alpha_g, m0, mu_g) valley; the restarts are
        // what make the noiseless round trip land on the generator.
        bool converged = false;
        for (const double seed : {0.10, 0.02, 0.004}) {
            const SearchResult run = nelder_mead(func, best.x, lo_log, hi_log,
                                                 problem.max_evals_per_start, seed);
            total_evals += run.evals;
            converged = run.converged;
            if (run.f < best.f || (run.f == best.f && lex_less(run.x, best.x))) {
                best.x = run.x;
                best.f = run.f;
            }
        }
        best.evals = total_evals;
        best.converged = converged;
        return best;
    };

    std::vector<int> ks;
    if (problem.model_kind == ModelKind::ode) {
        for (int k = problem.k_range[0]; k <= problem.k_range[1]; ++k) {
            ks.push_back(k);
        }
    } else {
        ks.push_back(0);  // single pass, stage count not applicable
    }

    std::vector<SearchResult> per_k(ks.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_chunks = std::min<std::size_t>(hw, ks.size());
    std::vector<std::future<void>> futures;
    futures.reserve(n_chunks);
    for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
        futures.push_back(std::async(std::launch::async, [&, chunk] {
            for (std::size_t i = chunk; i < ks.size(); i += n_chunks) {
                per_k[i] = search_one_k(ks[i] == 0 ? problem.base_params.k_stages : ks[i]);
            }
        }));
    }
    for (auto& f : futures) {
        f.get();
    }

    // Deterministic reduction: lowest objective wins; exact ties keep the
    // earliest entry, which is the smallest stage count because ks is
    // ascending.
    std::size_t winner = 0;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        if (per_k[i].f < per_k[winner].f) {
            winner = i;
        }
    }

    FitResult result;
    const Point x = pow10_point(per_k[winner].x);
    result.alpha_g = x[0];
    result.m0 = x[1];
    result.mu_g = x[2];
    result.k_opt = ks[winner];
    result.sse = per_k[winner].f;
    result.converged = false;
    result.evaluations = 0;
    for (const auto& r : per_k) {
        result.converged = result.converged || r.converged;
        result.evaluations += r.evals;
    }
    return result;
}

} // namespace withinhost
