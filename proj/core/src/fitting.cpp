#include "greenprem/fitting.hpp"

#include "greenprem/errors.hpp"
#include "greenprem/random.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <thread>

namespace greenprem {

ObservationSeries make_observations(std::vector<Observation> points) {
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(std::isfinite(points[i].annual_sales) && points[i].annual_sales >= 0.0)) {
            throw ValidationError("sales for " + std::to_string(points[i].year) + " must be finite and >= 0");
        }
        if (i > 0 && points[i].year == points[i - 1].year) {
            throw ValidationError("duplicate year " + std::to_string(points[i].year));
        }
    }
    return ObservationSeries{std::move(points)};
}

namespace {

void check_bounds(const ParamBounds& b, const char* name, double floor_exclusive) {
    if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo <= b.hi)) {
        throw ValidationError(std::string(name) + " bounds must be finite and ordered");
    }
    if (!std::isnan(floor_exclusive) && !(b.lo > floor_exclusive)) {
        throw ValidationError(std::string(name) + " lower bound must be > " + std::to_string(floor_exclusive));
    }
}

std::vector<Observation> sorted_points(const ObservationSeries& obs) {
    std::vector<Observation> pts = obs.points;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].year == pts[i - 1].year) throw ValidationError("duplicate year " + std::to_string(pts[i].year));
    }
    if (pts.empty()) throw ValidationError("observation series is empty");
    return pts;
}

std::vector<AdoptionState> run_model(const BassParams& params, int first, int last, const PremiumPath* premiums,
                                     double n0) {
    const int horizon = last - first + 1;
    if (premiums != nullptr) return simulate(params, *premiums, first, horizon, n0);
    if (params.beta != 0.0) throw ValidationError("a premium path is required when beta is non-zero");
    return simulate(params, first, horizon, n0);
}

struct Genome {
    std::vector<ParamBounds> bounds;
    bool fit_beta;
    bool free_m;

    BassParams decode(const std::vector<double>& g, const FitConfig& cfg) const {
        BassParams b;
        b.p = g[0];
        b.q = g[1];
        std::size_t i = 2;
        b.beta = fit_beta ? g[i++] : 0.0;
        b.m = free_m ? g[i] : cfg.m_fixed;
        return b;
    }
};

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2 * threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

// Nelder-Mead on coordinates scaled to [0, 1] per bound; points outside the
// box are clamped before evaluation.
struct PolishProblem {
    const Genome* genome;
    const FitConfig* cfg;
    const ObservationSeries* obs;
    const PremiumPath* path;

    std::vector<double> to_genome(const gsl_vector* u) const {
        std::vector<double> g(genome->bounds.size());
        for (std::size_t d = 0; d < g.size(); ++d) {
            const auto& b = genome->bounds[d];
            g[d] = b.lo + std::clamp(gsl_vector_get(u, d), 0.0, 1.0) * (b.hi - b.lo);
        }
        return g;
    }

    static double evaluate(const gsl_vector* u, void* self) {
        const auto* pp = static_cast<const PolishProblem*>(self);
        const double f = objective(pp->genome->decode(pp->to_genome(u), *pp->cfg), *pp->obs, pp->path, *pp->cfg);
        return std::isfinite(f) ? f : std::numeric_limits<double>::max();
    }
};

std::vector<double> polish(const PolishProblem& problem, const std::vector<double>& start, double start_value) {
    const std::size_t dims = start.size();
    using Vec = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
    Vec u(gsl_vector_alloc(dims), gsl_vector_free);
    Vec step(gsl_vector_alloc(dims), gsl_vector_free);
    for (std::size_t d = 0; d < dims; ++d) {
        const auto& b = problem.genome->bounds[d];
        gsl_vector_set(u.get(), d, b.hi > b.lo ? (start[d] - b.lo) / (b.hi - b.lo) : 0.0);
    }
    gsl_vector_set_all(step.get(), 0.01);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims), gsl_multimin_fminimizer_free);
    gsl_multimin_function fn{&PolishProblem::evaluate, dims, const_cast<PolishProblem*>(&problem)};

    double best = start_value;
    // Restarting rebuilds a collapsed simplex; stop once a restart gains nothing.
    for (int restart = 0; restart < 10; ++restart) {
        gsl_multimin_fminimizer_set(nm.get(), &fn, u.get(), step.get());
        for (int it = 0; it < problem.cfg->polish_iterations; ++it) {
            if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-12) == GSL_SUCCESS) break;
        }
        const double value = gsl_multimin_fminimizer_minimum(nm.get());
        if (!(value < best)) break;
        gsl_vector_memcpy(u.get(), gsl_multimin_fminimizer_x(nm.get()));
        const bool stalled = best - value <= problem.cfg->stagnation_tolerance;
        best = value;
        if (stalled) break;
    }
    return problem.to_genome(u.get());
}

} // namespace

void validate(const FitConfig& cfg) {
    if (cfg.population_size < 2) throw ValidationError("population_size must be >= 2");
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0)) {
        throw ValidationError("crossover_prob must lie in [0, 1]");
    }
    if (!(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0)) {
        throw ValidationError("mutation_prob must lie in [0, 1]");
    }
    if (cfg.max_generations < 0) throw ValidationError("max_generations must be >= 0");
    check_bounds(cfg.p_bounds, "p", 0.0);
    check_bounds(cfg.q_bounds, "q", std::numeric_limits<double>::quiet_NaN());
    if (cfg.q_bounds.lo < 0.0) throw ValidationError("q lower bound must be >= 0");
    check_bounds(cfg.beta_bounds, "beta", std::numeric_limits<double>::quiet_NaN());
    if (cfg.m_mode == MarketMode::fixed) {
        if (!(std::isfinite(cfg.m_fixed) && cfg.m_fixed > 0.0)) throw ValidationError("m must be > 0");
    } else {
        check_bounds(cfg.m_bounds, "m", 0.0);
    }
    if (!(std::isfinite(cfg.late_weight) && cfg.late_weight >= 0.0)) throw ValidationError("late_weight must be >= 0");
    if (!(std::isfinite(cfg.penalty_weight) && cfg.penalty_weight >= 0.0)) {
        throw ValidationError("penalty_weight must be >= 0");
    }
    if (!(std::isfinite(cfg.initial_cumulative) && cfg.initial_cumulative >= 0.0)) {
        throw ValidationError("initial_cumulative must be >= 0");
    }
    if (cfg.stagnation_generations < 1) throw ValidationError("stagnation_generations must be >= 1");
    if (cfg.polish_iterations < 1) throw ValidationError("polish_iterations must be >= 1");
    if (!(cfg.stagnation_tolerance >= 0.0)) throw ValidationError("stagnation_tolerance must be >= 0");
}

std::vector<double> predict_annual(const BassParams& params, const ObservationSeries& obs,
                                   const PremiumPath* premiums, double initial_cumulative) {
    const auto pts = sorted_points(obs);
    const int first = pts.front().year;
    const auto states = run_model(params, first, pts.back().year, premiums, initial_cumulative);
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& o : pts) out.push_back(states[static_cast<std::size_t>(o.year - first)].new_adopters);
    return out;
}

double objective(const BassParams& params, const ObservationSeries& obs, const PremiumPath* premiums,
                 const FitConfig& cfg) {
    const auto pts = sorted_points(obs);
    const int first = pts.front().year;
    const auto states = run_model(params, first, pts.back().year, premiums, cfg.initial_cumulative);

    double sse = 0.0;
    double penalty = 0.0;
    for (const auto& o : pts) {
        const AdoptionState& s = states[static_cast<std::size_t>(o.year - first)];
        const double w = o.year >= cfg.late_from_year ? cfg.late_weight : 1.0;
        const double d = s.new_adopters - o.annual_sales;
        sse += w * d * d;
        const double neg = std::max(0.0, -s.raw_flow);
        penalty += neg * neg;
    }
    return sse + cfg.penalty_weight * penalty;
}

double r_squared(std::span<const double> predicted, std::span<const double> observed) {
    if (predicted.size() != observed.size()) throw ValidationError("r_squared: length mismatch");
    if (observed.size() < 2) throw ValidationError("r_squared: need at least two points");
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sse += (predicted[i] - observed[i]) * (predicted[i] - observed[i]);
        sst += (observed[i] - mean) * (observed[i] - mean);
    }
    if (sst == 0.0) throw DomainError("r_squared: observations have zero variance");
    return 1.0 - sse / sst;
}

FitResult ga_fit(const ObservationSeries& obs, const PremiumPath* premiums, const FitConfig& cfg) {
    validate(cfg);
    const auto pts = sorted_points(obs);
    if (pts.size() < 4) throw ValidationError("fitting needs at least 4 observations");
    if (std::all_of(pts.begin(), pts.end(), [](const auto& o) { return o.annual_sales == 0.0; })) {
        throw ValidationError("all observations are zero");
    }
    if (cfg.fit_beta) {
        if (premiums == nullptr || premiums->values.empty()) {
            throw ValidationError("fitting beta requires a premium series");
        }
        if (!premiums->covers(pts.front().year, pts.back().year)) {
            throw ResolutionError("premium series does not cover the observation years");
        }
    }
    const PremiumPath* path = cfg.fit_beta ? premiums : nullptr;

    Genome genome{{cfg.p_bounds, cfg.q_bounds}, cfg.fit_beta, cfg.m_mode == MarketMode::free};
    if (genome.fit_beta) genome.bounds.push_back(cfg.beta_bounds);
    if (genome.free_m) genome.bounds.push_back(cfg.m_bounds);
    const std::size_t dims = genome.bounds.size();
    const std::size_t n = static_cast<std::size_t>(cfg.population_size);
    const unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;

    Rng rng(cfg.rng_seed);
    std::vector<std::vector<double>> pop(n, std::vector<double>(dims));
    for (auto& ind : pop) {
        for (std::size_t d = 0; d < dims; ++d) ind[d] = rng.uniform(genome.bounds[d].lo, genome.bounds[d].hi);
    }

    std::vector<double> fitness(n);
    const ObservationSeries sorted{pts};
    auto evaluate = [&] {
        parallel_for(n, threads, [&](std::size_t i) {
            const double f = objective(genome.decode(pop[i], cfg), sorted, path, cfg);
            fitness[i] = std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
        });
    };
    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
    };
    auto tournament = [&] {
        std::size_t winner = static_cast<std::size_t>(rng.below(n));
        for (int k = 1; k < 3; ++k) {
            const auto c = static_cast<std::size_t>(rng.below(n));
            if (fitness[c] < fitness[winner]) winner = c;
        }
        return winner;
    };
    auto mutate_and_clamp = [&](std::vector<double>& g) {
        for (std::size_t d = 0; d < dims; ++d) {
            const auto& b = genome.bounds[d];
            if (rng.uniform() < cfg.mutation_prob) g[d] += rng.normal() * 0.1 * (b.hi - b.lo);
            g[d] = std::clamp(g[d], b.lo, b.hi);
        }
    };

    evaluate();
    FitResult result;
    result.history.push_back(fitness[best_index()]);

    auto stagnated = [&] {
        const auto s = static_cast<std::size_t>(cfg.stagnation_generations);
        const auto& h = result.history;
        return h.size() > s && h[h.size() - 1 - s] - h.back() <= cfg.stagnation_tolerance;
    };

    constexpr double alpha = 0.5;
    std::vector<std::vector<double>> next;
    next.reserve(n);
    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        next.clear();
        next.push_back(pop[best_index()]);
        while (next.size() < n) {
            std::vector<double> a = pop[tournament()];
            std::vector<double> b = pop[tournament()];
            if (rng.uniform() < cfg.crossover_prob) {
                for (std::size_t d = 0; d < dims; ++d) {
                    const double lo = std::min(a[d], b[d]);
                    const double span = std::max(a[d], b[d]) - lo;
                    const double c1 = rng.uniform(lo - alpha * span, lo + (1.0 + alpha) * span);
                    const double c2 = rng.uniform(lo - alpha * span, lo + (1.0 + alpha) * span);
                    a[d] = c1;
                    b[d] = c2;
                }
            }
            mutate_and_clamp(a);
            mutate_and_clamp(b);
            next.push_back(std::move(a));
            if (next.size() < n) next.push_back(std::move(b));
        }
        pop.swap(next);
        evaluate();
        result.history.push_back(fitness[best_index()]);
        result.generations_run = gen + 1;
        if (cfg.early_stop && stagnated()) break;
    }

    const std::size_t best = best_index();
    std::vector<double> winner = pop[best];
    result.objective = fitness[best];
    result.converged = stagnated();
    if (cfg.polish) {
        const PolishProblem problem{&genome, &cfg, &sorted, path};
        std::vector<double> refined = polish(problem, winner, result.objective);
        const double value = objective(genome.decode(refined, cfg), sorted, path, cfg);
        if (value < result.objective) {
            winner = std::move(refined);
            result.objective = value;
        }
    }
    result.params = genome.decode(winner, cfg);

    std::vector<double> observed;
    observed.reserve(pts.size());
    for (const auto& o : pts) observed.push_back(o.annual_sales);
    result.r_squared = r_squared(predict_annual(result.params, sorted, path, cfg.initial_cumulative), observed);
    return result;
}

ModelComparison compare_models(const ObservationSeries& obs, const PremiumPath& premiums, const FitConfig& cfg) {
    if (premiums.values.empty()) throw ValidationError("generalized fit requires a premium series");
    FitConfig vanilla = cfg;
    vanilla.fit_beta = false;
    FitConfig generalized = cfg;
    generalized.fit_beta = true;
    return {ga_fit(obs, nullptr, vanilla), ga_fit(obs, &premiums, generalized)};
}

} // namespace greenprem
