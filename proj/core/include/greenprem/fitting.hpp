#pragma once

// Genetic-algorithm least-squares estimation of Bass parameters.

#include "greenprem/diffusion.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace greenprem {

struct Observation {
    int year = 0;
    double annual_sales = 0.0; ///< thousands of vehicles
};

struct ObservationSeries {
    std::vector<Observation> points;
};

/// Sorts by year and checks for duplicate years and negative or non-finite sales.
ObservationSeries make_observations(std::vector<Observation> points);

struct ParamBounds {
    double lo = 0.0;
    double hi = 0.0;
};

enum class MarketMode { fixed, free };

struct FitConfig {
    int population_size = 800;
    double crossover_prob = 0.8;
    double mutation_prob = 0.1;
    int max_generations = 500;
    std::uint64_t rng_seed = 0;

    ParamBounds p_bounds{1e-6, 0.02};
    ParamBounds q_bounds{0.01, 1.0};
    ParamBounds beta_bounds{-10.0, 2.0};
    bool fit_beta = true; ///< false pins beta to 0 (vanilla model)

    MarketMode m_mode = MarketMode::fixed;
    double m_fixed = 120800.0;
    ParamBounds m_bounds{21000.0, 204800.0};

    double late_weight = 4.0;
    int late_from_year = 2018;
    double penalty_weight = 1.0;
    double initial_cumulative = 0.0;

    bool early_stop = true;
    int stagnation_generations = 50;
    double stagnation_tolerance = 1e-10;

    /// Nelder-Mead refinement of the best individual once the GA stops.
    bool polish = true;
    int polish_iterations = 2000; ///< per restart

    unsigned threads = 1; ///< fitness workers; 0 picks the hardware count
};

/// Throws ValidationError for bad probabilities, population size or bounds.
void validate(const FitConfig& cfg);

struct FitResult {
    BassParams params;
    double objective = 0.0;     ///< after polishing; never above history.back()
    double r_squared = 0.0;
    int generations_run = 0;
    bool converged = false;      ///< stagnation criterion met at termination
    std::vector<double> history; ///< best objective of the initial population, then of each generation
};

/// Clamped annual predictions at each observed year, simulated from the first
/// observed year. `premiums` may be null for the vanilla model.
std::vector<double> predict_annual(const BassParams& params, const ObservationSeries& obs,
                                   const PremiumPath* premiums, double initial_cumulative);

/// Weighted squared error plus a penalty on negative unclamped flows.
double objective(const BassParams& params, const ObservationSeries& obs, const PremiumPath* premiums,
                 const FitConfig& cfg);

FitResult ga_fit(const ObservationSeries& obs, const PremiumPath* premiums, const FitConfig& cfg);

/// 1 - SSE/SST. Throws DomainError when the observations are constant.
double r_squared(std::span<const double> predicted, std::span<const double> observed);

struct ModelComparison {
    FitResult vanilla;
    FitResult generalized;
};

/// Fits both models with the same seed and bounds; the vanilla fit pins beta to 0.
ModelComparison compare_models(const ObservationSeries& obs, const PremiumPath& premiums, const FitConfig& cfg);

} // namespace greenprem
