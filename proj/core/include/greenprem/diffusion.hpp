#pragma once

// Vanilla and premium-driven Bass diffusion on an annual grid.
// Adopter counts are in thousands of vehicles.

#include <vector>

namespace greenprem {

struct BassParams {
    double p = 0.01; ///< innovation coefficient, 1/year
    double q = 0.3;  ///< imitation coefficient, 1/year
    double m = 1.0;  ///< market potential
    double beta = 0.0;
};

/// Throws ValidationError unless p > 0, q >= 0, m > 0 and beta is finite.
void validate(const BassParams& params);

struct AdoptionState {
    int year = 0;
    double cumulative = 0.0;   ///< N at the end of `year`
    double new_adopters = 0.0; ///< adopters during `year`, after clamping
    double raw_flow = 0.0;     ///< unclamped flow; negative when x(t) < 0
    double decision = 1.0;     ///< x(t)
};

/// Lifecycle premium by year, used to drive x(t).
struct PremiumPath {
    int first_year = 0;
    std::vector<double> values;

    int last_year() const { return first_year + static_cast<int>(values.size()) - 1; }
    bool covers(int from, int to) const;
    /// Throws ResolutionError for a year outside the path.
    double at(int year) const;
};

double decision_coefficient(double delta_p3, double beta);

/// Unclamped annual flow (p(m-N) + q(N/m)(m-N)) * x.
double bass_flow(const BassParams& params, double cumulative, double x);

/// bass_flow clamped at zero.
double bass_step(const BassParams& params, double cumulative, double x);

/// Vanilla recursion, x(t) = 1.
std::vector<AdoptionState> simulate(const BassParams& params, int start_year, int horizon,
                                    double initial_cumulative = 0.0);

/// Generalized recursion with x(t) = 1 + beta * premium(t). Throws
/// ResolutionError when the path does not cover every simulated year.
std::vector<AdoptionState> simulate(const BassParams& params, const PremiumPath& premiums, int start_year,
                                    int horizon, double initial_cumulative = 0.0);

/// Continuous-time cumulative adoption fraction F(t) for x = 1.
double closed_form_cumulative(const BassParams& params, double t);

} // namespace greenprem
