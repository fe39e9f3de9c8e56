#include "greenprem/diffusion.hpp"

#include "greenprem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greenprem {

void validate(const BassParams& b) {
    if (!(std::isfinite(b.p) && b.p > 0.0)) throw ValidationError("bass.p must be > 0");
    if (!(std::isfinite(b.q) && b.q >= 0.0)) throw ValidationError("bass.q must be >= 0");
    if (!(std::isfinite(b.m) && b.m > 0.0)) throw ValidationError("bass.m must be > 0");
    if (!std::isfinite(b.beta)) throw ValidationError("bass.beta must be finite");
}

bool PremiumPath::covers(int from, int to) const {
    return !values.empty() && from >= first_year && to <= last_year();
}

double PremiumPath::at(int year) const {
    if (values.empty() || year < first_year || year > last_year()) {
        throw ResolutionError("premium path has no value for year " + std::to_string(year));
    }
    return values[static_cast<std::size_t>(year - first_year)];
}

double decision_coefficient(double delta_p3, double beta) {
    return 1.0 + delta_p3 * beta;
}

double bass_flow(const BassParams& b, double n, double x) {
    const double remaining = b.m - n;
    return (b.p * remaining + b.q * (n / b.m) * remaining) * x;
}

double bass_step(const BassParams& b, double n, double x) {
    return std::max(0.0, bass_flow(b, n, x));
}

namespace {

template <class DecisionFn>
std::vector<AdoptionState> run(const BassParams& b, int start_year, int horizon, double n0, DecisionFn&& decision) {
    validate(b);
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (!(n0 >= 0.0 && n0 <= b.m)) throw ValidationError("initial cumulative must lie in [0, m]");

    std::vector<AdoptionState> out;
    out.reserve(static_cast<std::size_t>(horizon));
    double n = n0;
    for (int i = 0; i < horizon; ++i) {
        AdoptionState s;
        s.year = start_year + i;
        s.decision = decision(s.year);
        s.raw_flow = bass_flow(b, n, s.decision);
        const double next = std::min(b.m, n + std::max(0.0, s.raw_flow));
        s.new_adopters = next - n;
        s.cumulative = next;
        n = next;
        out.push_back(s);
    }
    return out;
}

} // namespace

std::vector<AdoptionState> simulate(const BassParams& b, int start_year, int horizon, double n0) {
    return run(b, start_year, horizon, n0, [](int) { return 1.0; });
}

std::vector<AdoptionState> simulate(const BassParams& b, const PremiumPath& premiums, int start_year, int horizon,
                                    double n0) {
    if (horizon >= 1 && !premiums.covers(start_year, start_year + horizon - 1)) {
        throw ResolutionError("premium path does not cover " + std::to_string(start_year) + "-" +
                              std::to_string(start_year + horizon - 1));
    }
    return run(b, start_year, horizon, n0,
               [&](int year) { return decision_coefficient(premiums.at(year), b.beta); });
}

double closed_form_cumulative(const BassParams& b, double t) {
    if (!(b.p > 0.0)) throw ValidationError("bass.p must be > 0");
    if (!(t >= 0.0)) throw ValidationError("t must be >= 0");
    const double e = std::exp(-(b.p + b.q) * t);
    return (1.0 - e) / (1.0 + (b.q / b.p) * e);
}

} // namespace greenprem
