#pragma once

// One-at-a-time sensitivity of a green premium to individual scenario fields.

#include "greenprem/cost_model.hpp"
#include "greenprem/trajectory.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace greenprem {

enum class FactorGroup { production, subsidy, cost, residual };

std::string_view to_string(FactorGroup g);

struct FactorSpec {
    std::string id;
    std::string base_label;
    std::string field; ///< dotted scenario field, must be real-valued
    FactorGroup group = FactorGroup::cost;
    std::optional<double> base_value; ///< replaces the field before perturbing
};

inline constexpr std::array<double, 4> default_perturbations{-0.20, -0.10, 0.10, 0.20};

struct SensitivityRow {
    std::string id;
    std::string base_label;
    FactorGroup group = FactorGroup::cost;
    std::array<double, 4> change{}; ///< relative premium change at each default perturbation
    double coefficient = 0.0;
};

struct SensitivityError {
    std::string id;
    std::string message;
};

struct SensitivityTable {
    std::vector<SensitivityRow> rows;
    std::vector<SensitivityError> errors;
};

/// `base` with the factor's base_value applied, if any.
VehicleScenario factor_base(const VehicleScenario& base, const FactorSpec& factor);

/// Relative premium change (P' - P) / |P| after scaling the factor's field by
/// (1 + pct). Throws DomainError when |P| < 1e-9.
double perturb(const VehicleScenario& base, const FactorSpec& factor, double pct,
               PremiumKind kind = PremiumKind::lifecycle);

/// Least-squares slope through the origin of `changes` against `pcts`.
double coefficient(std::span<const double> pcts, std::span<const double> changes);

/// Rows ordered by group, then by |coefficient| descending. Factors that fail
/// are reported in `errors` instead of aborting the table.
SensitivityTable sensitivity_table(const VehicleScenario& base, const std::vector<FactorSpec>& factors,
                                   PremiumKind kind = PremiumKind::lifecycle);

/// Fourteen factors in four groups: battery cost at three price points, credit
/// price, tax rate, subsidy, fuel consumption at 6 and 4 L/100km, electricity
/// consumption, annual mileage, electricity and gasoline price, EV residual
/// and discount rate.
std::vector<FactorSpec> default_factors();

} // namespace greenprem
