#include "greenprem/sensitivity.hpp"

#include "greenprem/errors.hpp"

#include <algorithm>
#include <cmath>

namespace greenprem {

namespace {

const FieldInfo& real_field(const FactorSpec& factor) {
    const FieldInfo& f = field_info(factor.field);
    if (f.type != FieldType::real) {
        throw ValidationError("factor " + factor.id + ": field " + factor.field + " is not real-valued");
    }
    return f;
}

double premium_of(const VehicleScenario& sc, PremiumKind kind) {
    const PremiumSnapshot s = evaluate_premiums(sc);
    switch (kind) {
    case PremiumKind::production: return s.production;
    case PremiumKind::acquisition: return s.acquisition;
    case PremiumKind::lifecycle: return s.lifecycle;
    }
    return s.lifecycle;
}

} // namespace

std::string_view to_string(FactorGroup g) {
    switch (g) {
    case FactorGroup::production: return "Production";
    case FactorGroup::subsidy: return "Subsidy";
    case FactorGroup::cost: return "Cost";
    case FactorGroup::residual: return "Residual";
    }
    return "Cost";
}

VehicleScenario factor_base(const VehicleScenario& base, const FactorSpec& factor) {
    const FieldInfo& f = real_field(factor);
    VehicleScenario sc = base;
    if (factor.base_value) f.set(sc, *factor.base_value);
    if (!std::isfinite(f.get(sc))) {
        throw ValidationError("factor " + factor.id + ": field " + factor.field + " is unset");
    }
    validate(sc);
    return sc;
}

double perturb(const VehicleScenario& base, const FactorSpec& factor, double pct, PremiumKind kind) {
    const FieldInfo& f = real_field(factor);
    const VehicleScenario start = factor_base(base, factor);
    const double p0 = premium_of(start, kind);
    if (std::abs(p0) < 1e-9) {
        throw DomainError("factor " + factor.id + ": base premium is too close to zero");
    }
    VehicleScenario moved = start;
    f.set(moved, f.get(start) * (1.0 + pct));
    validate(moved);
    return (premium_of(moved, kind) - p0) / std::abs(p0);
}

double coefficient(std::span<const double> pcts, std::span<const double> changes) {
    if (pcts.size() != changes.size()) throw ValidationError("coefficient: length mismatch");
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < pcts.size(); ++i) {
        sxy += pcts[i] * changes[i];
        sxx += pcts[i] * pcts[i];
    }
    if (sxx == 0.0) throw ValidationError("coefficient: no non-zero perturbation");
    return sxy / sxx;
}

SensitivityTable sensitivity_table(const VehicleScenario& base, const std::vector<FactorSpec>& factors,
                                   PremiumKind kind) {
    SensitivityTable table;
    for (const auto& factor : factors) {
        try {
            SensitivityRow row{factor.id, factor.base_label, factor.group, {}, 0.0};
            for (std::size_t i = 0; i < default_perturbations.size(); ++i) {
                row.change[i] = perturb(base, factor, default_perturbations[i], kind);
            }
            row.coefficient = coefficient(default_perturbations, row.change);
            table.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            table.errors.push_back({factor.id, e.what()});
        }
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.group != b.group) return a.group < b.group;
        return std::abs(a.coefficient) > std::abs(b.coefficient);
    });
    return table;
}

std::vector<FactorSpec> default_factors() {
    using G = FactorGroup;
    return {
        {"battery_800", "Battery (800)", "ev.battery_unit_cost", G::production, 800.0},
        {"battery_650", "Battery (650)", "ev.battery_unit_cost", G::production, 650.0},
        {"battery_500", "Battery (500)", "ev.battery_unit_cost", G::production, 500.0},
        {"credit", "Credit", "policy.credit_price", G::subsidy, std::nullopt},
        {"tax_rate", "Tax Rate (10%)", "policy.purchase_tax_rate", G::subsidy, std::nullopt},
        {"subsidy", "Subsidy", "policy.acquisition_subsidy", G::subsidy, std::nullopt},
        {"oil_cost_6l", "Oil Cost (6L)", "usage.icev_consumption", G::cost, 6.0},
        {"oil_cost_4l", "Oil Cost (4L)", "usage.icev_consumption", G::cost, 4.0},
        {"elec_cost", "Elec Cost (13kWh)", "usage.ev_consumption", G::cost, std::nullopt},
        {"range", "Range (15000)", "usage.annual_km", G::cost, std::nullopt},
        {"elec_price", "Elec Price (1.2)", "usage.electricity_price", G::cost, std::nullopt},
        {"oil_price", "Oil Price (7.5)", "usage.gasoline_price", G::cost, std::nullopt},
        {"ev_residual", "EV Residual", "finance.ev_residual", G::residual, std::nullopt},
        {"discount_rate", "Discount Rate", "finance.discount_rate", G::residual, std::nullopt},
    };
}

} // namespace greenprem
