#include "greenprem/cost_model.hpp"

#include "greenprem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greenprem {

namespace {

void require(bool ok, const char* field, const char* rule) {
    if (!ok) {
        throw ValidationError(std::string(field) + " must be " + rule);
    }
}

void require_non_negative(double v, const char* field) {
    require(std::isfinite(v) && v >= 0.0, field, ">= 0");
}

double ratio_minus_one(double ev, double icev, const char* what) {
    if (icev == 0.0) {
        throw DomainError(std::string(what) + ": ICEV denominator is zero");
    }
    return (ev - icev) / icev;
}

double discount_factor(double rate, int year) {
    return 1.0 / std::pow(1.0 + rate, year);
}

} // namespace

void validate(const VehicleScenario& sc) {
    const auto& ev = sc.ev;
    require_non_negative(ev.battery_unit_cost, "ev.battery_unit_cost");
    require(std::isfinite(ev.battery_capacity) && ev.battery_capacity > 0.0, "ev.battery_capacity", "> 0");
    require_non_negative(ev.motor_unit_cost, "ev.motor_unit_cost");
    require_non_negative(ev.motor_power, "ev.motor_power");
    require_non_negative(ev.other_hv_cost, "ev.other_hv_cost");

    require_non_negative(sc.icev.engine_intake_exhaust_cost, "icev.engine_intake_exhaust_cost");
    require_non_negative(sc.icev.transmission_cost, "icev.transmission_cost");

    const auto& pol = sc.policy;
    require(std::isfinite(pol.purchase_tax_rate) && pol.purchase_tax_rate >= 0.0 && pol.purchase_tax_rate <= 1.0,
            "policy.purchase_tax_rate", "in [0, 1]");
    require(std::isfinite(pol.acquisition_subsidy), "policy.acquisition_subsidy", "finite");
    require_non_negative(pol.credit_price, "policy.credit_price");
    require(std::isfinite(pol.cafc_actual), "policy.cafc_actual", "finite");
    require(std::isfinite(pol.cafc_threshold), "policy.cafc_threshold", "finite");
    require(std::isfinite(pol.nev_credits_actual), "policy.nev_credits_actual", "finite");
    require_non_negative(pol.nev_credits_threshold, "policy.nev_credits_threshold");

    const auto& up = sc.usage;
    require(up.lifecycle_years >= 1, "usage.lifecycle_years", ">= 1");
    require_non_negative(up.annual_km, "usage.annual_km");
    require_non_negative(up.ev_consumption, "usage.ev_consumption");
    require_non_negative(up.icev_consumption, "usage.icev_consumption");
    require_non_negative(up.electricity_price, "usage.electricity_price");
    require_non_negative(up.gasoline_price, "usage.gasoline_price");
    require_non_negative(up.ev_maintenance, "usage.ev_maintenance");
    require_non_negative(up.icev_maintenance, "usage.icev_maintenance");

    require_non_negative(sc.finance.ev_residual, "finance.ev_residual");
    require_non_negative(sc.finance.icev_residual, "finance.icev_residual");
    require(std::isfinite(sc.finance.discount_rate) && sc.finance.discount_rate > -1.0,
            "finance.discount_rate", "> -1");

    require_non_negative(sc.market.ev_price, "market.ev_price");
    require_non_negative(sc.market.icev_price, "market.icev_price");
    require_non_negative(sc.market.common_base_cost, "market.common_base_cost");
    if (sc.market.ev_markup) {
        require(std::isfinite(*sc.market.ev_markup) && *sc.market.ev_markup > -1.0, "market.ev_markup", "> -1");
    }
    if (sc.market.icev_markup) {
        require(std::isfinite(*sc.market.icev_markup) && *sc.market.icev_markup > -1.0, "market.icev_markup",
                "> -1");
    }

    require(sc.battery_replacement.replacements >= 0, "battery_replacement.replacements", ">= 0");
}

double production_cost_ev(const EvPowertrain& pt, double base_cost) {
    return base_cost + pt.battery_unit_cost * pt.battery_capacity + pt.motor_unit_cost * pt.motor_power +
           pt.other_hv_cost;
}

double production_cost_icev(const IcevPowertrain& pt, double base_cost) {
    return base_cost + pt.engine_intake_exhaust_cost + pt.transmission_cost;
}

double production_premium(double ev_cost, double icev_cost) {
    return ratio_minus_one(ev_cost, icev_cost, "production premium");
}

double government_subsidy_ev(const SubsidyPolicy& pol, double ev_price) {
    const double credits = (pol.nev_credits_actual - pol.nev_credits_threshold) * pol.credit_price;
    const double exemption = pol.ev_tax_exempt ? pol.purchase_tax_rate * ev_price : 0.0;
    return credits + exemption + pol.acquisition_subsidy;
}

double cafc_compliance_cost(const SubsidyPolicy& pol) {
    return std::max(0.0, pol.cafc_actual - pol.cafc_threshold) * pol.credit_price;
}

double ev_market_price(const VehicleScenario& sc) {
    if (sc.market.ev_markup) {
        return production_cost_ev(sc.ev, sc.market.common_base_cost) * (1.0 + *sc.market.ev_markup);
    }
    return sc.market.ev_price;
}

double icev_market_price(const VehicleScenario& sc) {
    if (sc.market.icev_markup) {
        return production_cost_icev(sc.icev, sc.market.common_base_cost) * (1.0 + *sc.market.icev_markup);
    }
    return sc.market.icev_price;
}

double acquisition_cost(const VehicleScenario& sc, VehicleKind kind) {
    if (kind == VehicleKind::ev) {
        const double price = ev_market_price(sc);
        return price - government_subsidy_ev(sc.policy, price);
    }
    const double price = icev_market_price(sc);
    return price + cafc_compliance_cost(sc.policy) + sc.policy.purchase_tax_rate * price;
}

double acquisition_premium(const VehicleScenario& sc) {
    return ratio_minus_one(acquisition_cost(sc, VehicleKind::ev), acquisition_cost(sc, VehicleKind::icev),
                           "acquisition premium");
}

double annual_operating_cost(VehicleKind kind, const UsageProfile& up) {
    if (kind == VehicleKind::ev) {
        return up.annual_km * up.ev_consumption / 100.0 * up.electricity_price + up.ev_maintenance;
    }
    return up.annual_km * up.icev_consumption / 100.0 * up.gasoline_price + up.icev_maintenance;
}

TcoBreakdown tco_breakdown(const VehicleScenario& sc, VehicleKind kind) {
    const int n = sc.usage.lifecycle_years;
    const double r = sc.finance.discount_rate;
    const double yearly = annual_operating_cost(kind, sc.usage);

    TcoBreakdown out;
    out.acquisition = acquisition_cost(sc, kind);
    for (int t = 1; t <= n; ++t) {
        out.operating_pv += yearly * discount_factor(r, t);
    }

    if (kind == VehicleKind::ev && sc.battery_replacement.consumer_pays) {
        // Replacements are spread evenly over the lifecycle and priced at the purchase-year pack cost.
        const int k = sc.battery_replacement.replacements;
        const double pack = sc.ev.battery_unit_cost * sc.ev.battery_capacity;
        for (int i = 1; i <= k; ++i) {
            const int at = std::max(1, static_cast<int>(std::lround(static_cast<double>(i * n) / (k + 1))));
            out.replacement_pv += pack * discount_factor(r, at);
        }
    }

    const double residual = kind == VehicleKind::ev ? sc.finance.ev_residual : sc.finance.icev_residual;
    out.residual_pv = residual * discount_factor(r, n);
    out.total = out.acquisition + out.operating_pv + out.replacement_pv - out.residual_pv;
    return out;
}

double tco_npv(const VehicleScenario& sc, VehicleKind kind) {
    return tco_breakdown(sc, kind).total;
}

double lifecycle_premium(const VehicleScenario& sc) {
    return ratio_minus_one(tco_npv(sc, VehicleKind::ev), tco_npv(sc, VehicleKind::icev), "lifecycle premium");
}

double lcod(double tco, const UsageProfile& up) {
    const double km = up.annual_km * up.lifecycle_years;
    if (!(km > 0.0)) {
        throw DomainError("lcod: lifetime distance is zero");
    }
    return tco / km;
}

PremiumSnapshot evaluate_premiums(const VehicleScenario& sc) {
    const double ev_tco = tco_npv(sc, VehicleKind::ev);
    const double icev_tco = tco_npv(sc, VehicleKind::icev);
    PremiumSnapshot s;
    s.production = production_premium(production_cost_ev(sc.ev, sc.market.common_base_cost),
                                      production_cost_icev(sc.icev, sc.market.common_base_cost));
    s.acquisition = acquisition_premium(sc);
    s.lifecycle = ratio_minus_one(ev_tco, icev_tco, "lifecycle premium");
    s.lcod_ev = lcod(ev_tco, sc.usage);
    s.lcod_icev = lcod(icev_tco, sc.usage);
    return s;
}

} // namespace greenprem
