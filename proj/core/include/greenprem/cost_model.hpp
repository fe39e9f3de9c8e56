#pragma once

// Green-premium cost model for one (year, EV/ICEV pair) snapshot.
//
// Currency is an abstract RMB count held in double precision. Every function
// here is pure; scenarios are plain values and can be shared across threads.

#include <optional>

namespace greenprem {

enum class VehicleKind { ev, icev };

struct EvPowertrain {
    double battery_unit_cost = 0.0; ///< currency per kWh
    double battery_capacity = 0.0;  ///< kWh
    double motor_unit_cost = 0.0;   ///< currency per kW
    double motor_power = 0.0;       ///< kW
    double other_hv_cost = 0.0;     ///< other high-voltage components, currency
};

struct IcevPowertrain {
    double engine_intake_exhaust_cost = 0.0;
    double transmission_cost = 0.0;
};

struct SubsidyPolicy {
    double purchase_tax_rate = 0.0; ///< fraction of the pre-tax price
    bool ev_tax_exempt = false;
    double acquisition_subsidy = 0.0;
    double credit_price = 0.0;   ///< currency per dual-credit point
    double cafc_actual = 0.0;    ///< L/100km
    double cafc_threshold = 0.0; ///< L/100km
    double nev_credits_actual = 0.0;
    double nev_credits_threshold = 0.0;
};

struct UsageProfile {
    int lifecycle_years = 1;
    double annual_km = 0.0;
    double ev_consumption = 0.0;   ///< kWh/100km
    double icev_consumption = 0.0; ///< L/100km
    double electricity_price = 0.0;
    double gasoline_price = 0.0;
    double ev_maintenance = 0.0;   ///< currency per year
    double icev_maintenance = 0.0; ///< currency per year
};

struct ResidualAndFinance {
    double ev_residual = 0.0;
    double icev_residual = 0.0;
    double discount_rate = 0.0; ///< fraction per year
};

/// Retail prices. When a markup is present the corresponding price is derived
/// from the production cost as `production * (1 + markup)` and the explicit
/// price field is ignored; this keeps prices coupled to cost perturbations.
struct MarketPrices {
    double ev_price = 0.0;
    double icev_price = 0.0;
    double common_base_cost = 0.0; ///< non-powertrain production cost shared by both vehicles
    std::optional<double> ev_markup;
    std::optional<double> icev_markup;
};

/// Mid-life battery pack replacements. Manufacturers carry this cost by
/// default, so it only enters the consumer TCO when `consumer_pays` is set.
struct BatteryReplacement {
    bool consumer_pays = false;
    int replacements = 2;
};

struct VehicleScenario {
    int year = 2021;
    EvPowertrain ev;
    IcevPowertrain icev;
    SubsidyPolicy policy;
    UsageProfile usage;
    ResidualAndFinance finance;
    MarketPrices market;
    BatteryReplacement battery_replacement;
};

/// Throws ValidationError naming the first violated field invariant.
void validate(const VehicleScenario& scenario);

double production_cost_ev(const EvPowertrain& powertrain, double base_cost);
double production_cost_icev(const IcevPowertrain& powertrain, double base_cost);

/// (ev - icev) / icev. Throws DomainError when icev_cost is zero.
double production_premium(double ev_cost, double icev_cost);

/// NEV credit revenue + purchase-tax exemption (while exempt) + acquisition subsidy.
double government_subsidy_ev(const SubsidyPolicy& policy, double ev_price);

/// Cost of a negative CAFC balance. Positive balances are not tradable and yield zero.
double cafc_compliance_cost(const SubsidyPolicy& policy);

double ev_market_price(const VehicleScenario& scenario);
double icev_market_price(const VehicleScenario& scenario);

/// Effective consumer acquisition cost: EV price net of subsidies, or ICEV
/// price plus CAFC compliance and purchase tax.
double acquisition_cost(const VehicleScenario& scenario, VehicleKind kind);

double acquisition_premium(const VehicleScenario& scenario);

/// Fuel or electricity plus maintenance for one year of driving.
double annual_operating_cost(VehicleKind kind, const UsageProfile& usage);

struct TcoBreakdown {
    double acquisition = 0.0;
    double operating_pv = 0.0;
    double replacement_pv = 0.0;
    double residual_pv = 0.0;
    double total = 0.0; ///< acquisition + operating_pv + replacement_pv - residual_pv
};

TcoBreakdown tco_breakdown(const VehicleScenario& scenario, VehicleKind kind);

/// Net present value of the total cost of ownership at the time of purchase.
double tco_npv(const VehicleScenario& scenario, VehicleKind kind);

double lifecycle_premium(const VehicleScenario& scenario);

/// Levelised cost of driving: TCO divided by lifetime kilometres.
double lcod(double tco, const UsageProfile& usage);

struct PremiumSnapshot {
    double production = 0.0;
    double acquisition = 0.0;
    double lifecycle = 0.0;
    double lcod_ev = 0.0;
    double lcod_icev = 0.0;
};

PremiumSnapshot evaluate_premiums(const VehicleScenario& scenario);

} // namespace greenprem
