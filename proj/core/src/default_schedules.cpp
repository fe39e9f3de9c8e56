#include "greenprem/trajectory.hpp"

#include <initializer_list>
#include <utility>

namespace greenprem {

namespace {

using Anchors = std::initializer_list<std::pair<int, double>>;

void put(ScenarioSchedule& s, const char* field, Anchors anchors, Interpolation mode = Interpolation::step) {
    for (const auto& [year, value] : anchors) set_anchor(s, year, field, value);
    if (mode == Interpolation::linear) s.interpolation[field] = mode;
}

void put(ScenarioSchedule& s, const char* field, double value) {
    set_anchor(s, 2010, field, value);
}

// Battery anchors between 2010 and 2021 reproduce the historical LCOD path
// under the subsidy history below; later anchors are projections.
constexpr Anchors long_range_battery = {
    {2010, 7500}, {2011, 6107}, {2012, 4688}, {2013, 4330}, {2014, 4000}, {2015, 3183}, {2016, 2199},
    {2017, 1798}, {2018, 1525}, {2019, 1172}, {2020, 963},  {2021, 820},  {2025, 650},  {2030, 500},
};

// LFP-tier pack costs.
constexpr Anchors short_range_battery = {
    {2010, 3794}, {2011, 3480}, {2012, 3306}, {2013, 3167}, {2014, 3063}, {2015, 2941}, {2016, 2651},
    {2017, 2076}, {2018, 1711}, {2019, 1212}, {2020, 872},  {2021, 750},  {2025, 560},  {2030, 420},
};

} // namespace

ScenarioSchedule default_schedule(VehicleClass vehicle_class) {
    const bool long_range = vehicle_class == VehicleClass::long_range;

    ScenarioSchedule s;
    s.name = std::string(to_string(vehicle_class));
    s.vehicle_class = vehicle_class;
    s.last_year = 2030;

    put(s, "ev.battery_unit_cost", long_range ? long_range_battery : short_range_battery, Interpolation::linear);
    put(s, "ev.battery_capacity", long_range ? 75.0 : 60.0);
    put(s, "ev.motor_unit_cost", {{2010, 65}, {2021, 65}, {2030, 35}}, Interpolation::linear);
    put(s, "ev.motor_power", 200.0);
    put(s, "ev.other_hv_cost", {{2010, 6000}, {2021, 6000}, {2030, 3000}}, Interpolation::linear);

    put(s, "icev.engine_intake_exhaust_cost", {{2010, 16000}, {2021, 16000}, {2025, 30000}, {2030, 38000}},
        Interpolation::linear);
    put(s, "icev.transmission_cost", 11000.0);

    put(s, "policy.purchase_tax_rate", 0.10);
    put(s, "policy.ev_tax_exempt", {{2010, 1}, {2023, 0}});
    put(s, "policy.acquisition_subsidy",
        {{2010, 100000}, {2016, 90000}, {2017, 66000}, {2018, 75000}, {2019, 27500}, {2020, 22500}, {2021, 18000},
         {2022, 12600}, {2023, 0}});
    put(s, "policy.credit_price", {{2010, 0}, {2020, 2000}});
    put(s, "policy.cafc_actual", 6.49);
    put(s, "policy.cafc_threshold", {{2010, 6.9}, {2021, 6.38}, {2025, 5.0}, {2030, 4.0}}, Interpolation::linear);
    put(s, "policy.nev_credits_actual", 5.1);
    put(s, "policy.nev_credits_threshold", 0.0);

    put(s, "usage.lifecycle_years", 10.0);
    put(s, "usage.annual_km", 15000.0);
    put(s, "usage.ev_consumption", 13.0);
    put(s, "usage.icev_consumption", {{2010, 9.5}, {2021, 8.5}, {2025, 7.0}, {2030, 6.5}}, Interpolation::linear);
    put(s, "usage.electricity_price", 1.2);
    put(s, "usage.gasoline_price", 7.5);
    put(s, "usage.ev_maintenance", 2000.0);
    put(s, "usage.icev_maintenance", 7000.0);

    put(s, "finance.ev_residual", 35000.0);
    put(s, "finance.icev_residual", 65000.0);
    put(s, "finance.discount_rate", 0.05);

    put(s, "market.common_base_cost", 94500.0);
    put(s, "market.icev_markup", 0.3602);
    if (long_range) {
        put(s, "market.ev_markup", 0.5503);
    } else {
        // Short-range margins compress as the LFP segment matures.
        put(s, "market.ev_markup", {{2010, 0.5960}, {2021, 0.5960}, {2026, 0.5160}}, Interpolation::linear);
    }

    put(s, "battery_replacement.consumer_pays", 0.0);
    put(s, "battery_replacement.replacements", 2.0);
    return s;
}

} // namespace greenprem
