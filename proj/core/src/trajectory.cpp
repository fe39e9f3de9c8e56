#include "greenprem/trajectory.hpp"

#include "greenprem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace greenprem {

namespace {

template <class E>
E parse_enum(std::string_view s, std::initializer_list<std::pair<std::string_view, E>> table, const char* what) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    throw ValidationError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

#define GP_REAL(path, req)                                                                      \
    FieldInfo {                                                                                 \
        #path, FieldType::real, req, [](const VehicleScenario& s) { return static_cast<double>(s.path); }, \
            [](VehicleScenario& s, double v) { s.path = v; }                                    \
    }

#define GP_OPTIONAL(path)                                                                        \
    FieldInfo {                                                                                  \
        #path, FieldType::real, false,                                                           \
            [](const VehicleScenario& s) { return s.path.value_or(std::numeric_limits<double>::quiet_NaN()); }, \
            [](VehicleScenario& s, double v) { s.path = v; }                                     \
    }

#define GP_BOOL(path, req)                                                                      \
    FieldInfo {                                                                                 \
        #path, FieldType::boolean, req, [](const VehicleScenario& s) { return s.path ? 1.0 : 0.0; }, \
            [](VehicleScenario& s, double v) { s.path = v != 0.0; }                             \
    }

#define GP_INT(path, req)                                                                         \
    FieldInfo {                                                                                   \
        #path, FieldType::integer, req, [](const VehicleScenario& s) { return static_cast<double>(s.path); }, \
            [](VehicleScenario& s, double v) { s.path = static_cast<int>(std::lround(v)); }       \
    }

std::vector<FieldInfo> build_fields() {
    return {
        GP_REAL(ev.battery_unit_cost, true),
        GP_REAL(ev.battery_capacity, true),
        GP_REAL(ev.motor_unit_cost, true),
        GP_REAL(ev.motor_power, true),
        GP_REAL(ev.other_hv_cost, true),
        GP_REAL(icev.engine_intake_exhaust_cost, true),
        GP_REAL(icev.transmission_cost, true),
        GP_REAL(policy.purchase_tax_rate, true),
        GP_BOOL(policy.ev_tax_exempt, true),
        GP_REAL(policy.acquisition_subsidy, true),
        GP_REAL(policy.credit_price, true),
        GP_REAL(policy.cafc_actual, true),
        GP_REAL(policy.cafc_threshold, true),
        GP_REAL(policy.nev_credits_actual, true),
        GP_REAL(policy.nev_credits_threshold, true),
        GP_INT(usage.lifecycle_years, true),
        GP_REAL(usage.annual_km, true),
        GP_REAL(usage.ev_consumption, true),
        GP_REAL(usage.icev_consumption, true),
        GP_REAL(usage.electricity_price, true),
        GP_REAL(usage.gasoline_price, true),
        GP_REAL(usage.ev_maintenance, true),
        GP_REAL(usage.icev_maintenance, true),
        GP_REAL(finance.ev_residual, true),
        GP_REAL(finance.icev_residual, true),
        GP_REAL(finance.discount_rate, true),
        GP_REAL(market.ev_price, false),
        GP_REAL(market.icev_price, false),
        GP_REAL(market.common_base_cost, true),
        GP_OPTIONAL(market.ev_markup),
        GP_OPTIONAL(market.icev_markup),
        GP_BOOL(battery_replacement.consumer_pays, false),
        GP_INT(battery_replacement.replacements, false),
    };
}

#undef GP_REAL
#undef GP_OPTIONAL
#undef GP_BOOL
#undef GP_INT

struct Anchor {
    int year;
    double value;
};

// Last anchor at or before `year` and the first one after it, if any.
std::pair<const Anchor*, const Anchor*> bracket(const std::vector<Anchor>& anchors, int year) {
    const Anchor* lo = nullptr;
    const Anchor* hi = nullptr;
    for (const auto& a : anchors) {
        if (a.year <= year) {
            lo = &a;
        } else {
            hi = &a;
            break;
        }
    }
    return {lo, hi};
}

} // namespace

std::string_view to_string(VehicleClass c) {
    return c == VehicleClass::long_range ? "long-range" : "short-range";
}

std::string_view to_string(Interpolation i) {
    return i == Interpolation::step ? "step" : "linear";
}

std::string_view to_string(PremiumKind k) {
    switch (k) {
    case PremiumKind::production: return "production";
    case PremiumKind::acquisition: return "acquisition";
    case PremiumKind::lifecycle: return "lifecycle";
    }
    return "lifecycle";
}

VehicleClass parse_vehicle_class(std::string_view s) {
    return parse_enum<VehicleClass>(
        s, {{"long-range", VehicleClass::long_range}, {"short-range", VehicleClass::short_range}}, "vehicle class");
}

Interpolation parse_interpolation(std::string_view s) {
    return parse_enum<Interpolation>(s, {{"step", Interpolation::step}, {"linear", Interpolation::linear}},
                                     "interpolation");
}

PremiumKind parse_premium_kind(std::string_view s) {
    return parse_enum<PremiumKind>(s,
                                   {{"production", PremiumKind::production},
                                    {"acquisition", PremiumKind::acquisition},
                                    {"lifecycle", PremiumKind::lifecycle}},
                                   "premium kind");
}

const std::vector<FieldInfo>& scenario_fields() {
    static const std::vector<FieldInfo> fields = build_fields();
    return fields;
}

const FieldInfo& field_info(std::string_view name) {
    for (const auto& f : scenario_fields()) {
        if (f.name == name) return f;
    }
    throw ValidationError("unknown scenario field '" + std::string(name) + "'");
}

int ScenarioSchedule::first_year() const {
    if (entries.empty()) throw ValidationError("schedule '" + name + "' has no entries");
    return entries.front().year;
}

Interpolation ScenarioSchedule::interpolation_of(const std::string& field) const {
    const auto it = interpolation.find(field);
    return it == interpolation.end() ? Interpolation::step : it->second;
}

void set_anchor(ScenarioSchedule& sched, int year, const std::string& field, double value) {
    field_info(field);
    auto it = std::lower_bound(sched.entries.begin(), sched.entries.end(), year,
                               [](const ScheduleEntry& e, int y) { return e.year < y; });
    if (it == sched.entries.end() || it->year != year) {
        it = sched.entries.insert(it, ScheduleEntry{year, {}});
    }
    it->overrides[field] = value;
}

void validate_schedule(const ScenarioSchedule& sched) {
    const int first = sched.first_year();
    if (sched.last_year < first) {
        throw ValidationError("schedule '" + sched.name + "': last_year precedes the first entry");
    }
    for (std::size_t i = 1; i < sched.entries.size(); ++i) {
        if (sched.entries[i].year <= sched.entries[i - 1].year) {
            throw ValidationError("schedule '" + sched.name + "': entry years must be strictly increasing (" +
                                  std::to_string(sched.entries[i].year) + ")");
        }
    }
    for (const auto& e : sched.entries) {
        for (const auto& [name, value] : e.overrides) {
            const FieldInfo& f = field_info(name);
            const std::string where = name + " @" + std::to_string(e.year);
            if (!std::isfinite(value)) throw ValidationError(where + " is not finite");
            if (f.type == FieldType::boolean && value != 0.0 && value != 1.0) {
                throw ValidationError(where + " must be a boolean");
            }
            if (f.type == FieldType::integer && value != std::round(value)) {
                throw ValidationError(where + " must be an integer");
            }
        }
    }
    for (const auto& [name, mode] : sched.interpolation) {
        const FieldInfo& f = field_info(name);
        if (mode == Interpolation::linear && f.type != FieldType::real) {
            throw ValidationError(name + " cannot use linear interpolation");
        }
    }
}

VehicleScenario resolve_scenario(const ScenarioSchedule& sched, int year) {
    validate_schedule(sched);
    if (year < sched.first_year() || year > sched.last_year) {
        throw ResolutionError("year " + std::to_string(year) + " is outside schedule '" + sched.name + "' span " +
                              std::to_string(sched.first_year()) + "-" + std::to_string(sched.last_year));
    }

    VehicleScenario sc;
    sc.year = year;
    std::vector<Anchor> anchors;
    for (const auto& f : scenario_fields()) {
        const std::string name(f.name);
        anchors.clear();
        for (const auto& e : sched.entries) {
            if (const auto it = e.overrides.find(name); it != e.overrides.end()) {
                anchors.push_back({e.year, it->second});
            }
        }
        const auto [lo, hi] = bracket(anchors, year);
        if (lo == nullptr) {
            if (f.required) {
                throw ResolutionError("field " + name + " has no value at or before " + std::to_string(year) +
                                      " in schedule '" + sched.name + "'");
            }
            continue;
        }
        double value = lo->value;
        if (hi != nullptr && lo->year != year && sched.interpolation_of(name) == Interpolation::linear) {
            const double w = static_cast<double>(year - lo->year) / static_cast<double>(hi->year - lo->year);
            value = lo->value + (hi->value - lo->value) * w;
        }
        f.set(sc, value);
    }

    auto has_anchor = [&](const char* field) {
        for (const auto& e : sched.entries) {
            if (e.year <= year && e.overrides.count(field) != 0) return true;
        }
        return false;
    };
    if (!sc.market.ev_markup && !has_anchor("market.ev_price")) {
        throw ResolutionError("schedule '" + sched.name + "' needs market.ev_price or market.ev_markup by " +
                              std::to_string(year));
    }
    if (!sc.market.icev_markup && !has_anchor("market.icev_price")) {
        throw ResolutionError("schedule '" + sched.name + "' needs market.icev_price or market.icev_markup by " +
                              std::to_string(year));
    }

    validate(sc);
    return sc;
}

double PremiumPoint::premium(PremiumKind kind) const {
    switch (kind) {
    case PremiumKind::production: return production;
    case PremiumKind::acquisition: return acquisition;
    case PremiumKind::lifecycle: return lifecycle;
    }
    return lifecycle;
}

int PremiumSeries::first_year() const {
    if (points.empty()) throw ResolutionError("premium series is empty");
    return points.front().year;
}

int PremiumSeries::last_year() const {
    if (points.empty()) throw ResolutionError("premium series is empty");
    return points.back().year;
}

const PremiumPoint& PremiumSeries::at(int year) const {
    if (points.empty() || year < first_year() || year > last_year()) {
        throw ResolutionError("premium series has no value for year " + std::to_string(year));
    }
    return points[static_cast<std::size_t>(year - first_year())];
}

PremiumSeries premium_series(const ScenarioSchedule& sched, int first_year, int last_year) {
    if (last_year < first_year) throw ValidationError("premium series: --to precedes --from");
    PremiumSeries out;
    out.points.reserve(static_cast<std::size_t>(last_year - first_year + 1));
    for (int y = first_year; y <= last_year; ++y) {
        const PremiumSnapshot s = evaluate_premiums(resolve_scenario(sched, y));
        out.points.push_back({y, s.production, s.acquisition, s.lifecycle, s.lcod_ev, s.lcod_icev});
    }
    return out;
}

std::optional<int> parity_year(const PremiumSeries& series, PremiumKind kind) {
    for (const auto& p : series.points) {
        if (p.premium(kind) <= 0.0) return p.year;
    }
    return std::nullopt;
}

PremiumPath lifecycle_path(const PremiumSeries& series) {
    PremiumPath path;
    if (series.empty()) return path;
    path.first_year = series.first_year();
    path.values.reserve(series.points.size());
    for (const auto& p : series.points) path.values.push_back(p.lifecycle);
    return path;
}

} // namespace greenprem
