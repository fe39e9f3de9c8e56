#pragma once

// Year-indexed scenario schedules and the premium time series built from them.

#include "greenprem/cost_model.hpp"
#include "greenprem/diffusion.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace greenprem {

enum class VehicleClass { long_range, short_range };
enum class Interpolation { step, linear };
enum class FieldType { real, integer, boolean };
enum class PremiumKind { production, acquisition, lifecycle };

std::string_view to_string(VehicleClass c);
std::string_view to_string(Interpolation i);
std::string_view to_string(PremiumKind k);
VehicleClass parse_vehicle_class(std::string_view s);
Interpolation parse_interpolation(std::string_view s);
PremiumKind parse_premium_kind(std::string_view s);

/// A scenario field addressable by a dotted name such as "ev.battery_unit_cost".
/// Booleans and integers travel as doubles (0/1, whole numbers).
struct FieldInfo {
    std::string_view name;
    FieldType type;
    bool required; ///< must be anchored for a schedule to resolve
    double (*get)(const VehicleScenario&);
    void (*set)(VehicleScenario&, double);
};

const std::vector<FieldInfo>& scenario_fields();

/// Throws ValidationError for an unknown name.
const FieldInfo& field_info(std::string_view name);

struct ScheduleEntry {
    int year = 0;
    std::map<std::string, double> overrides;
};

struct ScenarioSchedule {
    std::string name;
    VehicleClass vehicle_class = VehicleClass::long_range;
    int last_year = 2030; ///< resolution span is [entries.front().year, last_year]
    std::vector<ScheduleEntry> entries;
    std::map<std::string, Interpolation> interpolation; ///< fields not listed use step

    int first_year() const;
    Interpolation interpolation_of(const std::string& field) const;
};

/// Adds or replaces one anchor, inserting the entry for `year` in order.
void set_anchor(ScenarioSchedule& schedule, int year, const std::string& field, double value);

/// Structural checks: years strictly increasing, known field names, integral
/// values for integer and boolean fields, no linear interpolation on those.
void validate_schedule(const ScenarioSchedule& schedule);

/// Resolves every field for `year`. Throws ResolutionError when the year is
/// outside the schedule span or a required field has no anchor at or before it;
/// ValidationError when the resolved scenario breaks a field invariant.
VehicleScenario resolve_scenario(const ScenarioSchedule& schedule, int year);

struct PremiumPoint {
    int year = 0;
    double production = 0.0;
    double acquisition = 0.0;
    double lifecycle = 0.0;
    double lcod_ev = 0.0;
    double lcod_icev = 0.0;

    double premium(PremiumKind kind) const;
};

struct PremiumSeries {
    std::vector<PremiumPoint> points; ///< contiguous years

    bool empty() const { return points.empty(); }
    int first_year() const;
    int last_year() const;
    const PremiumPoint& at(int year) const;
};

PremiumSeries premium_series(const ScenarioSchedule& schedule, int first_year, int last_year);

/// First year whose selected premium is at or below zero.
std::optional<int> parity_year(const PremiumSeries& series, PremiumKind kind);

PremiumPath lifecycle_path(const PremiumSeries& series);

/// Built-in calibrated schedules covering 2010-2030.
ScenarioSchedule default_schedule(VehicleClass vehicle_class);

} // namespace greenprem
