#include "config.hpp"

#include "csv.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace greenprem::cli {

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string where(const std::string& source, const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.is_null()) return source;
    return fmt::format("{}:{}", source, mark.line + 1);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& source, const std::string& key) {
    if (!node.IsScalar()) throw ConfigError(fmt::format("{}: '{}' must be a scalar", where(source, node), key));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("{}: '{}' has an invalid value '{}'", where(source, node), key, node.Scalar()));
    }
}

double field_value(const FieldInfo& f, const YAML::Node& node, const std::string& source) {
    const std::string name(f.name);
    if (f.type == FieldType::boolean) return scalar<bool>(node, source, name) ? 1.0 : 0.0;
    return scalar<double>(node, source, name);
}

// Splits "ev.battery_unit_cost" into its group and leaf.
std::pair<std::string, std::string> split_field(std::string_view name) {
    const auto dot = name.find('.');
    return {std::string(name.substr(0, dot)), std::string(name.substr(dot + 1))};
}

ParamBounds bounds_from(const YAML::Node& node, const std::string& source, const std::string& key) {
    if (!node.IsSequence() || node.size() != 2) {
        throw ConfigError(fmt::format("{}: '{}' must be a [lo, hi] pair", where(source, node), key));
    }
    return {scalar<double>(node[0], source, key), scalar<double>(node[1], source, key)};
}

} // namespace

ScenarioSchedule parse_schedule_yaml(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", source));

    ScenarioSchedule s;
    bool have_class = false;
    bool have_entries = false;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        const YAML::Node& v = kv.second;
        if (key == "name") {
            s.name = scalar<std::string>(v, source, key);
        } else if (key == "vehicle_class") {
            try {
                s.vehicle_class = parse_vehicle_class(scalar<std::string>(v, source, key));
            } catch (const ConfigError&) {
                throw;
            } catch (const ValidationError& e) {
                throw ConfigError(fmt::format("{}: {}", where(source, v), e.what()));
            }
            have_class = true;
        } else if (key == "last_year") {
            s.last_year = scalar<int>(v, source, key);
        } else if (key == "interpolation") {
            if (!v.IsMap()) throw ConfigError(fmt::format("{}: interpolation must be a mapping", where(source, v)));
            for (const auto& group : v) {
                const auto g = group.first.as<std::string>();
                if (!group.second.IsMap()) {
                    throw ConfigError(fmt::format("{}: interpolation.{} must be a mapping", where(source, v), g));
                }
                for (const auto& leaf : group.second) {
                    const std::string name = g + "." + leaf.first.as<std::string>();
                    try {
                        field_info(name);
                        s.interpolation[name] = parse_interpolation(scalar<std::string>(leaf.second, source, name));
                    } catch (const ConfigError&) {
                        throw;
                    } catch (const ValidationError& e) {
                        throw ConfigError(fmt::format("{}: {}", where(source, leaf.second), e.what()));
                    }
                }
            }
        } else if (key == "entries") {
            if (!v.IsSequence()) throw ConfigError(fmt::format("{}: entries must be a list", where(source, v)));
            have_entries = true;
            for (const auto& entry : v) {
                if (!entry.IsMap() || !entry["year"]) {
                    throw ConfigError(fmt::format("{}: each entry needs a year", where(source, entry)));
                }
                ScheduleEntry e;
                e.year = scalar<int>(entry["year"], source, "year");
                for (const auto& group : entry) {
                    const auto g = group.first.as<std::string>();
                    if (g == "year") continue;
                    if (!group.second.IsMap()) {
                        throw ConfigError(fmt::format("{}: '{}' must be a mapping", where(source, group.second), g));
                    }
                    for (const auto& leaf : group.second) {
                        const std::string name = g + "." + leaf.first.as<std::string>();
                        const FieldInfo* f = nullptr;
                        try {
                            f = &field_info(name);
                        } catch (const ValidationError&) {
                            throw ConfigError(
                                fmt::format("{}: unknown field '{}'", where(source, leaf.second), name));
                        }
                        e.overrides[name] = field_value(*f, leaf.second, source);
                    }
                }
                s.entries.push_back(std::move(e));
            }
        } else {
            throw ConfigError(fmt::format("{}: unknown key '{}'", where(source, kv.first), key));
        }
    }
    if (!have_class) throw ConfigError(fmt::format("{}: vehicle_class is required", source));
    if (!have_entries || s.entries.empty()) throw ConfigError(fmt::format("{}: entries are required", source));
    if (s.name.empty()) s.name = std::string(to_string(s.vehicle_class));
    try {
        validate_schedule(s);
    } catch (const ValidationError& e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    return s;
}

ScenarioSchedule load_schedule_file(const std::string& path) {
    return parse_schedule_yaml(read_text(path), path);
}

std::string emit_schedule_yaml(const ScenarioSchedule& s) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "vehicle_class" << YAML::Value << std::string(to_string(s.vehicle_class));
    out << YAML::Key << "last_year" << YAML::Value << s.last_year;

    // Registry order keeps each group's fields together.
    auto emit_groups = [&](const std::map<std::string, std::string>& fields) {
        std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> groups;
        for (const auto& f : scenario_fields()) {
            const auto it = fields.find(std::string(f.name));
            if (it == fields.end()) continue;
            const auto [g, leaf] = split_field(f.name);
            if (groups.empty() || groups.back().first != g) groups.push_back({g, {}});
            groups.back().second.emplace_back(leaf, it->second);
        }
        for (const auto& [g, leaves] : groups) {
            out << YAML::Key << g << YAML::Value << YAML::BeginMap;
            for (const auto& [leaf, value] : leaves) out << YAML::Key << leaf << YAML::Value << value;
            out << YAML::EndMap;
        }
    };

    if (!s.interpolation.empty()) {
        std::map<std::string, std::string> modes;
        for (const auto& [name, mode] : s.interpolation) modes[name] = std::string(to_string(mode));
        out << YAML::Key << "interpolation" << YAML::Value << YAML::BeginMap;
        emit_groups(modes);
        out << YAML::EndMap;
    }

    out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : s.entries) {
        std::map<std::string, std::string> values;
        for (const auto& [name, v] : e.overrides) {
            values[name] = field_info(name).type == FieldType::boolean ? (v != 0.0 ? "true" : "false")
                                                                         : format_number(v);
        }
        out << YAML::BeginMap << YAML::Key << "year" << YAML::Value << e.year;
        emit_groups(values);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

nlohmann::ordered_json schedule_to_json(const ScenarioSchedule& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["vehicle_class"] = std::string(to_string(s.vehicle_class));
    j["last_year"] = s.last_year;
    nlohmann::ordered_json interp = nlohmann::ordered_json::object();
    for (const auto& [name, mode] : s.interpolation) interp[name] = std::string(to_string(mode));
    j["interpolation"] = interp;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : s.entries) {
        nlohmann::ordered_json je;
        je["year"] = e.year;
        for (const auto& [name, v] : e.overrides) je[name] = v;
        entries.push_back(je);
    }
    j["entries"] = entries;
    return j;
}

std::optional<std::string> config_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GREENPREM_CONFIG_DIR"); env != nullptr && *env != '\0') {
        return std::string(env);
    }
    return std::nullopt;
}

ScenarioSchedule resolve_schedule_ref(const std::string& ref, const std::optional<std::string>& dir) {
    namespace fs = std::filesystem;
    const fs::path p(ref);
    if (p.extension() == ".yaml" || p.extension() == ".yml") return load_schedule_file(ref);
    if (ref.find('/') != std::string::npos) throw ConfigError(fmt::format("scenario '{}' is not a .yaml file", ref));
    if (dir) {
        const fs::path candidate = fs::path(*dir) / (ref + ".yaml");
        if (!fs::exists(candidate)) {
            throw ConfigError(fmt::format("scenario '{}' not found in config directory '{}'", ref, *dir));
        }
        return load_schedule_file(candidate.string());
    }
    try {
        return default_schedule(parse_vehicle_class(ref));
    } catch (const ValidationError&) {
        throw ConfigError(fmt::format("unknown scenario '{}' (built-ins: long-range, short-range)", ref));
    }
}

FitConfig load_fit_config(const std::string& path, FitConfig cfg) {
    YAML::Node root;
    try {
        root = YAML::Load(read_text(path));
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
    if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", path));
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        const YAML::Node& v = kv.second;
        if (key == "population_size") cfg.population_size = scalar<int>(v, path, key);
        else if (key == "crossover_prob") cfg.crossover_prob = scalar<double>(v, path, key);
        else if (key == "mutation_prob") cfg.mutation_prob = scalar<double>(v, path, key);
        else if (key == "max_generations") cfg.max_generations = scalar<int>(v, path, key);
        else if (key == "p_bounds") cfg.p_bounds = bounds_from(v, path, key);
        else if (key == "q_bounds") cfg.q_bounds = bounds_from(v, path, key);
        else if (key == "beta_bounds") cfg.beta_bounds = bounds_from(v, path, key);
        else if (key == "m_mode") {
            const auto mode = scalar<std::string>(v, path, key);
            if (mode == "fixed") cfg.m_mode = MarketMode::fixed;
            else if (mode == "free") cfg.m_mode = MarketMode::free;
            else throw ConfigError(fmt::format("{}: m_mode must be fixed or free", where(path, v)));
        }
        else if (key == "m_fixed") cfg.m_fixed = scalar<double>(v, path, key);
        else if (key == "m_bounds") cfg.m_bounds = bounds_from(v, path, key);
        else if (key == "late_weight") cfg.late_weight = scalar<double>(v, path, key);
        else if (key == "late_from_year") cfg.late_from_year = scalar<int>(v, path, key);
        else if (key == "penalty_weight") cfg.penalty_weight = scalar<double>(v, path, key);
        else if (key == "initial_cumulative") cfg.initial_cumulative = scalar<double>(v, path, key);
        else if (key == "early_stop") cfg.early_stop = scalar<bool>(v, path, key);
        else if (key == "stagnation_generations") cfg.stagnation_generations = scalar<int>(v, path, key);
        else if (key == "stagnation_tolerance") cfg.stagnation_tolerance = scalar<double>(v, path, key);
        else if (key == "polish") cfg.polish = scalar<bool>(v, path, key);
        else if (key == "polish_iterations") cfg.polish_iterations = scalar<int>(v, path, key);
        else if (key == "threads") cfg.threads = scalar<unsigned>(v, path, key);
        else throw ConfigError(fmt::format("{}: unknown key '{}'", where(path, kv.first), key));
    }
    try {
        validate(cfg);
    } catch (const ValidationError& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
    return cfg;
}

nlohmann::ordered_json fit_config_to_json(const FitConfig& cfg) {
    auto pair = [](const ParamBounds& b) { return nlohmann::ordered_json::array({b.lo, b.hi}); };
    nlohmann::ordered_json j;
    j["population_size"] = cfg.population_size;
    j["crossover_prob"] = cfg.crossover_prob;
    j["mutation_prob"] = cfg.mutation_prob;
    j["max_generations"] = cfg.max_generations;
    j["p_bounds"] = pair(cfg.p_bounds);
    j["q_bounds"] = pair(cfg.q_bounds);
    j["beta_bounds"] = pair(cfg.beta_bounds);
    j["fit_beta"] = cfg.fit_beta;
    j["m_mode"] = cfg.m_mode == MarketMode::fixed ? "fixed" : "free";
    if (cfg.m_mode == MarketMode::fixed) {
        j["m_fixed"] = cfg.m_fixed;
    } else {
        j["m_bounds"] = pair(cfg.m_bounds);
    }
    j["late_weight"] = cfg.late_weight;
    j["late_from_year"] = cfg.late_from_year;
    j["penalty_weight"] = cfg.penalty_weight;
    j["initial_cumulative"] = cfg.initial_cumulative;
    j["early_stop"] = cfg.early_stop;
    j["stagnation_generations"] = cfg.stagnation_generations;
    j["stagnation_tolerance"] = cfg.stagnation_tolerance;
    j["polish"] = cfg.polish;
    j["polish_iterations"] = cfg.polish_iterations;
    return j;
}

} // namespace greenprem::cli
