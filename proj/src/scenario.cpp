#include "metasim/scenario.hpp"

#include <charconv>
#include <sstream>

namespace metasim {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::optional<int> parse_patch(std::string_view token) {
    if (!token.empty() && (token.front() == 'p' || token.front() == 'P')) token.remove_prefix(1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || value < 0) return std::nullopt;
    return value;
}

} // namespace

std::string ScenarioId::name() const {
    std::ostringstream os;
    if (family == Family::Migration) {
        os << "migration:" << to_string(topology) << ":" << condition.name();
    } else {
        os << "colonization:" << to_string(topology) << ":" << colonization.ic_name() << ":";
        bool first = true;
        for (int p : colonization.lv_set) {
            if (!first) os << ",";
            first = false;
            os << "p" << p;
        }
    }
    return os.str();
}

std::optional<ScenarioId> ScenarioId::from_name(std::string_view name) {
    const auto parts = split(name, ':');
    if (parts.size() < 3) return std::nullopt;
    const auto topology = topology_from_string(parts[1]);
    if (!topology) return std::nullopt;

    ScenarioId id;
    id.topology = *topology;
    if (parts[0] == "migration") {
        if (parts.size() != 3) return std::nullopt;
        const auto condition = MigrationCondition::from_name(parts[2]);
        if (!condition) return std::nullopt;
        id.family = Family::Migration;
        id.condition = *condition;
        return id;
    }
    if (parts[0] == "colonization") {
        if (parts.size() != 4) return std::nullopt;
        const auto ic = ColonizationCondition::ic_from_name(parts[2]);
        if (!ic) return std::nullopt;
        id.family = Family::Colonization;
        id.colonization.ic = *ic;
        for (const auto& token : split(parts[3], ',')) {
            const auto patch = parse_patch(token);
            if (!patch) return std::nullopt;
            id.colonization.lv_set.insert(*patch);
        }
        if (id.colonization.lv_set.empty()) return std::nullopt;
        return id;
    }
    return std::nullopt;
}

MetapopulationModel build_scenario_model(const ScenarioId& id) {
    if (id.family == ScenarioId::Family::Migration) {
        return build_migration_model(id.topology, id.condition);
    }
    return build_colonization_model(id.topology, id.colonization);
}

ModelDocument emit_scenario(const ScenarioId& id) {
    return document_from_model(build_scenario_model(id));
}

std::vector<ScenarioId> builtin_scenarios() {
    std::vector<ScenarioId> out;
    const TopologyKind kinds[] = {TopologyKind::Chain,    TopologyKind::Grid, TopologyKind::Star,
                                  TopologyKind::Ring,     TopologyKind::Complete,
                                  TopologyKind::Random};
    for (const TopologyKind kind : kinds) {
        for (const char* cond : {"cond1", "cond2", "cond3", "cond4"}) {
            ScenarioId id;
            id.family = ScenarioId::Family::Migration;
            id.topology = kind;
            id.condition = *MigrationCondition::from_name(cond);
            out.push_back(id);
        }
    }

    // The catalogued seeded-patch placements per topology.
    const std::vector<std::pair<TopologyKind, std::set<int>>> placements = {
        {TopologyKind::Chain, {0, 5}},   {TopologyKind::Chain, {2}},
        {TopologyKind::Chain, {0}},      {TopologyKind::Grid, {0}},
        {TopologyKind::Grid, {1}},       {TopologyKind::Star, {1}},
        {TopologyKind::Star, {1, 3}},    {TopologyKind::Star, {0}},
        {TopologyKind::Ring, {0}},       {TopologyKind::Complete, {0}},
        {TopologyKind::Complete, {0, 3}},{TopologyKind::Random, {0}},
        {TopologyKind::Random, {2}},     {TopologyKind::Random, {3}},
    };
    using Ic = ColonizationCondition::Ic;
    for (const auto& [kind, lv_set] : placements) {
        for (const Ic ic : {Ic::IC1, Ic::IC2, Ic::IC3, Ic::IC4}) {
            ScenarioId id;
            id.family = ScenarioId::Family::Colonization;
            id.topology = kind;
            id.colonization.ic = ic;
            id.colonization.lv_set = lv_set;
            out.push_back(id);
        }
    }
    return out;
}

} // namespace metasim
