#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metasim/modelspec.hpp"
#include "metasim/topology.hpp"

namespace metasim {

/// Addressable built-in experiment. Names:
///   migration:<topology>:<cond1|cond2|cond3|cond4>
///   colonization:<topology>:<IC1..IC4>:<p_i[,p_j...]>
struct ScenarioId {
    enum class Family { Migration, Colonization } family = Family::Migration;
    TopologyKind topology = TopologyKind::Chain;
    MigrationCondition condition;          // migration family
    ColonizationCondition colonization;    // colonization family

    std::string name() const;
    static std::optional<ScenarioId> from_name(std::string_view name);
};

MetapopulationModel build_scenario_model(const ScenarioId& id);

/// The scenario as a model document (no config block; run parameters are
/// runtime concerns).
ModelDocument emit_scenario(const ScenarioId& id);

/// All built-in scenarios: every topology x migration condition, plus the
/// catalogued colonization cases x IC1..IC4.
std::vector<ScenarioId> builtin_scenarios();

} // namespace metasim
