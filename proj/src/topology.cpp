#include "metasim/topology.hpp"

#include <stdexcept>

namespace metasim {

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::Chain: return "chain";
        case TopologyKind::Grid: return "grid";
        case TopologyKind::Star: return "star";
        case TopologyKind::Ring: return "ring";
        case TopologyKind::Complete: return "complete";
        case TopologyKind::Random: return "random";
    }
    return "?";
}

std::optional<TopologyKind> topology_from_string(std::string_view name) {
    if (name == "chain") return TopologyKind::Chain;
    if (name == "grid") return TopologyKind::Grid;
    if (name == "star") return TopologyKind::Star;
    if (name == "ring") return TopologyKind::Ring;
    if (name == "complete") return TopologyKind::Complete;
    if (name == "random") return TopologyKind::Random;
    return std::nullopt;
}

TopologyGraph build_chain(int n) {
    if (n < 2) throw std::invalid_argument("chain needs n >= 2");
    TopologyGraph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

TopologyGraph build_ring(int n) {
    if (n < 3) throw std::invalid_argument("ring needs n >= 3");
    TopologyGraph g = build_chain(n);
    g.add_edge(n - 1, 0);
    return g;
}

TopologyGraph build_star(int n) {
    if (n < 2) throw std::invalid_argument("star needs n >= 2");
    TopologyGraph g(n);
    for (int i = 1; i < n; ++i) g.add_edge(0, i);
    return g;
}

TopologyGraph build_complete(int n) {
    if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
    TopologyGraph g(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    }
    return g;
}

TopologyGraph build_grid(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) throw std::invalid_argument("grid too small");
    TopologyGraph g(rows * cols);
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
            if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
        }
    }
    return g;
}

TopologyGraph build_random(const std::vector<std::pair<int, int>>* edge_override) {
    static const std::vector<std::pair<int, int>> kDefault = {
        {0, 1}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 4}, {3, 5}, {4, 5},
    };
    const auto& edges = edge_override ? *edge_override : kDefault;
    TopologyGraph g(6);
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    return g;
}

TopologyGraph build_graph(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::Chain: return build_chain();
        case TopologyKind::Grid: return build_grid();
        case TopologyKind::Star: return build_star();
        case TopologyKind::Ring: return build_ring();
        case TopologyKind::Complete: return build_complete();
        case TopologyKind::Random: return build_random();
    }
    throw std::invalid_argument("unknown topology kind");
}

std::optional<MigrationCondition> MigrationCondition::from_name(std::string_view name) {
    if (name == "cond1") return uniform(1.0);
    if (name == "cond2") return uniform(10.0);
    if (name == "cond3") return uniform(20.0);
    if (name == "cond4") return degree_weighted(10.0);
    return std::nullopt;
}

std::string MigrationCondition::name() const {
    if (kind == Kind::DegreeWeighted) {
        return value == 10.0 ? "cond4" : "degw" + std::to_string(value);
    }
    if (value == 1.0) return "cond1";
    if (value == 10.0) return "cond2";
    if (value == 20.0) return "cond3";
    return "uniform" + std::to_string(value);
}

double MigrationCondition::constant_for_degree(int degree) const {
    if (kind == Kind::Uniform) return value;
    if (degree <= 0) return 0.0;
    return value / static_cast<double>(degree);
}

double ColonizationCondition::dispersal_constant() const {
    return (ic == Ic::IC1 || ic == Ic::IC2) ? 1.0 : 10.0;
}

Count ColonizationCondition::empty_patch_prey() const {
    return (ic == Ic::IC1 || ic == Ic::IC3) ? 10 : 100;
}

std::string ColonizationCondition::ic_name() const {
    switch (ic) {
        case Ic::IC1: return "IC1";
        case Ic::IC2: return "IC2";
        case Ic::IC3: return "IC3";
        case Ic::IC4: return "IC4";
    }
    return "?";
}

std::optional<ColonizationCondition::Ic> ColonizationCondition::ic_from_name(std::string_view name) {
    if (name == "IC1" || name == "ic1") return Ic::IC1;
    if (name == "IC2" || name == "ic2") return Ic::IC2;
    if (name == "IC3" || name == "ic3") return Ic::IC3;
    if (name == "IC4" || name == "ic4") return Ic::IC4;
    return std::nullopt;
}

SpeciesTable lv_species_table() {
    SpeciesTable table;
    table.add("A", true);
    table.add("X", false);
    table.add("Y", false);
    return table;
}

std::vector<ReactionRule> lv_internal_rules(const LvParameters& params) {
    std::vector<ReactionRule> rules;
    rules.push_back(make_rule("r1", {{kSpeciesResource, 1}, {kSpeciesPrey, 1}},
                              {{kSpeciesPrey, 2}}, params.prey_growth));
    rules.push_back(make_rule("r2", {{kSpeciesPrey, 1}, {kSpeciesPredator, 1}},
                              {{kSpeciesPredator, 2}}, params.predation));
    rules.push_back(make_rule("r3", {{kSpeciesPredator, 1}}, {}, params.predator_death));
    return rules;
}

std::vector<std::vector<ReactionRule>> assign_dispersal(const TopologyGraph& graph,
                                                        const MigrationCondition& condition,
                                                        int species) {
    std::vector<std::vector<ReactionRule>> per_volume(static_cast<std::size_t>(graph.node_count()));
    for (int i = 0; i < graph.node_count(); ++i) {
        const double c = condition.constant_for_degree(graph.degree(i));
        for (int j : graph.neighbors(i)) {
            per_volume[static_cast<std::size_t>(i)].push_back(
                make_rule("d_p" + std::to_string(j), {{species, 1}}, {{species, 1}}, c, j));
        }
    }
    return per_volume;
}

namespace {

MetapopulationModel assemble(TopologyGraph graph) {
    MetapopulationModel model;
    model.species = lv_species_table();
    model.graph = std::move(graph);
    model.volumes.resize(static_cast<std::size_t>(model.graph.node_count()));
    for (int i = 0; i < model.graph.node_count(); ++i) {
        Volume& v = model.volumes[static_cast<std::size_t>(i)];
        v.index = i;
        v.name = "p" + std::to_string(i);
        v.counts.assign(static_cast<std::size_t>(model.species.size()), 0);
    }
    return model;
}

} // namespace

MetapopulationModel build_migration_model(TopologyKind kind, const MigrationCondition& condition,
                                          const LvParameters& params) {
    MetapopulationModel model = assemble(build_graph(kind));
    auto dispersal = assign_dispersal(model.graph, condition);
    for (auto& v : model.volumes) {
        v.counts[kSpeciesResource] = params.resource;
        v.counts[kSpeciesPrey] = params.prey0;
        v.counts[kSpeciesPredator] = params.predator0;
        v.rules = lv_internal_rules(params);
        auto& extra = dispersal[static_cast<std::size_t>(v.index)];
        v.rules.insert(v.rules.end(), extra.begin(), extra.end());
    }
    return model;
}

MetapopulationModel build_colonization_model(TopologyKind kind,
                                             const ColonizationCondition& colonization,
                                             const LvParameters& params) {
    MetapopulationModel model = assemble(build_graph(kind));
    if (colonization.lv_set.empty()) {
        throw std::invalid_argument("colonization needs at least one seeded patch");
    }
    for (int p : colonization.lv_set) {
        if (p < 0 || p >= model.graph.node_count()) {
            throw std::invalid_argument("seeded patch p" + std::to_string(p) + " does not exist");
        }
    }
    const MigrationCondition condition =
        MigrationCondition::uniform(colonization.dispersal_constant());
    auto dispersal = assign_dispersal(model.graph, condition);
    for (auto& v : model.volumes) {
        const bool seeded = colonization.lv_set.count(v.index) > 0;
        v.counts[kSpeciesResource] = params.resource; // resource is a patch property
        v.counts[kSpeciesPrey] = seeded ? params.prey0 : colonization.empty_patch_prey();
        v.counts[kSpeciesPredator] = seeded ? params.predator0 : 0;
        v.rules = lv_internal_rules(params);
        auto& extra = dispersal[static_cast<std::size_t>(v.index)];
        v.rules.insert(v.rules.end(), extra.begin(), extra.end());
    }
    return model;
}

} // namespace metasim
