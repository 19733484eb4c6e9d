#include "metasim/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace metasim {

SpeciesTable::SpeciesTable(std::vector<Species> entries) {
    for (auto& s : entries) add(std::move(s.name), s.buffered);
}

int SpeciesTable::add(std::string name, bool buffered) {
    if (name.empty()) throw std::invalid_argument("species name must be non-empty");
    if (index_of(name)) throw std::invalid_argument("duplicate species name: " + name);
    entries_.push_back(Species{std::move(name), buffered});
    return static_cast<int>(entries_.size()) - 1;
}

std::optional<int> SpeciesTable::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
}

namespace {

std::vector<StoichTerm> normalize_terms(std::vector<StoichTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const StoichTerm& a, const StoichTerm& b) { return a.species < b.species; });
    std::vector<StoichTerm> merged;
    for (const auto& t : terms) {
        if (t.count <= 0) throw std::invalid_argument("stoichiometry must be positive");
        if (!merged.empty() && merged.back().species == t.species) {
            merged.back().count += t.count;
        } else {
            merged.push_back(t);
        }
    }
    return merged;
}

void accumulate(std::vector<Count>& delta, const std::vector<StoichTerm>& terms,
                const SpeciesTable& species, Count sign) {
    for (const auto& t : terms) {
        if (t.species < 0 || t.species >= species.size()) {
            throw std::out_of_range("species index out of range in rule");
        }
        if (species[t.species].buffered) continue;
        delta[static_cast<std::size_t>(t.species)] += sign * t.count;
    }
}

} // namespace

ReactionRule make_rule(std::string id, std::vector<StoichTerm> reactants,
                       std::vector<StoichTerm> products, double constant,
                       std::optional<int> target) {
    ReactionRule rule;
    rule.id = std::move(id);
    rule.reactants = normalize_terms(std::move(reactants));
    rule.products = normalize_terms(std::move(products));
    rule.constant = constant;
    rule.target = target;
    return rule;
}

std::vector<Count> net_change(const ReactionRule& rule, const SpeciesTable& species) {
    std::vector<Count> delta(static_cast<std::size_t>(species.size()), 0);
    accumulate(delta, rule.reactants, species, -1);
    if (!rule.is_dispersal()) {
        // Internal rule: products stay in the volume.
        accumulate(delta, rule.products, species, +1);
    }
    return delta;
}

std::vector<Count> dispersal_target_change(const ReactionRule& rule, const SpeciesTable& species) {
    std::vector<Count> delta(static_cast<std::size_t>(species.size()), 0);
    if (rule.is_dispersal()) accumulate(delta, rule.products, species, +1);
    return delta;
}

TopologyGraph::TopologyGraph(int node_count) : node_count_(node_count) {
    if (node_count < 0) throw std::invalid_argument("node count must be >= 0");
    adjacency_.resize(static_cast<std::size_t>(node_count));
}

void TopologyGraph::add_edge(int a, int b, double weight) {
    if (a < 0 || a >= node_count_ || b < 0 || b >= node_count_) {
        throw std::out_of_range("edge endpoint out of range");
    }
    Edge e{std::min(a, b), std::max(a, b), weight};
    auto pos = std::lower_bound(edges_.begin(), edges_.end(), e, [](const Edge& x, const Edge& y) {
        return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    if (pos != edges_.end() && pos->a == e.a && pos->b == e.b) {
        pos->weight = weight; // reweight existing edge
        return;
    }
    edges_.insert(pos, e);
    auto link = [this](int from, int to) {
        auto& adj = adjacency_[static_cast<std::size_t>(from)];
        adj.insert(std::lower_bound(adj.begin(), adj.end(), to), to);
    };
    link(e.a, e.b);
    if (e.a != e.b) link(e.b, e.a);
}

bool TopologyGraph::adjacent(int a, int b) const {
    if (a < 0 || a >= node_count_ || b < 0 || b >= node_count_) return false;
    const auto& adj = adjacency_[static_cast<std::size_t>(a)];
    return std::binary_search(adj.begin(), adj.end(), b);
}

const std::vector<int>& TopologyGraph::neighbors(int node) const {
    return adjacency_.at(static_cast<std::size_t>(node));
}

int TopologyGraph::degree(int node) const {
    return static_cast<int>(neighbors(node).size());
}

double TopologyGraph::weight(int a, int b) const {
    const Edge key{std::min(a, b), std::max(a, b), 0.0};
    for (const auto& e : edges_) {
        if (e.a == key.a && e.b == key.b) return e.weight;
    }
    throw std::out_of_range("no such edge");
}

std::vector<std::pair<int, int>> TopologyGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.emplace_back(e.a, e.b);
    return out;
}

std::string to_string(Engine engine) {
    return engine == Engine::ExactSsa ? "ssa" : "tau";
}

std::optional<Engine> engine_from_string(std::string_view name) {
    if (name == "ssa" || name == "exact-ssa") return Engine::ExactSsa;
    if (name == "tau" || name == "tau-leap") return Engine::TauLeap;
    return std::nullopt;
}

std::vector<std::string> validate_config(const SimulationConfig& config) {
    std::vector<std::string> out;
    if (!(config.t_end > 0.0)) out.push_back("t_end must be > 0");
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) out.push_back("epsilon must be in (0,1)");
    if (config.critical_threshold < 0) out.push_back("critical_threshold must be >= 0");
    if (config.ssa_fallback_steps <= 0) out.push_back("ssa_fallback_steps must be > 0");
    if (!(config.record_interval > 0.0)) out.push_back("record_interval must be > 0");
    if (config.record_interval > config.t_end) out.push_back("record_interval must be <= t_end");
    return out;
}

namespace {

void check_rule(const MetapopulationModel& model, const Volume& volume, const ReactionRule& rule,
                std::vector<Violation>& out) {
    const std::string where = "volume " + volume.name + ", rule " + rule.id;
    auto in_range = [&](const std::vector<StoichTerm>& terms) {
        for (const auto& t : terms) {
            if (t.species < 0 || t.species >= model.species.size()) return false;
            if (t.count <= 0) return false;
        }
        return true;
    };
    if (!in_range(rule.reactants) || !in_range(rule.products)) {
        out.push_back({where, "species index or stoichiometry out of range"});
        return;
    }
    if (!(rule.constant >= 0.0) || !std::isfinite(rule.constant)) {
        out.push_back({where, "stochastic constant must be finite and >= 0"});
    }
    if (rule.is_dispersal()) {
        if (rule.reactants.size() != 1 || rule.reactants[0].count != 1) {
            out.push_back({where, "dispersal rule must have exactly one reactant with stoichiometry 1"});
        }
        if (rule.products != rule.reactants) {
            out.push_back({where, "dispersal rule products must equal reactants"});
        }
        const int target = *rule.target;
        if (target < 0 || target >= model.graph.node_count()) {
            out.push_back({where, "dispersal target volume does not exist"});
        } else if (target == volume.index) {
            out.push_back({where, "dispersal rule targets its own volume"});
        } else if (!model.graph.adjacent(volume.index, target)) {
            out.push_back({where, "dispersal target " + model.volumes[static_cast<std::size_t>(target)].name +
                                      " is not adjacent to " + volume.name});
        }
    }
}

} // namespace

std::vector<Violation> validate_model(const MetapopulationModel& model) {
    std::vector<Violation> out;

    std::set<std::string> names;
    bool any_unbuffered = false;
    for (const auto& s : model.species.entries()) {
        if (s.name.empty()) out.push_back({"species table", "empty species name"});
        if (!names.insert(s.name).second) {
            out.push_back({"species table", "duplicate species name: " + s.name});
        }
        if (!s.buffered) any_unbuffered = true;
    }
    if (model.species.size() == 0) {
        out.push_back({"species table", "no species declared"});
    } else if (!any_unbuffered) {
        out.push_back({"species table", "all species are buffered; model cannot evolve"});
    }

    for (const auto& [a, b] : model.graph.edges()) {
        if (a == b) {
            out.push_back({"graph", "self-edge at node " + std::to_string(a)});
        } else if (!(model.graph.weight(a, b) > 0.0)) {
            out.push_back({"graph", "non-positive weight on edge (" + std::to_string(a) + "," +
                                        std::to_string(b) + ")"});
        }
    }

    if (static_cast<int>(model.volumes.size()) != model.graph.node_count()) {
        out.push_back({"model", "volume count " + std::to_string(model.volumes.size()) +
                                    " != graph node count " + std::to_string(model.graph.node_count())});
        return out; // structure mismatch makes per-volume checks unreliable
    }

    for (std::size_t i = 0; i < model.volumes.size(); ++i) {
        const Volume& v = model.volumes[i];
        const std::string where = "volume " + v.name;
        if (v.index != static_cast<int>(i)) {
            out.push_back({where, "volume index " + std::to_string(v.index) +
                                      " does not match position " + std::to_string(i)});
        }
        if (!(v.area > 0.0)) out.push_back({where, "area must be > 0"});
        if (static_cast<int>(v.counts.size()) != model.species.size()) {
            out.push_back({where, "counts vector length " + std::to_string(v.counts.size()) +
                                      " != species count " + std::to_string(model.species.size())});
        } else {
            for (std::size_t s = 0; s < v.counts.size(); ++s) {
                if (v.counts[s] < 0) {
                    out.push_back({where, "negative count for species " +
                                              model.species[static_cast<int>(s)].name});
                }
            }
        }
        for (const auto& rule : v.rules) check_rule(model, v, rule, out);
    }

    if (model.time < 0.0 || !std::isfinite(model.time)) {
        out.push_back({"model", "clock must be finite and >= 0"});
    }
    return out;
}

} // namespace metasim
