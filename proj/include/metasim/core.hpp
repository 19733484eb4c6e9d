#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace metasim {

using Count = std::int64_t;

/// Named species. Buffered species (the sustenance resource) enter
/// propensities with their current count but are never changed by rule
/// application.
struct Species {
    std::string name;
    bool buffered = false;
};

/// Ordered species registry; the position of a species is its index and is
/// stable for the lifetime of the table.
class SpeciesTable {
public:
    SpeciesTable() = default;
    explicit SpeciesTable(std::vector<Species> entries);

    /// Appends a species; throws std::invalid_argument on duplicate or
    /// empty name.
    int add(std::string name, bool buffered = false);

    std::optional<int> index_of(std::string_view name) const;
    const Species& operator[](int index) const { return entries_.at(static_cast<std::size_t>(index)); }
    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<Species>& entries() const { return entries_; }

private:
    std::vector<Species> entries_;
};

/// One reactant or product entry: `count` copies of species `species`.
struct StoichTerm {
    int species = 0;
    int count = 1;

    friend bool operator==(const StoichTerm&, const StoichTerm&) = default;
};

/// A mass-action rule. Internal rules rewrite the volume's own counts;
/// rules with a target are dispersal rules of the form S -> (S, target)
/// and move one individual to the target volume per firing.
struct ReactionRule {
    std::string id;
    std::vector<StoichTerm> reactants; // sorted by species index, merged
    std::vector<StoichTerm> products;
    double constant = 0.0; // stochastic constant, time^-1
    std::optional<int> target; // dispersal target volume index

    bool is_dispersal() const { return target.has_value(); }
};

/// Builds a rule from term lists; merges duplicate species and sorts terms.
ReactionRule make_rule(std::string id, std::vector<StoichTerm> reactants,
                       std::vector<StoichTerm> products, double constant,
                       std::optional<int> target = std::nullopt);

/// Net state change of one firing on the volume that hosts the rule.
/// Buffered species are forced to zero. For dispersal rules the product
/// lands in the target volume, so the source side is -reactants.
std::vector<Count> net_change(const ReactionRule& rule, const SpeciesTable& species);

/// Target-side change of a dispersal rule (+1 for the moved species,
/// buffered forced to zero). Zero vector for internal rules.
std::vector<Count> dispersal_target_change(const ReactionRule& rule, const SpeciesTable& species);

/// A habitat patch: its counts vector (indexed by species) and the rules
/// that act inside it.
struct Volume {
    int index = 0;
    std::string name;
    double area = 1.0;
    std::vector<Count> counts;
    std::vector<ReactionRule> rules;
};

/// Undirected weighted graph over volume indices. Self-edges and other
/// structural defects are reported by validate_model, not masked here.
class TopologyGraph {
public:
    TopologyGraph() = default;
    explicit TopologyGraph(int node_count);

    int node_count() const { return node_count_; }

    /// Adds (or reweights) an undirected edge; indices must be in range.
    void add_edge(int a, int b, double weight = 1.0);

    bool adjacent(int a, int b) const;
    const std::vector<int>& neighbors(int node) const; // sorted
    int degree(int node) const;
    std::size_t edge_count() const { return edges_.size(); }
    double weight(int a, int b) const;

    /// All edges as (min,max) pairs in lexicographic order.
    std::vector<std::pair<int, int>> edges() const;

private:
    struct Edge {
        int a, b; // a <= b
        double weight;
    };
    int node_count_ = 0;
    std::vector<Edge> edges_; // sorted by (a, b)
    std::vector<std::vector<int>> adjacency_;
};

/// The whole multivolume model. Structure (species, graph, volume count)
/// is fixed during simulation; only counts and the clock evolve.
struct MetapopulationModel {
    SpeciesTable species;
    TopologyGraph graph;
    std::vector<Volume> volumes;
    double time = 0.0;
};

enum class Engine { ExactSsa, TauLeap };

std::string to_string(Engine engine);
std::optional<Engine> engine_from_string(std::string_view name);

struct SimulationConfig {
    double t_end = 10.0;
    std::uint64_t seed = 0;
    Engine engine = Engine::TauLeap;
    double epsilon = 0.03;
    int critical_threshold = 10;
    int ssa_fallback_steps = 100;
    double record_interval = 0.01;
};

/// Config sanity violations as text; empty means usable.
std::vector<std::string> validate_config(const SimulationConfig& config);

/// One invariant violation, with enough location to act on.
struct Violation {
    std::string location; // e.g. "volume p0, rule d1"
    std::string message;
};

/// Checks every model invariant (species names, graph shape, count vector
/// sizes and signs, rule indices, dispersal adjacency). Returns all
/// violations found; an empty list means the model is runnable.
std::vector<Violation> validate_model(const MetapopulationModel& model);

} // namespace metasim
