#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metasim/core.hpp"

namespace metasim {

enum class TopologyKind { Chain, Grid, Star, Ring, Complete, Random };

std::string to_string(TopologyKind kind);
std::optional<TopologyKind> topology_from_string(std::string_view name);

/// Habitat graph builders. All six kinds default to the 6-patch layout;
/// chain/ring/star/complete generalize to n >= 2 and the grid to
/// rows x cols. Grid nodes are numbered row-major: (p0,p1,p2)/(p3,p4,p5).
TopologyGraph build_chain(int n = 6);
TopologyGraph build_ring(int n = 6);
TopologyGraph build_star(int n = 6); // node 0 is the hub
TopologyGraph build_complete(int n = 6);
TopologyGraph build_grid(int rows = 2, int cols = 3);

/// The 6-node irregular layout. Its edge set pins the structural facts the
/// experiments rely on: p4 has the strictly highest degree (4), p2-p4-p5
/// is the only length-2 path from p2 to p5, p2 to p3 has distance 3, and
/// every patch is within two hops of p0 and of p4. Pass an explicit edge
/// set to substitute a different layout.
TopologyGraph build_random(const std::vector<std::pair<int, int>>* edge_override = nullptr);

TopologyGraph build_graph(TopologyKind kind);

/// Dispersal-constant policy. Uniform assigns the same constant to every
/// dispersal rule; degree-weighted splits a fixed total outflow evenly
/// over each patch's edges (constant = total / degree).
struct MigrationCondition {
    enum class Kind { Uniform, DegreeWeighted } kind = Kind::Uniform;
    double value = 1.0; // the constant (uniform) or the per-patch total

    static MigrationCondition uniform(double c) { return {Kind::Uniform, c}; }
    static MigrationCondition degree_weighted(double total = 10.0) {
        return {Kind::DegreeWeighted, total};
    }
    /// The four standard conditions: cond1/2/3 uniform 1/10/20, cond4
    /// degree-weighted with total 10.
    static std::optional<MigrationCondition> from_name(std::string_view name);
    std::string name() const;

    double constant_for_degree(int degree) const;
};

/// Initial conditions for colonization runs. Empty patches start with no
/// predators and a small prey stock; every patch (including the seeded
/// ones) uses the condition's dispersal constant.
struct ColonizationCondition {
    enum class Ic { IC1, IC2, IC3, IC4 } ic = Ic::IC1;
    std::set<int> lv_set; // patches seeded with the full predator-prey state

    double dispersal_constant() const;
    Count empty_patch_prey() const;
    std::string ic_name() const;
    static std::optional<Ic> ic_from_name(std::string_view name);
};

/// Standard predator-prey parameters used by every built-in scenario.
struct LvParameters {
    double prey_growth = 0.1;     // A + X -> 2 X
    double predation = 0.01;      // X + Y -> 2 Y
    double predator_death = 10.0; // Y -> 0
    Count prey0 = 1000;
    Count predator0 = 1000;
    Count resource = 200; // buffered
};

/// Species order used by all builders: A (buffered), X (prey), Y (predator).
inline constexpr int kSpeciesResource = 0;
inline constexpr int kSpeciesPrey = 1;
inline constexpr int kSpeciesPredator = 2;

SpeciesTable lv_species_table();

/// The three internal rules with the standard constants.
std::vector<ReactionRule> lv_internal_rules(const LvParameters& params = {});

/// One dispersal rule per neighbor for the given species, constants per
/// the migration condition; result is indexed by volume.
std::vector<std::vector<ReactionRule>> assign_dispersal(const TopologyGraph& graph,
                                                        const MigrationCondition& condition,
                                                        int species = kSpeciesPredator);

/// Every patch carries the full predator-prey state plus dispersal rules.
MetapopulationModel build_migration_model(TopologyKind kind, const MigrationCondition& condition,
                                          const LvParameters& params = {});

/// lv_set patches carry the full state; the rest start predator-free with
/// the condition's prey stock. All patches share the internal rule set and
/// the buffered resource. Throws std::invalid_argument on an empty or
/// out-of-range lv_set.
MetapopulationModel build_colonization_model(TopologyKind kind,
                                             const ColonizationCondition& colonization,
                                             const LvParameters& params = {});

} // namespace metasim
