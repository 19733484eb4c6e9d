#pragma once

#include <optional>
#include <span>
#include <vector>

#include "metasim/core.hpp"
#include "metasim/rng.hpp"

namespace metasim {

/// Per-rule firing rates for one volume, aligned with its rule list.
struct PropensityVector {
    std::vector<double> values;
    double total = 0.0;
};

/// Result of tau selection for one volume.
struct TauSelection {
    double tau_candidate = 0.0;      // from non-critical rules; +inf if none bind
    std::vector<bool> critical;      // aligned with the volume's rule list
};

/// Materialization of one leap: how many times each rule fires.
struct FiringPlan {
    std::vector<Count> counts;
    double tau = 0.0;
};

/// One cross-volume delivery produced by a dispersal firing.
struct Outbound {
    int target = 0;
    int species = 0;
    Count amount = 0;
};

struct ApplyResult {
    std::vector<Count> counts; // post-firing counts of the volume
    std::vector<Outbound> outbound;
};

struct SsaEvent {
    double dt = 0.0;
    int rule_index = 0;
};

/// Mass-action propensity: constant times the number of distinct reactant
/// combinations. Buffered species contribute their (fixed) count like any
/// other reactant.
double propensity(const ReactionRule& rule, const SpeciesTable& species,
                  std::span<const Count> counts);

PropensityVector compute_propensities(const Volume& volume, const SpeciesTable& species);

/// One Gillespie direct-method draw: waiting time Exp(total) and a rule
/// picked with probability a_j / total. Does not mutate the volume.
/// Returns nullopt when the volume is exhausted (total propensity zero).
std::optional<SsaEvent> ssa_step(const Volume& volume, const SpeciesTable& species,
                                 RandomStream& rng);

/// Cao-Gillespie species-based tau selection. Rules that cannot fire
/// `critical_threshold` times without exhausting a reactant are flagged
/// critical and excluded from the candidate bound.
TauSelection select_tau(const Volume& volume, const SpeciesTable& species,
                        const PropensityVector& propensities, double epsilon,
                        int critical_threshold);

/// Samples one leap of length tau: Poisson(a_j * tau) firings for each
/// non-critical rule; `critical_rule` (when set) fires exactly once; all
/// other critical rules fire zero times. Does not mutate the volume.
FiringPlan fire_leap(const Volume& volume, const SpeciesTable& species,
                     const PropensityVector& propensities, const std::vector<bool>& critical,
                     double tau, std::optional<int> critical_rule, RandomStream& rng);

/// Applies a plan. Dispersal firings decrement locally and surface as
/// outbound entries; delivery is the coordinator's job. Returns nullopt
/// (rejected) if any count would go negative; the volume is untouched
/// either way.
std::optional<ApplyResult> apply_plan(const Volume& volume, const SpeciesTable& species,
                                      const FiringPlan& plan);

/// Structural compilation of one volume's rule list: sparse net-change
/// vectors, consumption lists and highest-order-of-reaction data, computed
/// once so the per-step loop stays allocation-free. This is the engine's
/// fast path; the free functions above are the same math on uncompiled
/// inputs.
class CompiledVolume {
public:
    CompiledVolume(const Volume& volume, const SpeciesTable& species);

    int rule_count() const { return static_cast<int>(rules_.size()); }
    int species_count() const { return species_count_; }

    /// Fills `out` (size = rule count) and returns the total.
    double propensities(std::span<const Count> counts, std::span<double> out) const;

    /// How many consecutive firings of `rule` the counts can absorb.
    Count max_firings(int rule, std::span<const Count> counts) const;

    void classify_critical(std::span<const Count> counts, int critical_threshold,
                           std::vector<bool>& out) const;

    /// Tau candidate over non-critical rules; mu/sigma are scratch buffers
    /// (resized to the species count).
    double tau_candidate(std::span<const Count> counts, std::span<const double> propensities,
                         const std::vector<bool>& critical, double epsilon,
                         std::vector<double>& mu, std::vector<double>& sigma2) const;

    void sample_plan(std::span<const double> propensities, const std::vector<bool>& critical,
                     double tau, int critical_rule, RandomStream& rng,
                     std::vector<Count>& out) const;

    /// Applies firing counts in place; appends outbound deliveries.
    /// Returns false (and leaves `counts` partially modified; caller
    /// restores from its backup) when a count would go negative.
    bool apply(std::span<const Count> plan, std::span<Count> counts,
               std::vector<Outbound>& outbound) const;

    /// Net source-side change of one firing of `rule` for species `s`.
    Count delta(int rule, int species) const;

private:
    struct CompiledRule {
        double constant = 0.0;
        std::vector<StoichTerm> reactants;
        std::vector<std::pair<int, Count>> source_delta; // nonzero entries only
        std::vector<std::pair<int, Count>> consumption;  // per-firing decrements
        int target = -1;        // dispersal target volume, -1 for internal
        int moved_species = -1; // dispersal species, -1 if none survives buffering
    };
    // Reactant-order records per species, for the Cao g_i factor.
    struct OrderRecord {
        int order;  // total order of the rule
        int stoich; // this species' stoichiometry in it
    };

    double g_factor(int species, Count x) const;

    int species_count_ = 0;
    std::vector<CompiledRule> rules_;
    std::vector<std::vector<OrderRecord>> orders_; // per species
};

} // namespace metasim
