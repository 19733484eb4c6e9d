#include "metasim/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metasim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double combinations(Count x, int k) {
    // Number of distinct k-subsets of x molecules, as a double.
    if (x < k) return 0.0;
    double result = 1.0;
    for (int i = 0; i < k; ++i) result *= static_cast<double>(x - i);
    for (int i = 2; i <= k; ++i) result /= static_cast<double>(i);
    return result;
}

int pick_weighted(std::span<const double> weights, double total, RandomStream& rng) {
    double threshold = rng.uniform01() * total;
    double cumulative = 0.0;
    int last_positive = -1;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        last_positive = static_cast<int>(j);
        cumulative += weights[j];
        if (threshold < cumulative) return last_positive;
    }
    return last_positive; // float round-off: fall back to the last viable rule
}

} // namespace

double propensity(const ReactionRule& rule, const SpeciesTable& species,
                  std::span<const Count> counts) {
    double a = rule.constant;
    for (const auto& term : rule.reactants) {
        if (term.species < 0 || term.species >= species.size() ||
            static_cast<std::size_t>(term.species) >= counts.size()) {
            throw std::out_of_range("species index out of range in rule " + rule.id);
        }
        a *= combinations(counts[static_cast<std::size_t>(term.species)], term.count);
        if (a == 0.0) return 0.0;
    }
    return a;
}

PropensityVector compute_propensities(const Volume& volume, const SpeciesTable& species) {
    PropensityVector pv;
    pv.values.reserve(volume.rules.size());
    for (const auto& rule : volume.rules) {
        const double a = propensity(rule, species, volume.counts);
        pv.values.push_back(a);
        pv.total += a;
    }
    return pv;
}

std::optional<SsaEvent> ssa_step(const Volume& volume, const SpeciesTable& species,
                                 RandomStream& rng) {
    const PropensityVector pv = compute_propensities(volume, species);
    if (pv.total <= 0.0) return std::nullopt;
    SsaEvent event;
    event.dt = rng.exponential(pv.total);
    event.rule_index = pick_weighted(pv.values, pv.total, rng);
    return event;
}

TauSelection select_tau(const Volume& volume, const SpeciesTable& species,
                        const PropensityVector& propensities, double epsilon,
                        int critical_threshold) {
    if (propensities.total <= 0.0) {
        throw std::invalid_argument("select_tau requires positive total propensity");
    }
    const CompiledVolume compiled(volume, species);
    TauSelection sel;
    compiled.classify_critical(volume.counts, critical_threshold, sel.critical);
    std::vector<double> mu, sigma2;
    sel.tau_candidate = compiled.tau_candidate(volume.counts, propensities.values, sel.critical,
                                               epsilon, mu, sigma2);
    return sel;
}

FiringPlan fire_leap(const Volume& volume, const SpeciesTable& species,
                     const PropensityVector& propensities, const std::vector<bool>& critical,
                     double tau, std::optional<int> critical_rule, RandomStream& rng) {
    if (!(tau > 0.0)) throw std::invalid_argument("fire_leap requires tau > 0");
    const CompiledVolume compiled(volume, species);
    FiringPlan plan;
    plan.tau = tau;
    compiled.sample_plan(propensities.values, critical, tau, critical_rule.value_or(-1), rng,
                         plan.counts);
    return plan;
}

std::optional<ApplyResult> apply_plan(const Volume& volume, const SpeciesTable& species,
                                      const FiringPlan& plan) {
    if (plan.counts.size() != volume.rules.size()) {
        throw std::invalid_argument("firing plan not aligned with volume rules");
    }
    const CompiledVolume compiled(volume, species);
    ApplyResult result;
    result.counts = volume.counts;
    if (!compiled.apply(plan.counts, result.counts, result.outbound)) return std::nullopt;
    return result;
}

CompiledVolume::CompiledVolume(const Volume& volume, const SpeciesTable& species)
    : species_count_(species.size()) {
    orders_.resize(static_cast<std::size_t>(species_count_));
    rules_.reserve(volume.rules.size());
    for (const auto& rule : volume.rules) {
        CompiledRule cr;
        cr.constant = rule.constant;
        cr.reactants = rule.reactants;

        const std::vector<Count> source = net_change(rule, species);
        for (int s = 0; s < species_count_; ++s) {
            const Count d = source[static_cast<std::size_t>(s)];
            if (d != 0) cr.source_delta.emplace_back(s, d);
            if (d < 0) cr.consumption.emplace_back(s, -d);
        }
        if (rule.is_dispersal()) {
            cr.target = *rule.target;
            const std::vector<Count> gain = dispersal_target_change(rule, species);
            for (int s = 0; s < species_count_; ++s) {
                if (gain[static_cast<std::size_t>(s)] > 0) cr.moved_species = s;
            }
        }

        int order = 0;
        for (const auto& term : rule.reactants) order += term.count;
        for (const auto& term : rule.reactants) {
            if (species[term.species].buffered) continue;
            orders_[static_cast<std::size_t>(term.species)].push_back({order, term.count});
        }
        rules_.push_back(std::move(cr));
    }
}

double CompiledVolume::propensities(std::span<const Count> counts, std::span<double> out) const {
    double total = 0.0;
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        double a = rules_[j].constant;
        for (const auto& term : rules_[j].reactants) {
            a *= combinations(counts[static_cast<std::size_t>(term.species)], term.count);
            if (a == 0.0) break;
        }
        out[j] = a;
        total += a;
    }
    return total;
}

Count CompiledVolume::max_firings(int rule, std::span<const Count> counts) const {
    const auto& consumption = rules_[static_cast<std::size_t>(rule)].consumption;
    Count limit = std::numeric_limits<Count>::max();
    for (const auto& [s, per_firing] : consumption) {
        limit = std::min(limit, counts[static_cast<std::size_t>(s)] / per_firing);
    }
    return limit;
}

void CompiledVolume::classify_critical(std::span<const Count> counts, int critical_threshold,
                                       std::vector<bool>& out) const {
    out.assign(rules_.size(), false);
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        if (rules_[j].consumption.empty()) continue;
        if (max_firings(static_cast<int>(j), counts) < critical_threshold) out[j] = true;
    }
}

double CompiledVolume::g_factor(int species, Count x) const {
    double g = 1.0;
    for (const auto& rec : orders_[static_cast<std::size_t>(species)]) {
        double gj;
        if (rec.order <= 1) {
            gj = 1.0;
        } else if (rec.order == 2) {
            gj = (rec.stoich >= 2 && x > 1) ? 2.0 + 1.0 / static_cast<double>(x - 1) : 2.0;
        } else if (rec.order == 3) {
            if (rec.stoich >= 3 && x > 2) {
                gj = 3.0 + 1.0 / static_cast<double>(x - 1) + 2.0 / static_cast<double>(x - 2);
            } else if (rec.stoich == 2 && x > 1) {
                gj = 1.5 * (2.0 + 1.0 / static_cast<double>(x - 1));
            } else {
                gj = 3.0;
            }
        } else {
            gj = static_cast<double>(rec.order);
        }
        g = std::max(g, gj);
    }
    return g;
}

double CompiledVolume::tau_candidate(std::span<const Count> counts,
                                     std::span<const double> propensities,
                                     const std::vector<bool>& critical, double epsilon,
                                     std::vector<double>& mu, std::vector<double>& sigma2) const {
    mu.assign(static_cast<std::size_t>(species_count_), 0.0);
    sigma2.assign(static_cast<std::size_t>(species_count_), 0.0);
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        if (critical[j] || propensities[j] <= 0.0) continue;
        for (const auto& [s, d] : rules_[j].source_delta) {
            const double nu = static_cast<double>(d);
            mu[static_cast<std::size_t>(s)] += nu * propensities[j];
            sigma2[static_cast<std::size_t>(s)] += nu * nu * propensities[j];
        }
    }
    double tau = kInf;
    for (int s = 0; s < species_count_; ++s) {
        const double sig = sigma2[static_cast<std::size_t>(s)];
        if (sig <= 0.0) continue; // species untouched by non-critical rules
        const double x = static_cast<double>(counts[static_cast<std::size_t>(s)]);
        const double bound = std::max(epsilon * x / g_factor(s, counts[static_cast<std::size_t>(s)]), 1.0);
        const double abs_mu = std::fabs(mu[static_cast<std::size_t>(s)]);
        if (abs_mu > 0.0) tau = std::min(tau, bound / abs_mu);
        tau = std::min(tau, bound * bound / sig);
    }
    return tau;
}

void CompiledVolume::sample_plan(std::span<const double> propensities,
                                 const std::vector<bool>& critical, double tau, int critical_rule,
                                 RandomStream& rng, std::vector<Count>& out) const {
    out.assign(rules_.size(), 0);
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        if (critical[j]) continue;
        if (propensities[j] <= 0.0) continue;
        out[j] = rng.poisson(propensities[j] * tau);
    }
    if (critical_rule >= 0) out[static_cast<std::size_t>(critical_rule)] = 1;
}

bool CompiledVolume::apply(std::span<const Count> plan, std::span<Count> counts,
                           std::vector<Outbound>& outbound) const {
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        const Count firings = plan[j];
        if (firings == 0) continue;
        const CompiledRule& rule = rules_[j];
        for (const auto& [s, d] : rule.source_delta) {
            counts[static_cast<std::size_t>(s)] += d * firings;
        }
        if (rule.target >= 0 && rule.moved_species >= 0) {
            outbound.push_back({rule.target, rule.moved_species, firings});
        }
    }
    for (const Count c : counts) {
        if (c < 0) return false;
    }
    return true;
}

Count CompiledVolume::delta(int rule, int species) const {
    for (const auto& [s, d] : rules_[static_cast<std::size_t>(rule)].source_delta) {
        if (s == species) return d;
    }
    return 0;
}

} // namespace metasim
