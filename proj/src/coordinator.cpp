#include "metasim/coordinator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metasim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxHalvings = 20;
constexpr double kFallbackMultiplier = 10.0; // leap shorter than 10 expected SSA steps -> SSA
} // namespace

std::vector<double> Trajectory::series(int volume, int species) const {
    const auto& matrix = counts[static_cast<std::size_t>(volume)];
    std::vector<double> out;
    out.reserve(matrix.size());
    for (const auto& row : matrix) out.push_back(static_cast<double>(row[static_cast<std::size_t>(species)]));
    return out;
}

/// Sample-and-hold recorder. Before each committed state change the grid
/// points strictly below the new time are filled with the held state;
/// a grid point equal to an event time picks up that event's state on the
/// next commit (or at finish).
struct Simulator::Recorder {
    std::vector<double> grid;
    std::size_t cursor = 0;
    std::vector<std::vector<Count>> held; // per volume
    Trajectory* out = nullptr;

    void init(const MetapopulationModel& model, double t_end, double interval, Trajectory* trajectory) {
        out = trajectory;
        const auto points = static_cast<std::size_t>(std::floor(t_end / interval + 1e-9));
        grid.resize(points + 1);
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = static_cast<double>(k) * interval;
        hold(model);
    }

    void hold(const MetapopulationModel& model) {
        held.resize(model.volumes.size());
        for (std::size_t v = 0; v < model.volumes.size(); ++v) held[v] = model.volumes[v].counts;
    }

    void flush_below(double t_new) {
        while (cursor < grid.size() && grid[cursor] < t_new) {
            append(grid[cursor]);
            ++cursor;
        }
    }

    void commit(double t_new, const MetapopulationModel& model) {
        flush_below(t_new);
        hold(model);
    }

    void finish() {
        while (cursor < grid.size()) {
            append(grid[cursor]);
            ++cursor;
        }
    }

    void append(double t) {
        out->times.push_back(t);
        for (std::size_t v = 0; v < held.size(); ++v) out->counts[v].push_back(held[v]);
    }
};

Simulator::Simulator(MetapopulationModel model, SimulationConfig config)
    : model_(std::move(model)),
      config_(config),
      coordinator_stream_(stream_seed(config.seed, static_cast<std::uint64_t>(model_.volumes.size()))) {
    const std::size_t n = model_.volumes.size();
    volume_streams_.reserve(n);
    compiled_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        volume_streams_.emplace_back(stream_seed(config.seed, static_cast<std::uint64_t>(v)));
        compiled_.emplace_back(model_.volumes[v], model_.species);
        propensities_.emplace_back(model_.volumes[v].rules.size(), 0.0);
        critical_.emplace_back(model_.volumes[v].rules.size(), false);
        plans_.emplace_back(model_.volumes[v].rules.size(), 0);
        backups_.emplace_back();
        last_firings_.emplace_back(model_.volumes[v].rules.size(), 0);
    }
    totals_.assign(n, 0.0);
}

void Simulator::set_observer(std::function<void(const StepObservation&)> observer) {
    observer_ = std::move(observer);
}

void Simulator::deliver(std::vector<Outbound>& outbound, std::vector<MessageBuffer::Entry>& delivered) {
    for (const Outbound& o : outbound) {
        model_.volumes[static_cast<std::size_t>(o.target)].counts[static_cast<std::size_t>(o.species)] +=
            o.amount;
        delivered.push_back({o.target, o.species, o.amount});
    }
    outbound.clear();
}

void Simulator::notify(StepObservation::Kind kind, double t_before,
                       const std::vector<MessageBuffer::Entry>& delivered) {
    if (!observer_) return;
    StepObservation obs{kind, t_before, model_.time, last_firings_, delivered, model_};
    observer_(obs);
}

void Simulator::commit_time(double t_new) {
    if (recorder_) recorder_->flush_below(t_new);
    model_.time = t_new;
}

StepStatus Simulator::global_step() {
    if (model_.time >= config_.t_end) return StepStatus::ReachedEnd;

    const std::size_t n = model_.volumes.size();
    double grand_total = 0.0;
    double max_total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        totals_[v] = compiled_[v].propensities(model_.volumes[v].counts, propensities_[v]);
        grand_total += totals_[v];
        max_total = std::max(max_total, totals_[v]);
    }
    if (grand_total <= 0.0) return StepStatus::Terminated;

    // Per-volume candidates over non-critical rules; exhausted volumes
    // contribute +infinity.
    double tau1 = kInf;
    double critical_total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        if (totals_[v] <= 0.0) {
            std::fill(critical_[v].begin(), critical_[v].end(), false);
            continue;
        }
        compiled_[v].classify_critical(model_.volumes[v].counts, config_.critical_threshold,
                                       critical_[v]);
        tau1 = std::min(tau1, compiled_[v].tau_candidate(model_.volumes[v].counts, propensities_[v],
                                                         critical_[v], config_.epsilon, mu_scratch_,
                                                         sigma_scratch_));
        for (std::size_t j = 0; j < critical_[v].size(); ++j) {
            if (critical_[v][j]) critical_total += propensities_[v][j];
        }
    }

    if (tau1 < kFallbackMultiplier / max_total) return run_fallback_burst();

    double tau_limit = std::min(tau1, config_.t_end - model_.time);
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
        // Critical-rule race: one exponential draw against the leap; at most
        // one critical firing system-wide.
        double tau = tau_limit;
        int critical_volume = -1;
        int critical_rule = -1;
        if (critical_total > 0.0) {
            const double race = coordinator_stream_.exponential(critical_total);
            if (race < tau_limit) {
                tau = race;
                const double threshold = coordinator_stream_.uniform01() * critical_total;
                double cumulative = 0.0;
                bool done = false;
                for (std::size_t v = 0; v < n && !done; ++v) {
                    for (std::size_t j = 0; j < critical_[v].size(); ++j) {
                        if (!critical_[v][j] || propensities_[v][j] <= 0.0) continue;
                        critical_volume = static_cast<int>(v);
                        critical_rule = static_cast<int>(j);
                        cumulative += propensities_[v][j];
                        if (threshold < cumulative) {
                            done = true;
                            break;
                        }
                    }
                }
            }
        }
        if (!(tau > 0.0)) return StepStatus::ReachedEnd;

        for (std::size_t v = 0; v < n; ++v) {
            const int crit = (static_cast<int>(v) == critical_volume) ? critical_rule : -1;
            compiled_[v].sample_plan(propensities_[v], critical_[v], tau, crit, volume_streams_[v],
                                     plans_[v]);
        }

        bool accepted = true;
        for (std::size_t v = 0; v < n; ++v) {
            backups_[v] = model_.volumes[v].counts;
            if (!compiled_[v].apply(plans_[v], model_.volumes[v].counts, outbound_)) {
                accepted = false;
                for (std::size_t u = 0; u <= v; ++u) model_.volumes[u].counts = backups_[u];
                break;
            }
        }
        if (!accepted) {
            outbound_.clear();
            tau_limit = tau / 2.0;
            continue;
        }

        const double t_before = model_.time;
        if (recorder_) recorder_->flush_below(t_before + tau);
        std::vector<MessageBuffer::Entry> delivered;
        deliver(outbound_, delivered);
        model_.time = t_before + tau;
        if (recorder_) recorder_->hold(model_);
        if (observer_) {
            for (std::size_t v = 0; v < n; ++v) last_firings_[v] = plans_[v];
            notify(StepObservation::Kind::Leap, t_before, delivered);
        }
        return model_.time >= config_.t_end ? StepStatus::ReachedEnd : StepStatus::Advanced;
    }

    return run_fallback_burst();
}

StepStatus Simulator::run_fallback_burst() {
    return ssa_fallback(config_.ssa_fallback_steps, config_.t_end);
}

StepStatus Simulator::ssa_fallback(int steps, double t_limit) {
    const std::size_t n = model_.volumes.size();
    for (int step = 0; step < steps; ++step) {
        double grand_total = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            totals_[v] = compiled_[v].propensities(model_.volumes[v].counts, propensities_[v]);
            grand_total += totals_[v];
        }
        if (grand_total <= 0.0) return StepStatus::Terminated;

        const double dt = coordinator_stream_.exponential(grand_total);
        if (model_.time + dt > t_limit) {
            // Next event falls beyond the horizon: advance the clock only.
            if (recorder_) recorder_->flush_below(t_limit);
            model_.time = t_limit;
            if (recorder_) recorder_->hold(model_);
            return StepStatus::ReachedEnd;
        }

        // Two-stage pick: volume by total propensity, then rule within it.
        double threshold = coordinator_stream_.uniform01() * grand_total;
        std::size_t volume = 0;
        {
            double cumulative = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (totals_[v] <= 0.0) continue;
                volume = v;
                cumulative += totals_[v];
                if (threshold < cumulative) break;
            }
        }
        int rule = 0;
        {
            double pick = coordinator_stream_.uniform01() * totals_[volume];
            double cumulative = 0.0;
            for (std::size_t j = 0; j < propensities_[volume].size(); ++j) {
                if (propensities_[volume][j] <= 0.0) continue;
                rule = static_cast<int>(j);
                cumulative += propensities_[volume][j];
                if (pick < cumulative) break;
            }
        }

        const double t_before = model_.time;
        if (recorder_) recorder_->flush_below(t_before + dt);

        std::vector<Count> single(plans_[volume].size(), 0);
        single[static_cast<std::size_t>(rule)] = 1;
        const bool ok =
            compiled_[volume].apply(single, model_.volumes[volume].counts, outbound_);
        assert(ok && "a rule with positive propensity cannot drive counts negative");
        (void)ok;
        std::vector<MessageBuffer::Entry> delivered;
        deliver(outbound_, delivered); // dispersal delivers immediately in SSA mode
        model_.time = t_before + dt;
        if (recorder_) recorder_->hold(model_);
        if (observer_) {
            for (std::size_t v = 0; v < n; ++v) {
                std::fill(last_firings_[v].begin(), last_firings_[v].end(), 0);
            }
            last_firings_[volume][static_cast<std::size_t>(rule)] = 1;
            notify(StepObservation::Kind::SsaEvent, t_before, delivered);
        }
    }
    return model_.time >= t_limit ? StepStatus::ReachedEnd : StepStatus::Advanced;
}

Trajectory Simulator::run(const std::string& scenario_name) {
    {
        const auto violations = validate_model(model_);
        if (!violations.empty()) {
            throw std::invalid_argument("invalid model: " + violations.front().location + ": " +
                                        violations.front().message);
        }
        const auto config_errors = validate_config(config_);
        if (!config_errors.empty()) {
            throw std::invalid_argument("invalid config: " + config_errors.front());
        }
    }

    Trajectory trajectory;
    trajectory.scenario = scenario_name;
    trajectory.seed = config_.seed;
    trajectory.engine = config_.engine;
    trajectory.config = config_;
    for (const auto& v : model_.volumes) trajectory.volume_names.push_back(v.name);
    for (const auto& s : model_.species.entries()) trajectory.species_names.push_back(s.name);
    trajectory.counts.resize(model_.volumes.size());

    Recorder recorder;
    recorder.init(model_, config_.t_end, config_.record_interval, &trajectory);
    recorder_ = &recorder;

    StepStatus status = StepStatus::Advanced;
    while (status == StepStatus::Advanced) {
        status = (config_.engine == Engine::ExactSsa)
                     ? ssa_fallback(std::numeric_limits<int>::max(), config_.t_end)
                     : global_step();
    }
    trajectory.terminated = (status == StepStatus::Terminated);
    trajectory.final_time = model_.time;
    recorder.finish();
    recorder_ = nullptr;
    return trajectory;
}

} // namespace metasim
