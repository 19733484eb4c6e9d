#pragma once

#include <functional>
#include <string>
#include <vector>

#include "metasim/core.hpp"
#include "metasim/kinetics.hpp"
#include "metasim/rng.hpp"

namespace metasim {

/// Cross-volume deliveries accumulated during one step and drained exactly
/// once, after every volume has completed its leap.
struct MessageBuffer {
    struct Entry {
        int target = 0;
        int species = 0;
        Count amount = 0;
    };
    std::vector<Entry> entries;
};

/// Recorded run: counts for every volume on the sampling grid, plus the
/// metadata needed to reproduce the run bit-for-bit.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> volume_names;
    std::vector<std::string> species_names;
    std::vector<std::vector<std::vector<Count>>> counts; // [volume][sample][species]

    std::string scenario;
    std::uint64_t seed = 0;
    Engine engine = Engine::TauLeap;
    SimulationConfig config;
    bool terminated = false;  // every volume exhausted before t_end
    double final_time = 0.0;

    int sample_count() const { return static_cast<int>(times.size()); }
    Count at(int volume, int sample, int species) const {
        return counts[static_cast<std::size_t>(volume)][static_cast<std::size_t>(sample)]
                     [static_cast<std::size_t>(species)];
    }
    /// One species' series in one volume, as doubles for analysis.
    std::vector<double> series(int volume, int species) const;
};

/// Snapshot handed to a step observer after each accepted state change.
/// `firings[v][j]` counts rule j's firings in volume v during the step;
/// `delivered` lists the dispersal arrivals applied at step end.
struct StepObservation {
    enum class Kind { Leap, SsaEvent };
    Kind kind = Kind::Leap;
    double t_before = 0.0;
    double t_after = 0.0;
    std::vector<std::vector<Count>> firings;
    std::vector<MessageBuffer::Entry> delivered;
    const MetapopulationModel& model; // state after the step
};

enum class StepStatus {
    Advanced,   // state and/or clock moved, horizon not yet reached
    ReachedEnd, // clock hit the configured t_end
    Terminated, // every volume exhausted and message buffer empty
};

/// The synchronized multivolume engine: per-volume tau candidates, a
/// common global tau, Poisson leaps fired in step with a system-wide
/// critical-rule race, message exchange at step boundaries and an
/// exact-SSA fallback regime.
///
/// Volume i draws only from stream i (seeded stream_seed(seed, i)); the
/// coordinator's own draws (critical race, joint SSA) use the reserved
/// stream n. Output therefore depends only on (model, config, seed).
class Simulator {
public:
    Simulator(MetapopulationModel model, SimulationConfig config);

    const MetapopulationModel& model() const { return model_; }
    const SimulationConfig& config() const { return config_; }

    void set_observer(std::function<void(const StepObservation&)> observer);

    /// One synchronized step: propensities, global tau = min of per-volume
    /// candidates, fallback check, common-tau leap with rejection-and-halve
    /// (at most 20 halvings, then an SSA burst), delivery, clock advance.
    StepStatus global_step();

    /// Up to `steps` exact SSA events on the joint system, never moving the
    /// clock past t_limit. Dispersal events deliver immediately.
    StepStatus ssa_fallback(int steps, double t_limit);

    /// Runs to t_end (or termination), recording on the record_interval
    /// grid by sample-and-hold. Throws std::invalid_argument when the
    /// model or config fails validation.
    Trajectory run(const std::string& scenario_name = "");

private:
    struct Recorder;

    StepStatus leap_once();
    StepStatus run_fallback_burst();
    void deliver(std::vector<Outbound>& outbound, std::vector<MessageBuffer::Entry>& delivered);
    void notify(StepObservation::Kind kind, double t_before,
                const std::vector<MessageBuffer::Entry>& delivered);
    void commit_time(double t_new);

    MetapopulationModel model_;
    SimulationConfig config_;
    std::vector<RandomStream> volume_streams_;
    RandomStream coordinator_stream_;
    std::vector<CompiledVolume> compiled_;

    // per-step scratch, sized once
    std::vector<std::vector<double>> propensities_;
    std::vector<double> totals_;
    std::vector<std::vector<bool>> critical_;
    std::vector<std::vector<Count>> plans_;
    std::vector<std::vector<Count>> backups_;
    std::vector<Outbound> outbound_;
    std::vector<double> mu_scratch_, sigma_scratch_;
    std::vector<std::vector<Count>> last_firings_; // observer support

    std::function<void(const StepObservation&)> observer_;
    Recorder* recorder_ = nullptr;
};

} // namespace metasim
