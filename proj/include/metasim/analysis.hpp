#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metasim/coordinator.hpp"

namespace metasim {

enum class PatchClass { Oscillating, PreyExtinct, PredatorAbsent, DispersalOnly };

std::string to_string(PatchClass c);

/// Post-run verdict for one patch.
struct PatchOutcome {
    int patch = 0;
    PatchClass classification = PatchClass::PredatorAbsent;
    std::optional<double> extinction_time;          // prey extinction, if any
    std::optional<double> period_estimate;
    std::optional<std::pair<double, double>> amplitude_stats; // mean peak, CV
};

/// Earliest sample time at which the value is zero and stays zero through
/// the end of the series; nullopt if the species persists or recovers.
std::optional<double> detect_extinction(std::span<const double> times,
                                        std::span<const double> values);

struct OscillationStats {
    double period = 0.0;
    std::vector<double> peak_times;
    std::vector<double> peak_values;
    double mean_peak = 0.0;
    double amplitude_cv = 0.0; // coefficient of variation of peak heights
};

/// Peak-based oscillation detector. A peak is a local maximum whose
/// prominence (height above the higher of its neighboring valley floors)
/// exceeds min_prominence * mean(series); needs at least 3 peaks.
/// min_prominence is relative to the series mean so one setting serves
/// patches with different population scales.
std::optional<OscillationStats> detect_oscillation(std::span<const double> times,
                                                   std::span<const double> values,
                                                   double min_prominence = 0.2);

/// Thresholds for colonization verdicts. The establishment/failure counts
/// approximate a by-eye reading of population plots and are deliberately
/// configurable.
struct ColonizationThresholds {
    double establish = 50.0; // predators needed to count as establishment
    double fail = 10.0;      // never reaching this many = predator-absent
    double min_prominence = 0.2;
};

/// Classifies one patch of a finished run. For an initially empty patch
/// (initial_predators == 0), `Oscillating` means colonized: predators
/// established, prey oscillation detected afterwards, and neither species
/// sustained-zero at the end.
PatchOutcome classify_colonization(const Trajectory& trajectory, int patch,
                                   Count initial_predators,
                                   const ColonizationThresholds& thresholds = {},
                                   int prey_species = 1, int predator_species = 2);

struct PairStat {
    int patch_a = 0;
    int patch_b = 0;
    double prey_stat = 0.0;
    double predator_stat = 0.0;
};

/// Dynamical-equivalence statistic per patch pair: |mean(a) - mean(b)|
/// over the pooled standard deviation, computed on the trailing half of
/// the run (transients excluded). Near zero means the two patches settled
/// into the same dynamics.
std::vector<PairStat> symmetry_report(const Trajectory& trajectory,
                                      const std::vector<std::pair<int, int>>& pairs,
                                      int prey_species = 1, int predator_species = 2);

/// Ordered (prey, predator) points at sample times, for phase-space plots.
std::vector<std::pair<double, double>> export_phase_space(const Trajectory& trajectory, int patch,
                                                          int prey_species = 1,
                                                          int predator_species = 2);

struct SeriesStats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t samples = 0;
};

/// Mean/spread of the series restricted to times >= t_from.
SeriesStats series_stats(std::span<const double> times, std::span<const double> values,
                         double t_from);

} // namespace metasim
