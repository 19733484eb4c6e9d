#include "metasim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metasim {

std::string to_string(PatchClass c) {
    switch (c) {
        case PatchClass::Oscillating: return "oscillating";
        case PatchClass::PreyExtinct: return "prey-extinct";
        case PatchClass::PredatorAbsent: return "predator-absent";
        case PatchClass::DispersalOnly: return "dispersal-only";
    }
    return "?";
}

std::optional<double> detect_extinction(std::span<const double> times,
                                        std::span<const double> values) {
    if (values.empty() || values.back() != 0.0) return std::nullopt;
    std::size_t first_zero = values.size() - 1;
    while (first_zero > 0 && values[first_zero - 1] == 0.0) --first_zero;
    return times[first_zero];
}

namespace {

struct Peak {
    std::size_t index;
    double prominence;
};

/// Local maxima with plateau handling, plus topographic prominence: the
/// height above the higher of the two valley floors separating the peak
/// from taller terrain (or the series ends).
std::vector<Peak> find_peaks(std::span<const double> values) {
    std::vector<Peak> peaks;
    const std::size_t n = values.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (values[i] > values[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && values[j + 1] == values[i]) ++j;
            if (j + 1 < n && values[j + 1] < values[i]) {
                const std::size_t peak = (i + j) / 2;
                double left_min = values[i];
                for (std::size_t k = i; k-- > 0;) {
                    if (values[k] > values[peak]) break;
                    left_min = std::min(left_min, values[k]);
                }
                double right_min = values[j];
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (values[k] > values[peak]) break;
                    right_min = std::min(right_min, values[k]);
                }
                peaks.push_back({peak, values[peak] - std::max(left_min, right_min)});
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return peaks;
}

double mean_of(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace

std::optional<OscillationStats> detect_oscillation(std::span<const double> times,
                                                   std::span<const double> values,
                                                   double min_prominence) {
    if (values.size() < 8 || times.size() != values.size()) return std::nullopt;
    const double threshold = min_prominence * mean_of(values);
    std::vector<Peak> peaks = find_peaks(values);
    std::erase_if(peaks, [&](const Peak& p) { return p.prominence < threshold; });
    if (peaks.size() < 3) return std::nullopt;

    OscillationStats stats;
    for (const Peak& p : peaks) {
        stats.peak_times.push_back(times[p.index]);
        stats.peak_values.push_back(values[p.index]);
    }
    stats.period = (stats.peak_times.back() - stats.peak_times.front()) /
                   static_cast<double>(peaks.size() - 1);
    stats.mean_peak = mean_of(stats.peak_values);
    double var = 0.0;
    for (double v : stats.peak_values) var += (v - stats.mean_peak) * (v - stats.mean_peak);
    var /= static_cast<double>(stats.peak_values.size() - 1);
    stats.amplitude_cv = stats.mean_peak > 0.0 ? std::sqrt(var) / stats.mean_peak : 0.0;
    return stats;
}

PatchOutcome classify_colonization(const Trajectory& trajectory, int patch,
                                   Count initial_predators,
                                   const ColonizationThresholds& thresholds, int prey_species,
                                   int predator_species) {
    PatchOutcome outcome;
    outcome.patch = patch;

    const std::vector<double> prey = trajectory.series(patch, prey_species);
    const std::vector<double> predator = trajectory.series(patch, predator_species);
    const std::span<const double> times(trajectory.times);

    const auto prey_extinction = detect_extinction(times, prey);
    const auto predator_extinction = detect_extinction(times, predator);
    const double predator_max = predator.empty() ? 0.0 : *std::max_element(predator.begin(), predator.end());

    // Establishment: first sample where predators reach the threshold.
    std::optional<std::size_t> established_at;
    for (std::size_t k = 0; k < predator.size(); ++k) {
        if (predator[k] >= thresholds.establish) {
            established_at = k;
            break;
        }
    }

    outcome.extinction_time = prey_extinction;
    if (prey_extinction) {
        // Absorbing for the patch: prey cannot re-enter. Predators may still
        // stream through (a dispersal-only area) or die out with the patch.
        outcome.classification = (predator_extinction || predator_max < thresholds.fail)
                                     ? PatchClass::PreyExtinct
                                     : PatchClass::DispersalOnly;
        if (initial_predators == 0) outcome.classification = PatchClass::PreyExtinct;
        return outcome;
    }

    if (established_at) {
        const std::span<const double> tail_times = times.subspan(*established_at);
        const std::span<const double> tail_prey =
            std::span<const double>(prey).subspan(*established_at);
        const auto oscillation = detect_oscillation(tail_times, tail_prey, thresholds.min_prominence);
        if (oscillation && !predator_extinction) {
            outcome.classification = PatchClass::Oscillating;
            outcome.period_estimate = oscillation->period;
            outcome.amplitude_stats = {oscillation->mean_peak, oscillation->amplitude_cv};
            return outcome;
        }
    }

    outcome.classification = (predator_max < thresholds.fail) ? PatchClass::PredatorAbsent
                                                              : PatchClass::DispersalOnly;
    return outcome;
}

std::vector<PairStat> symmetry_report(const Trajectory& trajectory,
                                      const std::vector<std::pair<int, int>>& pairs,
                                      int prey_species, int predator_species) {
    std::vector<PairStat> out;
    if (trajectory.times.empty()) return out;
    const double t_half = trajectory.times.back() / 2.0;

    const auto stat = [&](int a, int b, int species) {
        const std::vector<double> sa = trajectory.series(a, species);
        const std::vector<double> sb = trajectory.series(b, species);
        const SeriesStats qa = series_stats(trajectory.times, sa, t_half);
        const SeriesStats qb = series_stats(trajectory.times, sb, t_half);
        const double pooled = std::sqrt((qa.stddev * qa.stddev + qb.stddev * qb.stddev) / 2.0);
        const double diff = std::fabs(qa.mean - qb.mean);
        if (pooled == 0.0) {
            return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return diff / pooled;
    };

    for (const auto& [a, b] : pairs) {
        out.push_back({a, b, stat(a, b, prey_species), stat(a, b, predator_species)});
    }
    return out;
}

std::vector<std::pair<double, double>> export_phase_space(const Trajectory& trajectory, int patch,
                                                          int prey_species, int predator_species) {
    std::vector<std::pair<double, double>> points;
    const std::vector<double> prey = trajectory.series(patch, prey_species);
    const std::vector<double> predator = trajectory.series(patch, predator_species);
    points.reserve(prey.size());
    for (std::size_t k = 0; k < prey.size(); ++k) points.emplace_back(prey[k], predator[k]);
    return points;
}

SeriesStats series_stats(std::span<const double> times, std::span<const double> values,
                         double t_from) {
    SeriesStats stats;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (times[k] < t_from) continue;
        sum += values[k];
        stats.min = std::min(stats.min, values[k]);
        stats.max = std::max(stats.max, values[k]);
        ++stats.samples;
    }
    if (stats.samples == 0) {
        stats.min = stats.max = 0.0;
        return stats;
    }
    stats.mean = sum / static_cast<double>(stats.samples);
    double var = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (times[k] < t_from) continue;
        var += (values[k] - stats.mean) * (values[k] - stats.mean);
    }
    stats.stddev = stats.samples > 1 ? std::sqrt(var / static_cast<double>(stats.samples - 1)) : 0.0;
    return stats;
}

} // namespace metasim
