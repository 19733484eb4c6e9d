#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "metasim/coordinator.hpp"

namespace metasim {

/// Long-format trajectory CSV: header `time,volume,<species...>`, one row
/// per (sample time, volume). Times are written with %.12g so identical
/// runs serialize to identical bytes.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
std::string trajectory_csv(const Trajectory& trajectory);

struct CsvReadResult {
    std::optional<Trajectory> trajectory; // metadata fields are left default
    std::string error;                    // set when trajectory is empty
};

/// Reads a trajectory CSV back. Volumes appear in order of first
/// occurrence; every sample time must cover the same volume set.
CsvReadResult read_trajectory_csv(std::istream& is);
CsvReadResult read_trajectory_csv_file(const std::string& path);

} // namespace metasim
