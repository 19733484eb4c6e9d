#include "metasim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace metasim {

namespace {

std::string format_time(double t) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", t);
    return buffer;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    os << "time,volume";
    for (const auto& s : trajectory.species_names) os << "," << s;
    os << "\n";
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const std::string t = format_time(trajectory.times[k]);
        for (std::size_t v = 0; v < trajectory.volume_names.size(); ++v) {
            os << t << "," << trajectory.volume_names[v];
            for (const Count c : trajectory.counts[v][k]) os << "," << c;
            os << "\n";
        }
    }
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream os;
    write_trajectory_csv(os, trajectory);
    return os.str();
}

CsvReadResult read_trajectory_csv(std::istream& is) {
    CsvReadResult result;
    std::string line;
    if (!std::getline(is, line)) {
        result.error = "empty file";
        return result;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "time" || header[1] != "volume") {
        result.error = "expected header time,volume,<species...>";
        return result;
    }

    Trajectory trajectory;
    for (std::size_t i = 2; i < header.size(); ++i) {
        trajectory.species_names.emplace_back(header[i]);
    }

    std::map<std::string, std::size_t, std::less<>> volume_index;
    std::size_t line_number = 1;
    double current_time = 0.0;
    bool have_time = false;
    while (std::getline(is, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            result.error = "line " + std::to_string(line_number) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size());
            return result;
        }
        double t = 0.0;
        {
            const auto f = fields[0];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), t);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                result.error = "line " + std::to_string(line_number) + ": bad time value";
                return result;
            }
        }
        if (!have_time || t != current_time) {
            if (have_time && t < current_time) {
                result.error = "line " + std::to_string(line_number) + ": times must not decrease";
                return result;
            }
            trajectory.times.push_back(t);
            current_time = t;
            have_time = true;
        }

        const std::string volume_name(fields[1]);
        auto it = volume_index.find(volume_name);
        if (it == volume_index.end()) {
            if (trajectory.times.size() > 1) {
                result.error = "line " + std::to_string(line_number) + ": volume '" + volume_name +
                               "' appears after the first sample";
                return result;
            }
            it = volume_index.emplace(volume_name, trajectory.volume_names.size()).first;
            trajectory.volume_names.push_back(volume_name);
            trajectory.counts.emplace_back();
        }
        std::vector<Count> row;
        row.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            Count c = 0;
            const auto f = fields[i];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), c);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                result.error = "line " + std::to_string(line_number) + ": bad count value '" +
                               std::string(f) + "'";
                return result;
            }
            row.push_back(c);
        }
        trajectory.counts[it->second].push_back(std::move(row));
    }

    for (std::size_t v = 0; v < trajectory.counts.size(); ++v) {
        if (trajectory.counts[v].size() != trajectory.times.size()) {
            result.error = "volume '" + trajectory.volume_names[v] + "' has " +
                           std::to_string(trajectory.counts[v].size()) + " rows for " +
                           std::to_string(trajectory.times.size()) + " sample times";
            return result;
        }
    }
    if (trajectory.times.empty()) {
        result.error = "no data rows";
        return result;
    }
    trajectory.final_time = trajectory.times.back();
    result.trajectory = std::move(trajectory);
    return result;
}

CsvReadResult read_trajectory_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        CsvReadResult result;
        result.error = "cannot open " + path;
        return result;
    }
    return read_trajectory_csv(in);
}

} // namespace metasim
