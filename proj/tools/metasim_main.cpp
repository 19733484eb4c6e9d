// metasim command-line harness: run scenario files or built-in scenarios,
// write trajectory CSVs and manifests, post-process results.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metasim/analysis.hpp"
#include "metasim/coordinator.hpp"
#include "metasim/csv.hpp"
#include "metasim/modelspec.hpp"
#include "metasim/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string sanitize(std::string name) {
    for (char& c : name) {
        if (c == ':' || c == ',' || c == '/' || c == '\\' || c == ' ') c = '_';
    }
    return name;
}

int thread_budget(int replicates) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    if (const char* env = std::getenv("METASIM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) threads = cap;
    }
    return std::max(1, std::min(threads, replicates));
}

struct LoadedModel {
    metasim::ModelDocument document;
    std::string label; // scenario name or file stem
    std::string origin; // "scenario" or file path
};

std::optional<LoadedModel> load_model(const std::string& model_file, const std::string& scenario,
                                      std::ostream& err) {
    if (!scenario.empty() && !model_file.empty()) {
        err << "error: give either a model file or --scenario, not both\n";
        return std::nullopt;
    }
    if (!scenario.empty()) {
        const auto id = metasim::ScenarioId::from_name(scenario);
        if (!id) {
            err << "error: unknown scenario '" << scenario
                << "' (see `metasim list-scenarios`)\n";
            return std::nullopt;
        }
        return LoadedModel{metasim::emit_scenario(*id), sanitize(id->name()), "scenario"};
    }
    if (model_file.empty()) {
        err << "error: a model file or --scenario is required\n";
        return std::nullopt;
    }
    std::ifstream in(model_file);
    if (!in) {
        err << "error: cannot open " << model_file << "\n";
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto parsed = metasim::parse(buffer.str());
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) {
            err << model_file << ":" << metasim::format_diagnostic(d) << "\n";
        }
        return std::nullopt;
    }
    return LoadedModel{*parsed.document, fs::path(model_file).stem().string(), model_file};
}

// ------------------------------------------------------------------ run --

struct RunOptions {
    std::string model_file;
    std::string scenario;
    double t_end = 10.0;
    std::uint64_t seed = 0;
    int replicates = 1;
    std::string engine = "tau";
    double epsilon = 0.03;
    double record_interval = 0.01;
    std::string out_dir = ".";
};

int cmd_run(const RunOptions& opt, const std::vector<bool>& flag_given) {
    const auto loaded = load_model(opt.model_file, opt.scenario, std::cerr);
    if (!loaded) return kExitUsage;

    metasim::SimulationConfig config = metasim::config_from(loaded->document);
    // Explicit flags override the file's config block.
    enum { kTEnd = 0, kSeed, kEngine, kEpsilon, kRecord };
    if (flag_given[kTEnd]) config.t_end = opt.t_end;
    if (flag_given[kSeed]) config.seed = opt.seed;
    if (flag_given[kEpsilon]) config.epsilon = opt.epsilon;
    if (flag_given[kRecord]) config.record_interval = opt.record_interval;
    if (flag_given[kEngine] || !loaded->document.config.engine) {
        const auto engine = metasim::engine_from_string(opt.engine);
        if (!engine) {
            std::cerr << "error: engine must be 'ssa' or 'tau'\n";
            return kExitUsage;
        }
        config.engine = *engine;
    }

    const auto config_errors = metasim::validate_config(config);
    if (!config_errors.empty()) {
        for (const auto& e : config_errors) std::cerr << "error: " << e << "\n";
        return kExitUsage;
    }
    metasim::MetapopulationModel model = metasim::to_model(loaded->document);
    const auto violations = metasim::validate_model(model);
    if (!violations.empty()) {
        for (const auto& v : violations) {
            std::cerr << "error: " << v.location << ": " << v.message << "\n";
        }
        return kExitUsage;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << opt.out_dir << ": " << ec.message() << "\n";
        return kExitIo;
    }

    const std::string canonical = metasim::serialize(loaded->document);
    std::vector<std::string> files(static_cast<std::size_t>(opt.replicates));
    std::vector<std::string> failures(static_cast<std::size_t>(opt.replicates));

    const int threads = thread_budget(opt.replicates);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= opt.replicates) return;
            metasim::SimulationConfig replicate_config = config;
            replicate_config.seed = config.seed + static_cast<std::uint64_t>(k);
            metasim::Simulator simulator(metasim::to_model(loaded->document), replicate_config);
            const metasim::Trajectory trajectory =
                simulator.run(opt.scenario.empty() ? loaded->label : opt.scenario);

            std::ostringstream name;
            name << loaded->label << "_rep" << k << ".csv";
            const fs::path path = fs::path(opt.out_dir) / name.str();
            std::ofstream out(path);
            if (!out) {
                failures[static_cast<std::size_t>(k)] = "cannot write " + path.string();
                continue;
            }
            metasim::write_trajectory_csv(out, trajectory);
            files[static_cast<std::size_t>(k)] = name.str();
        }
    };
    {
        std::vector<std::thread> pool;
        for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures) {
        if (!failure.empty()) {
            std::cerr << "error: " << failure << "\n";
            return kExitIo;
        }
    }

    json manifest;
    manifest["model"] = loaded->origin == "scenario" ? opt.scenario : loaded->origin;
    manifest["model_hash"] = "fnv1a:" + std::to_string(fnv1a(canonical));
    manifest["master_seed"] = config.seed;
    json seeds = json::array();
    for (int k = 0; k < opt.replicates; ++k) seeds.push_back(config.seed + static_cast<std::uint64_t>(k));
    manifest["seeds"] = seeds;
    manifest["engine"] = metasim::to_string(config.engine);
    manifest["config"] = {{"t_end", config.t_end},
                          {"epsilon", config.epsilon},
                          {"critical_threshold", config.critical_threshold},
                          {"ssa_fallback_steps", config.ssa_fallback_steps},
                          {"record_interval", config.record_interval}};
    manifest["files"] = files;

    const fs::path manifest_path = fs::path(opt.out_dir) / "manifest.json";
    std::ofstream manifest_out(manifest_path);
    if (!manifest_out) {
        std::cerr << "error: cannot write " << manifest_path.string() << "\n";
        return kExitIo;
    }
    manifest_out << manifest.dump(2) << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- analyze --

struct AnalyzeOptions {
    std::string mode = "summary";
    std::vector<std::string> csv_paths;
    std::string out;
    std::string pairs;
    std::string prey = "X";
    std::string predator = "Y";
    double establish = 50.0;
    double fail = 10.0;
};

int species_index_or_die(const metasim::Trajectory& t, const std::string& name) {
    for (std::size_t i = 0; i < t.species_names.size(); ++i) {
        if (t.species_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int volume_index_or_die(const metasim::Trajectory& t, const std::string& name) {
    for (std::size_t i = 0; i < t.volume_names.size(); ++i) {
        if (t.volume_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int write_report(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitIo;
    }
    out << text;
    return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opt) {
    if (opt.csv_paths.empty()) {
        std::cerr << "error: no input CSV files\n";
        return kExitUsage;
    }
    std::vector<metasim::Trajectory> runs;
    for (const auto& path : opt.csv_paths) {
        auto read = metasim::read_trajectory_csv_file(path);
        if (!read.trajectory) {
            std::cerr << "error: " << path << ": " << read.error << "\n";
            return kExitUsage;
        }
        runs.push_back(std::move(*read.trajectory));
    }
    const auto& first = runs.front();
    for (const auto& run : runs) {
        if (run.species_names != first.species_names ||
            run.volume_names != first.volume_names) {
            std::cerr << "error: input CSVs disagree on species/volume layout\n";
            return kExitUsage;
        }
    }

    std::ostringstream report;

    if (opt.mode == "summary") {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const auto& run = runs[r];
            report << "# " << opt.csv_paths[r] << "\n";
            report << "volume,species,mean,std,min,max,extinction_time,period\n";
            const double t_half = run.times.back() / 2.0;
            for (std::size_t v = 0; v < run.volume_names.size(); ++v) {
                for (std::size_t s = 0; s < run.species_names.size(); ++s) {
                    const auto series = run.series(static_cast<int>(v), static_cast<int>(s));
                    const auto stats = metasim::series_stats(run.times, series, t_half);
                    const auto extinction = metasim::detect_extinction(run.times, series);
                    const auto oscillation = metasim::detect_oscillation(run.times, series);
                    report << run.volume_names[v] << "," << run.species_names[s] << ","
                           << stats.mean << "," << stats.stddev << "," << stats.min << ","
                           << stats.max << ",";
                    if (extinction) report << *extinction;
                    report << ",";
                    if (oscillation) report << oscillation->period;
                    report << "\n";
                }
            }
        }
        return write_report(opt.out, report.str());
    }

    if (opt.mode == "colonization") {
        const int prey = species_index_or_die(first, opt.prey);
        const int predator = species_index_or_die(first, opt.predator);
        if (prey < 0 || predator < 0) {
            std::cerr << "error: species '" << opt.prey << "'/'" << opt.predator
                      << "' not found in CSV header\n";
            return kExitUsage;
        }
        metasim::ColonizationThresholds thresholds;
        thresholds.establish = opt.establish;
        thresholds.fail = opt.fail;

        report << "patch,initial_Y,oscillating,prey_extinct,predator_absent,dispersal_only,verdict\n";
        for (std::size_t v = 0; v < first.volume_names.size(); ++v) {
            const metasim::Count initial_y = first.counts[v][0][static_cast<std::size_t>(predator)];
            std::map<metasim::PatchClass, int> votes;
            for (const auto& run : runs) {
                const auto outcome = metasim::classify_colonization(
                    run, static_cast<int>(v), initial_y, thresholds, prey, predator);
                ++votes[outcome.classification];
            }
            std::string verdict;
            if (initial_y > 0) {
                verdict = "seed";
            } else {
                const int colonized = votes[metasim::PatchClass::Oscillating];
                verdict = colonized * 2 > static_cast<int>(runs.size()) ? "colonized"
                                                                        : "not-colonized";
            }
            report << first.volume_names[v] << "," << initial_y << ","
                   << votes[metasim::PatchClass::Oscillating] << ","
                   << votes[metasim::PatchClass::PreyExtinct] << ","
                   << votes[metasim::PatchClass::PredatorAbsent] << ","
                   << votes[metasim::PatchClass::DispersalOnly] << "," << verdict << "\n";
        }
        return write_report(opt.out, report.str());
    }

    if (opt.mode == "symmetry") {
        if (opt.pairs.empty()) {
            std::cerr << "error: symmetry mode needs --pairs p0:p5,p1:p4,...\n";
            return kExitUsage;
        }
        const int prey = species_index_or_die(first, opt.prey);
        const int predator = species_index_or_die(first, opt.predator);
        if (prey < 0 || predator < 0) {
            std::cerr << "error: species not found in CSV header\n";
            return kExitUsage;
        }
        std::vector<std::pair<int, int>> pairs;
        std::stringstream ss(opt.pairs);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                std::cerr << "error: bad pair '" << item << "'\n";
                return kExitUsage;
            }
            const int a = volume_index_or_die(first, item.substr(0, colon));
            const int b = volume_index_or_die(first, item.substr(colon + 1));
            if (a < 0 || b < 0) {
                std::cerr << "error: unknown volume in pair '" << item << "'\n";
                return kExitUsage;
            }
            pairs.emplace_back(a, b);
        }
        std::vector<double> prey_sum(pairs.size(), 0.0), predator_sum(pairs.size(), 0.0);
        for (const auto& run : runs) {
            const auto stats = metasim::symmetry_report(run, pairs, prey, predator);
            for (std::size_t i = 0; i < stats.size(); ++i) {
                prey_sum[i] += stats[i].prey_stat;
                predator_sum[i] += stats[i].predator_stat;
            }
        }
        report << "pair,prey_stat,predator_stat,runs\n";
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            report << first.volume_names[static_cast<std::size_t>(pairs[i].first)] << ":"
                   << first.volume_names[static_cast<std::size_t>(pairs[i].second)] << ","
                   << prey_sum[i] / static_cast<double>(runs.size()) << ","
                   << predator_sum[i] / static_cast<double>(runs.size()) << "," << runs.size()
                   << "\n";
        }
        return write_report(opt.out, report.str());
    }

    if (opt.mode == "phase") {
        const int prey = species_index_or_die(first, opt.prey);
        const int predator = species_index_or_die(first, opt.predator);
        if (prey < 0 || predator < 0) {
            std::cerr << "error: species not found in CSV header\n";
            return kExitUsage;
        }
        const fs::path out_dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const std::string stem = fs::path(opt.csv_paths[r]).stem().string();
            for (std::size_t v = 0; v < first.volume_names.size(); ++v) {
                const auto points =
                    metasim::export_phase_space(runs[r], static_cast<int>(v), prey, predator);
                const fs::path path =
                    out_dir / ("phase_" + stem + "_" + first.volume_names[v] + ".csv");
                std::ofstream out(path);
                if (!out) {
                    std::cerr << "error: cannot write " << path.string() << "\n";
                    return kExitIo;
                }
                out << opt.prey << "," << opt.predator << "\n";
                for (const auto& [x, y] : points) out << x << "," << y << "\n";
            }
        }
        return kExitOk;
    }

    std::cerr << "error: unknown mode '" << opt.mode << "'\n";
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"metasim: stochastic multivolume metapopulation simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "simulate a model file or built-in scenario");
    run->add_option("model", run_opt.model_file, "model file (.mps)");
    run->add_option("--scenario", run_opt.scenario, "built-in scenario id");
    auto* flag_t_end = run->add_option("--t-end", run_opt.t_end, "simulation horizon");
    auto* flag_seed = run->add_option("--seed", run_opt.seed, "master seed");
    run->add_option("--replicates", run_opt.replicates, "independent runs (seed+k)")
        ->check(CLI::PositiveNumber);
    auto* flag_engine =
        run->add_option("--engine", run_opt.engine, "ssa | tau")->check(CLI::IsMember({"ssa", "tau"}));
    auto* flag_epsilon = run->add_option("--epsilon", run_opt.epsilon, "tau-leap accuracy knob");
    auto* flag_record =
        run->add_option("--record-interval", run_opt.record_interval, "output sampling step");
    run->add_option("--out", run_opt.out_dir, "output directory");

    AnalyzeOptions an_opt;
    auto* analyze = app.add_subcommand("analyze", "post-process trajectory CSVs");
    analyze->add_option("--mode", an_opt.mode, "summary | colonization | symmetry | phase")
        ->check(CLI::IsMember({"summary", "colonization", "symmetry", "phase"}));
    analyze->add_option("csv", an_opt.csv_paths, "trajectory CSV files");
    analyze->add_option("--out", an_opt.out, "report file (default stdout; phase: directory)");
    analyze->add_option("--pairs", an_opt.pairs, "patch pairs for symmetry mode, e.g. p0:p5,p1:p4");
    analyze->add_option("--prey", an_opt.prey, "prey species name");
    analyze->add_option("--predator", an_opt.predator, "predator species name");
    analyze->add_option("--establish", an_opt.establish, "colonization establishment threshold");
    analyze->add_option("--fail", an_opt.fail, "predator-absent threshold");

    auto* list = app.add_subcommand("list-scenarios", "print all built-in scenario ids");

    std::string emit_scenario_name, emit_out;
    auto* emit = app.add_subcommand("emit", "write a built-in scenario as a model file");
    emit->add_option("--scenario", emit_scenario_name, "scenario id")->required();
    emit->add_option("-o,--out", emit_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            std::vector<bool> given = {flag_t_end->count() > 0, flag_seed->count() > 0,
                                       flag_engine->count() > 0, flag_epsilon->count() > 0,
                                       flag_record->count() > 0};
            return cmd_run(run_opt, given);
        }
        if (*analyze) return cmd_analyze(an_opt);
        if (*list) {
            for (const auto& id : metasim::builtin_scenarios()) std::cout << id.name() << "\n";
            return kExitOk;
        }
        if (*emit) {
            const auto id = metasim::ScenarioId::from_name(emit_scenario_name);
            if (!id) {
                std::cerr << "error: unknown scenario '" << emit_scenario_name << "'\n";
                return kExitUsage;
            }
            const std::string text = metasim::serialize(metasim::emit_scenario(*id));
            if (emit_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(emit_out);
                if (!out) {
                    std::cerr << "error: cannot write " << emit_out << "\n";
                    return kExitIo;
                }
                out << text;
            }
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
