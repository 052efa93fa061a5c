// eqaoa: generate graph sets, run experiment arms, summarize records.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eqaoa/deploy.hpp"
#include "eqaoa/errors.hpp"
#include "eqaoa/experiment.hpp"

namespace fs = std::filesystem;
using eqaoa::Json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunFlags {
    std::string config;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> repetitions;
    std::vector<std::string> arms;
    std::string deployment;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("config", f.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", f.output_dir, "Override output_dir");
    cmd->add_option("--seed", f.seed, "Override the global seed");
    cmd->add_option("--repetitions", f.repetitions, "Override repetitions");
    cmd->add_option("--arms", f.arms, "Override arms (ea, islands, baseline, all)")->delimiter(',');
    cmd->add_option("--deployment", f.deployment, "Island deployment: in-process or process");
}

eqaoa::ExperimentConfig load_with_overrides(const RunFlags& f) {
    const fs::path file = f.config;
    Json j;
    try {
        j = Json::parse(eqaoa::read_file(file));
    } catch (const Json::parse_error& e) {
        throw eqaoa::ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw eqaoa::ParameterError("config must be a JSON object");
    if (f.seed) j["seed"] = *f.seed;
    if (f.repetitions) j["repetitions"] = *f.repetitions;
    if (!f.arms.empty()) j["arms"] = f.arms;
    if (!f.deployment.empty()) j["islands"]["deployment"] = f.deployment;
    const fs::path base = file.parent_path().empty() ? fs::path(".") : file.parent_path();
    auto cfg = eqaoa::parse_experiment(j.dump(), base);
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    return cfg;
}

fs::path self_executable(const char* argv0) {
    std::error_code ec;
    const fs::path p = fs::read_symlink("/proc/self/exe", ec);
    return ec ? fs::absolute(argv0) : p;
}

int finish(const eqaoa::RunSummary& s, const fs::path& out) {
    for (const auto& e : s.errors) std::cerr << "failed: " << e << "\n";
    std::cout << (s.cells - s.failed) << "/" << s.cells << " runs written to " << (out / "records").string() << "\n";
    return s.failed ? kExitRuntime : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary QAOA for Max-Cut"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(EQAOA_VERSION));

    std::vector<int> sizes;
    int count = 1, degree = 3;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "graphs";
    bool force = false;
    auto* gen = app.add_subcommand("generate", "Write random regular graphs as edge-list files");
    gen->add_option("--sizes", sizes, "Node counts")->required()->delimiter(',');
    gen->add_option("--count", count, "Graphs per size")->check(CLI::PositiveNumber);
    gen->add_option("--degree", degree, "Vertex degree")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Graph-set seed");
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_flag("--force", force, "Overwrite existing files");

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the configured arms over the graph set");
    add_run_flags(run, run_flags);

    RunFlags resume_flags;
    std::optional<int> resume_generation;
    auto* resume = app.add_subcommand("checkpoint-resume", "Finish an interrupted run from its checkpoints");
    add_run_flags(resume, resume_flags);
    resume->add_option("--generation", resume_generation, "Resume in-process island runs from this generation");

    std::string report_dir, report_out;
    auto* report = app.add_subcommand("report", "Summarize records into CSV tables");
    report->add_option("dir", report_dir, "Output directory of a run, or its records/ directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_option("--out", report_out, "Directory for summary.csv and uniqueness.csv");

    std::string worker_dir;
    int worker_island = 0;
    auto* worker = app.add_subcommand("island-worker", "");
    worker->group("");
    worker->add_option("--dir", worker_dir)->required();
    worker->add_option("--island", worker_island)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) {
            eqaoa::GraphSetConfig gcfg;
            gcfg.sizes = sizes;
            gcfg.count = count;
            gcfg.degree = degree;
            gcfg.seed = gen_seed;
            for (int n : sizes)
                if (n > eqaoa::kMaxQubits)
                    throw eqaoa::ParameterError("graph size " + std::to_string(n) + " exceeds the 26-qubit bound");
            const auto paths = eqaoa::write_graph_set(eqaoa::build_graph_set(gcfg), gen_out, force);
            for (const auto& p : paths) std::cout << p.string() << "\n";
            return 0;
        }
        if (*run) {
            const auto cfg = load_with_overrides(run_flags);
            return finish(eqaoa::run_experiment(cfg, self_executable(argv[0])), cfg.output_dir);
        }
        if (*resume) {
            const auto cfg = load_with_overrides(resume_flags);
            return finish(eqaoa::run_experiment(cfg, self_executable(argv[0]), true, resume_generation),
                          cfg.output_dir);
        }
        if (*report) {
            fs::path records = fs::path(report_dir).lexically_normal();
            if (records.filename().empty()) records = records.parent_path();
            if (fs::is_directory(records / "records")) records /= "records";
            const fs::path out = !report_out.empty()      ? fs::path(report_out)
                                 : records.has_parent_path() ? records.parent_path()
                                                             : fs::path(".");
            const auto files = eqaoa::write_report(records, out);
            std::cout << files.records << " records -> " << files.summary.string() << ", "
                      << files.uniqueness.string() << "\n";
            return 0;
        }
        if (*worker) return eqaoa::island_worker_main(worker_dir, worker_island);
    } catch (const eqaoa::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
