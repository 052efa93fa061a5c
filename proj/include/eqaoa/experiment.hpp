#pragma once

// Experiment harness behind the command-line tool: graph sets, per-run
// JSON-lines records and CSV summaries.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqaoa/baseline.hpp"
#include "eqaoa/evo.hpp"
#include "eqaoa/graph.hpp"
#include "eqaoa/islands.hpp"
#include "eqaoa/serialize.hpp"

namespace eqaoa {

/// Overrides ExperimentConfig::output_dir when set.
inline constexpr const char* kOutputDirEnv = "EQAOA_OUTPUT_DIR";

enum class Arm { Ea, Islands, Baseline };
std::string_view to_string(Arm a) noexcept;
Arm parse_arm(std::string_view name);

enum class Deployment { InProcess, Process };
std::string_view to_string(Deployment d) noexcept;
Deployment parse_deployment(std::string_view name);

struct GraphSetConfig {
    std::vector<int> sizes;
    int count = 1;
    int degree = 3;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> dir;  // read graph files instead of generating
};

struct IslandArmConfig {
    int islands = 2;
    int g_f = 5;
    bool g_f_third = false;  // g_f = max(1, g / 3)
    Deployment deployment = Deployment::InProcess;
    bool checkpoints = false;  // in-process runs keep per-generation checkpoints

    int effective_g_f(int g) const noexcept { return g_f_third ? std::max(1, g / 3) : g_f; }
};

struct ExperimentConfig {
    GraphSetConfig graphs;
    std::vector<Arm> arms{Arm::Ea};
    int repetitions = 10;  // EA and island realizations per graph; the baseline uses baseline.restarts
    std::uint64_t seed = 0;
    EvoConfig evo;
    BaselineConfig baseline;
    IslandArmConfig islands;
    std::filesystem::path output_dir = "results";

    void validate() const;
};

/// Parses the JSON config. Relative paths resolve against `base_dir`.
/// Unknown keys and invalid values throw ParameterError before any compute.
ExperimentConfig parse_experiment(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment(const std::filesystem::path& file);
Json experiment_to_json(const ExperimentConfig& cfg);

struct NamedGraph {
    std::string name;  // graph-n<n>-<index>
    Graph graph;
};

/// `graph-n<n>-<index:02>`
std::string graph_name(int n, int index);

/// Graph set of the config: generated from (sizes, count, seed) or read from dir.
std::vector<NamedGraph> build_graph_set(const GraphSetConfig& cfg);

/// Writes one canonical edge-list file per graph; refuses to overwrite unless `force`.
std::vector<std::filesystem::path> write_graph_set(const std::vector<NamedGraph>& graphs,
                                                   const std::filesystem::path& dir, bool force);

/// Everything one record depends on. Stored in the record header so the record can be replayed.
struct CellSpec {
    std::string graph_name;
    Arm arm = Arm::Ea;
    int repetition = 0;
    EvoConfig evo;               // seed already specialized to the cell
    BaselineConfig baseline;     // seed already specialized to the cell
    int islands = 2;
    int g_f = 5;
    Deployment deployment = Deployment::InProcess;
};

Json cell_to_json(const CellSpec& c);
CellSpec cell_from_json(const Json& j);

/// Cells of the experiment in execution order (graphs, then arms, then repetitions).
std::vector<CellSpec> plan_cells(const ExperimentConfig& cfg, const std::vector<NamedGraph>& graphs);

/// File stem of a cell's record: `<graph>__<arm>__rep-<r>`.
std::string cell_stem(const CellSpec& c);

struct CellContext {
    std::filesystem::path worker_executable;  // required for process deployment
    std::filesystem::path work_dir;           // island checkpoints / packets for this cell
    bool write_checkpoints = false;
    std::optional<int> resume_generation;  // resume in-process islands from checkpoints at this generation
    bool resume_latest = false;            // resume from the newest complete checkpoint set
};

/// Runs a cell and returns its JSON-lines record. Contains no wall-clock data,
/// so equal specs give byte-identical records.
std::string run_cell(const CellSpec& cell, const Graph& graph, const CellContext& ctx = {});

/// Loads island checkpoints of `generation` (one per island) from `dir`.
std::vector<IslandState> load_checkpoints_at(const std::filesystem::path& dir, int islands, int generation);

struct RunSummary {
    int cells = 0;
    int failed = 0;
    std::vector<std::string> errors;
};

/// Executes every cell, writing `<output>/records/<stem>.jsonl` atomically and
/// wall times to `<output>/timing/<stem>.json`. Failed cells are reported and
/// the rest still run.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& worker_executable,
                          bool resume = false, std::optional<int> resume_generation = std::nullopt);

struct ReportFiles {
    std::filesystem::path summary;
    std::filesystem::path uniqueness;
    int records = 0;
};

/// Reads every `*.jsonl` in `records_dir` and writes summary.csv and
/// uniqueness.csv into `out_dir`. Deterministic in the set of records.
ReportFiles write_report(const std::filesystem::path& records_dir, const std::filesystem::path& out_dir);

}  // namespace eqaoa
