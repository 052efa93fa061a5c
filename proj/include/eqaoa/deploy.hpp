#pragma once

// Island model with one OS process per island. Workers share a work directory
// and exchange ElitePacket frames as files; each worker checkpoints every
// generation and resumes from its newest checkpoint when respawned.

#include <chrono>
#include <filesystem>
#include <string>

#include "eqaoa/graph.hpp"
#include "eqaoa/islands.hpp"

namespace eqaoa {

/// Environment variable `island=<i>,generation=<k>`: worker i exits abnormally
/// once, right after checkpointing generation k.
inline constexpr const char* kFaultInjectEnv = "EQAOA_FAULT_INJECT";

struct IslandJob {
    Graph graph;
    EvoConfig evo;
    int islands = 2;
    int g_f = 5;
};

std::string job_to_json(const IslandJob& job);
IslandJob job_from_json(std::string_view text);

struct ProcessDeployment {
    std::filesystem::path executable;  // binary providing the `island-worker` subcommand
    std::filesystem::path work_dir;
    int max_restarts = 3;  // respawns allowed per island
    std::chrono::milliseconds poll{2};
    std::chrono::seconds packet_timeout{3600};
};

/// `packet-from-<i>-gen-<k>.bin`
std::string packet_filename(int from_island, int generation);

/// Orchestrates M worker processes and assembles their final checkpoints.
/// Produces the same MultiRunResult as run_islands for the same inputs.
MultiRunResult run_islands_processes(const Graph& g, const EvoConfig& cfg, const IslandConfig& icfg,
                                     const ProcessDeployment& deployment);

/// Body of `island-worker`: runs island `island_id` of the job in `work_dir`
/// to completion. Returns the process exit code.
int island_worker_main(const std::filesystem::path& work_dir, int island_id,
                       std::chrono::milliseconds poll = std::chrono::milliseconds{2},
                       std::chrono::seconds packet_timeout = std::chrono::seconds{3600});

}  // namespace eqaoa
