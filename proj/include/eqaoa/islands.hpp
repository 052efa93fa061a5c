#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqaoa/evo.hpp"

namespace eqaoa {

inline constexpr int kPacketVersion = 1;
inline constexpr int kCheckpointVersion = 1;

/// Elite exchanged between islands at a migration barrier.
struct ElitePacket {
    int version = kPacketVersion;
    int from_island = 0;
    int at_generation = 0;
    std::vector<double> angles;
    std::vector<double> sigmas;
    int best_cut = 0;

    friend bool operator==(const ElitePacket&, const ElitePacket&) = default;
};

/// Frame = 4-byte big-endian payload length + UTF-8 JSON payload. The payload
/// lists version, from_island, at_generation, angles, sigmas, best_cut and
/// checksum in that order; numbers are printed with 17 significant digits and
/// checksum is the CRC-32 of the payload text with the checksum member removed.
std::string encode_packet(const ElitePacket& p);

/// Inverse of encode_packet. Throws ProtocolError on framing, checksum,
/// version or genotype-invariant failures (sigmas must be >= sigma_min).
ElitePacket decode_packet(std::string_view frame, double sigma_min);

/// CRC-32 (IEEE) of `bytes`.
std::uint32_t crc32_of(std::string_view bytes);

struct MigrationEvent {
    int at_generation = 0;
    int from_island = 0;
    int to_island = 0;
    Genotype genotype;
    int best_cut = 0;
    std::uint64_t replaced_id = 0;
    int replaced_best_cut = 0;

    friend bool operator==(const MigrationEvent&, const MigrationEvent&) = default;
};

/// A packet that failed to decode and was dropped.
struct PacketRejection {
    int at_generation = 0;
    std::string reason;

    friend bool operator==(const PacketRejection&, const PacketRejection&) = default;
};

struct IslandState {
    int island_id = 0;
    Population population;
    int last_exchange = 0;  // generation of the most recent completed migration barrier
    std::vector<MigrationEvent> migration_log;
    std::vector<PacketRejection> rejections;

    int generation() const noexcept { return population.generation; }
};

/// Seed of island `island_id` under the run's base seed.
std::uint64_t island_seed(std::uint64_t base_seed, int island_id) noexcept;

/// Fresh island with an evaluated initial population.
IslandState make_island(const Evaluator& eval, const EvoConfig& cfg, int island_id);

/// Runs generations until the island reaches `target_generation`.
void advance_island(IslandState& island, const Evaluator& eval, const EvoConfig& cfg, int target_generation,
                    const EvoHooks& hooks = {});

/// Member with the largest best_cut; ties by higher fitness, then lower id.
const Individual& select_migrant(const IslandState& island);

/// Elite packet announcing `select_migrant(island)` at the island's generation.
ElitePacket make_packet(const IslandState& island);

/// Replaces the weakest member (smallest best_cut; ties by lower fitness, then
/// higher id) with the immigrant genotype, left unevaluated. Returns the
/// logged event.
MigrationEvent apply_immigrant(IslandState& island, const ElitePacket& packet, const EvoConfig& cfg);

/// Decodes `frame` and applies it. A frame that fails to decode is logged as
/// a rejection and leaves the population untouched; returns false then.
bool apply_immigrant(IslandState& island, std::string_view frame, const EvoConfig& cfg);

/// Versioned JSON snapshot with embedded CRC-32. Only legal between generations.
std::string checkpoint(const IslandState& island);
IslandState restore(std::string_view snapshot);

/// `island-<id>-gen-<k>.ckpt`
std::string checkpoint_filename(int island_id, int generation);

/// Migration generations: g_f, 2 g_f, … strictly below g.
std::vector<int> migration_schedule(int g, int g_f);

struct IslandConfig {
    int islands = 2;  // M
    int g_f = 5;
    unsigned threads = 1;  // islands advanced concurrently within an epoch
    std::optional<std::filesystem::path> checkpoint_dir;  // write every island every generation

    void validate(const EvoConfig& cfg) const;
};

struct PooledUniqueness {
    int generation = 0;
    double fitness_uniqueness = 0.0;
    double beta1_uniqueness = 0.0;

    friend bool operator==(const PooledUniqueness&, const PooledUniqueness&) = default;
};

struct MultiRunResult {
    std::vector<IslandState> islands;
    RunResult global;  // best across islands; evaluations summed
    std::vector<PooledUniqueness> pooled;
};

/// In-process island model: all islands run epochs of g_f generations, then
/// each island's elite moves to island (i + 1) mod M through the packet wire
/// format; repeats until generation g.
MultiRunResult run_islands(const Evaluator& eval, const EvoConfig& cfg, const IslandConfig& icfg);
MultiRunResult run_islands(const Graph& g, const EvoConfig& cfg, const IslandConfig& icfg);

/// Continues a run from island states that share one generation (e.g. restored
/// checkpoints). A barrier that was reached but not exchanged is completed first.
MultiRunResult resume_islands(const Evaluator& eval, const EvoConfig& cfg, const IslandConfig& icfg,
                              std::vector<IslandState> islands);

/// Loads the newest generation for which every island has a checkpoint in `dir`.
std::vector<IslandState> load_latest_checkpoints(const std::filesystem::path& dir, int islands);

/// Global best, summed evaluations and pooled uniqueness of finished islands.
MultiRunResult assemble(std::vector<IslandState> islands, const EvoConfig& cfg);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace eqaoa
