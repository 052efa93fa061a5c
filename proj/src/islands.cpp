#include "eqaoa/islands.hpp"

#include <zlib.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <thread>

#include "eqaoa/errors.hpp"
#include "eqaoa/serialize.hpp"

namespace eqaoa {

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_array(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        append_number(out, values[i]);
    }
    out += ']';
}

// Payload without the checksum member and without the closing brace.
std::string packet_body(const ElitePacket& p) {
    std::string s = "{\"version\":" + std::to_string(p.version) + ",\"from_island\":" + std::to_string(p.from_island) +
                    ",\"at_generation\":" + std::to_string(p.at_generation) + ",\"angles\":";
    append_array(s, p.angles);
    s += ",\"sigmas\":";
    append_array(s, p.sigmas);
    s += ",\"best_cut\":" + std::to_string(p.best_cut);
    return s;
}

// Weakest resident first: smaller best_cut, then lower fitness, then higher id.
bool weaker(const Individual& a, const Individual& b) {
    if (a.best_cut() != b.best_cut()) return a.best_cut() < b.best_cut();
    if (a.fitness() != b.fitness()) return a.fitness() < b.fitness();
    return a.id > b.id;
}

void require_evaluated(const IslandState& island, const char* what) {
    if (island.population.members.empty()) throw StateError(std::string(what) + ": empty population");
    for (const auto& m : island.population.members)
        if (!m.evaluation) throw StateError(std::string(what) + ": population has unevaluated members");
}

void maybe_checkpoint(const IslandConfig& icfg, const IslandState& island) {
    if (!icfg.checkpoint_dir) return;
    write_atomic(*icfg.checkpoint_dir / checkpoint_filename(island.island_id, island.generation()), checkpoint(island));
}

void exchange(std::vector<IslandState>& islands, int at_generation, const EvoConfig& cfg, const IslandConfig& icfg) {
    const std::size_t m = islands.size();
    std::vector<std::string> frames;
    frames.reserve(m);
    for (const auto& island : islands) frames.push_back(encode_packet(make_packet(island)));
    for (std::size_t i = 0; i < m; ++i) apply_immigrant(islands[(i + 1) % m], frames[i], cfg);
    for (auto& island : islands) {
        island.last_exchange = at_generation;
        maybe_checkpoint(icfg, island);
    }
}

void advance_all(std::vector<IslandState>& islands, const Evaluator& eval, const EvoConfig& cfg,
                 const IslandConfig& icfg, int target) {
    auto run_one = [&](IslandState& island) {
        while (island.generation() < target) {
            step_generation(island.population, eval, cfg);
            maybe_checkpoint(icfg, island);
        }
    };
    const unsigned workers = std::min<unsigned>(std::max(1U, icfg.threads), static_cast<unsigned>(islands.size()));
    if (workers <= 1) {
        for (auto& island : islands) run_one(island);
        return;
    }
    std::vector<std::exception_ptr> errors(islands.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < islands.size(); ++i)
            pool.emplace_back([&, i] {
                try {
                    run_one(islands[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

void to_json(Json& j, const MigrationEvent& e) {
    j = Json{{"at_generation", e.at_generation}, {"from_island", e.from_island},
             {"to_island", e.to_island},         {"genotype", e.genotype},
             {"best_cut", e.best_cut},           {"replaced_id", e.replaced_id},
             {"replaced_best_cut", e.replaced_best_cut}};
}

void from_json(const Json& j, MigrationEvent& e) {
    j.at("at_generation").get_to(e.at_generation);
    j.at("from_island").get_to(e.from_island);
    j.at("to_island").get_to(e.to_island);
    j.at("genotype").get_to(e.genotype);
    j.at("best_cut").get_to(e.best_cut);
    j.at("replaced_id").get_to(e.replaced_id);
    j.at("replaced_best_cut").get_to(e.replaced_best_cut);
}

void to_json(Json& j, const PacketRejection& r) { j = Json{{"at_generation", r.at_generation}, {"reason", r.reason}}; }

void from_json(const Json& j, PacketRejection& r) {
    j.at("at_generation").get_to(r.at_generation);
    j.at("reason").get_to(r.reason);
}

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

std::string encode_packet(const ElitePacket& p) {
    std::string body = packet_body(p);
    const std::uint32_t crc = crc32_of(body + "}");
    std::string payload = body + ",\"checksum\":" + std::to_string(crc) + "}";
    const auto len = static_cast<std::uint32_t>(payload.size());
    std::string frame;
    frame.reserve(4 + payload.size());
    for (int shift = 24; shift >= 0; shift -= 8) frame += static_cast<char>((len >> shift) & 0xFFU);
    frame += payload;
    return frame;
}

ElitePacket decode_packet(std::string_view frame, double sigma_min) {
    if (frame.size() < 4) throw ProtocolError("packet frame shorter than its length prefix");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | static_cast<unsigned char>(frame[static_cast<std::size_t>(i)]);
    if (frame.size() - 4 != len)
        throw ProtocolError("packet length prefix " + std::to_string(len) + " does not match payload size " +
                            std::to_string(frame.size() - 4));

    Json j;
    try {
        j = Json::parse(frame.substr(4));
    } catch (const Json::parse_error& e) {
        throw ProtocolError(std::string("packet payload is not valid JSON: ") + e.what());
    }
    ElitePacket p;
    std::uint64_t checksum = 0;
    try {
        if (!j.is_object() || j.size() != 7) throw ProtocolError("packet must carry exactly 7 fields");
        j.at("version").get_to(p.version);
        if (p.version != kPacketVersion)
            throw ProtocolError("unsupported packet version " + std::to_string(p.version));
        j.at("from_island").get_to(p.from_island);
        j.at("at_generation").get_to(p.at_generation);
        j.at("angles").get_to(p.angles);
        j.at("sigmas").get_to(p.sigmas);
        j.at("best_cut").get_to(p.best_cut);
        j.at("checksum").get_to(checksum);
    } catch (const Json::exception& e) {
        throw ProtocolError(std::string("malformed packet: ") + e.what());
    }
    if (crc32_of(packet_body(p) + "}") != checksum) throw ProtocolError("packet checksum mismatch");

    if (p.angles.empty() || p.angles.size() % 2 != 0 || p.angles.size() != p.sigmas.size())
        throw ProtocolError("packet genotype has inconsistent lengths");
    try {
        check_genotype({p.angles, p.sigmas}, static_cast<int>(p.angles.size() / 2), sigma_min);
    } catch (const ParameterError& e) {
        throw ProtocolError(std::string("packet genotype invalid: ") + e.what());
    }
    if (p.best_cut < 0) throw ProtocolError("packet best_cut is negative");
    return p;
}

std::uint64_t island_seed(std::uint64_t base_seed, int island_id) noexcept {
    return derive_seed(base_seed, {tag(Stream::Island), static_cast<std::uint64_t>(island_id)});
}

IslandState make_island(const Evaluator& eval, const EvoConfig& cfg, int island_id) {
    IslandState island;
    island.island_id = island_id;
    island.population = start_population(eval, cfg, island_seed(cfg.seed, island_id));
    return island;
}

void advance_island(IslandState& island, const Evaluator& eval, const EvoConfig& cfg, int target_generation,
                    const EvoHooks& hooks) {
    while (island.generation() < target_generation) step_generation(island.population, eval, cfg, hooks);
}

const Individual& select_migrant(const IslandState& island) {
    require_evaluated(island, "select_migrant");
    const auto& members = island.population.members;
    return *std::max_element(members.begin(), members.end(), weaker);
}

ElitePacket make_packet(const IslandState& island) {
    const auto& elite = select_migrant(island);
    ElitePacket p;
    p.from_island = island.island_id;
    p.at_generation = island.generation();
    p.angles = elite.genotype.angles;
    p.sigmas = elite.genotype.sigmas;
    p.best_cut = elite.best_cut();
    return p;
}

MigrationEvent apply_immigrant(IslandState& island, const ElitePacket& packet, const EvoConfig& cfg) {
    require_evaluated(island, "apply_immigrant");
    check_genotype({packet.angles, packet.sigmas}, cfg.p, cfg.sigma_min);
    auto& members = island.population.members;
    auto weakest = std::min_element(members.begin(), members.end(), weaker);

    MigrationEvent ev;
    ev.at_generation = packet.at_generation;
    ev.from_island = packet.from_island;
    ev.to_island = island.island_id;
    ev.genotype = {packet.angles, packet.sigmas};
    ev.best_cut = packet.best_cut;
    ev.replaced_id = weakest->id;
    ev.replaced_best_cut = weakest->best_cut();

    Individual immigrant;
    immigrant.id = island.population.next_id++;
    immigrant.genotype = ev.genotype;
    *weakest = std::move(immigrant);
    island.migration_log.push_back(ev);
    return ev;
}

bool apply_immigrant(IslandState& island, std::string_view frame, const EvoConfig& cfg) {
    ElitePacket packet;
    try {
        packet = decode_packet(frame, cfg.sigma_min);
        if (packet.angles.size() != static_cast<std::size_t>(2 * cfg.p))
            throw ProtocolError("packet carries " + std::to_string(packet.angles.size()) + " angles, expected " +
                                std::to_string(2 * cfg.p));
    } catch (const ProtocolError& e) {
        island.rejections.push_back({island.generation(), e.what()});
        return false;
    }
    apply_immigrant(island, packet, cfg);
    return true;
}

std::string checkpoint(const IslandState& island) {
    if (island.population.in_generation) throw StateError("checkpoint requested mid-generation");
    Json body{{"format", "eqaoa-island-checkpoint"},
              {"version", kCheckpointVersion},
              {"island_id", island.island_id},
              {"rng", {{"seed", island.population.seed}, {"position", island.population.generation}}},
              {"last_exchange", island.last_exchange},
              {"population", population_to_json(island.population)},
              {"migration_log", island.migration_log},
              {"rejections", island.rejections}};
    const std::string text = body.dump();
    Json outer{{"body", body}, {"crc32", crc32_of(text)}};
    return outer.dump() + "\n";
}

IslandState restore(std::string_view snapshot) {
    Json outer;
    try {
        outer = Json::parse(snapshot);
    } catch (const Json::parse_error& e) {
        throw ProtocolError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        const auto& body = outer.at("body");
        if (body.at("format") != "eqaoa-island-checkpoint") throw ProtocolError("not an island checkpoint");
        const int version = body.at("version").get<int>();
        if (version != kCheckpointVersion)
            throw ProtocolError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                                std::to_string(kCheckpointVersion) + ")");
        if (crc32_of(body.dump()) != outer.at("crc32").get<std::uint32_t>())
            throw ProtocolError("checkpoint checksum mismatch");

        IslandState island;
        body.at("island_id").get_to(island.island_id);
        body.at("last_exchange").get_to(island.last_exchange);
        island.population = population_from_json(body.at("population"));
        body.at("migration_log").get_to(island.migration_log);
        body.at("rejections").get_to(island.rejections);
        const auto& rng = body.at("rng");
        if (rng.at("seed").get<std::uint64_t>() != island.population.seed ||
            rng.at("position").get<int>() != island.population.generation)
            throw ProtocolError("checkpoint RNG position disagrees with population");
        return island;
    } catch (const Json::exception& e) {
        throw ProtocolError(std::string("malformed checkpoint: ") + e.what());
    }
}

std::string checkpoint_filename(int island_id, int generation) {
    return "island-" + std::to_string(island_id) + "-gen-" + std::to_string(generation) + ".ckpt";
}

std::vector<int> migration_schedule(int g, int g_f) {
    if (g_f < 1) throw ParameterError("g_f must be at least 1");
    std::vector<int> out;
    for (int k = g_f; k < g; k += g_f) out.push_back(k);
    return out;
}

void IslandConfig::validate(const EvoConfig& cfg) const {
    cfg.validate();
    if (islands < 2) throw ParameterError("island model needs M >= 2, got " + std::to_string(islands));
    if (g_f < 1) throw ParameterError("g_f must be at least 1, got " + std::to_string(g_f));
}

MultiRunResult resume_islands(const Evaluator& eval, const EvoConfig& cfg, const IslandConfig& icfg,
                              std::vector<IslandState> islands) {
    icfg.validate(cfg);
    if (islands.size() != static_cast<std::size_t>(icfg.islands))
        throw ParameterError("expected " + std::to_string(icfg.islands) + " islands, got " +
                             std::to_string(islands.size()));
    for (std::size_t i = 0; i < islands.size(); ++i) {
        if (islands[i].island_id != static_cast<int>(i)) throw StateError("island ids must be 0..M-1 in order");
        if (islands[i].generation() != islands.front().generation())
            throw StateError("islands must resume from a common generation");
    }
    const int start = islands.front().generation();
    const auto schedule = migration_schedule(cfg.g, icfg.g_f);
    if (std::find(schedule.begin(), schedule.end(), start) != schedule.end() && islands.front().last_exchange < start)
        exchange(islands, start, cfg, icfg);

    std::vector<int> barriers;
    for (int b : schedule)
        if (b > start) barriers.push_back(b);
    for (int b : barriers) {
        advance_all(islands, eval, cfg, icfg, b);
        exchange(islands, b, cfg, icfg);
    }
    advance_all(islands, eval, cfg, icfg, cfg.g);
    return assemble(std::move(islands), cfg);
}

MultiRunResult run_islands(const Evaluator& eval, const EvoConfig& cfg, const IslandConfig& icfg) {
    icfg.validate(cfg);
    if (eval.layers() != cfg.p) throw ParameterError("evaluator layer count differs from config p");
    if (icfg.checkpoint_dir) std::filesystem::create_directories(*icfg.checkpoint_dir);
    std::vector<IslandState> islands;
    for (int i = 0; i < icfg.islands; ++i) {
        islands.push_back(make_island(eval, cfg, i));
        maybe_checkpoint(icfg, islands.back());
    }
    return resume_islands(eval, cfg, icfg, std::move(islands));
}

MultiRunResult run_islands(const Graph& g, const EvoConfig& cfg, const IslandConfig& icfg) {
    icfg.validate(cfg);
    const Evaluator eval(g, cfg.p, cfg.fitness);
    return run_islands(eval, cfg, icfg);
}

std::vector<IslandState> load_latest_checkpoints(const std::filesystem::path& dir, int islands) {
    static const std::regex pattern(R"(island-(\d+)-gen-(\d+)\.ckpt)");
    std::map<int, int> present;  // generation -> number of islands with a checkpoint
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!std::regex_match(name, m, pattern)) continue;
        const int id = std::stoi(m[1]);
        if (id >= 0 && id < islands) ++present[std::stoi(m[2])];
    }
    for (auto it = present.rbegin(); it != present.rend(); ++it) {
        if (it->second != islands) continue;
        std::vector<IslandState> out;
        for (int i = 0; i < islands; ++i) out.push_back(restore(read_file(dir / checkpoint_filename(i, it->first))));
        return out;
    }
    throw StateError("no complete checkpoint set for " + std::to_string(islands) + " islands in " + dir.string());
}

MultiRunResult assemble(std::vector<IslandState> islands, const EvoConfig& cfg) {
    (void)cfg;
    MultiRunResult out;
    out.global.method = "islands";
    const Individual* best = nullptr;
    for (const auto& island : islands) {
        const auto& pop = island.population;
        out.global.evaluations += pop.evaluations;
        out.global.best_solution_cut = std::max(out.global.best_solution_cut, pop.best_solution_cut);
        out.global.best_cut = std::max(out.global.best_cut, pop.best_cut_ever);
        if (pop.best && (!best || pop.best->fitness() > best->fitness())) best = &*pop.best;
    }
    if (best) {
        out.global.best_genotype = best->genotype;
        out.global.best_evaluation = *best->evaluation;
    }

    std::size_t generations = islands.empty() ? 0 : islands.front().population.transcript.size();
    for (const auto& island : islands) generations = std::min(generations, island.population.transcript.size());
    for (std::size_t t = 0; t < generations; ++t) {
        std::vector<double> fit, beta1;
        for (const auto& island : islands)
            for (const auto& s : island.population.transcript[t].population) {
                fit.push_back(s.fitness);
                beta1.push_back(s.beta1);
            }
        out.pooled.push_back({islands.front().population.transcript[t].generation, uniqueness_ratio(fit, fit.size()),
                              uniqueness_ratio(beta1, beta1.size())});
    }
    out.islands = std::move(islands);
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace eqaoa
