#include "eqaoa/deploy.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <thread>

#include "eqaoa/errors.hpp"
#include "eqaoa/serialize.hpp"

extern char** environ;

namespace eqaoa {

namespace fs = std::filesystem;

namespace {

constexpr const char* kJobFile = "job.json";

struct FaultSpec {
    int island = -1;
    int generation = -1;
};

std::optional<FaultSpec> fault_from_env() {
    const char* raw = std::getenv(kFaultInjectEnv);
    if (!raw || !*raw) return std::nullopt;
    static const std::regex pattern(R"(island=(\d+),generation=(\d+))");
    std::cmatch m;
    if (!std::regex_match(raw, m, pattern))
        throw ParameterError(std::string(kFaultInjectEnv) + " must look like island=<i>,generation=<k>");
    return FaultSpec{std::stoi(m[1]), std::stoi(m[2])};
}

// Fires at most once per work directory; the marker survives the respawn.
void maybe_fault(const fs::path& dir, const std::optional<FaultSpec>& fault, int island, int generation) {
    if (!fault || fault->island != island || fault->generation != generation) return;
    const fs::path marker = dir / ("fault-fired-island-" + std::to_string(island) + "-gen-" + std::to_string(generation));
    if (fs::exists(marker)) return;
    write_atomic(marker, "");
    std::_Exit(3);
}

std::optional<int> latest_own_checkpoint(const fs::path& dir, int island) {
    static const std::regex pattern(R"(island-(\d+)-gen-(\d+)\.ckpt)");
    std::optional<int> best;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!std::regex_match(name, m, pattern) || std::stoi(m[1]) != island) continue;
        const int k = std::stoi(m[2]);
        if (!best || k > *best) best = k;
    }
    return best;
}

std::string wait_for_file(const fs::path& path, std::chrono::milliseconds poll, std::chrono::seconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!fs::exists(path)) {
        if (std::chrono::steady_clock::now() > deadline)
            throw std::runtime_error("timed out waiting for " + path.string());
        std::this_thread::sleep_for(poll);
    }
    return read_file(path);
}

pid_t spawn_worker(const ProcessDeployment& d, int island) {
    std::vector<std::string> args = {d.executable.string(), "island-worker", "--dir", d.work_dir.string(), "--island",
                                     std::to_string(island)};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, d.executable.c_str(), nullptr, nullptr, argv.data(), environ);
    if (rc != 0) throw std::runtime_error("cannot spawn " + d.executable.string() + ": error " + std::to_string(rc));
    return pid;
}

}  // namespace

std::string job_to_json(const IslandJob& job) {
    Json j{{"graph", to_text(job.graph)}, {"evo", job.evo}, {"islands", job.islands}, {"g_f", job.g_f}};
    j["evo"]["threads"] = job.evo.threads;
    return j.dump(1) + "\n";
}

IslandJob job_from_json(std::string_view text) {
    try {
        const Json j = Json::parse(text);
        IslandJob job{from_text(j.at("graph").get<std::string>()), j.at("evo").get<EvoConfig>(),
                      j.at("islands").get<int>(), j.at("g_f").get<int>()};
        return job;
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("malformed island job: ") + e.what());
    }
}

std::string packet_filename(int from_island, int generation) {
    return "packet-from-" + std::to_string(from_island) + "-gen-" + std::to_string(generation) + ".bin";
}

int island_worker_main(const fs::path& dir, int island_id, std::chrono::milliseconds poll,
                       std::chrono::seconds packet_timeout) {
    try {
        const IslandJob job = job_from_json(read_file(dir / kJobFile));
        const IslandConfig icfg{job.islands, job.g_f, 1, dir};
        icfg.validate(job.evo);
        if (island_id < 0 || island_id >= job.islands) throw ParameterError("island id out of range");
        const auto fault = fault_from_env();
        const Evaluator eval(job.graph, job.evo.p, job.evo.fitness);
        const auto save = [&](const IslandState& s) {
            write_atomic(dir / checkpoint_filename(island_id, s.generation()), checkpoint(s));
        };

        IslandState island;
        if (const auto k = latest_own_checkpoint(dir, island_id)) {
            island = restore(read_file(dir / checkpoint_filename(island_id, *k)));
        } else {
            island = make_island(eval, job.evo, island_id);
            save(island);
            maybe_fault(dir, fault, island_id, 0);
        }

        const auto schedule = migration_schedule(job.evo.g, job.g_f);
        const int source = (island_id + job.islands - 1) % job.islands;
        for (;;) {
            const int k = island.generation();
            const bool barrier = std::find(schedule.begin(), schedule.end(), k) != schedule.end();
            if (barrier && island.last_exchange < k) {
                write_atomic(dir / packet_filename(island_id, k), encode_packet(make_packet(island)));
                const std::string frame = wait_for_file(dir / packet_filename(source, k), poll, packet_timeout);
                apply_immigrant(island, frame, job.evo);
                island.last_exchange = k;
                save(island);
                continue;
            }
            if (k >= job.evo.g) break;
            step_generation(island.population, eval, job.evo);
            save(island);
            maybe_fault(dir, fault, island_id, island.generation());
        }
        return 0;
    } catch (const ParameterError& e) {
        std::cerr << "island-worker " << island_id << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "island-worker " << island_id << ": " << e.what() << "\n";
        return 2;
    }
}

MultiRunResult run_islands_processes(const Graph& g, const EvoConfig& cfg, const IslandConfig& icfg,
                                     const ProcessDeployment& d) {
    icfg.validate(cfg);
    if (d.executable.empty() || !fs::exists(d.executable))
        throw ParameterError("worker executable not found: " + d.executable.string());
    fs::create_directories(d.work_dir);

    const std::string job = job_to_json({g, cfg, icfg.islands, icfg.g_f});
    const fs::path job_path = d.work_dir / kJobFile;
    if (fs::exists(job_path)) {
        if (read_file(job_path) != job) throw StateError("work directory " + d.work_dir.string() + " holds another job");
    } else {
        write_atomic(job_path, job);
    }

    std::map<pid_t, int> running;  // pid -> island
    std::vector<int> restarts(static_cast<std::size_t>(icfg.islands), 0);
    for (int i = 0; i < icfg.islands; ++i) running[spawn_worker(d, i)] = i;

    std::string failure;
    while (!running.empty()) {
        // Poll only our own children so unrelated children of the caller are left alone.
        pid_t pid = 0;
        int status = 0;
        for (const auto& [candidate, _] : running) {
            const pid_t r = ::waitpid(candidate, &status, WNOHANG);
            if (r < 0 && errno != EINTR) throw std::runtime_error("waitpid failed");
            if (r == candidate) {
                pid = r;
                break;
            }
        }
        if (pid == 0) {
            std::this_thread::sleep_for(d.poll);
            continue;
        }
        const auto it = running.find(pid);
        const int island = it->second;
        running.erase(it);
        const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
        if (ok) continue;
        const bool config_error = WIFEXITED(status) && WEXITSTATUS(status) == 1;
        if (failure.empty() && !config_error && restarts[static_cast<std::size_t>(island)] < d.max_restarts) {
            ++restarts[static_cast<std::size_t>(island)];
            running[spawn_worker(d, island)] = island;
            continue;
        }
        if (failure.empty()) {
            failure = "island worker " + std::to_string(island) + " failed";
            for (const auto& [other, _] : running) ::kill(other, SIGTERM);
        }
    }
    if (!failure.empty()) throw std::runtime_error(failure);

    std::vector<IslandState> islands;
    for (int i = 0; i < icfg.islands; ++i)
        islands.push_back(restore(read_file(d.work_dir / checkpoint_filename(i, cfg.g))));
    return assemble(std::move(islands), cfg);
}

}  // namespace eqaoa
