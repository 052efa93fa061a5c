#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "eqaoa/deploy.hpp"
#include "eqaoa/errors.hpp"

using namespace eqaoa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(EQAOA_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

EvoConfig small_config() {
    EvoConfig cfg;
    cfg.g = 7;
    cfg.fitness.shots = 400;
    cfg.seed = 77;
    return cfg;
}

void check_same(const MultiRunResult& a, const MultiRunResult& b) {
    REQUIRE(a.islands.size() == b.islands.size());
    for (std::size_t i = 0; i < a.islands.size(); ++i) CHECK(checkpoint(a.islands[i]) == checkpoint(b.islands[i]));
    CHECK(a.pooled == b.pooled);
    CHECK(a.global.best_genotype == b.global.best_genotype);
    CHECK(a.global.evaluations == b.global.evaluations);
}

}  // namespace

TEST_CASE("job files round-trip") {
    IslandJob job{generate_regular(6, 3, 1), small_config(), 3, 2};
    const auto back = job_from_json(job_to_json(job));
    CHECK(back.graph == job.graph);
    CHECK(back.islands == 3);
    CHECK(back.g_f == 2);
    CHECK(back.evo.seed == job.evo.seed);
    CHECK(job_to_json(back) == job_to_json(job));
}

TEST_CASE("process deployment matches the in-process run") {
    const Graph g = generate_regular(8, 3, 9);
    const EvoConfig cfg = small_config();
    const IslandConfig icfg{2, 3, 1, std::nullopt};
    const auto local = run_islands(g, cfg, icfg);
    const auto remote = run_islands_processes(g, cfg, icfg, {EQAOA_CLI_PATH, scratch("deploy_plain")});
    check_same(local, remote);
}

TEST_CASE("a worker killed mid-run is respawned and resumes from its checkpoint") {
    const Graph g = generate_regular(8, 3, 9);
    const EvoConfig cfg = small_config();
    const IslandConfig icfg{2, 3, 1, std::nullopt};
    const auto local = run_islands(g, cfg, icfg);
    for (const char* spec : {"island=1,generation=3", "island=0,generation=5", "island=1,generation=0"}) {
        const fs::path dir = scratch("deploy_fault");
        ::setenv(kFaultInjectEnv, spec, 1);
        const auto remote = run_islands_processes(g, cfg, icfg, {EQAOA_CLI_PATH, dir});
        ::unsetenv(kFaultInjectEnv);
        CHECK(std::any_of(fs::directory_iterator(dir), fs::directory_iterator{},
                          [](const auto& e) { return e.path().filename().string().rfind("fault-fired", 0) == 0; }));
        check_same(local, remote);
    }
}

TEST_CASE("three process islands match in-process") {
    const Graph g = generate_regular(6, 3, 2);
    EvoConfig cfg = small_config();
    cfg.g = 5;
    const IslandConfig icfg{3, 2, 1, std::nullopt};
    check_same(run_islands(g, cfg, icfg), run_islands_processes(g, cfg, icfg, {EQAOA_CLI_PATH, scratch("deploy_three")}));
}

TEST_CASE("a work directory holding another job is refused") {
    const fs::path dir = scratch("deploy_conflict");
    const Graph g = generate_regular(6, 3, 2);
    EvoConfig cfg = small_config();
    cfg.g = 2;
    const IslandConfig icfg{2, 1, 1, std::nullopt};
    run_islands_processes(g, cfg, icfg, {EQAOA_CLI_PATH, dir});
    cfg.seed += 1;
    CHECK_THROWS_AS(run_islands_processes(g, cfg, icfg, {EQAOA_CLI_PATH, dir}), StateError);
    CHECK_THROWS_AS(run_islands_processes(g, cfg, icfg, {"/nonexistent/eqaoa", dir}), ParameterError);
}

TEST_CASE("packet file names") { CHECK(packet_filename(1, 10) == "packet-from-1-gen-10.bin"); }
