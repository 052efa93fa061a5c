#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqaoa/errors.hpp"
#include "eqaoa/experiment.hpp"

using namespace eqaoa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(EQAOA_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<Json> lines_of(const std::string& record) {
    std::vector<Json> out;
    std::istringstream is(record);
    std::string line;
    while (std::getline(is, line)) out.push_back(Json::parse(line));
    return out;
}

const char* kSmall = R"({
  "graphs": {"sizes": [4, 6], "count": 2, "seed": 3},
  "arms": "all",
  "repetitions": 2,
  "seed": 11,
  "ea": {"g": 4},
  "fitness": {"mode": "cvar", "alpha": 0.15, "shots": 500},
  "islands": {"M": 2, "g_f": 2},
  "baseline": {"restarts": 2},
  "output_dir": "out"
})";

}  // namespace

TEST_CASE("config parsing applies the default hyperparameters") {
    const auto cfg = parse_experiment(R"({"graphs": {"sizes": [4]}})", "/tmp/base");
    CHECK(cfg.evo.n_pop == 10);
    CHECK(cfg.evo.g == 10);
    CHECK(cfg.evo.p == 2);
    CHECK(cfg.evo.p_sigma == 0.2);
    CHECK(cfg.evo.sigma_min == 0.1);
    CHECK(cfg.evo.mu == 1);
    CHECK(cfg.evo.fitness.alpha == 0.15);
    CHECK(cfg.evo.fitness.shots == 10000U);
    CHECK(cfg.islands.g_f == 5);
    CHECK(cfg.baseline.iterations == 10);
    CHECK(cfg.baseline.restarts == 10);
    CHECK(cfg.arms == std::vector<Arm>{Arm::Ea});
    CHECK(cfg.output_dir == fs::path("/tmp/base/results"));
}

TEST_CASE("malformed configs fail before any compute") {
    CHECK_THROWS_AS(parse_experiment("{", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [5]}})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [28]}})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "bogus": 1})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "ea": {"n_pop": 7}})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "arms": ["ga"]})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "ea": {"g": "ten"}})", "."), ParameterError);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "arms": "islands", "islands": {"M": 1}})", "."),
                    ParameterError);
}

TEST_CASE("g_f = g/3 rule") {
    const auto cfg = parse_experiment(R"({"graphs": {"sizes": [4]}, "ea": {"g": 15}, "islands": {"g_f": "g/3"}})", ".");
    CHECK(cfg.islands.effective_g_f(cfg.evo.g) == 5);
    CHECK_THROWS_AS(parse_experiment(R"({"graphs": {"sizes": [4]}, "islands": {"g_f": "g/4"}})", "."), ParameterError);
}

TEST_CASE("config JSON round-trips") {
    const auto cfg = parse_experiment(kSmall, "/x");
    const auto again = parse_experiment(experiment_to_json(cfg).dump(), "/x");
    CHECK(experiment_to_json(again) == experiment_to_json(cfg));
}

TEST_CASE("graph sets are reproducible and named") {
    GraphSetConfig g;
    g.sizes = {20};
    g.count = 10;
    g.seed = 4;
    const auto a = build_graph_set(g);
    const auto b = build_graph_set(g);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].graph == b[i].graph);
        CHECK(a[i].graph.is_regular(3));
    }
    CHECK(a[3].name == "graph-n20-03");
    CHECK(a[0].graph != a[1].graph);

    const fs::path dir = scratch("graph_set");
    write_graph_set(a, dir, false);
    CHECK_THROWS_AS(write_graph_set(a, dir, false), ParameterError);
    CHECK_NOTHROW(write_graph_set(a, dir, true));
    GraphSetConfig from_dir;
    from_dir.dir = dir;
    const auto c = build_graph_set(from_dir);
    REQUIRE(c.size() == 10);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c[i].name == a[i].name);
        CHECK(c[i].graph == a[i].graph);
    }
}

TEST_CASE("cells: counts, seeds and matched budgets") {
    auto cfg = parse_experiment(kSmall, ".");
    const auto graphs = build_graph_set(cfg.graphs);
    const auto cells = plan_cells(cfg, graphs);
    CHECK(cells.size() == 4 * (2 + 2 + 2));
    CHECK(cells[0].evo.seed != cells[1].evo.seed);
    CHECK(cell_stem(cells[0]) == "graph-n4-00__ea__rep-0");
    cfg.baseline.budget = BudgetMode::Matched;
    for (const auto& c : plan_cells(cfg, graphs))
        if (c.arm == Arm::Baseline) CHECK(c.baseline.iterations == 80);
    const auto spec = cell_to_json(cells[2]);
    CHECK(cell_to_json(cell_from_json(spec)) == spec);
}

TEST_CASE("records are replayable and byte-identical") {
    const auto cfg = parse_experiment(kSmall, ".");
    const auto graphs = build_graph_set(cfg.graphs);
    const auto cells = plan_cells(cfg, graphs);
    const fs::path work = scratch("cell_work");
    for (const auto& cell : cells) {
        const Graph* graph = nullptr;
        for (const auto& ng : graphs)
            if (ng.name == cell.graph_name) graph = &ng.graph;
        REQUIRE(graph != nullptr);
        CellContext ctx;
        ctx.work_dir = work / cell_stem(cell);
        const std::string rec = run_cell(cell, *graph, ctx);
        const auto lines = lines_of(rec);
        REQUIRE(lines.size() >= 2);
        CHECK(lines.front()["kind"] == "run");
        CHECK(lines.back()["kind"] == "summary");
        const double ratio = lines.back()["ratio"].get<double>();
        CHECK((ratio >= 0.0 && ratio <= 1.0));
        const CellSpec replay = cell_from_json(lines.front()["config"]);
        CHECK(run_cell(replay, *graph, ctx) == rec);
    }
}

TEST_CASE("islands record holds two migrations per island for g = 15, g_f = 5") {
    CellSpec cell;
    cell.graph_name = "k";
    cell.arm = Arm::Islands;
    cell.evo.g = 15;
    cell.evo.fitness.shots = 300;
    cell.g_f = 5;
    const std::string rec = run_cell(cell, generate_regular(6, 3, 1), {});
    int per_island[2] = {0, 0};
    for (const auto& line : lines_of(rec))
        if (line["kind"] == "migration") ++per_island[line["to_island"].get<int>()];
    CHECK(per_island[0] == 2);
    CHECK(per_island[1] == 2);
}

TEST_CASE("run_experiment and report") {
    const fs::path base = scratch("experiment_run");
    auto cfg = parse_experiment(kSmall, base);
    const auto s = run_experiment(cfg, EQAOA_CLI_PATH);
    CHECK(s.failed == 0);
    CHECK(s.cells == 24);
    const fs::path out = base / "out";
    CHECK(fs::exists(out / "graphs" / "graph-n6-01.txt"));
    CHECK(fs::exists(out / "timing" / "graph-n4-00__ea__rep-0.json"));

    const auto files = write_report(out / "records", out);
    CHECK(files.records == 24);
    const std::string summary = read_file(files.summary);
    CHECK(summary.rfind("n,arm,mode,budget,runs,mean,std,min,max\n", 0) == 0);
    CHECK(summary.find("4,ea,cvar,-,4,") != std::string::npos);
    CHECK(summary.find("6,baseline,cvar,literal,4,") != std::string::npos);
    // Re-running gives the same bytes.
    write_report(out / "records", out);
    CHECK(read_file(files.summary) == summary);

    const std::string uniq = read_file(files.uniqueness);
    int ea_rows = 0, island_rows = 0, pooled_rows = 0;
    std::istringstream is(uniq);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("graph-n4-00,4,ea,0,0,", 0) == 0) ++ea_rows;
        if (line.rfind("graph-n4-00,4,islands,0,1,", 0) == 0) ++island_rows;
        if (line.rfind("graph-n4-00,4,islands,0,pooled,", 0) == 0) ++pooled_rows;
    }
    CHECK(ea_rows == 5);
    CHECK(island_rows == 5);
    CHECK(pooled_rows == 5);

    CHECK_THROWS_AS(write_report(scratch("empty_records"), out), ParameterError);
}

TEST_CASE("report: ten perfect records give mean 1 and std 0") {
    const fs::path base = scratch("report_perfect");
    auto cfg = parse_experiment(R"({"graphs": {"sizes": [4]}, "repetitions": 10, "seed": 2,
                                   "fitness": {"shots": 1000}, "output_dir": "out"})",
                                base);
    CHECK(run_experiment(cfg, EQAOA_CLI_PATH).failed == 0);
    const auto files = write_report(base / "out" / "records", base / "out");
    CHECK(read_file(files.summary).find("4,ea,cvar,-,10,1,0,1,1\n") != std::string::npos);
}

TEST_CASE("output directory override from the environment") {
    ::setenv(kOutputDirEnv, "/tmp/override-dir", 1);
    const auto cfg = parse_experiment(R"({"graphs": {"sizes": [4]}, "output_dir": "x"})", ".");
    ::unsetenv(kOutputDirEnv);
    CHECK(cfg.output_dir == fs::path("/tmp/override-dir"));
}
