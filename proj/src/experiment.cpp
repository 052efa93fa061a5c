#include "eqaoa/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "eqaoa/deploy.hpp"
#include "eqaoa/errors.hpp"

namespace eqaoa {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

std::uint64_t name_tag(std::string_view name) { return crc32_of(name); }

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

GraphSetConfig parse_graphs(const Json& j, const fs::path& base_dir) {
    require_known_keys(j, {"sizes", "count", "degree", "seed", "dir"}, "graphs");
    GraphSetConfig g;
    g.sizes = get_or(j, "sizes", g.sizes);
    g.count = get_or(j, "count", g.count);
    g.degree = get_or(j, "degree", g.degree);
    g.seed = get_or(j, "seed", g.seed);
    if (j.contains("dir")) {
        fs::path dir = j.at("dir").get<std::string>();
        g.dir = dir.is_absolute() ? dir : base_dir / dir;
    }
    return g;
}

IslandArmConfig parse_islands(const Json& j) {
    require_known_keys(j, {"M", "g_f", "deployment", "checkpoints"}, "islands");
    IslandArmConfig c;
    c.islands = get_or(j, "M", c.islands);
    if (j.contains("g_f")) {
        const auto& v = j.at("g_f");
        if (v.is_string()) {
            if (v.get<std::string>() != "g/3") throw ParameterError("islands.g_f must be an integer or \"g/3\"");
            c.g_f_third = true;
        } else {
            c.g_f = v.get<int>();
        }
    }
    if (j.contains("deployment")) c.deployment = parse_deployment(j.at("deployment").get<std::string>());
    c.checkpoints = get_or(j, "checkpoints", c.checkpoints);
    return c;
}

void parse_baseline(const Json& j, BaselineConfig& b) {
    require_known_keys(j, {"method", "iterations", "restarts", "rhobeg", "rhoend", "budget"}, "baseline");
    if (j.contains("method")) b.method = parse_local_method(j.at("method").get<std::string>());
    b.iterations = get_or(j, "iterations", b.iterations);
    b.restarts = get_or(j, "restarts", b.restarts);
    b.rhobeg = get_or(j, "rhobeg", b.rhobeg);
    b.rhoend = get_or(j, "rhoend", b.rhoend);
    if (j.contains("budget")) b.budget = parse_budget_mode(j.at("budget").get<std::string>());
}

std::vector<Arm> parse_arms(const Json& j) {
    std::vector<std::string> names;
    if (j.is_string()) names.push_back(j.get<std::string>());
    else names = j.get<std::vector<std::string>>();
    std::vector<Arm> arms;
    for (const auto& n : names) {
        if (n == "all") {
            arms = {Arm::Ea, Arm::Islands, Arm::Baseline};
            continue;
        }
        const Arm a = parse_arm(n);
        if (std::find(arms.begin(), arms.end(), a) == arms.end()) arms.push_back(a);
    }
    std::sort(arms.begin(), arms.end());
    if (arms.empty()) throw ParameterError("arms must name at least one arm");
    return arms;
}

Json graph_header(const NamedGraph& g) {
    return Json{{"name", g.name},
                {"file", "graphs/" + g.name + ".txt"},
                {"n", g.graph.n()},
                {"degree", g.graph.degree().value_or(0)},
                {"seed", g.graph.seed()},
                {"edges", g.graph.edge_count()}};
}

void append_line(std::string& out, const Json& j) {
    out += j.dump();
    out += '\n';
}

void append_generations(std::string& out, const std::vector<GenerationRecord>& gens, int island) {
    for (const auto& r : gens) {
        Json line = r;
        line["kind"] = "generation";
        line["island"] = island;
        append_line(out, line);
    }
}

void append_summary(std::string& out, const RunResult& r, int optimum, FitnessMode mode) {
    append_line(out, Json{{"kind", "summary"},
                          {"method", r.method},
                          {"fitness_mode", std::string(to_string(mode))},
                          {"best_genotype", r.best_genotype},
                          {"best_fitness", r.best_evaluation.fitness},
                          {"best_solution_cut", r.best_solution_cut},
                          {"best_cut", r.best_cut},
                          {"optimum", optimum},
                          {"ratio", approximation_ratio(r.best_solution_cut, optimum)},
                          {"evaluations", r.evaluations}});
}

void reset_dir(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
}

bool has_checkpoints(const fs::path& dir) {
    if (!fs::is_directory(dir)) return false;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".ckpt") return true;
    return false;
}

}  // namespace

std::string_view to_string(Arm a) noexcept {
    switch (a) {
        case Arm::Ea: return "ea";
        case Arm::Islands: return "islands";
        case Arm::Baseline: return "baseline";
    }
    return "?";
}

Arm parse_arm(std::string_view name) {
    if (name == "ea") return Arm::Ea;
    if (name == "islands") return Arm::Islands;
    if (name == "baseline") return Arm::Baseline;
    throw ParameterError("unknown arm '" + std::string(name) + "' (expected ea, islands, baseline or all)");
}

std::string_view to_string(Deployment d) noexcept { return d == Deployment::InProcess ? "in-process" : "process"; }

Deployment parse_deployment(std::string_view name) {
    if (name == "in-process") return Deployment::InProcess;
    if (name == "process") return Deployment::Process;
    throw ParameterError("unknown deployment '" + std::string(name) + "' (expected in-process or process)");
}

void ExperimentConfig::validate() const {
    if (!graphs.dir) {
        if (graphs.sizes.empty()) throw ParameterError("graphs.sizes is empty and no graphs.dir given");
        if (graphs.count < 1) throw ParameterError("graphs.count must be >= 1");
        for (int n : graphs.sizes) {
            if (n > kMaxQubits) throw ParameterError("graph size " + std::to_string(n) + " exceeds the 26-qubit bound");
            if (n <= graphs.degree || (static_cast<long long>(n) * graphs.degree) % 2 != 0)
                throw ParameterError("no " + std::to_string(graphs.degree) + "-regular graph on " + std::to_string(n) +
                                     " nodes");
        }
    }
    if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
    if (arms.empty()) throw ParameterError("arms must name at least one arm");
    evo.validate();
    baseline.validate();
    if (std::find(arms.begin(), arms.end(), Arm::Islands) != arms.end()) {
        IslandConfig icfg{islands.islands, islands.effective_g_f(evo.g), 1, std::nullopt};
        icfg.validate(evo);
    }
}

ExperimentConfig parse_experiment(std::string_view text, const fs::path& base_dir) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        require_known_keys(j, {"graphs", "arms", "repetitions", "seed", "ea", "fitness", "islands", "baseline",
                               "output_dir"},
                           "config");
        if (j.contains("graphs")) c.graphs = parse_graphs(j.at("graphs"), base_dir);
        if (j.contains("arms")) c.arms = parse_arms(j.at("arms"));
        c.repetitions = get_or(j, "repetitions", c.repetitions);
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("ea")) {
            const auto& ea = j.at("ea");
            if (ea.is_object() && (ea.contains("fitness") || ea.contains("seed")))
                throw ParameterError("ea.fitness and ea.seed belong at the top level (fitness, seed)");
            ea.get_to(c.evo);
        }
        if (j.contains("fitness")) j.at("fitness").get_to(c.evo.fitness);
        if (j.contains("islands")) c.islands = parse_islands(j.at("islands"));
        if (j.contains("baseline")) parse_baseline(j.at("baseline"), c.baseline);
        if (j.contains("output_dir")) {
            fs::path out = j.at("output_dir").get<std::string>();
            c.output_dir = out.is_absolute() ? out : base_dir / out;
        } else {
            c.output_dir = base_dir / c.output_dir;
        }
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("invalid config value: ") + e.what());
    }
    c.evo.seed = c.seed;
    c.baseline.p = c.evo.p;
    c.baseline.fitness = c.evo.fitness;
    c.baseline.seed = c.seed;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;
    c.validate();
    return c;
}

ExperimentConfig load_experiment(const fs::path& file) {
    std::string text;
    try {
        text = read_file(file);
    } catch (const std::runtime_error& e) {
        throw ParameterError(e.what());
    }
    return parse_experiment(text, file.parent_path().empty() ? fs::path(".") : file.parent_path());
}

Json experiment_to_json(const ExperimentConfig& c) {
    Json graphs{{"sizes", c.graphs.sizes}, {"count", c.graphs.count}, {"degree", c.graphs.degree},
                {"seed", c.graphs.seed}};
    if (c.graphs.dir) graphs["dir"] = c.graphs.dir->string();
    Json ea = c.evo;
    ea.erase("fitness");
    ea.erase("seed");
    std::vector<std::string> arms;
    for (Arm a : c.arms) arms.emplace_back(to_string(a));
    Json islands{{"M", c.islands.islands},
                 {"deployment", std::string(to_string(c.islands.deployment))},
                 {"checkpoints", c.islands.checkpoints}};
    if (c.islands.g_f_third) islands["g_f"] = "g/3";
    else islands["g_f"] = c.islands.g_f;
    return Json{{"graphs", graphs},
                {"arms", arms},
                {"repetitions", c.repetitions},
                {"seed", c.seed},
                {"ea", ea},
                {"fitness", c.evo.fitness},
                {"islands", islands},
                {"baseline",
                 {{"method", std::string(to_string(c.baseline.method))},
                  {"iterations", c.baseline.iterations},
                  {"restarts", c.baseline.restarts},
                  {"rhobeg", c.baseline.rhobeg},
                  {"rhoend", c.baseline.rhoend},
                  {"budget", std::string(to_string(c.baseline.budget))}}},
                {"output_dir", c.output_dir.string()}};
}

std::string graph_name(int n, int index) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "graph-n%d-%02d", n, index);
    return buf;
}

std::vector<NamedGraph> build_graph_set(const GraphSetConfig& cfg) {
    std::vector<NamedGraph> out;
    if (cfg.dir) {
        if (!fs::is_directory(*cfg.dir)) throw ParameterError("graph directory not found: " + cfg.dir->string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(*cfg.dir))
            if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ParameterError("no .txt graph files in " + cfg.dir->string());
        for (const auto& f : files) {
            Graph g = from_text(read_file(f));
            if (g.n() > kMaxQubits) throw ParameterError(f.string() + " exceeds the 26-qubit bound");
            out.push_back({f.stem().string(), std::move(g)});
        }
        return out;
    }
    for (int n : cfg.sizes)
        for (int i = 0; i < cfg.count; ++i)
            out.push_back({graph_name(n, i),
                           generate_regular(n, cfg.degree, derive_seed(cfg.seed, {static_cast<std::uint64_t>(i)}))});
    return out;
}

std::vector<fs::path> write_graph_set(const std::vector<NamedGraph>& graphs, const fs::path& dir, bool force) {
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (const auto& g : graphs) paths.push_back(dir / (g.name + ".txt"));
    if (!force)
        for (const auto& p : paths)
            if (fs::exists(p)) throw ParameterError(p.string() + " exists (use --force to overwrite)");
    for (std::size_t i = 0; i < graphs.size(); ++i) write_atomic(paths[i], to_text(graphs[i].graph));
    return paths;
}

Json cell_to_json(const CellSpec& c) {
    Json j{{"graph", c.graph_name}, {"arm", std::string(to_string(c.arm))}, {"repetition", c.repetition}};
    if (c.arm == Arm::Baseline) {
        j["baseline"] = {{"method", std::string(to_string(c.baseline.method))},
                         {"iterations", c.baseline.iterations},
                         {"p", c.baseline.p},
                         {"rhobeg", c.baseline.rhobeg},
                         {"rhoend", c.baseline.rhoend},
                         {"budget", std::string(to_string(c.baseline.budget))},
                         {"fitness", c.baseline.fitness},
                         {"seed", c.baseline.seed}};
    } else {
        j["ea"] = c.evo;
    }
    if (c.arm == Arm::Islands) j["islands"] = {{"M", c.islands}, {"g_f", c.g_f}};
    return j;
}

CellSpec cell_from_json(const Json& j) {
    CellSpec c;
    try {
        j.at("graph").get_to(c.graph_name);
        c.arm = parse_arm(j.at("arm").get<std::string>());
        j.at("repetition").get_to(c.repetition);
        if (c.arm == Arm::Baseline) {
            const auto& b = j.at("baseline");
            c.baseline.method = parse_local_method(b.at("method").get<std::string>());
            b.at("iterations").get_to(c.baseline.iterations);
            b.at("p").get_to(c.baseline.p);
            b.at("rhobeg").get_to(c.baseline.rhobeg);
            b.at("rhoend").get_to(c.baseline.rhoend);
            c.baseline.budget = parse_budget_mode(b.at("budget").get<std::string>());
            b.at("fitness").get_to(c.baseline.fitness);
            b.at("seed").get_to(c.baseline.seed);
        } else {
            j.at("ea").get_to(c.evo);
        }
        if (c.arm == Arm::Islands) {
            j.at("islands").at("M").get_to(c.islands);
            j.at("islands").at("g_f").get_to(c.g_f);
        }
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("malformed cell spec: ") + e.what());
    }
    return c;
}

std::vector<CellSpec> plan_cells(const ExperimentConfig& cfg, const std::vector<NamedGraph>& graphs) {
    std::vector<CellSpec> cells;
    for (const auto& g : graphs) {
        for (Arm arm : cfg.arms) {
            const std::uint64_t arm_seed =
                derive_seed(cfg.seed, {tag(Stream::Repetition), name_tag(g.name), static_cast<std::uint64_t>(arm)});
            const int reps = arm == Arm::Baseline ? cfg.baseline.restarts : cfg.repetitions;
            for (int r = 0; r < reps; ++r) {
                CellSpec c;
                c.graph_name = g.name;
                c.arm = arm;
                c.repetition = r;
                c.evo = cfg.evo;
                c.evo.seed = derive_seed(arm_seed, {static_cast<std::uint64_t>(r)});
                c.baseline = cfg.baseline;
                c.baseline.seed = arm_seed;
                if (c.baseline.budget == BudgetMode::Matched)
                    c.baseline.iterations = static_cast<int>(ea_evaluation_budget(cfg.evo));
                c.islands = cfg.islands.islands;
                c.g_f = cfg.islands.effective_g_f(cfg.evo.g);
                c.deployment = cfg.islands.deployment;
                cells.push_back(std::move(c));
            }
        }
    }
    return cells;
}

std::string cell_stem(const CellSpec& c) {
    return c.graph_name + "__" + std::string(to_string(c.arm)) + "__rep-" + std::to_string(c.repetition);
}

std::vector<IslandState> load_checkpoints_at(const fs::path& dir, int islands, int generation) {
    std::vector<IslandState> out;
    for (int i = 0; i < islands; ++i) {
        const fs::path file = dir / checkpoint_filename(i, generation);
        if (!fs::exists(file)) throw StateError("missing checkpoint " + file.string());
        out.push_back(restore(read_file(file)));
    }
    return out;
}

std::string run_cell(const CellSpec& cell, const Graph& graph, const CellContext& ctx) {
    const int optimum = max_cut_bruteforce(graph).value;
    const NamedGraph named{cell.graph_name, graph};
    const Json spec = cell_to_json(cell);

    std::string out;
    Json header{{"kind", "run"},
                {"format", "eqaoa-run-record"},
                {"software_version", EQAOA_VERSION},
                {"arm", std::string(to_string(cell.arm))},
                {"graph", graph_header(named)},
                {"optimum", optimum},
                {"repetition", cell.repetition},
                {"config", spec},
                {"config_hash", hex32(crc32_of(spec.dump()))}};

    if (cell.arm == Arm::Baseline) {
        header["method"] = std::string(to_string(cell.baseline.method));
        header["budget"] = std::string(to_string(cell.baseline.budget));
        header["evaluation_budget"] = cell.baseline.iterations;
        append_line(out, header);
        const Evaluator eval(graph, cell.baseline.p, cell.baseline.fitness);
        const RunResult r = run_restart(eval, cell.baseline, restart_seed(cell.baseline.seed, cell.repetition));
        for (const auto& t : r.trace) {
            Json line = t;
            line["kind"] = "trace";
            append_line(out, line);
        }
        append_summary(out, r, optimum, cell.baseline.fitness.mode);
        return out;
    }

    if (cell.arm == Arm::Ea) {
        header["method"] = "evolutionary";
        header["evaluation_budget"] = ea_evaluation_budget(cell.evo);
        append_line(out, header);
        const RunResult r = evolve(Evaluator(graph, cell.evo.p, cell.evo.fitness), cell.evo);
        append_generations(out, r.generations, 0);
        append_summary(out, r, optimum, cell.evo.fitness.mode);
        return out;
    }

    header["method"] = "islands";
    header["evaluation_budget"] = ea_evaluation_budget(cell.evo) * static_cast<std::uint64_t>(cell.islands);
    append_line(out, header);

    IslandConfig icfg{cell.islands, cell.g_f, 1, std::nullopt};
    MultiRunResult result;
    if (cell.deployment == Deployment::Process) {
        if (!ctx.resume_latest && !ctx.resume_generation) reset_dir(ctx.work_dir);
        result = run_islands_processes(graph, cell.evo, icfg, {ctx.worker_executable, ctx.work_dir});
    } else {
        const Evaluator eval(graph, cell.evo.p, cell.evo.fitness);
        if (ctx.write_checkpoints) icfg.checkpoint_dir = ctx.work_dir;
        if (ctx.resume_generation) {
            result = resume_islands(eval, cell.evo, icfg, load_checkpoints_at(ctx.work_dir, cell.islands,
                                                                              *ctx.resume_generation));
        } else if (ctx.resume_latest && has_checkpoints(ctx.work_dir)) {
            result = resume_islands(eval, cell.evo, icfg, load_latest_checkpoints(ctx.work_dir, cell.islands));
        } else {
            if (icfg.checkpoint_dir) reset_dir(*icfg.checkpoint_dir);
            result = run_islands(eval, cell.evo, icfg);
        }
    }

    for (const auto& island : result.islands)
        append_generations(out, island.population.transcript, island.island_id);
    for (const auto& island : result.islands) {
        for (const auto& ev : island.migration_log) {
            Json line = ev;
            line["kind"] = "migration";
            append_line(out, line);
        }
        for (const auto& rej : island.rejections) {
            Json line = rej;
            line["kind"] = "rejection";
            line["island"] = island.island_id;
            append_line(out, line);
        }
    }
    for (const auto& p : result.pooled)
        append_line(out, Json{{"kind", "pooled_uniqueness"},
                              {"generation", p.generation},
                              {"fitness_uniqueness", p.fitness_uniqueness},
                              {"beta1_uniqueness", p.beta1_uniqueness}});
    append_summary(out, result.global, optimum, cell.evo.fitness.mode);
    return out;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const fs::path& worker_executable, bool resume,
                          std::optional<int> resume_generation) {
    cfg.validate();
    const auto graphs = build_graph_set(cfg.graphs);
    const auto cells = plan_cells(cfg, graphs);
    const fs::path records = cfg.output_dir / "records";
    const fs::path timing = cfg.output_dir / "timing";
    const fs::path graph_dir = cfg.output_dir / "graphs";
    fs::create_directories(records);
    fs::create_directories(timing);
    fs::create_directories(graph_dir);
    for (const auto& g : graphs) {
        const fs::path file = graph_dir / (g.name + ".txt");
        const std::string text = to_text(g.graph);
        if (fs::exists(file) && read_file(file) != text)
            throw ParameterError(file.string() + " holds a different graph; use a fresh output directory");
        if (!fs::exists(file)) write_atomic(file, text);
    }
    write_atomic(cfg.output_dir / "experiment.json", experiment_to_json(cfg).dump(2) + "\n");

    std::map<std::string, const Graph*> by_name;
    for (const auto& g : graphs) by_name[g.name] = &g.graph;

    RunSummary summary;
    for (const auto& cell : cells) {
        const std::string stem = cell_stem(cell);
        const fs::path record = records / (stem + ".jsonl");
        if (resume && fs::exists(record)) continue;
        ++summary.cells;
        CellContext ctx;
        ctx.worker_executable = worker_executable;
        ctx.work_dir = cfg.output_dir / "work" / stem;
        ctx.write_checkpoints = cfg.islands.checkpoints;
        ctx.resume_latest = resume && !resume_generation;
        ctx.resume_generation = resume ? resume_generation : std::nullopt;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const std::string text = run_cell(cell, *by_name.at(cell.graph_name), ctx);
            write_atomic(record, text);
        } catch (const std::exception& e) {
            ++summary.failed;
            summary.errors.push_back(stem + ": " + e.what());
            continue;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_atomic(timing / (stem + ".json"),
                     Json{{"record", stem + ".jsonl"},
                          {"wall_seconds", secs},
                          {"deployment", std::string(to_string(cell.deployment))}}
                             .dump() +
                         "\n");
    }
    return summary;
}

ReportFiles write_report(const fs::path& records_dir, const fs::path& out_dir) {
    if (!fs::is_directory(records_dir)) throw ParameterError("records directory not found: " + records_dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(records_dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParameterError("no .jsonl records in " + records_dir.string());

    struct Key {
        int n;
        std::string arm, mode, budget;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<double>> ratios;
    std::string uniq = "graph,n,arm,repetition,island,generation,fitness_uniqueness,beta1_uniqueness\n";

    for (const auto& f : files) {
        std::ifstream is(f);
        std::string line;
        Json header, summary;
        std::vector<Json> gens, pooled;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            Json j;
            try {
                j = Json::parse(line);
            } catch (const Json::parse_error& e) {
                throw ParameterError(f.string() + ": malformed line: " + e.what());
            }
            const std::string kind = j.value("kind", "");
            if (kind == "run") header = std::move(j);
            else if (kind == "summary") summary = std::move(j);
            else if (kind == "generation") gens.push_back(std::move(j));
            else if (kind == "pooled_uniqueness") pooled.push_back(std::move(j));
        }
        if (header.is_null() || summary.is_null()) throw ParameterError(f.string() + ": incomplete record");
        const int n = header.at("graph").at("n").get<int>();
        const std::string arm = header.at("arm").get<std::string>();
        const std::string name = header.at("graph").at("name").get<std::string>();
        const std::string rep = std::to_string(header.at("repetition").get<int>());
        const std::string budget = header.value("budget", "-");
        ratios[{n, arm, summary.at("fitness_mode").get<std::string>(), budget}].push_back(
            summary.at("ratio").get<double>());
        const std::string prefix = name + "," + std::to_string(n) + "," + arm + "," + rep + ",";
        for (const auto& g : gens)
            uniq += prefix + std::to_string(g.at("island").get<int>()) + "," +
                    std::to_string(g.at("generation").get<int>()) + "," +
                    format_double(g.at("fitness_uniqueness").get<double>()) + "," +
                    format_double(g.at("beta1_uniqueness").get<double>()) + "\n";
        for (const auto& p : pooled)
            uniq += prefix + "pooled," + std::to_string(p.at("generation").get<int>()) + "," +
                    format_double(p.at("fitness_uniqueness").get<double>()) + "," +
                    format_double(p.at("beta1_uniqueness").get<double>()) + "\n";
    }

    std::string csv = "n,arm,mode,budget,runs,mean,std,min,max\n";
    for (const auto& [key, values] : ratios) {
        const ArmStats s = arm_stats(values);
        csv += std::to_string(key.n) + "," + key.arm + "," + key.mode + "," + key.budget + "," +
               std::to_string(values.size()) + "," + format_double(s.mean) + "," + format_double(s.std) + "," +
               format_double(s.min) + "," + format_double(s.max) + "\n";
    }

    fs::create_directories(out_dir);
    ReportFiles out{out_dir / "summary.csv", out_dir / "uniqueness.csv", static_cast<int>(files.size())};
    write_atomic(out.summary, csv);
    write_atomic(out.uniqueness, uniq);
    return out;
}

}  // namespace eqaoa
