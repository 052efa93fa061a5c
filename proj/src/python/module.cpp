// Python bindings. Configs go in and results come out as plain dicts, bridged
// through the same JSON mappings the records use.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eqaoa/baseline.hpp"
#include "eqaoa/errors.hpp"
#include "eqaoa/evo.hpp"
#include "eqaoa/fitness.hpp"
#include "eqaoa/graph.hpp"
#include "eqaoa/islands.hpp"
#include "eqaoa/qsim.hpp"
#include "eqaoa/serialize.hpp"

namespace py = pybind11;
using namespace eqaoa;

namespace {

Json to_native(const py::object& obj) {
    if (obj.is_none()) return Json::object();
    const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return Json::parse(text);
}

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

EvoConfig evo_config(const py::object& cfg) {
    try {
        return to_native(cfg).get<EvoConfig>();
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("invalid config: ") + e.what());
    }
}

BaselineConfig baseline_config(const py::object& cfg) {
    const Json j = to_native(cfg);
    require_known_keys(j, {"iterations", "restarts", "p", "method", "rhobeg", "rhoend", "seed", "fitness"}, "baseline");
    BaselineConfig b;
    try {
        b.iterations = j.value("iterations", b.iterations);
        b.restarts = j.value("restarts", b.restarts);
        b.p = j.value("p", b.p);
        if (j.contains("method")) b.method = parse_local_method(j.at("method").get<std::string>());
        b.rhobeg = j.value("rhobeg", b.rhobeg);
        b.rhoend = j.value("rhoend", b.rhoend);
        b.seed = j.value("seed", b.seed);
        if (j.contains("fitness")) b.fitness = j.at("fitness").get<FitnessConfig>();
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("invalid baseline config: ") + e.what());
    }
    b.validate();
    return b;
}

Json run_json(const RunResult& r) {
    Json j{{"method", r.method},
           {"best_genotype", r.best_genotype},
           {"best_fitness", r.best_evaluation.fitness},
           {"best_solution_cut", r.best_solution_cut},
           {"best_cut", r.best_cut},
           {"evaluations", r.evaluations}};
    j["generations"] = r.generations;
    j["trace"] = r.trace;
    return j;
}

Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<Edge> list;
    for (auto [u, v] : edges) list.push_back({u, v});
    return Graph::from_edges(n, std::move(list));
}

ShotHistogram histogram(const std::map<std::uint64_t, std::uint64_t>& counts) {
    return ShotHistogram::from_counts({counts.begin(), counts.end()});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Evolutionary QAOA for Max-Cut";
    m.attr("__version__") = EQAOA_VERSION;

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);

    py::class_<Graph>(m, "Graph")
        .def(py::init(&graph_from_edges), py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &Graph::n)
        .def_property_readonly("degree", &Graph::degree)
        .def_property_readonly("seed", &Graph::seed)
        .def_property_readonly("edges",
                               [](const Graph& g) {
                                   std::vector<std::pair<int, int>> out;
                                   for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
                                   return out;
                               })
        .def("to_text", [](const Graph& g) { return to_text(g); })
        .def_static("from_text", &from_text, py::arg("text"))
        .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
        .def("__repr__", [](const Graph& g) {
            return "Graph(n=" + std::to_string(g.n()) + ", edges=" + std::to_string(g.edge_count()) + ")";
        });

    m.def("generate_regular", &generate_regular, py::arg("n"), py::arg("degree") = 3, py::arg("seed") = 0);
    m.def("cut_value", [](const Graph& g, std::uint64_t word) { return cut_value(g, {word, g.n()}); },
          py::arg("graph"), py::arg("word"));
    m.def(
        "max_cut",
        [](const Graph& g) {
            const auto r = max_cut_bruteforce(g);
            return py::make_tuple(r.value, r.witnesses);
        },
        py::arg("graph"), "Exhaustive Max-Cut: (value, ascending witness words).");

    m.def(
        "run_qaoa",
        [](const Graph& g, const std::vector<double>& params, int p) {
            const StateVector s = run_qaoa(g, params, p);
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(s.size()));
            std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
            return out;
        },
        py::arg("graph"), py::arg("params"), py::arg("p"),
        "Statevector amplitudes for interleaved params [beta_1, gamma_1, ...]; bit q of the index is qubit q.");

    m.def("cvar_tail_size", &cvar_tail_size, py::arg("alpha"), py::arg("shots"));
    m.def(
        "cvar",
        [](const std::map<std::uint64_t, std::uint64_t>& counts, const Graph& g, double alpha) {
            return cvar_fitness(histogram(counts), g, alpha);
        },
        py::arg("counts"), py::arg("graph"), py::arg("alpha"));
    m.def(
        "max_count",
        [](const std::map<std::uint64_t, std::uint64_t>& counts, const Graph& g) {
            return max_count_fitness(histogram(counts), g);
        },
        py::arg("counts"), py::arg("graph"));
    m.def("approximation_ratio", &approximation_ratio, py::arg("found"), py::arg("optimal"));

    m.def(
        "evaluate",
        [](const Graph& g, const std::vector<double>& angles, const py::object& fitness, std::uint64_t seed) {
            const FitnessConfig fc = to_native(fitness).get<FitnessConfig>();
            const int p = static_cast<int>(angles.size() / 2);
            return to_python(Json(Evaluator(g, p, fc).evaluate(angles, seed)));
        },
        py::arg("graph"), py::arg("angles"), py::arg("fitness") = py::none(), py::arg("seed") = 0);

    m.def(
        "evolve",
        [](const Graph& g, const py::object& cfg) {
            const EvoConfig c = evo_config(cfg);
            py::gil_scoped_release release;
            RunResult r = evolve(g, c);
            py::gil_scoped_acquire acquire;
            return to_python(run_json(r));
        },
        py::arg("graph"), py::arg("config") = py::none());

    m.def(
        "run_islands",
        [](const Graph& g, const py::object& cfg, int islands, int g_f) {
            const EvoConfig c = evo_config(cfg);
            MultiRunResult r;
            {
                py::gil_scoped_release release;
                r = run_islands(g, c, IslandConfig{islands, g_f, 1, std::nullopt});
            }
            Json j = run_json(r.global);
            j["islands"] = Json::array();
            for (const auto& isl : r.islands) {
                Json ji{{"island", isl.island_id}, {"generations", isl.population.transcript}};
                ji["migrations"] = isl.migration_log;
                ji["rejections"] = isl.rejections;
                j["islands"].push_back(std::move(ji));
            }
            return to_python(j);
        },
        py::arg("graph"), py::arg("config") = py::none(), py::arg("islands") = 2, py::arg("g_f") = 5);

    m.def(
        "optimize_local",
        [](const Graph& g, const py::object& cfg) {
            const BaselineConfig b = baseline_config(cfg);
            BaselineResult r;
            {
                py::gil_scoped_release release;
                r = optimize_local(g, b);
            }
            Json j{{"best_restart", r.best_restart}, {"restarts", Json::array()}};
            for (const auto& run : r.restarts) j["restarts"].push_back(run_json(run));
            return to_python(j);
        },
        py::arg("graph"), py::arg("config") = py::none());

    m.def(
        "encode_packet",
        [](int from_island, int at_generation, const std::vector<double>& angles, const std::vector<double>& sigmas,
           int best_cut) {
            ElitePacket p;
            p.from_island = from_island;
            p.at_generation = at_generation;
            p.angles = angles;
            p.sigmas = sigmas;
            p.best_cut = best_cut;
            const std::string frame = encode_packet(p);
            return py::bytes(frame);
        },
        py::arg("from_island"), py::arg("at_generation"), py::arg("angles"), py::arg("sigmas"), py::arg("best_cut"));
    m.def(
        "decode_packet",
        [](const py::bytes& frame, double sigma_min) {
            const ElitePacket p = decode_packet(std::string(frame), sigma_min);
            py::dict d;
            d["version"] = p.version;
            d["from_island"] = p.from_island;
            d["at_generation"] = p.at_generation;
            d["angles"] = p.angles;
            d["sigmas"] = p.sigmas;
            d["best_cut"] = p.best_cut;
            return d;
        },
        py::arg("frame"), py::arg("sigma_min") = 0.1);
}
