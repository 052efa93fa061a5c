#include "eqaoa/graph.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "eqaoa/errors.hpp"
#include "eqaoa/rng.hpp"

namespace eqaoa {

Graph Graph::from_edges(int n, std::vector<Edge> edges, std::uint64_t seed) {
    if (n < 1) throw ParameterError("graph needs at least one node, got n=" + std::to_string(n));
    for (auto& e : edges) {
        if (e.u == e.v) throw ParameterError("self-loop on node " + std::to_string(e.u));
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw ParameterError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ") out of range");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ParameterError("duplicate edge in edge list");

    Graph g;
    g.n_ = n;
    g.seed_ = seed;
    g.edges_ = std::move(edges);

    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const auto& e : g.edges_) {
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    if (std::all_of(deg.begin(), deg.end(), [&](int d) { return d == deg.front(); })) g.degree_ = deg.front();
    return g;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

CutAssignment CutAssignment::from_string(std::string_view bits) {
    if (bits.size() > 64) throw ParameterError("assignment longer than 64 bits");
    CutAssignment x{0, static_cast<int>(bits.size())};
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            x.word |= std::uint64_t{1} << i;
        else if (bits[i] != '0')
            throw ParameterError("assignment string must contain only 0/1");
    }
    return x;
}

Graph generate_regular(int n, int degree, std::uint64_t seed) {
    if (degree < 1) throw ParameterError("degree must be positive");
    if (n <= degree)
        throw ParameterError("need n > degree, got n=" + std::to_string(n) + " degree=" + std::to_string(degree));
    if ((static_cast<long long>(n) * degree) % 2 != 0)
        throw ParameterError("n * degree must be even, got " + std::to_string(n) + " * " + std::to_string(degree));

    Rng rng(derive_seed(seed, {tag(Stream::Graph), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(degree)}));
    const std::size_t stub_count = static_cast<std::size_t>(n) * static_cast<std::size_t>(degree);
    std::vector<int> stubs(stub_count);
    std::vector<Edge> edges;
    edges.reserve(stub_count / 2);

    for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
        for (std::size_t i = 0; i < stub_count; ++i) stubs[i] = static_cast<int>(i / static_cast<std::size_t>(degree));
        for (std::size_t i = stub_count - 1; i > 0; --i) std::swap(stubs[i], stubs[rng.below(i + 1)]);

        edges.clear();
        bool simple = true;
        for (std::size_t i = 0; i < stub_count; i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                simple = false;
                break;
            }
            if (u > v) std::swap(u, v);
            edges.push_back({u, v});
        }
        if (!simple) continue;
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
        return Graph::from_edges(n, edges, seed);
    }
    throw GenerationError("no simple " + std::to_string(degree) + "-regular graph on " + std::to_string(n) +
                          " nodes after " + std::to_string(kGenerationRetries) + " attempts");
}

int cut_value_word(const Graph& g, std::uint64_t word) noexcept {
    int cut = 0;
    for (const auto& e : g.edges()) cut += static_cast<int>(((word >> e.u) ^ (word >> e.v)) & 1U);
    return cut;
}

int cut_value(const Graph& g, const CutAssignment& x) {
    if (x.n != g.n())
        throw DimensionError("assignment has " + std::to_string(x.n) + " bits, graph has " + std::to_string(g.n()) +
                             " nodes");
    return cut_value_word(g, x.word);
}

MaxCutResult max_cut_bruteforce(const Graph& g) {
    if (g.n() > kMaxBruteforceNodes)
        throw ParameterError("brute force limited to " + std::to_string(kMaxBruteforceNodes) + " nodes, got " +
                             std::to_string(g.n()));
    const auto adj = g.adjacency();
    const std::uint64_t total = std::uint64_t{1} << g.n();

    MaxCutResult best{0, {0}};
    std::uint64_t x = 0;
    int cut = 0;
    for (std::uint64_t k = 1; k < total; ++k) {
        const int v = std::countr_zero(k);
        const std::uint64_t side = (x >> v) & 1U;
        for (int w : adj[static_cast<std::size_t>(v)]) cut += (((x >> w) & 1U) == side) ? 1 : -1;
        x ^= std::uint64_t{1} << v;
        if (cut > best.value) {
            best.value = cut;
            best.witnesses.assign(1, x);
        } else if (cut == best.value) {
            best.witnesses.push_back(x);
        }
    }
    std::sort(best.witnesses.begin(), best.witnesses.end());
    return best;
}

void write_graph(std::ostream& os, const Graph& g) {
    os << g.n() << ' ' << g.degree().value_or(0) << ' ' << g.seed() << '\n';
    for (const auto& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

Graph read_graph(std::istream& is) {
    long long n = 0, degree = 0;
    std::uint64_t seed = 0;
    if (!(is >> n >> degree >> seed)) throw ParameterError("graph file: bad header, expected `n degree seed`");
    if (n < 1 || n > (1 << 20)) throw ParameterError("graph file: node count out of range");
    std::vector<Edge> edges;
    int u = 0, v = 0;
    while (is >> u >> v) edges.push_back({u, v});
    if (!is.eof()) throw ParameterError("graph file: malformed edge line");

    auto g = Graph::from_edges(static_cast<int>(n), std::move(edges), seed);
    if (degree != 0 && !g.is_regular(static_cast<int>(degree)))
        throw ParameterError("graph file: header declares degree " + std::to_string(degree) +
                             " but edges do not form a regular graph of that degree");
    return g;
}

std::string to_text(const Graph& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

Graph from_text(const std::string& text) {
    std::istringstream is(text);
    return read_graph(is);
}

}  // namespace eqaoa
