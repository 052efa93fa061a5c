#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eqaoa {

/// Largest graph the exhaustive Max-Cut oracle accepts.
inline constexpr int kMaxBruteforceNodes = 26;

/// Attempts made by the pairing-model generator before giving up.
inline constexpr int kGenerationRetries = 1000;

/// Undirected edge with u < v.
struct Edge {
    int u = 0;
    int v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph with a canonically ordered edge list.
///
/// Edges are stored with u < v and sorted lexicographically so that two
/// graphs with the same edge set serialize identically. `degree()` is set
/// when every node has the same number of incident edges.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an arbitrary edge list. Rejects self-loops,
    /// duplicate edges and out-of-range endpoints.
    static Graph from_edges(int n, std::vector<Edge> edges, std::uint64_t seed = 0);

    int n() const noexcept { return n_; }
    std::optional<int> degree() const noexcept { return degree_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool is_regular(int d) const noexcept { return degree_ && *degree_ == d; }

    /// Neighbour lists, one per node, each sorted ascending.
    std::vector<std::vector<int>> adjacency() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    int n_ = 0;
    std::optional<int> degree_;
    std::uint64_t seed_ = 0;
    std::vector<Edge> edges_;
};

/// Partition assignment: bit i of `word` is node i's side (LSB = node 0).
struct CutAssignment {
    std::uint64_t word = 0;
    int n = 0;

    CutAssignment complement() const noexcept {
        const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
        return {~word & mask, n};
    }

    /// Parses a string such as "0011" where character i is node i.
    static CutAssignment from_string(std::string_view bits);

    friend bool operator==(const CutAssignment&, const CutAssignment&) = default;
};

/// Random `degree`-regular graph on `n` nodes from the pairing (configuration)
/// model with rejection of self-loops and multi-edges. Identical arguments
/// give identical edge lists.
Graph generate_regular(int n, int degree, std::uint64_t seed);

/// Number of edges whose endpoints lie on different sides.
int cut_value(const Graph& g, const CutAssignment& x);

/// Unchecked variant of cut_value for hot loops; requires g.n() <= 64.
int cut_value_word(const Graph& g, std::uint64_t word) noexcept;

struct MaxCutResult {
    int value = 0;
    std::vector<std::uint64_t> witnesses;  // ascending assignment words
};

/// Exhaustive Max-Cut over all 2^n assignments (Gray-code walk with
/// incremental cut updates). Requires n <= kMaxBruteforceNodes.
MaxCutResult max_cut_bruteforce(const Graph& g);

/// Edge-list text format: a header line `n degree seed` followed by one
/// `i j` line per edge in canonical order. Irregular graphs write degree 0.
void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);
std::string to_text(const Graph& g);
Graph from_text(const std::string& text);

}  // namespace eqaoa
