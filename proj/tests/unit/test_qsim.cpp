#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eqaoa/errors.hpp"
#include "eqaoa/qsim.hpp"
#include "oracle.hpp"

using namespace eqaoa;

namespace {

Graph to_graph(int n, const oracle::EdgeList& edges) {
    std::vector<Edge> e;
    for (auto [u, v] : edges) e.push_back({u, v});
    return Graph::from_edges(n, e);
}

oracle::EdgeList to_list(const Graph& g) {
    oracle::EdgeList out;
    for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
    return out;
}

constexpr double kAmpTol = 1e-9;

}  // namespace

TEST_CASE("K4, p = 1 amplitudes match frozen oracle values") {
    const std::vector<double> params{0.4, 0.9};
    const auto s = run_qaoa(to_graph(4, oracle::complete_graph(4)), params, 1);
    const auto a = s.amplitudes();
    // Frozen from oracle::dense_qaoa.
    CHECK(std::abs(a[0] - Amplitude(0.16169092256339246, -0.29433849080427094)) < kAmpTol);
    CHECK(std::abs(a[3] - Amplitude(-0.053782820095537941, -0.24406770497371891)) < kAmpTol);
    CHECK(std::abs(a[5] - Amplitude(-0.053782820095537885, -0.24406770497371888)) < kAmpTol);
    CHECK(std::abs(a[15] - Amplitude(0.16169092256339251, -0.29433849080427088)) < kAmpTol);
}

TEST_CASE("K33, p = 2 amplitudes match frozen oracle values") {
    const std::vector<double> params{0.3, -1.1, 2.0, 0.25};
    const Graph g = to_graph(6, oracle::complete_bipartite(3, 3));
    const auto s = run_qaoa(g, params, 2);
    const auto a = s.amplitudes();
    CHECK(std::abs(a[0] - Amplitude(-0.27997560565877594, -0.11645590137707419)) < kAmpTol);
    CHECK(std::abs(a[7] - Amplitude(0.42948825624751558, 0.085049609179757582)) < kAmpTol);
    CHECK(std::abs(a[21] - Amplitude(0.032506309050557979, 0.0021526735586244999)) < kAmpTol);
    CHECK(std::abs(a[56] - Amplitude(0.42948825624751541, 0.085049609179757651)) < kAmpTol);
    double mean = 0.0;
    const auto d = CostDiagonal::build(g);
    for (std::size_t x = 0; x < s.size(); ++x) mean += std::norm(a[x]) * d.cut(x);
    CHECK(mean == doctest::Approx(5.1057393601038319).epsilon(1e-12));
}

TEST_CASE("random graphs agree with the dense oracle") {
    Rng rng(11);
    for (int n : {4, 6, 8}) {
        const Graph g = generate_regular(n, 3, static_cast<std::uint64_t>(n));
        for (int p = 1; p <= 3; ++p) {
            std::vector<double> params(static_cast<std::size_t>(2 * p));
            for (auto& x : params) x = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const auto s = run_qaoa(g, params, p);
            const auto ref = oracle::dense_qaoa(n, to_list(g), params, p);
            double dev = 0.0;
            for (std::size_t x = 0; x < s.size(); ++x)
                dev = std::max(dev, std::abs(s.amplitudes()[x] - ref[static_cast<Eigen::Index>(x)]));
            CHECK(dev < kAmpTol);
        }
    }
}

TEST_CASE("cost diagonal equals |E| - 2 cut") {
    const Graph g = generate_regular(10, 3, 5);
    const auto d = CostDiagonal::build(g);
    REQUIRE(d.size() == 1024U);
    for (std::uint64_t x = 0; x < 1024; ++x) {
        CHECK(d.zz_sum(x) == d.edge_count() - 2 * cut_value_word(g, x));
        CHECK(d.cut(x) == cut_value_word(g, x));
    }
    CHECK(d.max_cut() == max_cut_bruteforce(g).value);
}

TEST_CASE("uniform state and zero angles") {
    const auto u = StateVector::uniform(5);
    for (auto a : u.amplitudes()) CHECK(std::abs(a - Amplitude(1.0 / std::sqrt(32.0), 0.0)) < 1e-15);
    const Graph g = generate_regular(6, 3, 1);
    const std::vector<double> zeros(4, 0.0);
    const auto s = run_qaoa(g, zeros, 2);
    for (auto a : s.amplitudes()) CHECK(std::abs(a - Amplitude(0.125, 0.0)) < 1e-15);
}

TEST_CASE("mixer at beta = pi/2 maps |0..0> to (-i)^n |1..1>") {
    StateVector s(3);
    apply_mixer_layer(s, std::numbers::pi / 2);
    CHECK(std::abs(s.amplitudes()[7] - Amplitude(0.0, 1.0)) < 1e-12);  // (-i)^3 = i
    CHECK(std::abs(s.amplitudes()[0]) < 1e-12);
}

TEST_CASE("norm is conserved after every layer") {
    const Graph g = generate_regular(12, 3, 8);
    const auto d = CostDiagonal::build(g);
    double worst = 0.0;
    int calls = 0;
    const LayerHook hook = [&](const StateVector& s) {
        ++calls;
        worst = std::max(worst, std::abs(1.0 - s.norm_squared()));
    };
    StateVector out(12);
    const std::vector<double> params{0.7, -2.1, 1.3, 0.4, -0.2, 3.0};
    run_qaoa(d, params, 3, out, {&hook, nullptr});
    CHECK(calls == 1 + 2 * 3);
    CHECK(worst < 1e-10);
}

TEST_CASE("operation count follows 2^n per diagonal layer and n 2^n per mixer") {
    const Graph g = generate_regular(8, 3, 2);
    const auto d = CostDiagonal::build(g);
    OpCount ops;
    StateVector out(8);
    const std::vector<double> params{0.1, 0.2, 0.3, 0.4};
    run_qaoa(d, params, 2, out, {nullptr, &ops});
    const std::uint64_t dim = 256;
    CHECK(ops.amplitude_updates == dim + 2 * (dim + 8 * dim));
}

TEST_CASE("shape errors") {
    const Graph g = generate_regular(6, 3, 1);
    const auto d = CostDiagonal::build(g);
    StateVector wrong(5);
    CHECK_THROWS_AS(apply_cost_layer(wrong, 0.1, d), DimensionError);
    const std::vector<double> three{0.1, 0.2, 0.3};
    CHECK_THROWS(run_qaoa(g, three, 2));
    CHECK_THROWS(run_qaoa(g, std::vector<double>{}, 0));
    CHECK_THROWS(StateVector(27));
}

TEST_CASE("sampling frequencies follow |amplitude|^2") {
    const Graph g = generate_regular(6, 3, 4);
    const std::vector<double> params{0.5, 0.8, -0.3, 1.7};
    const auto s = run_qaoa(g, params, 2);
    Rng rng(123);
    const std::uint64_t shots = 200000;
    const auto h = sample(s, shots, rng);
    CHECK(h.shots() == shots);
    for (std::size_t x = 0; x < s.size(); ++x) {
        const double prob = std::norm(s.amplitudes()[x]);
        const double sd = std::sqrt(shots * prob * (1 - prob));
        CHECK(std::abs(static_cast<double>(h.count(x)) - shots * prob) <= 5 * sd + 1);
    }
    Rng again(123);
    CHECK(sample(s, shots, again) == h);
}

TEST_CASE("histogram from_counts merges and validates") {
    const auto h = ShotHistogram::from_counts({{5, 2}, {1, 3}, {5, 1}, {9, 0}});
    REQUIRE(h.counts().size() == 2);
    CHECK(h.counts()[0] == ShotHistogram::Entry{1, 3});
    CHECK(h.counts()[1] == ShotHistogram::Entry{5, 3});
    CHECK(h.shots() == 6);
    CHECK(h.count(9) == 0);
    CHECK_THROWS(ShotHistogram::from_counts({{1, 0}}));
}
