#include "eqaoa/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqaoa/errors.hpp"

namespace eqaoa {

namespace {

void check_qubits(int n) {
    if (n < 1 || n > kMaxQubits)
        throw ParameterError("statevector supports 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                             std::to_string(n));
}

}  // namespace

StateVector::StateVector(int n) : n_(n) {
    check_qubits(n);
    amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::uniform(int n) {
    StateVector s(n);
    s.set_uniform();
    return s;
}

StateVector StateVector::from_amplitudes(int n, std::vector<Amplitude> amplitudes) {
    check_qubits(n);
    if (amplitudes.size() != (std::size_t{1} << n))
        throw DimensionError("expected " + std::to_string(std::size_t{1} << n) + " amplitudes, got " +
                             std::to_string(amplitudes.size()));
    StateVector s(n);
    s.amps_ = std::move(amplitudes);
    return s;
}

double StateVector::norm_squared() const noexcept {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return sum;
}

void StateVector::set_uniform() noexcept {
    const double a = 1.0 / std::sqrt(static_cast<double>(amps_.size()));
    std::fill(amps_.begin(), amps_.end(), Amplitude{a, 0.0});
}

CostDiagonal CostDiagonal::build(const Graph& g) {
    check_qubits(g.n());
    CostDiagonal d;
    d.n_ = g.n();
    d.edges_ = static_cast<int>(g.edge_count());
    d.zz_.assign(std::size_t{1} << g.n(), 0);
    d.zz_[0] = d.edges_;

    // Fill the upper half of each prefix by flipping bit k of the lower half:
    // every edge (k, w) changes sign, contributing -2 (1 - 2 x_w).
    const auto adj = g.adjacency();
    for (int k = 0; k < g.n(); ++k) {
        const std::size_t half = std::size_t{1} << k;
        const auto& nbrs = adj[static_cast<std::size_t>(k)];
        for (std::size_t x = 0; x < half; ++x) {
            int delta = 0;
            for (int w : nbrs) delta += ((x >> w) & 1U) ? 2 : -2;
            d.zz_[x | half] = d.zz_[x] + delta;
        }
    }
    return d;
}

int CostDiagonal::max_cut() const noexcept {
    const auto lo = *std::min_element(zz_.begin(), zz_.end());
    return (edges_ - lo) / 2;
}

void apply_cost_layer(StateVector& s, double gamma, const CostDiagonal& d, OpCount* ops) {
    if (s.size() != d.size())
        throw DimensionError("cost diagonal has " + std::to_string(d.size()) + " entries, state has " +
                             std::to_string(s.size()));
    // zz takes only 2|E|+1 distinct values; tabulate their phases once.
    const int e = d.edge_count();
    std::vector<Amplitude> phase(static_cast<std::size_t>(2 * e + 1));
    for (int v = -e; v <= e; ++v) phase[static_cast<std::size_t>(v + e)] = std::polar(1.0, -gamma * v);

    auto amps = s.amplitudes();
    const auto zz = d.zz_sums();
    for (std::size_t x = 0; x < amps.size(); ++x) amps[x] *= phase[static_cast<std::size_t>(zz[x] + e)];
    if (ops) ops->amplitude_updates += amps.size();
}

void apply_mixer_layer(StateVector& s, double beta, OpCount* ops) {
    const double c = std::cos(beta);
    const double sn = std::sin(beta);
    // std::complex is layout-compatible with double[2].
    double* a = reinterpret_cast<double*>(s.amplitudes().data());
    const std::size_t dim = s.size();

    for (int q = 0; q < s.qubits(); ++q) {
        const std::size_t h = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * h) {
            double* lo = a + 2 * base;
            double* hi = a + 2 * (base + h);
            for (std::size_t i = 0; i < h; ++i) {
                const double ar = lo[2 * i], ai = lo[2 * i + 1];
                const double br = hi[2 * i], bi = hi[2 * i + 1];
                // a' = c a - i s b,  b' = -i s a + c b
                lo[2 * i] = c * ar + sn * bi;
                lo[2 * i + 1] = c * ai - sn * br;
                hi[2 * i] = c * br + sn * ai;
                hi[2 * i + 1] = c * bi - sn * ar;
            }
        }
    }
    if (ops) ops->amplitude_updates += static_cast<std::uint64_t>(s.qubits()) * dim;
}

void run_qaoa(const CostDiagonal& d, std::span<const double> params, int p, StateVector& out,
              const QaoaHooks& hooks) {
    if (p < 1) throw ParameterError("QAOA needs p >= 1, got " + std::to_string(p));
    if (params.size() != static_cast<std::size_t>(2 * p))
        throw ParameterError("expected " + std::to_string(2 * p) + " angles for p=" + std::to_string(p) + ", got " +
                             std::to_string(params.size()));
    if (out.size() != d.size()) throw DimensionError("output state does not match cost diagonal");

    auto after = [&] {
        if (hooks.after_layer && *hooks.after_layer) (*hooks.after_layer)(out);
    };
    out.set_uniform();
    if (hooks.ops) hooks.ops->amplitude_updates += out.size();
    after();
    for (int layer = 0; layer < p; ++layer) {
        const double beta = params[static_cast<std::size_t>(2 * layer)];
        const double gamma = params[static_cast<std::size_t>(2 * layer + 1)];
        apply_cost_layer(out, gamma, d, hooks.ops);
        after();
        apply_mixer_layer(out, beta, hooks.ops);
        after();
    }
}

StateVector run_qaoa(const Graph& g, std::span<const double> params, int p) {
    const auto d = CostDiagonal::build(g);
    StateVector s(g.n());
    run_qaoa(d, params, p, s);
    return s;
}

ShotHistogram ShotHistogram::from_counts(std::vector<Entry> counts) {
    std::sort(counts.begin(), counts.end());
    ShotHistogram h;
    for (const auto& [word, n] : counts) {
        if (n == 0) continue;
        h.shots_ += n;
        if (!h.counts_.empty() && h.counts_.back().first == word)
            h.counts_.back().second += n;
        else
            h.counts_.emplace_back(word, n);
    }
    if (h.shots_ == 0) throw ParameterError("histogram has no shots");
    return h;
}

std::uint64_t ShotHistogram::count(std::uint64_t word) const noexcept {
    auto it = std::lower_bound(counts_.begin(), counts_.end(), Entry{word, 0});
    return (it != counts_.end() && it->first == word) ? it->second : 0;
}

ShotHistogram sample(const StateVector& s, std::uint64_t shots, Rng& rng) {
    if (shots == 0) throw ParameterError("shots must be positive");
    const auto amps = s.amplitudes();
    const double total = s.norm_squared();

    // Sorted uniform draws swept against the cumulative distribution in one pass.
    std::vector<double> u(shots);
    for (auto& v : u) v = rng.uniform01() * total;
    std::sort(u.begin(), u.end());

    std::vector<ShotHistogram::Entry> counts;
    std::size_t next = 0;
    double cumulative = 0.0;
    std::uint64_t last_nonzero = 0;
    for (std::size_t x = 0; x < amps.size() && next < u.size(); ++x) {
        const double px = std::norm(amps[x]);
        if (px == 0.0) continue;
        last_nonzero = x;
        cumulative += px;
        std::uint64_t hits = 0;
        while (next < u.size() && u[next] < cumulative) {
            ++hits;
            ++next;
        }
        if (hits) counts.emplace_back(x, hits);
    }
    // Rounding can leave the top draws just above the final cumulative sum.
    if (next < u.size()) {
        const std::uint64_t rest = u.size() - next;
        if (!counts.empty() && counts.back().first == last_nonzero)
            counts.back().second += rest;
        else
            counts.emplace_back(last_nonzero, rest);
    }
    return ShotHistogram::from_counts(std::move(counts));
}

}  // namespace eqaoa
