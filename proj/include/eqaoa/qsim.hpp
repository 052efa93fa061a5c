#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "eqaoa/graph.hpp"
#include "eqaoa/rng.hpp"

namespace eqaoa {

/// Largest qubit count the statevector simulator accepts (2^26 amplitudes = 1 GiB).
inline constexpr int kMaxQubits = 26;

using Amplitude = std::complex<double>;

/// Dense 2^n-amplitude state; basis index bit q is qubit q (LSB = qubit 0).
class StateVector {
public:
    /// |0...0> on n qubits.
    explicit StateVector(int n);

    /// H^{⊗n}|0...0>.
    static StateVector uniform(int n);

    static StateVector from_amplitudes(int n, std::vector<Amplitude> amplitudes);

    int qubits() const noexcept { return n_; }
    std::size_t size() const noexcept { return amps_.size(); }

    std::span<Amplitude> amplitudes() noexcept { return amps_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

    /// Sum of |amplitude|^2, accumulated in index order.
    double norm_squared() const noexcept;

    /// Resets to H^{⊗n}|0...0> without reallocating.
    void set_uniform() noexcept;

private:
    int n_ = 0;
    std::vector<Amplitude> amps_;
};

/// Eigenvalues of the edge ZZ sum on every basis state:
/// zz[x] = Σ_{(i,j)∈E} (1-2x_i)(1-2x_j) = |E| - 2 cut(x).
class CostDiagonal {
public:
    static CostDiagonal build(const Graph& g);

    int qubits() const noexcept { return n_; }
    int edge_count() const noexcept { return edges_; }
    std::size_t size() const noexcept { return zz_.size(); }
    std::span<const std::int32_t> zz_sums() const noexcept { return zz_; }

    int zz_sum(std::uint64_t word) const noexcept { return zz_[word]; }
    int cut(std::uint64_t word) const noexcept { return (edges_ - zz_[word]) / 2; }

    /// Largest cut over all assignments (the minimum diagonal entry).
    int max_cut() const noexcept;

private:
    int n_ = 0;
    int edges_ = 0;
    std::vector<std::int32_t> zz_;
};

/// Counts elementary amplitude updates; each layer adds its own cost.
struct OpCount {
    std::uint64_t amplitude_updates = 0;
};

/// amplitude[x] *= exp(-i gamma zz[x]).
void apply_cost_layer(StateVector& s, double gamma, const CostDiagonal& d, OpCount* ops = nullptr);

/// Applies exp(-i beta X_q) to every qubit q.
void apply_mixer_layer(StateVector& s, double beta, OpCount* ops = nullptr);

/// Called after the Hadamard layer and after every cost and mixer layer.
using LayerHook = std::function<void(const StateVector&)>;

struct QaoaHooks {
    const LayerHook* after_layer = nullptr;
    OpCount* ops = nullptr;
};

/// Overwrites `out` with U_M(β_p)U_C(γ_p)…U_M(β_1)U_C(γ_1)H^{⊗n}|0>.
/// `params` is interleaved [β_1, γ_1, …, β_p, γ_p].
void run_qaoa(const CostDiagonal& d, std::span<const double> params, int p, StateVector& out,
              const QaoaHooks& hooks = {});

StateVector run_qaoa(const Graph& g, std::span<const double> params, int p);

/// Measurement outcomes: (word, count) pairs sorted by word, zero counts omitted.
class ShotHistogram {
public:
    using Entry = std::pair<std::uint64_t, std::uint64_t>;

    ShotHistogram() = default;

    /// Merges duplicate words and drops zero counts; rejects an empty total.
    static ShotHistogram from_counts(std::vector<Entry> counts);

    std::span<const Entry> counts() const noexcept { return counts_; }
    std::uint64_t shots() const noexcept { return shots_; }
    bool empty() const noexcept { return shots_ == 0; }
    std::uint64_t count(std::uint64_t word) const noexcept;

    friend bool operator==(const ShotHistogram&, const ShotHistogram&) = default;

private:
    std::vector<Entry> counts_;
    std::uint64_t shots_ = 0;
};

/// Draws `shots` independent measurements from |amplitude|^2.
ShotHistogram sample(const StateVector& s, std::uint64_t shots, Rng& rng);

}  // namespace eqaoa
