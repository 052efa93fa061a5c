#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqaoa/errors.hpp"
#include "eqaoa/graph.hpp"
#include "eqaoa/qsim.hpp"

namespace eqaoa {

enum class FitnessMode { Cvar, MaxCount };

std::string_view to_string(FitnessMode mode) noexcept;
FitnessMode parse_fitness_mode(std::string_view name);

struct FitnessConfig {
    FitnessMode mode = FitnessMode::Cvar;
    double alpha = 0.15;  // ignored in max_count mode
    std::uint64_t shots = 10000;

    void validate() const;
};

/// Summary of a histogram kept for logs.
struct HistogramDigest {
    std::uint64_t distinct_words = 0;
    std::uint64_t modal_word = 0;
    std::uint64_t modal_count = 0;
    double mean_cut = 0.0;

    friend bool operator==(const HistogramDigest&, const HistogramDigest&) = default;
};

struct EvaluationRecord {
    double fitness = 0.0;  // selection fitness, cut-value units
    int best_cut = 0;      // largest cut among observed words
    int solution_cut = 0;  // cut of the reported answer: modal word (max_count) or best word (cvar)
    HistogramDigest digest;

    friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

/// m = ceil(alpha * shots), clamped to [1, shots]. Products within 1e-9 of an
/// integer are snapped to it so alpha = k / shots selects exactly k shots.
std::uint64_t cvar_tail_size(double alpha, std::uint64_t shots);

/// Mean cut value over the best ceil(alpha * shots) shots. `cut_of(word)`
/// returns the cut value of a measured word.
template <class CutFn>
double cvar_of(const ShotHistogram& h, double alpha, CutFn&& cut_of) {
    if (h.empty()) throw ParameterError("cvar of an empty histogram");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
    std::vector<std::pair<int, std::uint64_t>> by_cut;
    by_cut.reserve(h.counts().size());
    for (const auto& [word, count] : h.counts()) by_cut.emplace_back(cut_of(word), count);
    std::sort(by_cut.begin(), by_cut.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const std::uint64_t m = cvar_tail_size(alpha, h.shots());
    std::uint64_t taken = 0;
    long long sum = 0;
    for (const auto& [cut, count] : by_cut) {
        const std::uint64_t take = std::min(count, m - taken);
        sum += static_cast<long long>(cut) * static_cast<long long>(take);
        taken += take;
        if (taken == m) break;
    }
    return static_cast<double>(sum) / static_cast<double>(m);
}

/// Word with the largest count; ties go to the numerically smallest word.
std::uint64_t modal_word(const ShotHistogram& h);

double cvar_fitness(const ShotHistogram& h, const Graph& g, double alpha);
double max_count_fitness(const ShotHistogram& h, const Graph& g);

/// found / optimal.
double approximation_ratio(double found, int optimal);

/// Number of distinct values (after rounding to 12 decimals) divided by n_pop.
double uniqueness_ratio(std::span<const double> values, std::size_t n_pop);

/// Scores a histogram under `cfg`; `cut_of(word)` as in cvar_of.
template <class CutFn>
EvaluationRecord score_histogram(const ShotHistogram& h, const FitnessConfig& cfg, CutFn&& cut_of) {
    if (h.empty()) throw ParameterError("cannot score an empty histogram");
    EvaluationRecord rec;
    rec.digest.distinct_words = h.counts().size();
    rec.digest.modal_word = modal_word(h);
    rec.digest.modal_count = h.count(rec.digest.modal_word);
    long long total = 0;
    rec.best_cut = 0;
    for (const auto& [word, count] : h.counts()) {
        const int c = cut_of(word);
        rec.best_cut = std::max(rec.best_cut, c);
        total += static_cast<long long>(c) * static_cast<long long>(count);
    }
    rec.digest.mean_cut = static_cast<double>(total) / static_cast<double>(h.shots());
    const int modal_cut = cut_of(rec.digest.modal_word);
    if (cfg.mode == FitnessMode::MaxCount) {
        rec.fitness = modal_cut;
        rec.solution_cut = modal_cut;
    } else {
        rec.fitness = cvar_of(h, cfg.alpha, cut_of);
        rec.solution_cut = rec.best_cut;
    }
    return rec;
}

/// Reusable scratch memory for one concurrent evaluation.
struct EvalWorkspace {
    explicit EvalWorkspace(int qubits) : state(qubits) {}
    StateVector state;
};

/// Circuit-to-fitness pipeline for one graph: build the QAOA state, sample it,
/// and score the histogram. Immutable after construction; share one instance
/// across threads and give each thread its own EvalWorkspace.
class Evaluator {
public:
    Evaluator(Graph graph, int p, FitnessConfig cfg);

    const Graph& graph() const noexcept { return graph_; }
    const CostDiagonal& diagonal() const noexcept { return diag_; }
    const FitnessConfig& config() const noexcept { return cfg_; }
    int layers() const noexcept { return p_; }

    /// Installs a hook run after every circuit layer (norm audits).
    void set_layer_hook(LayerHook hook) { hook_ = std::move(hook); }

    EvaluationRecord evaluate(std::span<const double> angles, std::uint64_t sample_seed, EvalWorkspace& ws) const;
    EvaluationRecord evaluate(std::span<const double> angles, std::uint64_t sample_seed) const;

private:
    Graph graph_;
    int p_;
    FitnessConfig cfg_;
    CostDiagonal diag_;
    LayerHook hook_;
};

}  // namespace eqaoa
