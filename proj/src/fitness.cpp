#include "eqaoa/fitness.hpp"

#include <cmath>
#include <unordered_set>

namespace eqaoa {

std::string_view to_string(FitnessMode mode) noexcept {
    return mode == FitnessMode::Cvar ? "cvar" : "max_count";
}

FitnessMode parse_fitness_mode(std::string_view name) {
    if (name == "cvar") return FitnessMode::Cvar;
    if (name == "max_count") return FitnessMode::MaxCount;
    throw ParameterError("unknown fitness mode '" + std::string(name) + "' (expected cvar or max_count)");
}

void FitnessConfig::validate() const {
    if (shots == 0) throw ParameterError("shots must be positive");
    if (mode == FitnessMode::Cvar && !(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

std::uint64_t cvar_tail_size(double alpha, std::uint64_t shots) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
    const double t = alpha * static_cast<double>(shots);
    const double r = std::round(t);
    double m = std::abs(t - r) <= 1e-9 * std::max(1.0, t) ? r : std::ceil(t);
    m = std::clamp(m, 1.0, static_cast<double>(shots));
    return static_cast<std::uint64_t>(m);
}

std::uint64_t modal_word(const ShotHistogram& h) {
    if (h.empty()) throw ParameterError("modal word of an empty histogram");
    // counts() is sorted by word, so the first maximum is the smallest word.
    const auto counts = h.counts();
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

double cvar_fitness(const ShotHistogram& h, const Graph& g, double alpha) {
    return cvar_of(h, alpha, [&](std::uint64_t w) { return cut_value_word(g, w); });
}

double max_count_fitness(const ShotHistogram& h, const Graph& g) {
    return cut_value_word(g, modal_word(h));
}

double approximation_ratio(double found, int optimal) {
    if (optimal <= 0) throw ParameterError("approximation ratio needs a positive optimum");
    return found / static_cast<double>(optimal);
}

double uniqueness_ratio(std::span<const double> values, std::size_t n_pop) {
    if (values.empty() || n_pop == 0) throw ParameterError("uniqueness ratio of an empty population");
    if (values.size() != n_pop)
        throw ParameterError("uniqueness ratio: " + std::to_string(values.size()) + " values for n_pop=" +
                             std::to_string(n_pop));
    std::unordered_set<long long> seen;
    std::unordered_set<double> large;
    for (double v : values) {
        const double scaled = v * 1e12;
        if (std::abs(scaled) < 9.0e15)
            seen.insert(std::llround(scaled));
        else
            large.insert(v);
    }
    return static_cast<double>(seen.size() + large.size()) / static_cast<double>(n_pop);
}

Evaluator::Evaluator(Graph graph, int p, FitnessConfig cfg)
    : graph_(std::move(graph)), p_(p), cfg_(cfg), diag_(CostDiagonal::build(graph_)) {
    cfg_.validate();
    if (p_ < 1) throw ParameterError("QAOA needs p >= 1");
}

EvaluationRecord Evaluator::evaluate(std::span<const double> angles, std::uint64_t sample_seed,
                                     EvalWorkspace& ws) const {
    if (ws.state.qubits() != graph_.n()) throw DimensionError("workspace sized for a different graph");
    QaoaHooks hooks;
    if (hook_) hooks.after_layer = &hook_;
    run_qaoa(diag_, angles, p_, ws.state, hooks);
    Rng rng(sample_seed);
    const auto h = sample(ws.state, cfg_.shots, rng);
    return score_histogram(h, cfg_, [&](std::uint64_t w) { return diag_.cut(w); });
}

EvaluationRecord Evaluator::evaluate(std::span<const double> angles, std::uint64_t sample_seed) const {
    EvalWorkspace ws(graph_.n());
    return evaluate(angles, sample_seed, ws);
}

}  // namespace eqaoa
