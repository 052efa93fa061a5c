#include "eqaoa/evo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "eqaoa/errors.hpp"

namespace eqaoa {

namespace {

constexpr double kPi = std::numbers::pi;

// Best parent first: higher fitness, then higher best_cut, then lower id.
bool fitter(const Individual& a, const Individual& b) {
    if (a.fitness() != b.fitness()) return a.fitness() > b.fitness();
    if (a.best_cut() != b.best_cut()) return a.best_cut() > b.best_cut();
    return a.id < b.id;
}

void require_evaluated(std::span<const Individual> pop, const char* what) {
    for (const auto& ind : pop)
        if (!ind.evaluation) throw StateError(std::string(what) + ": individual " + std::to_string(ind.id) + " is unevaluated");
}

void track(Population& pop, const Individual& ind) {
    const auto& e = *ind.evaluation;
    ++pop.evaluations;
    pop.best_solution_cut = std::max(pop.best_solution_cut, e.solution_cut);
    pop.best_cut_ever = std::max(pop.best_cut_ever, e.best_cut);
    if (!pop.best || e.fitness > pop.best->fitness()) pop.best = ind;
}

}  // namespace

double wrap_angle(double angle) noexcept {
    if (angle > -kPi && angle <= kPi) return angle;
    double r = std::fmod(angle + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    double out = r - kPi;
    if (out <= -kPi) out = kPi;
    if (out > kPi) out = kPi;
    return out;
}

double clamp_sigma(double sigma, double sigma_min) noexcept { return std::max(std::abs(sigma), sigma_min); }

void check_genotype(const Genotype& y, int p, double sigma_min) {
    const auto len = static_cast<std::size_t>(2 * p);
    if (y.angles.size() != len || y.sigmas.size() != len)
        throw ParameterError("genotype must carry " + std::to_string(len) + " angles and sigmas");
    for (double a : y.angles)
        if (!(a > -kPi && a <= kPi)) throw ParameterError("genotype angle " + std::to_string(a) + " outside (-pi, pi]");
    for (double s : y.sigmas)
        if (!(s >= sigma_min)) throw ParameterError("genotype sigma " + std::to_string(s) + " below sigma_min");
}

double EvoConfig::tau_value() const {
    return tau.value_or(std::numbers::sqrt2 / 2.0 * std::pow(static_cast<double>(n_pop), -0.25));
}

double EvoConfig::tau_prime_value() const {
    return tau_prime.value_or(std::numbers::sqrt2 / 2.0 * std::pow(static_cast<double>(n_pop), -0.5));
}

void EvoConfig::validate() const {
    if (n_pop < 4) throw ParameterError("n_pop must be at least 4, got " + std::to_string(n_pop));
    if (n_pop % 2 != 0) throw ParameterError("n_pop must be even, got " + std::to_string(n_pop));
    if (p < 1) throw ParameterError("p must be at least 1");
    if (g < 0) throw ParameterError("g must be non-negative");
    if (!(p_sigma >= 0.0 && p_sigma <= 1.0)) throw ParameterError("p_sigma must lie in [0, 1]");
    if (!(sigma_min > 0.0)) throw ParameterError("sigma_min must be positive");
    if (mu < 0 || mu > n_pop) throw ParameterError("mu must lie in [0, n_pop]");
    if (!(tau_value() >= 0.0) || !(tau_prime_value() >= 0.0)) throw ParameterError("tau and tau_prime must be >= 0");
    fitness.validate();
}

std::vector<Individual> init_population(const EvoConfig& cfg, Rng& rng, std::uint64_t first_id) {
    std::vector<Individual> pop(static_cast<std::size_t>(cfg.n_pop));
    const auto genes = static_cast<std::size_t>(2 * cfg.p);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto& y = pop[i].genotype;
        y.angles.resize(genes);
        y.sigmas.resize(genes);
        for (auto& a : y.angles) a = wrap_angle(kPi - 2.0 * kPi * rng.uniform01());
        for (auto& s : y.sigmas) s = std::clamp(std::abs(rng.normal()), cfg.sigma_min, std::max(1.0, cfg.sigma_min));
        pop[i].id = first_id + i;
    }
    return pop;
}

std::vector<std::pair<std::size_t, std::size_t>> sus_select(std::span<const double> fitness, Rng& rng) {
    const std::size_t n = fitness.size();
    if (n < 4) throw ParameterError("SUS needs at least 4 individuals, got " + std::to_string(n));

    const double fmin = *std::min_element(fitness.begin(), fitness.end());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = fitness[i] - fmin;
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) {
        std::fill(w.begin(), w.end(), 1.0);
        total = static_cast<double>(n);
    }

    // n equally spaced pointers over the cumulative weight wheel.
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    const double spacing = total / static_cast<double>(n);
    const double start = rng.uniform01() * spacing;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] > 0.0) last_positive = i;
    std::size_t idx = 0;
    double cumulative = w[0];
    for (std::size_t k = 0; k < n; ++k) {
        const double ptr = start + static_cast<double>(k) * spacing;
        while (idx < n && ptr >= cumulative) {
            ++idx;
            if (idx < n) cumulative += w[idx];
        }
        chosen.push_back(idx < n ? idx : last_positive);
    }
    for (std::size_t i = n - 1; i > 0; --i) std::swap(chosen[i], chosen[rng.below(i + 1)]);

    // Consecutive slots form pairs; an individual may not pair with itself.
    for (std::size_t s = 0; s + 1 < n; s += 2) {
        if (chosen[s] != chosen[s + 1]) continue;
        const std::size_t x = chosen[s];
        bool fixed = false;
        for (std::size_t j = 0; j < n && !fixed; ++j) {
            if (j / 2 == s / 2 || (j ^ 1U) >= n) continue;
            if (chosen[j] != x && chosen[j ^ 1U] != x) {
                std::swap(chosen[s + 1], chosen[j]);
                fixed = true;
            }
        }
        if (fixed) continue;
        // Every other slot holds x: spin the wheel again without it.
        double rest = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != x) rest += w[i];
        const bool uniform = !(rest > 0.0);
        double target = rng.uniform01() * (uniform ? static_cast<double>(n - 1) : rest);
        std::size_t pick = x == 0 ? 1 : 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == x) continue;
            const double wi = uniform ? 1.0 : w[i];
            if (wi <= 0.0) continue;
            pick = i;
            if (target < wi) break;
            target -= wi;
        }
        chosen[s + 1] = pick;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n / 2);
    for (std::size_t s = 0; s + 1 < n; s += 2) pairs.emplace_back(chosen[s], chosen[s + 1]);
    return pairs;
}

std::vector<std::pair<std::size_t, std::size_t>> sus_select(std::span<const Individual> pop, Rng& rng) {
    require_evaluated(pop, "sus_select");
    std::vector<double> f;
    f.reserve(pop.size());
    for (const auto& ind : pop) f.push_back(ind.fitness());
    return sus_select(f, rng);
}

std::pair<Genotype, Genotype> crossover_with_weight(const Genotype& a, const Genotype& b, double w, double sigma_min) {
    if (a.angles.size() != b.angles.size() || a.sigmas.size() != b.sigmas.size())
        throw DimensionError("crossover parents have different layer counts");
    Genotype c1 = a, c2 = b;
    for (std::size_t k = 0; k < a.angles.size(); ++k) {
        c1.angles[k] = wrap_angle(w * a.angles[k] + (1.0 - w) * b.angles[k]);
        c2.angles[k] = wrap_angle((1.0 - w) * a.angles[k] + w * b.angles[k]);
    }
    for (std::size_t k = 0; k < a.sigmas.size(); ++k) {
        c1.sigmas[k] = clamp_sigma(w * a.sigmas[k] + (1.0 - w) * b.sigmas[k], sigma_min);
        c2.sigmas[k] = clamp_sigma((1.0 - w) * a.sigmas[k] + w * b.sigmas[k], sigma_min);
    }
    return {std::move(c1), std::move(c2)};
}

std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, Rng& rng, double sigma_min) {
    return crossover_with_weight(a, b, rng.uniform01(), sigma_min);
}

Genotype mutate(Genotype y, const EvoConfig& cfg, Rng& rng) {
    const double tau = cfg.tau_value();
    const double tau_prime = cfg.tau_prime_value();
    const double shared = rng.normal();
    for (std::size_t k = 0; k < y.angles.size(); ++k) {
        if (!(rng.uniform01() < cfg.p_sigma)) continue;
        const double sigma = clamp_sigma(y.sigmas[k] * std::exp(tau_prime * shared + tau * rng.normal()), cfg.sigma_min);
        y.sigmas[k] = sigma;
        y.angles[k] = wrap_angle(y.angles[k] + sigma * rng.normal());
    }
    return y;
}

std::vector<Individual> elitist_replace(std::vector<Individual> parents, std::vector<Individual> offspring, int mu) {
    if (parents.size() != offspring.size())
        throw DimensionError("elitist_replace: " + std::to_string(parents.size()) + " parents vs " +
                             std::to_string(offspring.size()) + " offspring");
    if (mu < 0 || static_cast<std::size_t>(mu) > parents.size()) throw ParameterError("mu out of range");
    require_evaluated(parents, "elitist_replace");
    require_evaluated(offspring, "elitist_replace");
    if (parents.empty() || mu == 0) return offspring;

    std::sort(parents.begin(), parents.end(), fitter);
    double best_offspring = offspring.front().fitness();
    for (const auto& o : offspring) best_offspring = std::max(best_offspring, o.fitness());
    if (!(parents.front().fitness() > best_offspring)) return offspring;

    // Worst offspring first: lower fitness, then lower best_cut, then higher id.
    std::vector<std::size_t> order(offspring.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitter(offspring[b], offspring[a]); });
    for (int k = 0; k < mu; ++k) offspring[order[static_cast<std::size_t>(k)]] = parents[static_cast<std::size_t>(k)];
    return offspring;
}

void evaluate_batch(std::span<Individual* const> targets, const Evaluator& eval, const EvoConfig& cfg,
                    std::uint64_t seed, int generation, EvalPhase phase) {
    auto seed_of = [&](std::size_t i) {
        return derive_seed(seed, {tag(Stream::Evaluation), static_cast<std::uint64_t>(generation),
                                  static_cast<std::uint64_t>(phase), i});
    };
    const unsigned workers = std::min<unsigned>(std::max(1U, cfg.threads), static_cast<unsigned>(targets.size()));
    if (workers <= 1) {
        EvalWorkspace ws(eval.graph().n());
        for (std::size_t i = 0; i < targets.size(); ++i)
            targets[i]->evaluation = eval.evaluate(targets[i]->genotype.angles, seed_of(i), ws);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    EvalWorkspace ws(eval.graph().n());
                    for (std::size_t i = next++; i < targets.size(); i = next++)
                        targets[i]->evaluation = eval.evaluate(targets[i]->genotype.angles, seed_of(i), ws);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

GenerationRecord summarize(const Population& pop, const EvoConfig& cfg) {
    require_evaluated(pop.members, "summarize");
    GenerationRecord rec;
    rec.generation = pop.generation;
    std::vector<double> fit, beta1;
    const Individual* elite = &pop.members.front();
    for (const auto& ind : pop.members) {
        rec.population.push_back({ind.id, ind.fitness(), ind.best_cut(), ind.genotype.angles.front()});
        fit.push_back(ind.fitness());
        beta1.push_back(ind.genotype.angles.front());
        if (fitter(ind, *elite)) elite = &ind;
    }
    rec.fitness_min = *std::min_element(fit.begin(), fit.end());
    rec.fitness_max = *std::max_element(fit.begin(), fit.end());
    rec.fitness_mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
    rec.best_cut_max = 0;
    for (const auto& ind : pop.members) rec.best_cut_max = std::max(rec.best_cut_max, ind.best_cut());
    rec.fitness_uniqueness = uniqueness_ratio(fit, fit.size());
    rec.beta1_uniqueness = uniqueness_ratio(beta1, beta1.size());
    rec.elite_id = elite->id;
    rec.best_solution_cut = pop.best_solution_cut;
    (void)cfg;
    return rec;
}

Population start_population(const Evaluator& eval, const EvoConfig& cfg, std::uint64_t seed, const EvoHooks& hooks) {
    cfg.validate();
    Population pop;
    pop.seed = seed;
    Rng rng(derive_seed(seed, {tag(Stream::Init)}));
    pop.members = init_population(cfg, rng, 0);
    pop.next_id = pop.members.size();

    std::vector<Individual*> targets;
    for (auto& m : pop.members) targets.push_back(&m);
    evaluate_batch(targets, eval, cfg, seed, 0, EvalPhase::Parents);
    for (auto* t : targets) track(pop, *t);

    pop.transcript.push_back(summarize(pop, cfg));
    if (hooks.on_generation) hooks.on_generation(pop.transcript.back());
    return pop;
}

void step_generation(Population& pop, const Evaluator& eval, const EvoConfig& cfg, const EvoHooks& hooks) {
    if (pop.in_generation) throw StateError("step_generation re-entered mid-generation");
    const int k = pop.generation + 1;
    pop.in_generation = true;

    // Survivors are re-sampled with fresh noise; generation 1 reuses the
    // initial evaluation. Unevaluated members (immigrants) are always scored.
    std::vector<Individual*> targets;
    const bool all = cfg.reevaluate && k > 1;
    for (auto& m : pop.members)
        if (all || !m.evaluation) targets.push_back(&m);
    evaluate_batch(targets, eval, cfg, pop.seed, k, EvalPhase::Parents);
    for (auto* t : targets) track(pop, *t);

    Rng rng(derive_seed(pop.seed, {tag(Stream::Operators), static_cast<std::uint64_t>(k)}));
    const auto pairs = sus_select(std::span<const Individual>(pop.members), rng);
    std::vector<Individual> offspring;
    offspring.reserve(pop.members.size());
    for (const auto& [i, j] : pairs) {
        const auto& a = pop.members[i];
        const auto& b = pop.members[j];
        auto [c1, c2] = crossover(a.genotype, b.genotype, rng, cfg.sigma_min);
        for (Genotype* child : {&c1, &c2}) {
            Individual ind;
            ind.id = pop.next_id++;
            ind.genotype = mutate(std::move(*child), cfg, rng);
            ind.lineage = {a.id, b.id};
            offspring.push_back(std::move(ind));
        }
    }

    targets.clear();
    for (auto& o : offspring) targets.push_back(&o);
    evaluate_batch(targets, eval, cfg, pop.seed, k, EvalPhase::Offspring);
    for (auto* t : targets) track(pop, *t);

    if (hooks.mid_generation) hooks.mid_generation();

    pop.members = elitist_replace(std::move(pop.members), std::move(offspring), cfg.mu);
    pop.generation = k;
    pop.in_generation = false;
    pop.transcript.push_back(summarize(pop, cfg));
    if (hooks.on_generation) hooks.on_generation(pop.transcript.back());
}

RunResult result_of(const Population& pop, std::string method) {
    RunResult r;
    r.method = std::move(method);
    if (pop.best) {
        r.best_genotype = pop.best->genotype;
        r.best_evaluation = *pop.best->evaluation;
    }
    r.best_solution_cut = pop.best_solution_cut;
    r.best_cut = pop.best_cut_ever;
    r.evaluations = pop.evaluations;
    r.generations = pop.transcript;
    return r;
}

RunResult evolve(const Evaluator& eval, const EvoConfig& cfg, const GenerationObserver& observer) {
    cfg.validate();
    if (eval.layers() != cfg.p) throw ParameterError("evaluator layer count differs from config p");
    EvoHooks hooks{observer, {}};
    auto pop = start_population(eval, cfg, cfg.seed, hooks);
    while (pop.generation < cfg.g) step_generation(pop, eval, cfg, hooks);
    return result_of(pop, "evolutionary");
}

RunResult evolve(const Graph& g, const EvoConfig& cfg, const GenerationObserver& observer) {
    cfg.validate();
    const Evaluator eval(g, cfg.p, cfg.fitness);
    return evolve(eval, cfg, observer);
}

}  // namespace eqaoa
