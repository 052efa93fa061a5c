#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqaoa/fitness.hpp"
#include "eqaoa/graph.hpp"
#include "eqaoa/rng.hpp"

namespace eqaoa {

/// Circuit angles [β_1, γ_1, …, β_p, γ_p] and one mutation step size per angle.
struct Genotype {
    std::vector<double> angles;
    std::vector<double> sigmas;

    int layers() const noexcept { return static_cast<int>(angles.size() / 2); }

    friend bool operator==(const Genotype&, const Genotype&) = default;
};

/// Maps any angle onto (-π, π].
double wrap_angle(double angle) noexcept;

/// Enforces |σ| >= sigma_min, keeping σ positive.
double clamp_sigma(double sigma, double sigma_min) noexcept;

/// Throws unless angles lie in (-π, π], sigmas >= sigma_min, and both have length 2p.
void check_genotype(const Genotype& y, int p, double sigma_min);

struct Individual {
    std::uint64_t id = 0;
    Genotype genotype;
    std::optional<EvaluationRecord> evaluation;
    std::vector<std::uint64_t> lineage;  // parent ids, or the source id for immigrants

    double fitness() const { return evaluation.value().fitness; }
    int best_cut() const { return evaluation.value().best_cut; }
};

struct EvoConfig {
    int n_pop = 10;
    int p = 2;
    int g = 10;
    double p_sigma = 0.2;
    double sigma_min = 0.1;
    int mu = 1;
    std::optional<double> tau;        // default (√2/2) n_pop^(-1/4)
    std::optional<double> tau_prime;  // default (√2/2) n_pop^(-1/2)
    FitnessConfig fitness;
    std::uint64_t seed = 0;
    bool reevaluate = true;  // re-sample survivors every generation; false caches evaluations
    unsigned threads = 1;    // concurrent evaluations per generation

    double tau_value() const;
    double tau_prime_value() const;
    void validate() const;
};

/// n_pop random genotypes with angles uniform on (-π, π] and σ = clamp(|N(0,1)|, σ_min, 1).
/// Ids are first_id, first_id + 1, ….
std::vector<Individual> init_population(const EvoConfig& cfg, Rng& rng, std::uint64_t first_id = 0);

/// Stochastic universal sampling on min-shifted fitness, returning n/2 index
/// pairs with distinct members. Equal fitness everywhere selects uniformly.
std::vector<std::pair<std::size_t, std::size_t>> sus_select(std::span<const double> fitness, Rng& rng);
std::vector<std::pair<std::size_t, std::size_t>> sus_select(std::span<const Individual> pop, Rng& rng);

/// Whole arithmetic crossover with mixing weight w applied to angles and sigmas:
/// child1 = w a + (1-w) b, child2 = (1-w) a + w b.
std::pair<Genotype, Genotype> crossover_with_weight(const Genotype& a, const Genotype& b, double w, double sigma_min);

/// crossover_with_weight with w drawn uniformly from [0, 1).
std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, Rng& rng, double sigma_min);

/// Self-adaptive lognormal mutation. One shared N(0,1) for the whole genotype;
/// each gene independently with probability p_sigma gets
/// σ' = max(σ e^{τ' N + τ N_k}, σ_min) and angle' = wrap(angle + σ' N'_k).
Genotype mutate(Genotype y, const EvoConfig& cfg, Rng& rng);

/// Keeps the mu best parents in place of the mu worst offspring when the best
/// parent strictly beats the best offspring; otherwise returns the offspring.
std::vector<Individual> elitist_replace(std::vector<Individual> parents, std::vector<Individual> offspring, int mu);

struct IndividualSummary {
    std::uint64_t id = 0;
    double fitness = 0.0;
    int best_cut = 0;
    double beta1 = 0.0;

    friend bool operator==(const IndividualSummary&, const IndividualSummary&) = default;
};

/// Snapshot of a population at the end of a generation (generation 0 is the
/// evaluated initial population).
struct GenerationRecord {
    int generation = 0;
    std::vector<IndividualSummary> population;
    double fitness_min = 0.0;
    double fitness_mean = 0.0;
    double fitness_max = 0.0;
    int best_cut_max = 0;
    double fitness_uniqueness = 0.0;
    double beta1_uniqueness = 0.0;
    std::uint64_t elite_id = 0;
    int best_solution_cut = 0;  // running maximum over every evaluation so far

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

/// Evolving population plus everything needed to continue it deterministically.
/// All randomness is drawn from substreams keyed by (seed, generation, slot),
/// so (seed, generation) is the complete RNG position.
struct Population {
    std::uint64_t seed = 0;
    int generation = 0;
    std::uint64_t next_id = 0;
    bool in_generation = false;
    std::vector<Individual> members;
    std::vector<GenerationRecord> transcript;
    std::optional<Individual> best;  // highest recorded fitness ever (first occurrence kept)
    int best_solution_cut = 0;
    int best_cut_ever = 0;
    std::uint64_t evaluations = 0;
};

using GenerationObserver = std::function<void(const GenerationRecord&)>;

struct EvoHooks {
    GenerationObserver on_generation;
    std::function<void()> mid_generation;  // after offspring evaluation, before survivor selection
};

/// Initial population, evaluated; appends transcript record 0.
Population start_population(const Evaluator& eval, const EvoConfig& cfg, std::uint64_t seed, const EvoHooks& hooks = {});

/// Runs one generation: (re)evaluate → SUS → crossover → mutate → evaluate
/// offspring → elitist replacement. Appends one transcript record.
void step_generation(Population& pop, const Evaluator& eval, const EvoConfig& cfg, const EvoHooks& hooks = {});

/// Evaluation pass phases; part of each evaluation's substream key.
enum class EvalPhase : std::uint64_t { Parents = 0, Offspring = 1 };

/// Evaluates `targets` concurrently (cfg.threads workers). Target i samples
/// from substream (seed, generation, phase, i). Results do not depend on the
/// number of workers.
void evaluate_batch(std::span<Individual* const> targets, const Evaluator& eval, const EvoConfig& cfg,
                    std::uint64_t seed, int generation, EvalPhase phase);

/// Builds the summary record for the population's current members.
GenerationRecord summarize(const Population& pop, const EvoConfig& cfg);

/// One point of a local optimizer's objective trace.
struct TracePoint {
    int index = 0;
    double fitness = 0.0;
    int best_cut = 0;
    int solution_cut = 0;
    double best_fitness_so_far = 0.0;
    int best_solution_cut_so_far = 0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Outcome of one optimization run; shared by the EA and the local baseline.
struct RunResult {
    std::string method;
    Genotype best_genotype;
    EvaluationRecord best_evaluation;  // record of the fittest evaluation
    int best_solution_cut = 0;         // running max of solution_cut, the "solution found"
    int best_cut = 0;
    std::uint64_t evaluations = 0;
    std::vector<GenerationRecord> generations;  // EA arms
    std::vector<TracePoint> trace;              // baseline arm
};

RunResult result_of(const Population& pop, std::string method);

/// Single-population evolutionary optimizer for the QAOA angles.
RunResult evolve(const Graph& g, const EvoConfig& cfg, const GenerationObserver& observer = {});
RunResult evolve(const Evaluator& eval, const EvoConfig& cfg, const GenerationObserver& observer = {});

}  // namespace eqaoa
