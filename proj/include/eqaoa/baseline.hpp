#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqaoa/evo.hpp"
#include "eqaoa/fitness.hpp"

namespace eqaoa {

enum class LocalMethod {
    LinearTrustRegion,  // COBYLA-style linear interpolation model on a simplex
    NelderMead,
};

std::string_view to_string(LocalMethod m) noexcept;
LocalMethod parse_local_method(std::string_view name);

/// literal: the baseline gets `iterations` objective evaluations.
/// matched: the baseline gets as many evaluations as one EA run.
enum class BudgetMode { Literal, Matched };

std::string_view to_string(BudgetMode m) noexcept;
BudgetMode parse_budget_mode(std::string_view name);

struct BaselineConfig {
    int iterations = 10;  // objective evaluations per restart
    int restarts = 10;
    int p = 2;
    LocalMethod method = LocalMethod::LinearTrustRegion;
    double rhobeg = 1.0;  // initial trust radius / simplex edge
    double rhoend = 1e-4;
    FitnessConfig fitness;
    std::uint64_t seed = 0;
    BudgetMode budget = BudgetMode::Literal;

    void validate() const;
};

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Minimizes `f` with at most `max_evals` calls, keeping the first point that
/// attains the lowest observed value. Each step minimizes the linear
/// interpolant of the current simplex within a trust radius; failed steps
/// halve the radius; vertices left far outside it are replaced by
/// volume-maximizing geometry points.
MinimizeResult minimize_linear_trust_region(const Objective& f, std::vector<double> x0, double rhobeg, double rhoend,
                                            int max_evals);

/// Nelder–Mead simplex with standard coefficients (1, 2, 1/2, 1/2).
MinimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, double scale, int max_evals);

struct BaselineResult {
    std::vector<RunResult> restarts;  // one per restart, in restart order
    std::size_t best_restart = 0;     // largest best_solution_cut, ties to the lower index
};

/// One restart: uniform initial point on (-π, π]^{2p}; maximizes fitness of
/// the sampled QAOA state by minimizing its negation.
RunResult run_restart(const Evaluator& eval, const BaselineConfig& cfg, std::uint64_t restart_seed);

/// Seed of restart `index` under the config seed.
std::uint64_t restart_seed(std::uint64_t base_seed, int index) noexcept;

BaselineResult optimize_local(const Evaluator& eval, const BaselineConfig& cfg);
BaselineResult optimize_local(const Graph& g, const BaselineConfig& cfg);

/// Evaluations used by one EA run: n_pop for g = 0, else 2 n_pop g.
std::uint64_t ea_evaluation_budget(const EvoConfig& cfg) noexcept;

struct ArmStats {
    std::vector<double> ratios;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    double min = 0.0;
    double max = 0.0;
    std::uint64_t evaluations_per_run = 0;
};

ArmStats arm_stats(std::vector<double> ratios);

struct ComparisonRecord {
    int optimum = 0;
    BudgetMode budget = BudgetMode::Literal;
    ArmStats ea;
    ArmStats baseline;
};

/// Runs `baseline_cfg.restarts` EA runs (seeds derived from evo_cfg.seed) and
/// one optimize_local call with that many restarts; ratios are
/// best_solution_cut / brute-force optimum.
ComparisonRecord compare_arms(const Graph& g, const EvoConfig& evo_cfg, const BaselineConfig& baseline_cfg);

}  // namespace eqaoa
