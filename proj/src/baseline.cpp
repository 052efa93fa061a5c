#include "eqaoa/baseline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "eqaoa/errors.hpp"

namespace eqaoa {

std::string_view to_string(LocalMethod m) noexcept {
    return m == LocalMethod::LinearTrustRegion ? "linear_trust_region" : "nelder_mead";
}

LocalMethod parse_local_method(std::string_view name) {
    if (name == "linear_trust_region" || name == "cobyla") return LocalMethod::LinearTrustRegion;
    if (name == "nelder_mead") return LocalMethod::NelderMead;
    throw ParameterError("unknown baseline method '" + std::string(name) + "'");
}

std::string_view to_string(BudgetMode m) noexcept { return m == BudgetMode::Literal ? "literal" : "matched"; }

BudgetMode parse_budget_mode(std::string_view name) {
    if (name == "literal") return BudgetMode::Literal;
    if (name == "matched") return BudgetMode::Matched;
    throw ParameterError("unknown budget mode '" + std::string(name) + "' (expected literal or matched)");
}

void BaselineConfig::validate() const {
    if (iterations < 1) throw ParameterError("baseline iterations must be >= 1");
    if (restarts < 1) throw ParameterError("baseline restarts must be >= 1");
    if (p < 1) throw ParameterError("baseline p must be >= 1");
    if (!(rhobeg > 0.0) || !(rhoend > 0.0) || rhoend > rhobeg)
        throw ParameterError("need 0 < rhoend <= rhobeg");
    fitness.validate();
}

namespace {

using Vec = Eigen::VectorXd;

// Evaluation wrapper that enforces the budget and remembers the best point.
class Counted {
public:
    Counted(const Objective& f, int budget) : f_(f), budget_(budget) {}

    bool exhausted() const noexcept { return used_ >= budget_; }

    double operator()(const Vec& x) {
        ++used_;
        const double v = f_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        if (used_ == 1 || v < best_value_) {
            best_value_ = v;
            best_ = x;
        }
        return v;
    }

    MinimizeResult result() const {
        return {std::vector<double>(best_.data(), best_.data() + best_.size()), best_value_, used_};
    }

private:
    const Objective& f_;
    int budget_;
    int used_ = 0;
    double best_value_ = std::numeric_limits<double>::infinity();
    Vec best_;
};

}  // namespace

MinimizeResult minimize_linear_trust_region(const Objective& f, std::vector<double> x0, double rhobeg, double rhoend,
                                            int max_evals) {
    if (x0.empty()) throw ParameterError("cannot minimize over zero variables");
    if (max_evals < 1) throw ParameterError("evaluation budget must be >= 1");
    const auto d = static_cast<Eigen::Index>(x0.size());
    Counted eval(f, max_evals);

    std::vector<Vec> sim;
    std::vector<double> fv;
    sim.push_back(Eigen::Map<const Vec>(x0.data(), d));
    fv.push_back(eval(sim[0]));
    for (Eigen::Index i = 0; i < d && !eval.exhausted(); ++i) {
        Vec v = sim[0];
        v[i] += rhobeg;
        sim.push_back(v);
        fv.push_back(eval(v));
    }
    if (static_cast<Eigen::Index>(sim.size()) < d + 1) return eval.result();

    double rho = rhobeg;
    while (!eval.exhausted()) {
        const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < sim.size(); ++i)
            if (i != b) rows.push_back(i);

        Eigen::MatrixXd A(d, d);
        Vec df(d);
        for (Eigen::Index r = 0; r < d; ++r) {
            A.row(r) = (sim[rows[static_cast<std::size_t>(r)]] - sim[b]).transpose();
            df[r] = fv[rows[static_cast<std::size_t>(r)]] - fv[b];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) {
            // Degenerate simplex: rebuild it around the best vertex.
            for (Eigen::Index r = 0; r < d && !eval.exhausted(); ++r) {
                const std::size_t j = rows[static_cast<std::size_t>(r)];
                sim[j] = sim[b];
                sim[j][r] += rho;
                fv[j] = eval(sim[j]);
            }
            continue;
        }
        const Vec grad = lu.solve(df);
        const Eigen::MatrixXd inv = lu.inverse();

        // Geometry step for the vertex farthest from the best one.
        std::size_t far_row = 0;
        double far_dist = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double dist = (sim[rows[r]] - sim[b]).norm();
            if (dist > far_dist) {
                far_dist = dist;
                far_row = r;
            }
        }
        if (far_dist > 2.0 * rho) {
            Vec normal = inv.col(static_cast<Eigen::Index>(far_row));
            normal.normalize();
            if (normal.dot(grad) > 0.0) normal = -normal;
            const std::size_t j = rows[far_row];
            sim[j] = sim[b] + rho * normal;
            fv[j] = eval(sim[j]);
            continue;
        }

        const double gnorm = grad.norm();
        if (!(gnorm > 0.0)) {
            if (rho <= rhoend) break;
            rho = std::max(rho * 0.5, rhoend);
            continue;
        }

        const Vec trial = sim[b] - (rho / gnorm) * grad;
        const double ft = eval(trial);

        // Barycentric weights of the trial point; replacing vertex j scales
        // the simplex volume by |lambda_j|.
        const Vec lam_rows = inv.transpose() * (trial - sim[b]);
        std::vector<double> lambda(sim.size(), 0.0);
        lambda[b] = 1.0 - lam_rows.sum();
        for (std::size_t r = 0; r < rows.size(); ++r) lambda[rows[r]] = lam_rows[static_cast<Eigen::Index>(r)];

        std::size_t replace = sim.size();
        double best_weight = 0.0;
        for (std::size_t j = 0; j < sim.size(); ++j) {
            const bool allowed = ft < fv[b] || fv[j] > ft;
            if (allowed && std::abs(lambda[j]) > best_weight) {
                best_weight = std::abs(lambda[j]);
                replace = j;
            }
        }
        if (replace < sim.size() && best_weight > 1e-8) {
            sim[replace] = trial;
            fv[replace] = ft;
        }
        if (!(ft < fv[b] || replace == b)) {
            if (rho <= rhoend) break;
            rho = std::max(rho * 0.5, rhoend);
        }
    }
    return eval.result();
}

MinimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, double scale, int max_evals) {
    if (x0.empty()) throw ParameterError("cannot minimize over zero variables");
    if (max_evals < 1) throw ParameterError("evaluation budget must be >= 1");
    const auto d = static_cast<Eigen::Index>(x0.size());
    Counted eval(f, max_evals);

    std::vector<Vec> sim;
    std::vector<double> fv;
    sim.push_back(Eigen::Map<const Vec>(x0.data(), d));
    fv.push_back(eval(sim[0]));
    for (Eigen::Index i = 0; i < d && !eval.exhausted(); ++i) {
        Vec v = sim[0];
        v[i] += scale;
        sim.push_back(v);
        fv.push_back(eval(v));
    }
    if (static_cast<Eigen::Index>(sim.size()) < d + 1) return eval.result();

    std::vector<std::size_t> order(sim.size());
    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        Vec centroid = Vec::Zero(d);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += sim[order[k]];
        centroid /= static_cast<double>(d);

        const Vec xr = centroid + (centroid - sim[worst]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            if (eval.exhausted()) break;
            const Vec xe = centroid + 2.0 * (centroid - sim[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                sim[worst] = xe;
                fv[worst] = fe;
            } else {
                sim[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            sim[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        if (eval.exhausted()) break;
        const bool outside = fr < fv[worst];
        const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (sim[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            sim[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t k = 1; k < order.size() && !eval.exhausted(); ++k) {
            const std::size_t j = order[k];
            sim[j] = sim[best] + 0.5 * (sim[j] - sim[best]);
            fv[j] = eval(sim[j]);
        }
    }
    return eval.result();
}

std::uint64_t restart_seed(std::uint64_t base_seed, int index) noexcept {
    return derive_seed(base_seed, {tag(Stream::Baseline), static_cast<std::uint64_t>(index)});
}

RunResult run_restart(const Evaluator& eval, const BaselineConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (eval.layers() != cfg.p) throw ParameterError("evaluator layer count differs from baseline p");

    Rng rng(derive_seed(seed, {tag(Stream::Init)}));
    std::vector<double> x0(static_cast<std::size_t>(2 * cfg.p));
    for (auto& a : x0) a = wrap_angle(std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform01());

    RunResult run;
    run.method = std::string(to_string(cfg.method));
    EvalWorkspace ws(eval.graph().n());
    std::vector<double> wrapped(x0.size());
    bool have_best = false;

    const Objective objective = [&](std::span<const double> x) {
        for (std::size_t k = 0; k < x.size(); ++k) wrapped[k] = wrap_angle(x[k]);
        const auto index = static_cast<int>(run.trace.size());
        const auto rec = eval.evaluate(
            wrapped, derive_seed(seed, {tag(Stream::Evaluation), static_cast<std::uint64_t>(index)}), ws);
        ++run.evaluations;
        run.best_solution_cut = std::max(run.best_solution_cut, rec.solution_cut);
        run.best_cut = std::max(run.best_cut, rec.best_cut);
        if (!have_best || rec.fitness > run.best_evaluation.fitness) {
            have_best = true;
            run.best_evaluation = rec;
            run.best_genotype.angles = wrapped;
        }
        run.trace.push_back({index, rec.fitness, rec.best_cut, rec.solution_cut, run.best_evaluation.fitness,
                             run.best_solution_cut});
        return -rec.fitness;
    };

    if (cfg.method == LocalMethod::LinearTrustRegion)
        minimize_linear_trust_region(objective, x0, cfg.rhobeg, cfg.rhoend, cfg.iterations);
    else
        minimize_nelder_mead(objective, x0, cfg.rhobeg, cfg.iterations);
    return run;
}

BaselineResult optimize_local(const Evaluator& eval, const BaselineConfig& cfg) {
    cfg.validate();
    BaselineResult out;
    for (int r = 0; r < cfg.restarts; ++r) {
        out.restarts.push_back(run_restart(eval, cfg, restart_seed(cfg.seed, r)));
        if (out.restarts.back().best_solution_cut > out.restarts[out.best_restart].best_solution_cut)
            out.best_restart = out.restarts.size() - 1;
    }
    return out;
}

BaselineResult optimize_local(const Graph& g, const BaselineConfig& cfg) {
    cfg.validate();
    const Evaluator eval(g, cfg.p, cfg.fitness);
    return optimize_local(eval, cfg);
}

std::uint64_t ea_evaluation_budget(const EvoConfig& cfg) noexcept {
    const auto n = static_cast<std::uint64_t>(cfg.n_pop);
    return cfg.g == 0 ? n : 2 * n * static_cast<std::uint64_t>(cfg.g);
}

ArmStats arm_stats(std::vector<double> ratios) {
    ArmStats s;
    s.ratios = std::move(ratios);
    if (s.ratios.empty()) return s;
    const double n = static_cast<double>(s.ratios.size());
    s.mean = std::accumulate(s.ratios.begin(), s.ratios.end(), 0.0) / n;
    double var = 0.0;
    for (double r : s.ratios) var += (r - s.mean) * (r - s.mean);
    s.std = std::sqrt(var / n);
    s.min = *std::min_element(s.ratios.begin(), s.ratios.end());
    s.max = *std::max_element(s.ratios.begin(), s.ratios.end());
    return s;
}

ComparisonRecord compare_arms(const Graph& g, const EvoConfig& evo_cfg, const BaselineConfig& baseline_cfg) {
    evo_cfg.validate();
    baseline_cfg.validate();
    ComparisonRecord rec;
    rec.optimum = max_cut_bruteforce(g).value;
    rec.budget = baseline_cfg.budget;

    const Evaluator ea_eval(g, evo_cfg.p, evo_cfg.fitness);
    std::vector<double> ea_ratios;
    for (int r = 0; r < baseline_cfg.restarts; ++r) {
        EvoConfig cfg = evo_cfg;
        cfg.seed = derive_seed(evo_cfg.seed, {tag(Stream::Repetition), static_cast<std::uint64_t>(r)});
        ea_ratios.push_back(approximation_ratio(evolve(ea_eval, cfg).best_solution_cut, rec.optimum));
    }
    rec.ea = arm_stats(std::move(ea_ratios));
    rec.ea.evaluations_per_run = ea_evaluation_budget(evo_cfg);

    BaselineConfig bcfg = baseline_cfg;
    if (bcfg.budget == BudgetMode::Matched) bcfg.iterations = static_cast<int>(ea_evaluation_budget(evo_cfg));
    const Evaluator base_eval(g, bcfg.p, bcfg.fitness);
    const auto local = optimize_local(base_eval, bcfg);
    std::vector<double> base_ratios;
    for (const auto& run : local.restarts) base_ratios.push_back(approximation_ratio(run.best_solution_cut, rec.optimum));
    rec.baseline = arm_stats(std::move(base_ratios));
    rec.baseline.evaluations_per_run = static_cast<std::uint64_t>(bcfg.iterations);
    return rec;
}

}  // namespace eqaoa
