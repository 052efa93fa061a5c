#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "eqaoa/errors.hpp"
#include "eqaoa/evo.hpp"

using namespace eqaoa;

namespace {

constexpr double kPi = std::numbers::pi;

Individual scored(std::uint64_t id, double fitness, int best_cut = 0) {
    Individual ind;
    ind.id = id;
    ind.genotype = {{0.1, 0.2}, {0.5, 0.5}};
    ind.evaluation = EvaluationRecord{fitness, best_cut, best_cut, {}};
    return ind;
}

EvoConfig small_config(std::uint64_t seed) {
    EvoConfig cfg;
    cfg.g = 4;
    cfg.fitness.shots = 500;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("wrap_angle maps onto (-pi, pi]") {
    CHECK(wrap_angle(0.5) == 0.5);
    CHECK(wrap_angle(kPi) == kPi);
    CHECK(wrap_angle(-kPi) == kPi);
    CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(2 * kPi + 0.25) == doctest::Approx(0.25));
    CHECK(wrap_angle(-2 * kPi - 0.25) == doctest::Approx(-0.25));
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double w = wrap_angle(rng.uniform(-1e4, 1e4));
        CHECK((w > -kPi && w <= kPi));
    }
}

TEST_CASE("crossover identities") {
    const Genotype a{{0.3, -1.0}, {0.4, 0.7}};
    const Genotype b{{-0.5, 2.0}, {0.2, 0.9}};
    auto [c1, c2] = crossover_with_weight(a, b, 1.0, 0.1);
    CHECK(c1 == a);
    CHECK(c2 == b);
    auto [d1, d2] = crossover_with_weight(a, b, 0.0, 0.1);
    CHECK(d1 == b);
    CHECK(d2 == a);
    auto [m1, m2] = crossover_with_weight(a, b, 0.5, 0.1);
    CHECK(m1 == m2);
    CHECK(m1.angles[0] == doctest::Approx(-0.1));
    CHECK(m1.sigmas[1] == doctest::Approx(0.8));
    auto [s1, s2] = crossover_with_weight(a, a, 0.37, 0.1);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(s1.angles[k] == doctest::Approx(a.angles[k]));
        CHECK(s2.sigmas[k] == doctest::Approx(a.sigmas[k]));
    }
    CHECK_THROWS_AS(crossover_with_weight(a, Genotype{{0.1, 0.2, 0.3, 0.4}, {1, 1, 1, 1}}, 0.5, 0.1),
                    DimensionError);
}

TEST_CASE("mutation with p_sigma = 0 is the identity") {
    EvoConfig cfg;
    cfg.p_sigma = 0.0;
    Rng rng(1);
    const Genotype y{{0.3, -1.0, 2.0, 0.1}, {0.4, 0.7, 0.2, 1.0}};
    CHECK(mutate(y, cfg, rng) == y);
}

TEST_CASE("mutation with p_sigma = 1 touches every gene and keeps invariants") {
    EvoConfig cfg;
    cfg.p_sigma = 1.0;
    Rng rng(2);
    const Genotype y{{0.3, -1.0, 2.0, 0.1}, {0.4, 0.7, 0.2, 1.0}};
    const Genotype z = mutate(y, cfg, rng);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(z.angles[k] != y.angles[k]);
        CHECK(z.sigmas[k] >= cfg.sigma_min);
    }
    CHECK_NOTHROW(check_genotype(z, 2, cfg.sigma_min));
}

TEST_CASE("mutation matches its documented draw order") {
    EvoConfig cfg;
    cfg.p_sigma = 1.0;
    const Genotype y{{0.3, -1.0}, {0.4, 0.7}};
    Rng rng(9), ref(9);
    const Genotype z = mutate(y, cfg, rng);
    const double shared = ref.normal();
    for (std::size_t k = 0; k < 2; ++k) {
        (void)ref.uniform01();
        const double s = std::max(y.sigmas[k] * std::exp(cfg.tau_prime_value() * shared + cfg.tau_value() * ref.normal()),
                                  cfg.sigma_min);
        CHECK(z.sigmas[k] == s);
        CHECK(z.angles[k] == wrap_angle(y.angles[k] + s * ref.normal()));
    }
}

TEST_CASE("default learning rates") {
    EvoConfig cfg;
    CHECK(cfg.tau_value() == doctest::Approx(std::sqrt(2.0) / 2.0 * std::pow(10.0, -0.25)));
    CHECK(cfg.tau_prime_value() == doctest::Approx(std::sqrt(2.0) / 2.0 / std::sqrt(10.0)));
}

TEST_CASE("SUS counts stay within floor/ceil of expectation") {
    const std::vector<double> f{1, 2, 3, 4, 5, 6, 7, 8};  // weights 0..7 after the min shift
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto pairs = sus_select(f, rng);
        REQUIRE(pairs.size() == 4);
        std::map<std::size_t, int> count;
        for (auto [i, j] : pairs) {
            CHECK(i != j);
            ++count[i];
            ++count[j];
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double expect = 8.0 * static_cast<double>(i) / 28.0;
            CHECK(count[i] >= std::floor(expect));
            CHECK(count[i] <= std::ceil(expect));
        }
    }
}

TEST_CASE("SUS with equal fitness selects everyone once") {
    const std::vector<double> f(6, 3.0);
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::multiset<std::size_t> seen;
        for (auto [i, j] : sus_select(f, rng)) {
            CHECK(i != j);
            seen.insert(i);
            seen.insert(j);
        }
        for (std::size_t i = 0; i < 6; ++i) CHECK(seen.count(i) == 1);
    }
}

TEST_CASE("SUS dominated by one individual still forms distinct pairs") {
    const std::vector<double> f{0, 0, 0, 100};
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial)
        for (auto [i, j] : sus_select(f, rng)) CHECK(i != j);
    CHECK_THROWS_AS(sus_select(std::vector<double>{1, 2, 3}, rng), ParameterError);
}

TEST_CASE("elitism keeps the best parent only when it beats every offspring") {
    std::vector<Individual> parents{scored(0, 5.0), scored(1, 9.0), scored(2, 1.0), scored(3, 2.0)};
    std::vector<Individual> offspring{scored(4, 3.0), scored(5, 4.0), scored(6, 2.5), scored(7, 8.0)};
    auto next = elitist_replace(parents, offspring, 1);
    REQUIRE(next.size() == 4);
    CHECK(next[2].id == 1);  // worst offspring (id 6) replaced in place
    CHECK(next[0].id == 4);

    std::vector<Individual> strong{scored(4, 3.0), scored(5, 9.0), scored(6, 2.5), scored(7, 8.0)};
    auto kept = elitist_replace(parents, strong, 1);  // tie at 9.0: offspring survive
    for (std::size_t i = 0; i < 4; ++i) CHECK(kept[i].id == strong[i].id);

    auto two = elitist_replace(parents, offspring, 2);
    std::set<std::uint64_t> ids;
    for (const auto& ind : two) ids.insert(ind.id);
    CHECK(ids == std::set<std::uint64_t>{0, 1, 5, 7});
}

TEST_CASE("config validation") {
    EvoConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_pop = 7;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = {};
    cfg.sigma_min = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = {};
    cfg.mu = 11;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = {};
    cfg.p_sigma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("initial population respects genotype invariants") {
    EvoConfig cfg;
    cfg.p = 3;
    Rng rng(6);
    const auto pop = init_population(cfg, rng, 5);
    REQUIRE(pop.size() == 10);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(pop[i].id == 5 + i);
        CHECK_NOTHROW(check_genotype(pop[i].genotype, 3, cfg.sigma_min));
        for (double s : pop[i].genotype.sigmas) CHECK(s <= 1.0);
        CHECK_FALSE(pop[i].evaluation.has_value());
    }
}

TEST_CASE("evolve: transcript shape, budget and running maxima") {
    const Graph g = generate_regular(8, 3, 2);
    const EvoConfig cfg = small_config(17);
    const auto r = evolve(g, cfg);
    REQUIRE(r.generations.size() == 5);
    CHECK(r.evaluations == 2U * 10U * 4U);
    int prev = 0;
    for (std::size_t k = 0; k < r.generations.size(); ++k) {
        const auto& rec = r.generations[k];
        CHECK(rec.generation == static_cast<int>(k));
        CHECK(rec.population.size() == 10);
        CHECK(rec.best_solution_cut >= prev);
        prev = rec.best_solution_cut;
        CHECK(rec.fitness_min <= rec.fitness_mean);
        CHECK(rec.fitness_mean <= rec.fitness_max);
    }
    CHECK(r.best_solution_cut == prev);
    CHECK(r.best_solution_cut <= max_cut_bruteforce(g).value);
    CHECK(r.best_genotype.angles.size() == 4);
}

TEST_CASE("evolve is deterministic and independent of the thread count") {
    const Graph g = generate_regular(8, 3, 2);
    auto cfg = small_config(23);
    const auto a = evolve(g, cfg);
    cfg.threads = 3;
    const auto b = evolve(g, cfg);
    CHECK(a.generations == b.generations);
    CHECK(a.best_genotype == b.best_genotype);
    cfg.seed = 24;
    CHECK(evolve(g, cfg).generations != a.generations);
}

TEST_CASE("reevaluate = false only scores new individuals") {
    const Graph g = generate_regular(6, 3, 1);
    auto cfg = small_config(3);
    cfg.reevaluate = false;
    const auto r = evolve(g, cfg);
    CHECK(r.evaluations == 10U + 10U * 4U);
}

TEST_CASE("zero generations evaluates the initial population only") {
    const Graph g = generate_regular(6, 3, 1);
    auto cfg = small_config(3);
    cfg.g = 0;
    const auto r = evolve(g, cfg);
    CHECK(r.generations.size() == 1);
    CHECK(r.evaluations == 10U);
}

TEST_CASE("K4 with default hyperparameters reaches the optimum") {
    EvoConfig cfg;
    cfg.seed = 1;
    const auto r = evolve(generate_regular(4, 3, 0), cfg);
    CHECK(r.best_solution_cut == 4);
}

TEST_CASE("observer sees every generation and stepping mid-generation is rejected") {
    const Graph g = generate_regular(6, 3, 1);
    const EvoConfig cfg = small_config(5);
    int seen = 0;
    evolve(g, cfg, [&](const GenerationRecord&) { ++seen; });
    CHECK(seen == cfg.g + 1);

    const Evaluator eval(g, cfg.p, cfg.fitness);
    auto pop = start_population(eval, cfg, 5);
    bool threw = false;
    EvoHooks hooks;
    hooks.mid_generation = [&] {
        try {
            step_generation(pop, eval, cfg);
        } catch (const StateError&) {
            threw = true;
        }
    };
    step_generation(pop, eval, cfg, hooks);
    CHECK(threw);
    CHECK(pop.generation == 1);
}
