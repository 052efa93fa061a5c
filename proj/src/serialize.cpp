#include "eqaoa/serialize.hpp"

#include <string>

#include "eqaoa/errors.hpp"

namespace eqaoa {

void require_known_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw ParameterError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ParameterError(std::string("unknown key '") + key + "' in " + where);
    }
}

void to_json(Json& j, const HistogramDigest& d) {
    j = Json{{"distinct_words", d.distinct_words},
             {"modal_word", d.modal_word},
             {"modal_count", d.modal_count},
             {"mean_cut", d.mean_cut}};
}

void from_json(const Json& j, HistogramDigest& d) {
    j.at("distinct_words").get_to(d.distinct_words);
    j.at("modal_word").get_to(d.modal_word);
    j.at("modal_count").get_to(d.modal_count);
    j.at("mean_cut").get_to(d.mean_cut);
}

void to_json(Json& j, const EvaluationRecord& e) {
    j = Json{{"fitness", e.fitness}, {"best_cut", e.best_cut}, {"solution_cut", e.solution_cut}, {"digest", e.digest}};
}

void from_json(const Json& j, EvaluationRecord& e) {
    j.at("fitness").get_to(e.fitness);
    j.at("best_cut").get_to(e.best_cut);
    j.at("solution_cut").get_to(e.solution_cut);
    j.at("digest").get_to(e.digest);
}

void to_json(Json& j, const Genotype& y) { j = Json{{"angles", y.angles}, {"sigmas", y.sigmas}}; }

void from_json(const Json& j, Genotype& y) {
    j.at("angles").get_to(y.angles);
    j.at("sigmas").get_to(y.sigmas);
}

void to_json(Json& j, const Individual& ind) {
    j = Json{{"id", ind.id}, {"genotype", ind.genotype}, {"lineage", ind.lineage}};
    j["evaluation"] = ind.evaluation ? Json(*ind.evaluation) : Json(nullptr);
}

void from_json(const Json& j, Individual& ind) {
    j.at("id").get_to(ind.id);
    j.at("genotype").get_to(ind.genotype);
    j.at("lineage").get_to(ind.lineage);
    const auto& e = j.at("evaluation");
    if (e.is_null())
        ind.evaluation.reset();
    else
        ind.evaluation = e.get<EvaluationRecord>();
}

void to_json(Json& j, const IndividualSummary& s) {
    j = Json{{"id", s.id}, {"fitness", s.fitness}, {"best_cut", s.best_cut}, {"beta1", s.beta1}};
}

void from_json(const Json& j, IndividualSummary& s) {
    j.at("id").get_to(s.id);
    j.at("fitness").get_to(s.fitness);
    j.at("best_cut").get_to(s.best_cut);
    j.at("beta1").get_to(s.beta1);
}

void to_json(Json& j, const GenerationRecord& r) {
    j = Json{{"generation", r.generation},
             {"population", r.population},
             {"fitness_min", r.fitness_min},
             {"fitness_mean", r.fitness_mean},
             {"fitness_max", r.fitness_max},
             {"best_cut_max", r.best_cut_max},
             {"fitness_uniqueness", r.fitness_uniqueness},
             {"beta1_uniqueness", r.beta1_uniqueness},
             {"elite_id", r.elite_id},
             {"best_solution_cut", r.best_solution_cut}};
}

void from_json(const Json& j, GenerationRecord& r) {
    j.at("generation").get_to(r.generation);
    j.at("population").get_to(r.population);
    j.at("fitness_min").get_to(r.fitness_min);
    j.at("fitness_mean").get_to(r.fitness_mean);
    j.at("fitness_max").get_to(r.fitness_max);
    j.at("best_cut_max").get_to(r.best_cut_max);
    j.at("fitness_uniqueness").get_to(r.fitness_uniqueness);
    j.at("beta1_uniqueness").get_to(r.beta1_uniqueness);
    j.at("elite_id").get_to(r.elite_id);
    j.at("best_solution_cut").get_to(r.best_solution_cut);
}

void to_json(Json& j, const TracePoint& t) {
    j = Json{{"index", t.index},
             {"fitness", t.fitness},
             {"best_cut", t.best_cut},
             {"solution_cut", t.solution_cut},
             {"best_fitness_so_far", t.best_fitness_so_far},
             {"best_solution_cut_so_far", t.best_solution_cut_so_far}};
}

void from_json(const Json& j, TracePoint& t) {
    j.at("index").get_to(t.index);
    j.at("fitness").get_to(t.fitness);
    j.at("best_cut").get_to(t.best_cut);
    j.at("solution_cut").get_to(t.solution_cut);
    j.at("best_fitness_so_far").get_to(t.best_fitness_so_far);
    j.at("best_solution_cut_so_far").get_to(t.best_solution_cut_so_far);
}

void to_json(Json& j, const FitnessConfig& c) {
    j = Json{{"mode", std::string(to_string(c.mode))}, {"alpha", c.alpha}, {"shots", c.shots}};
}

void from_json(const Json& j, FitnessConfig& c) {
    require_known_keys(j, {"mode", "alpha", "shots"}, "fitness");
    if (j.contains("mode")) c.mode = parse_fitness_mode(j.at("mode").get<std::string>());
    if (j.contains("alpha")) j.at("alpha").get_to(c.alpha);
    if (j.contains("shots")) j.at("shots").get_to(c.shots);
}

void to_json(Json& j, const EvoConfig& c) {
    j = Json{{"n_pop", c.n_pop},     {"p", c.p},   {"g", c.g},
             {"p_sigma", c.p_sigma}, {"sigma_min", c.sigma_min},
             {"mu", c.mu},           {"tau", c.tau_value()},
             {"tau_prime", c.tau_prime_value()},
             {"fitness", c.fitness}, {"seed", c.seed},
             {"reevaluate", c.reevaluate}};
}

void from_json(const Json& j, EvoConfig& c) {
    require_known_keys(j,
                       {"n_pop", "p", "g", "p_sigma", "sigma_min", "mu", "tau", "tau_prime", "fitness", "seed",
                        "reevaluate", "threads"},
                       "ea");
    if (j.contains("n_pop")) j.at("n_pop").get_to(c.n_pop);
    if (j.contains("p")) j.at("p").get_to(c.p);
    if (j.contains("g")) j.at("g").get_to(c.g);
    if (j.contains("p_sigma")) j.at("p_sigma").get_to(c.p_sigma);
    if (j.contains("sigma_min")) j.at("sigma_min").get_to(c.sigma_min);
    if (j.contains("mu")) j.at("mu").get_to(c.mu);
    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("tau_prime")) c.tau_prime = j.at("tau_prime").get<double>();
    if (j.contains("fitness")) j.at("fitness").get_to(c.fitness);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("reevaluate")) j.at("reevaluate").get_to(c.reevaluate);
    if (j.contains("threads")) j.at("threads").get_to(c.threads);
}

Json population_to_json(const Population& pop) {
    Json j{{"seed", pop.seed},
           {"generation", pop.generation},
           {"next_id", pop.next_id},
           {"members", pop.members},
           {"transcript", pop.transcript},
           {"best_solution_cut", pop.best_solution_cut},
           {"best_cut_ever", pop.best_cut_ever},
           {"evaluations", pop.evaluations}};
    j["best"] = pop.best ? Json(*pop.best) : Json(nullptr);
    return j;
}

Population population_from_json(const Json& j) {
    Population pop;
    j.at("seed").get_to(pop.seed);
    j.at("generation").get_to(pop.generation);
    j.at("next_id").get_to(pop.next_id);
    j.at("members").get_to(pop.members);
    j.at("transcript").get_to(pop.transcript);
    j.at("best_solution_cut").get_to(pop.best_solution_cut);
    j.at("best_cut_ever").get_to(pop.best_cut_ever);
    j.at("evaluations").get_to(pop.evaluations);
    if (!j.at("best").is_null()) pop.best = j.at("best").get<Individual>();
    return pop;
}

}  // namespace eqaoa
