#pragma once

// JSON mappings for the core types. Doubles are written by nlohmann::json in
// shortest round-trip form, so parse(dump(x)) reproduces every value exactly.

#include <json.hpp>

#include "eqaoa/evo.hpp"
#include "eqaoa/fitness.hpp"

namespace eqaoa {

using Json = nlohmann::json;

struct MigrationEvent;
struct PacketRejection;

void to_json(Json& j, const HistogramDigest& d);
void from_json(const Json& j, HistogramDigest& d);
void to_json(Json& j, const EvaluationRecord& e);
void from_json(const Json& j, EvaluationRecord& e);
void to_json(Json& j, const Genotype& y);
void from_json(const Json& j, Genotype& y);
void to_json(Json& j, const Individual& ind);
void from_json(const Json& j, Individual& ind);
void to_json(Json& j, const IndividualSummary& s);
void from_json(const Json& j, IndividualSummary& s);
void to_json(Json& j, const GenerationRecord& r);
void from_json(const Json& j, GenerationRecord& r);
void to_json(Json& j, const TracePoint& t);
void from_json(const Json& j, TracePoint& t);
void to_json(Json& j, const FitnessConfig& c);
void from_json(const Json& j, FitnessConfig& c);

/// EvoConfig keys are the hyperparameter names (n_pop, g, p, p_sigma, sigma_min, mu,
/// tau, tau_prime) plus fitness, seed, reevaluate, threads. Missing keys keep
/// their defaults; unknown keys are rejected.
void to_json(Json& j, const EvoConfig& c);
void from_json(const Json& j, EvoConfig& c);

void to_json(Json& j, const MigrationEvent& e);
void from_json(const Json& j, MigrationEvent& e);
void to_json(Json& j, const PacketRejection& r);
void from_json(const Json& j, PacketRejection& r);

Json population_to_json(const Population& pop);
Population population_from_json(const Json& j);

/// Rejects keys of `j` not listed in `allowed`; `where` names the object in errors.
void require_known_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where);

}  // namespace eqaoa
