#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcoord/constructions.hpp"
#include "qcoord/distribution.hpp"
#include "qcoord/local_model.hpp"
#include "qcoord/process.hpp"
#include "qcoord/quantum.hpp"

namespace qcoord {

// Documents are JSON-shaped: objects/arrays/numbers/strings, complex numbers
// as [re, im] pairs, matrices as row-major nested arrays, distributions as
// flat arrays in lexicographic order. Emission uses shortest round-trip
// number formatting, so identical values produce identical bytes.
using Json = nlohmann::ordered_json;

Json parse_text(const std::string& text);
std::string dump_compact(const Json& doc);  // single line, no trailing newline
std::string dump_pretty(const Json& doc);   // 2-space indent plus trailing newline

ProcessSpec parse_process(const Json& doc);
ProcessSpec parse_process_file(const std::string& text);
Json emit_process(const ProcessSpec& proc);

JointDistribution parse_distribution(const Json& doc);
Json emit_distribution(const JointDistribution& dist);

LocalModel parse_local_model(const Json& doc);
Json emit_local_model(const LocalModel& model);

// Needs the process to expand the per-stage deterministic shorthand.
LatentModel parse_latent_model(const Json& doc, const ProcessSpec& proc);
Json emit_latent_model(const LatentModel& model);

QuantumModel parse_quantum_model(const Json& doc);
Json emit_quantum_model(const QuantumModel& model);

DiscordantTwoStageSpec parse_discordant_spec(const Json& doc);

struct StatesFile {
  int dim = 0;
  std::vector<CMatrix> states;
};
StatesFile parse_states(const Json& doc);

struct BipartiteStateFile {
  int dim_a = 0;
  int dim_b = 0;
  DensityMatrix state;
};
BipartiteStateFile parse_bipartite_state(const Json& doc);

CMatrix parse_matrix(const Json& doc, const std::string& path);
Json emit_matrix(const CMatrix& m);
CVector parse_cvector(const Json& doc, const std::string& path);
Json emit_cvector(const CVector& v);

}  // namespace qcoord
