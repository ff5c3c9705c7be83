#include "qcoord/io.hpp"

#include <cmath>
#include <cstddef>

#include "qcoord/errors.hpp"

namespace qcoord {

namespace {

const Json& field(const Json& obj, const char* name, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + " must be an object");
  const auto it = obj.find(name);
  if (it == obj.end()) throw ParseError("missing field '" + std::string(name) + "' in " + path);
  return *it;
}

const Json* optional_field(const Json& obj, const char* name) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

long long as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ParseError(path + " must be an integer");
  }
  return v.get<long long>();
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + " must be a number");
  return v.get<double>();
}

std::vector<double> as_double_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<int> as_int_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + " must be an array");
  std::vector<int> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(static_cast<int>(as_int(v[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

Cplx as_complex(const Json& v, const std::string& path) {
  if (v.is_number()) return Cplx(v.get<double>(), 0.0);  // bare real accepted on input
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Cplx(v[0].get<double>(), v[1].get<double>());
  }
  throw ParseError(path + " must be a number or a [re, im] pair");
}

Json emit_complex(const Cplx& c) { return Json::array({c.real(), c.imag()}); }

std::vector<int> parse_prefix_key(const std::string& key, const std::string& path) {
  std::vector<int> prefix;
  if (key.empty()) return prefix;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = key.find(',', start);
    const std::string tok = key.substr(start, comma == std::string::npos ? comma : comma - start);
    if (tok.empty()) throw ParseError(path + " has an empty prefix component in key '" + key + "'");
    for (char ch : tok) {
      if (ch < '0' || ch > '9') {
        throw ParseError(path + " has a non-numeric prefix component in key '" + key + "'");
      }
    }
    prefix.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return prefix;
}

std::string prefix_key(const std::vector<int>& prefix) {
  std::string key;
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    if (j) key += ',';
    key += std::to_string(prefix[j]);
  }
  return key;
}

}  // namespace

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string dump_compact(const Json& doc) { return doc.dump(); }

std::string dump_pretty(const Json& doc) { return doc.dump(2) + "\n"; }

ProcessSpec parse_process(const Json& doc) {
  const int n = static_cast<int>(as_int(field(doc, "n", "process"), "process.n"));
  if (n < 1) throw ParseError("process.n must be >= 1");
  const std::vector<int> alphabets =
      as_int_list(field(doc, "alphabets", "process"), "process.alphabets");
  if (static_cast<int>(alphabets.size()) != n) {
    throw ParseError("process.alphabets must list exactly n sizes");
  }
  for (std::size_t k = 0; k < alphabets.size(); ++k) {
    if (alphabets[k] < 1) {
      throw ParseError("process.alphabets[" + std::to_string(k) + "] must be >= 1");
    }
  }
  const Json& info = field(doc, "info", "process");
  if (!info.is_array() || static_cast<int>(info.size()) != n) {
    throw ParseError("process.info must list one entry per stage");
  }

  std::vector<ProcessSpec::StageInfo> stages(static_cast<std::size_t>(n));
  std::size_t prefixes = 1;
  for (int k = 0; k < n; ++k) {
    const std::string path = "process.info[" + std::to_string(k) + "]";
    const Json& entry = info[static_cast<std::size_t>(k)];
    auto& stage = stages[static_cast<std::size_t>(k)];
    if (const Json* gen = optional_field(entry, "gen")) {
      if (!gen->is_string()) throw ParseError(path + ".gen must be a string");
      const std::string name = gen->get<std::string>();
      if (name == "constant") {
        stage.kind = ProcessSpec::StageKind::Constant;
      } else if (name == "perfect-recall") {
        stage.kind = ProcessSpec::StageKind::PerfectRecall;
      } else {
        throw ParseError(path + ".gen must be \"constant\" or \"perfect-recall\", got \"" +
                         name + "\"");
      }
    } else if (const Json* map = optional_field(entry, "map")) {
      if (!map->is_object()) throw ParseError(path + ".map must be an object");
      const int labels = static_cast<int>(as_int(field(entry, "labels", path), path + ".labels"));
      if (labels < 1) throw ParseError(path + ".labels must be >= 1");
      stage.kind = ProcessSpec::StageKind::Explicit;
      stage.labels = labels;
      stage.map.assign(prefixes, -1);
      for (const auto& [key, value] : map->items()) {
        const std::vector<int> prefix = parse_prefix_key(key, path + ".map");
        if (static_cast<int>(prefix.size()) != k) {
          throw ParseError(path + ".map key '" + key + "' must have " + std::to_string(k) +
                           " components");
        }
        std::size_t idx = 0;
        for (int j = 0; j < k; ++j) {
          const int x = prefix[static_cast<std::size_t>(j)];
          if (x < 0 || x >= alphabets[static_cast<std::size_t>(j)]) {
            throw ParseError(path + ".map key '" + key + "' has outcome " + std::to_string(x) +
                             " outside the stage " + std::to_string(j + 1) + " alphabet");
          }
          idx = extend_prefix(idx, alphabets[static_cast<std::size_t>(j)], x);
        }
        const int label = static_cast<int>(as_int(value, path + ".map['" + key + "']"));
        if (label < 0 || label >= labels) {
          throw ParseError(path + ".map['" + key + "'] = " + std::to_string(label) +
                           " outside [0, " + std::to_string(labels) + ")");
        }
        stage.map[idx] = label;
      }
      for (std::size_t hidx = 0; hidx < prefixes; ++hidx) {
        if (stage.map[hidx] < 0) {
          std::vector<int> prefix(static_cast<std::size_t>(k));
          std::size_t rem = hidx;
          for (int j = k - 1; j >= 0; --j) {
            prefix[static_cast<std::size_t>(j)] =
                static_cast<int>(rem % static_cast<std::size_t>(alphabets[static_cast<std::size_t>(j)]));
            rem /= static_cast<std::size_t>(alphabets[static_cast<std::size_t>(j)]);
          }
          std::string shown = "(";
          for (std::size_t j = 0; j < prefix.size(); ++j) {
            if (j) shown += ',';
            shown += std::to_string(prefix[j]);
          }
          shown += ")";
          throw ParseError("stage " + std::to_string(k + 1) + " info map is missing prefix " +
                           shown);
        }
      }
    } else {
      throw ParseError(path + " needs either a gen name or an explicit map");
    }
    prefixes *= static_cast<std::size_t>(alphabets[static_cast<std::size_t>(k)]);
  }
  return ProcessSpec::from_stages(alphabets, stages);
}

ProcessSpec parse_process_file(const std::string& text) {
  return parse_process(parse_text(text));
}

Json emit_process(const ProcessSpec& proc) {
  Json doc;
  doc["n"] = proc.stages();
  doc["alphabets"] = proc.alphabet_sizes();
  Json info = Json::array();
  for (int k = 0; k < proc.stages(); ++k) {
    Json entry;
    Json map = Json::object();
    for (std::size_t h = 0; h < proc.prefix_count(k); ++h) {
      map[prefix_key(decode_prefix(proc, k, h))] = proc.label_of(k, h);
    }
    entry["map"] = std::move(map);
    entry["labels"] = proc.label_count(k);
    info.push_back(std::move(entry));
  }
  doc["info"] = std::move(info);
  return doc;
}

JointDistribution parse_distribution(const Json& doc) {
  const std::vector<int> alphabets =
      as_int_list(field(doc, "alphabets", "distribution"), "distribution.alphabets");
  std::vector<double> probs =
      as_double_list(field(doc, "probs", "distribution"), "distribution.probs");
  return JointDistribution(alphabets, std::move(probs));
}

Json emit_distribution(const JointDistribution& dist) {
  Json doc;
  doc["alphabets"] = dist.alphabet_sizes();
  doc["probs"] = dist.probs();
  return doc;
}

LocalModel parse_local_model(const Json& doc) {
  const Json& tables = field(doc, "tables", "local model");
  if (!tables.is_array()) throw ParseError("local model.tables must be an array");
  LocalModel model;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const std::string path = "local model.tables[" + std::to_string(k) + "]";
    const Json& stage = tables[k];
    if (!stage.is_array() || stage.empty()) throw ParseError(path + " must list label rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t y = 0; y < stage.size(); ++y) {
      rows.push_back(as_double_list(stage[y], path + "[" + std::to_string(y) + "]"));
    }
    model.tables.push_back(std::move(rows));
  }
  return model;
}

Json emit_local_model(const LocalModel& model) {
  Json doc;
  doc["tables"] = model.tables;
  return doc;
}

LatentModel parse_latent_model(const Json& doc, const ProcessSpec& proc) {
  LatentModel model;
  model.latent_probs =
      as_double_list(field(doc, "latent_probs", "latent model"), "latent model.latent_probs");
  const std::size_t latent = model.latent_probs.size();
  const int n = proc.stages();

  const Json* tables = optional_field(doc, "tables");
  const Json* deterministic = optional_field(doc, "deterministic");
  if (!tables && !deterministic) {
    throw ParseError("latent model needs 'tables', 'deterministic', or both");
  }
  if (tables && !tables->is_array()) throw ParseError("latent model.tables must be an array");
  if (deterministic && !deterministic->is_array()) {
    throw ParseError("latent model.deterministic must be an array");
  }
  if (tables && static_cast<int>(tables->size()) != n) {
    throw ParseError("latent model.tables must list one entry per stage");
  }
  if (deterministic && static_cast<int>(deterministic->size()) != n) {
    throw ParseError("latent model.deterministic must list one entry per stage");
  }

  model.tables.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const std::string path = "latent model, stage " + std::to_string(k + 1);
    const Json* stage_tables =
        tables && !(*tables)[static_cast<std::size_t>(k)].is_null()
            ? &(*tables)[static_cast<std::size_t>(k)]
            : nullptr;
    const Json* stage_det =
        deterministic && !(*deterministic)[static_cast<std::size_t>(k)].is_null()
            ? &(*deterministic)[static_cast<std::size_t>(k)]
            : nullptr;
    if (stage_tables && stage_det) {
      throw ParseError(path + " is given both tables and the deterministic shorthand");
    }
    if (stage_det) {
      const std::vector<int> outcomes = as_int_list(*stage_det, path + " deterministic");
      if (outcomes.size() != latent) {
        throw ParseError(path + " deterministic map must assign an outcome per latent value");
      }
      model.tables[static_cast<std::size_t>(k)] =
          LatentModel::deterministic_stage(proc, k, outcomes);
    } else if (stage_tables) {
      if (!stage_tables->is_array() || stage_tables->size() != latent) {
        throw ParseError(path + " tables must list rows per latent value");
      }
      auto& per_latent = model.tables[static_cast<std::size_t>(k)];
      per_latent.resize(latent);
      for (std::size_t s = 0; s < latent; ++s) {
        const Json& label_rows = (*stage_tables)[s];
        if (!label_rows.is_array() || label_rows.empty()) {
          throw ParseError(path + " s=" + std::to_string(s) + " must list label rows");
        }
        for (std::size_t y = 0; y < label_rows.size(); ++y) {
          per_latent[s].push_back(as_double_list(
              label_rows[y], path + " s=" + std::to_string(s) + " label " + std::to_string(y)));
        }
      }
    } else {
      throw ParseError(path + " has neither tables nor a deterministic map");
    }
  }
  return model;
}

Json emit_latent_model(const LatentModel& model) {
  Json doc;
  doc["latent_probs"] = model.latent_probs;
  doc["tables"] = model.tables;
  return doc;
}

CMatrix parse_matrix(const Json& doc, const std::string& path) {
  if (!doc.is_array() || doc.empty()) throw ParseError(path + " must be a nested array");
  const std::size_t rows = doc.size();
  const Json& first = doc[0];
  if (!first.is_array() || first.empty()) throw ParseError(path + "[0] must be an array");
  const std::size_t cols = first.size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = doc[i];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(path + "[" + std::to_string(i) + "] has the wrong length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_complex(row[j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

Json emit_matrix(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(emit_complex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CVector parse_cvector(const Json& doc, const std::string& path) {
  if (!doc.is_array() || doc.empty()) throw ParseError(path + " must be a nonempty array");
  CVector v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_complex(doc[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json emit_cvector(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(emit_complex(v(i)));
  return out;
}

QuantumModel parse_quantum_model(const Json& doc) {
  const std::vector<int> dims =
      as_int_list(field(doc, "dims", "quantum model"), "quantum model.dims");
  DensityMatrix state =
      validate_state(parse_matrix(field(doc, "state", "quantum model"), "quantum model.state"));

  const Json& povms = field(doc, "povms", "quantum model");
  if (!povms.is_array() || povms.size() != dims.size()) {
    throw ParseError("quantum model.povms must list one entry per stage");
  }
  std::vector<std::vector<Povm>> measurements;
  for (std::size_t k = 0; k < povms.size(); ++k) {
    const std::string path = "quantum model.povms[" + std::to_string(k) + "]";
    const Json& stage = povms[k];
    if (!stage.is_array() || stage.empty()) throw ParseError(path + " must list label entries");
    std::vector<Povm> per_label;
    for (std::size_t y = 0; y < stage.size(); ++y) {
      const Json& elems = stage[y];
      const std::string epath = path + "[" + std::to_string(y) + "]";
      if (!elems.is_array() || elems.empty()) throw ParseError(epath + " must list elements");
      std::vector<CMatrix> mats;
      for (std::size_t x = 0; x < elems.size(); ++x) {
        mats.push_back(parse_matrix(elems[x], epath + "[" + std::to_string(x) + "]"));
      }
      per_label.push_back(validate_povm(mats, dims[k]));
    }
    measurements.push_back(std::move(per_label));
  }

  QuantumModel model{dims, std::move(state), std::move(measurements), std::nullopt};
  if (const Json* sep = optional_field(doc, "separable")) {
    SeparableDecomposition decomp;
    decomp.weights =
        as_double_list(field(*sep, "weights", "quantum model.separable"), "separable.weights");
    const Json& factors = field(*sep, "factors", "quantum model.separable");
    if (!factors.is_array() || factors.size() != decomp.weights.size()) {
      throw ParseError("separable.factors must list one factor tuple per weight");
    }
    for (std::size_t s = 0; s < factors.size(); ++s) {
      const Json& tuple = factors[s];
      const std::string path = "separable.factors[" + std::to_string(s) + "]";
      if (!tuple.is_array() || tuple.size() != dims.size()) {
        throw ParseError(path + " must list one factor per subsystem");
      }
      std::vector<CMatrix> fs;
      for (std::size_t k = 0; k < tuple.size(); ++k) {
        fs.push_back(parse_matrix(tuple[k], path + "[" + std::to_string(k) + "]"));
      }
      decomp.factors.push_back(std::move(fs));
    }
    model.decomposition = std::move(decomp);
  }
  return model;
}

Json emit_quantum_model(const QuantumModel& model) {
  Json doc;
  doc["dims"] = model.subsystem_dims;
  doc["state"] = emit_matrix(model.state.matrix());
  Json povms = Json::array();
  for (const auto& stage : model.measurements) {
    Json per_label = Json::array();
    for (const auto& povm : stage) {
      Json elems = Json::array();
      for (const auto& e : povm.elements()) elems.push_back(emit_matrix(e));
      per_label.push_back(std::move(elems));
    }
    povms.push_back(std::move(per_label));
  }
  doc["povms"] = std::move(povms);
  if (model.decomposition) {
    Json sep;
    sep["weights"] = model.decomposition->weights;
    Json factors = Json::array();
    for (const auto& tuple : model.decomposition->factors) {
      Json fs = Json::array();
      for (const auto& f : tuple) fs.push_back(emit_matrix(f));
      factors.push_back(std::move(fs));
    }
    sep["factors"] = std::move(factors);
    doc["separable"] = std::move(sep);
  }
  return doc;
}

DiscordantTwoStageSpec parse_discordant_spec(const Json& doc) {
  DiscordantTwoStageSpec spec;
  spec.latent_probs =
      as_double_list(field(doc, "latent_probs", "spec"), "spec.latent_probs");
  spec.g = as_int_list(field(doc, "g", "spec"), "spec.g");
  spec.h = as_int_list(field(doc, "h", "spec"), "spec.h");
  spec.basis_a = parse_matrix(field(doc, "basis_a", "spec"), "spec.basis_a");
  const Json& states = field(doc, "states_b", "spec");
  if (!states.is_array() || states.empty()) throw ParseError("spec.states_b must list vectors");
  for (std::size_t s = 0; s < states.size(); ++s) {
    spec.states_b.push_back(parse_cvector(states[s], "spec.states_b[" + std::to_string(s) + "]"));
  }
  spec.declared_basis_b =
      parse_matrix(field(doc, "declared_basis_b", "spec"), "spec.declared_basis_b");
  return spec;
}

StatesFile parse_states(const Json& doc) {
  StatesFile out;
  out.dim = static_cast<int>(as_int(field(doc, "dim", "states file"), "states file.dim"));
  const Json& states = field(doc, "states", "states file");
  if (!states.is_array() || states.empty()) {
    throw ParseError("states file.states must be a nonempty array");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.states.push_back(parse_matrix(states[i], "states[" + std::to_string(i) + "]"));
  }
  return out;
}

BipartiteStateFile parse_bipartite_state(const Json& doc) {
  const std::vector<int> dims = as_int_list(field(doc, "dims", "state file"), "state file.dims");
  if (dims.size() != 2) throw ParseError("state file.dims must list exactly two dimensions");
  DensityMatrix state =
      validate_state(parse_matrix(field(doc, "state", "state file"), "state file.state"));
  return BipartiteStateFile{dims[0], dims[1], std::move(state)};
}

}  // namespace qcoord
