#include "qcoord/local_model.hpp"

#include <cmath>
#include <string>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

namespace {

void check_row(const std::vector<double>& row, int alphabet, const std::string& where) {
  if (static_cast<int>(row.size()) != alphabet) {
    throw StructuralError(where + " has " + std::to_string(row.size()) +
                          " entries, expected " + std::to_string(alphabet));
  }
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw StructuralError(where + " has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kProbSum) {
    throw StructuralError(where + " sums to " + std::to_string(sum) +
                          ", expected 1 within 1e-12");
  }
}

}  // namespace

void LocalModel::require_matching(const ProcessSpec& proc) const {
  const int n = proc.stages();
  if (static_cast<int>(tables.size()) != n) {
    throw StructuralError("model covers " + std::to_string(tables.size()) +
                          " stages, process has " + std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    if (static_cast<int>(tables[k].size()) != proc.label_count(k)) {
      throw StructuralError("stage " + std::to_string(k + 1) + " has " +
                            std::to_string(tables[k].size()) + " rows, expected one per label (" +
                            std::to_string(proc.label_count(k)) + ")");
    }
    for (std::size_t y = 0; y < tables[k].size(); ++y) {
      check_row(tables[k][y], proc.alphabet_size(k),
                "stage " + std::to_string(k + 1) + " label " + std::to_string(y) + " row");
    }
  }
}

LocalModel LocalModel::uniform(const ProcessSpec& proc) {
  LocalModel m;
  m.tables.resize(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) {
    const double p = 1.0 / proc.alphabet_size(k);
    m.tables[k].assign(static_cast<std::size_t>(proc.label_count(k)),
                       std::vector<double>(static_cast<std::size_t>(proc.alphabet_size(k)), p));
  }
  return m;
}

void LatentModel::require_matching(const ProcessSpec& proc) const {
  const int n = proc.stages();
  if (latent_probs.empty()) throw StructuralError("latent alphabet must be nonempty");
  double sum = 0.0;
  for (double p : latent_probs) {
    if (!(p >= 0.0)) throw StructuralError("latent probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kProbSum) {
    throw StructuralError("latent probabilities sum to " + std::to_string(sum) +
                          ", expected 1 within 1e-12");
  }
  if (static_cast<int>(tables.size()) != n) {
    throw StructuralError("latent model covers " + std::to_string(tables.size()) +
                          " stages, process has " + std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    if (tables[k].size() != latent_probs.size()) {
      throw StructuralError("stage " + std::to_string(k + 1) +
                            " tables disagree with the latent alphabet size");
    }
    for (std::size_t s = 0; s < tables[k].size(); ++s) {
      if (static_cast<int>(tables[k][s].size()) != proc.label_count(k)) {
        throw StructuralError("stage " + std::to_string(k + 1) + " latent value " +
                              std::to_string(s) + " is missing label rows");
      }
      for (std::size_t y = 0; y < tables[k][s].size(); ++y) {
        check_row(tables[k][s][y], proc.alphabet_size(k),
                  "stage " + std::to_string(k + 1) + " (s=" + std::to_string(s) +
                      ", label " + std::to_string(y) + ") row");
      }
    }
  }
}

std::vector<std::vector<std::vector<double>>> LatentModel::deterministic_stage(
    const ProcessSpec& proc, int stage, const std::vector<int>& outcomes) {
  std::vector<std::vector<std::vector<double>>> rows(outcomes.size());
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    const int x = outcomes[s];
    if (x < 0 || x >= proc.alphabet_size(stage)) {
      throw StructuralError("deterministic outcome " + std::to_string(x) +
                            " outside the stage " + std::to_string(stage + 1) + " alphabet");
    }
    std::vector<double> row(static_cast<std::size_t>(proc.alphabet_size(stage)), 0.0);
    row[static_cast<std::size_t>(x)] = 1.0;
    rows[s].assign(static_cast<std::size_t>(proc.label_count(stage)), row);
  }
  return rows;
}

}  // namespace qcoord
