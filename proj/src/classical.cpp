#include "qcoord/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

namespace {

// One tuple's weight under local rules. Walks digits most-significant first,
// extending the prefix index as it goes.
double classical_weight(const LocalModel& model, const ProcessSpec& proc, std::size_t idx) {
  const MixedRadix& ix = proc.outcome_indexer();
  double w = 1.0;
  std::size_t prefix = 0;
  for (int k = 0; k < proc.stages(); ++k) {
    const int x = ix.digit(idx, static_cast<std::size_t>(k));
    const int y = proc.label_of(k, prefix);
    w *= model.tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(y)]
                     [static_cast<std::size_t>(x)];
    prefix = extend_prefix(prefix, proc.alphabet_size(k), x);
  }
  return w;
}

double latent_weight(const LatentModel& model, const ProcessSpec& proc, std::size_t idx) {
  const MixedRadix& ix = proc.outcome_indexer();
  double total = 0.0;
  for (std::size_t s = 0; s < model.latent_probs.size(); ++s) {
    double w = model.latent_probs[s];
    std::size_t prefix = 0;
    for (int k = 0; k < proc.stages(); ++k) {
      const int x = ix.digit(idx, static_cast<std::size_t>(k));
      const int y = proc.label_of(k, prefix);
      w *= model.tables[static_cast<std::size_t>(k)][s][static_cast<std::size_t>(y)]
                       [static_cast<std::size_t>(x)];
      prefix = extend_prefix(prefix, proc.alphabet_size(k), x);
    }
    total += w;
  }
  return total;
}

JointDistribution normalized(const ProcessSpec& proc, std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  // Valid rows make sum = 1 up to a few ulps; dividing keeps the 1e-12
  // normalization invariant exact.
  for (double& p : probs) p /= sum;
  return JointDistribution(proc.alphabet_sizes(), std::move(probs));
}

std::vector<double> uniform_row(int alphabet) {
  return std::vector<double>(static_cast<std::size_t>(alphabet), 1.0 / alphabet);
}

}  // namespace

JointDistribution eval_classical_serial(const LocalModel& model, const ProcessSpec& proc) {
  model.require_matching(proc);
  std::vector<double> probs(proc.outcome_count());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = classical_weight(model, proc, i);
  }
  return normalized(proc, std::move(probs));
}

JointDistribution eval_classical(const LocalModel& model, const ProcessSpec& proc) {
  model.require_matching(proc);
  const std::size_t total = proc.outcome_count();
  std::vector<double> probs(total);
#pragma omp parallel for schedule(static) if (total > 4096)
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    probs[static_cast<std::size_t>(i)] =
        classical_weight(model, proc, static_cast<std::size_t>(i));
  }
  return normalized(proc, std::move(probs));
}

JointDistribution eval_latent_serial(const LatentModel& model, const ProcessSpec& proc) {
  model.require_matching(proc);
  std::vector<double> probs(proc.outcome_count());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = latent_weight(model, proc, i);
  }
  return normalized(proc, std::move(probs));
}

JointDistribution eval_latent(const LatentModel& model, const ProcessSpec& proc) {
  model.require_matching(proc);
  const std::size_t total = proc.outcome_count();
  std::vector<double> probs(total);
#pragma omp parallel for schedule(static) if (total > 1024)
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    probs[static_cast<std::size_t>(i)] = latent_weight(model, proc, static_cast<std::size_t>(i));
  }
  return normalized(proc, std::move(probs));
}

const std::vector<double>* ConditionalTable::row_for(std::size_t prefix_index) const {
  const auto it = std::lower_bound(prefixes.begin(), prefixes.end(), prefix_index);
  if (it == prefixes.end() || *it != prefix_index) return nullptr;
  return &rows[static_cast<std::size_t>(it - prefixes.begin())];
}

ConditionalTable conditionals(const JointDistribution& target, const ProcessSpec& proc,
                              int stage) {
  target.require_matching(proc);
  if (stage < 0 || stage >= proc.stages()) {
    throw StructuralError("stage index " + std::to_string(stage) + " out of range");
  }
  const auto levels = target.prefix_marginals();
  const auto& mass = levels[static_cast<std::size_t>(stage)];
  const auto& child = levels[static_cast<std::size_t>(stage) + 1];
  const auto base = static_cast<std::size_t>(proc.alphabet_size(stage));

  ConditionalTable table;
  table.stage = stage;
  for (std::size_t h = 0; h < mass.size(); ++h) {
    if (mass[h] <= tol::kSupport) continue;
    std::vector<double> row(base);
    for (std::size_t x = 0; x < base; ++x) row[x] = child[h * base + x] / mass[h];
    table.prefixes.push_back(h);
    table.prefix_mass.push_back(mass[h]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

LocalModel behavioral_from_joint(const JointDistribution& target, const ProcessSpec& proc) {
  target.require_matching(proc);
  // Perfect recall means no two prefixes share a label at any stage.
  for (int k = 0; k < proc.stages(); ++k) {
    std::vector<long long> owner(static_cast<std::size_t>(proc.label_count(k)), -1);
    for (std::size_t h = 0; h < proc.prefix_count(k); ++h) {
      const auto y = static_cast<std::size_t>(proc.label_of(k, h));
      if (owner[y] >= 0) {
        throw PreconditionError(
            "process lacks perfect recall: stage " + std::to_string(k + 1) + " label " +
            std::to_string(y) + " is shared by prefixes " +
            format_prefix(proc, k, static_cast<std::size_t>(owner[y])) + " and " +
            format_prefix(proc, k, h));
      }
      owner[y] = static_cast<long long>(h);
    }
  }

  LocalModel model;
  model.tables.resize(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) {
    const auto table = conditionals(target, proc, k);
    model.tables[k].assign(static_cast<std::size_t>(proc.label_count(k)),
                           uniform_row(proc.alphabet_size(k)));
    for (std::size_t h = 0; h < proc.prefix_count(k); ++h) {
      if (const auto* row = table.row_for(h)) {
        model.tables[k][static_cast<std::size_t>(proc.label_of(k, h))] = *row;
      }
    }
  }
  return model;
}

ImplementabilityReport check_classical_implementable(const JointDistribution& target,
                                                     const ProcessSpec& proc) {
  target.require_matching(proc);

  ImplementabilityReport report;
  Witness worst;
  bool found = false;

  std::vector<ConditionalTable> tables;
  tables.reserve(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) tables.push_back(conditionals(target, proc, k));

  for (int k = 0; k < proc.stages(); ++k) {
    const auto& table = tables[static_cast<std::size_t>(k)];
    // bucket positive-probability prefixes by label
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(proc.label_count(k)));
    for (std::size_t i = 0; i < table.prefixes.size(); ++i) {
      groups[static_cast<std::size_t>(proc.label_of(k, table.prefixes[i]))].push_back(i);
    }
    for (std::size_t y = 0; y < groups.size(); ++y) {
      const auto& g = groups[y];
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          double gap = 0.0;
          const auto& ra = table.rows[g[a]];
          const auto& rb = table.rows[g[b]];
          for (std::size_t x = 0; x < ra.size(); ++x) {
            gap = std::max(gap, std::abs(ra[x] - rb[x]));
          }
          if (!found || gap > worst.gap) {
            worst = Witness{k, static_cast<int>(y), table.prefixes[g[a]], table.prefixes[g[b]],
                            gap};
            found = true;
          }
        }
      }
    }
  }

  if (found && worst.gap > tol::kRowAgree) {
    report.feasible = false;
    report.witness = worst;
    return report;
  }

  report.feasible = true;
  report.certificate = conditional_average_model(target, proc);
  return report;
}

// Feasible targets have equal rows inside each label group, so the
// mass-weighted average reproduces the factorizing rules exactly.
LocalModel conditional_average_model(const JointDistribution& target, const ProcessSpec& proc) {
  target.require_matching(proc);
  LocalModel model;
  model.tables.resize(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) {
    const auto table = conditionals(target, proc, k);
    const auto base = static_cast<std::size_t>(proc.alphabet_size(k));
    model.tables[k].assign(static_cast<std::size_t>(proc.label_count(k)),
                           uniform_row(proc.alphabet_size(k)));
    std::vector<double> group_mass(static_cast<std::size_t>(proc.label_count(k)), 0.0);
    std::vector<std::vector<double>> group_sum(static_cast<std::size_t>(proc.label_count(k)),
                                               std::vector<double>(base, 0.0));
    for (std::size_t i = 0; i < table.prefixes.size(); ++i) {
      const auto y = static_cast<std::size_t>(proc.label_of(k, table.prefixes[i]));
      group_mass[y] += table.prefix_mass[i];
      for (std::size_t x = 0; x < base; ++x) {
        group_sum[y][x] += table.prefix_mass[i] * table.rows[i][x];
      }
    }
    for (std::size_t y = 0; y < group_mass.size(); ++y) {
      if (group_mass[y] <= 0.0) continue;  // unreached label keeps the uniform row
      std::vector<double> row(base);
      double sum = 0.0;
      for (std::size_t x = 0; x < base; ++x) {
        row[x] = group_sum[y][x] / group_mass[y];
        sum += row[x];
      }
      for (std::size_t x = 0; x < base; ++x) row[x] /= sum;
      model.tables[k][y] = std::move(row);
    }
  }
  return model;
}

}  // namespace qcoord
