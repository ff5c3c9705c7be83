#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcoord/classical.hpp"
#include "qcoord/constructions.hpp"
#include "qcoord/diagnostics.hpp"
#include "qcoord/errors.hpp"

using namespace qcoord;

namespace {

CVector basis_ket(int dim, int i) {
  CVector v = CVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

CVector plus_ket() {
  CVector v(2);
  const double r = 1.0 / std::sqrt(2.0);
  v << Cplx(r, 0), Cplx(r, 0);
  return v;
}

CVector minus_ket() {
  CVector v(2);
  const double r = 1.0 / std::sqrt(2.0);
  v << Cplx(r, 0), Cplx(-r, 0);
  return v;
}

JointDistribution anti_correlated() {
  return JointDistribution({2, 2}, {0.0, 0.5, 0.5, 0.0});
}

}  // namespace

TEST_CASE("diagonal encoding of the uniform flip pair") {
  // S uniform, X1 = S, X2 = 1 - S, second stage oblivious
  const auto proc = ProcessSpec::oblivious({2, 2});
  LatentModel m;
  m.latent_probs = {0.5, 0.5};
  m.tables = {LatentModel::deterministic_stage(proc, 0, {0, 1}),
              LatentModel::deterministic_stage(proc, 1, {1, 0})};
  const auto q = build_diagonal_encoding(m, proc);

  CHECK(q.subsystem_dims == std::vector<int>{2, 2});
  CHECK(q.state.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(q.state.matrix()(3, 3).real() == doctest::Approx(0.5));
  CHECK(q.state.matrix().cwiseAbs().sum() == doctest::Approx(1.0));  // nothing off-diagonal

  // stage 2 reads out the flipped label
  const auto& m0 = q.measurements[1][0].element(0);
  CHECK(m0(1, 1).real() == doctest::Approx(1.0));
  CHECK(m0(0, 0).real() == doctest::Approx(0.0));

  const auto d = born_joint(q, proc);
  CHECK(max_abs_difference(d, anti_correlated()) < 1e-12);

  // and its second-stage ensemble is classical
  std::vector<CMatrix> ensemble;
  for (const auto& tuple : q.decomposition->factors) ensemble.push_back(tuple[1]);
  CHECK(commutation_witness(ensemble) < 1e-12);
}

TEST_CASE("a single latent value produces a product state") {
  const auto proc = ProcessSpec::oblivious({2, 3});
  oracles::Rand rng(3);
  const auto latent = oracles::random_latent_model(rng, proc, 1);
  const auto q = build_diagonal_encoding(latent, proc);
  CHECK(q.subsystem_dims == std::vector<int>{1, 1});
  CHECK(q.state.dim() == 1);
  const auto d = born_joint(q, proc);
  const auto expected = eval_latent(latent, proc);
  CHECK(max_abs_difference(d, expected) < 1e-12);
}

TEST_CASE("diagonal encoding matches latent evaluation on random models") {
  oracles::Rand rng(17);
  for (int trial = 0; trial < 120; ++trial) {
    const auto proc = oracles::random_process(rng, 3, 3);
    const auto latent = oracles::random_latent_model(rng, proc, rng.uniform_int(1, 5));
    const auto q = build_diagonal_encoding(latent, proc);

    REQUIRE(q.decomposition.has_value());
    double wsum = 0.0;
    for (double w : q.decomposition->weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) <= 1e-12);
    CHECK((q.decomposition->assemble() - q.state.matrix()).cwiseAbs().maxCoeff() < 1e-14);

    const auto via_quantum = born_joint(q, proc);
    const auto via_latent = eval_latent(latent, proc);
    CHECK(max_abs_difference(via_quantum, via_latent) < 1e-10);

    const auto serial = born_joint_serial(q, proc);
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == via_quantum[i]);
  }
}

TEST_CASE("diagonal models bridge exactly to their latent evaluation") {
  // state and measurements all diagonal in one product basis
  oracles::Rand rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto proc = oracles::random_process(rng, 3, 2);
    const auto latent = oracles::random_latent_model(rng, proc, rng.uniform_int(1, 4));
    const auto q = build_diagonal_encoding(latent, proc);
    CHECK(max_abs_difference(born_joint(q, proc), eval_latent(latent, proc)) < 1e-12);
  }
}

TEST_CASE("constructed states survive full validation") {
  const auto proc = ProcessSpec::oblivious({2, 2});
  oracles::Rand rng(19);
  const auto latent = oracles::random_latent_model(rng, proc, 3);
  const auto q = build_diagonal_encoding(latent, proc);
  CHECK_NOTHROW(validate_state(q.state.matrix()));
  for (const auto& stage : q.measurements) {
    for (const auto& povm : stage) CHECK_NOTHROW(validate_povm(povm.elements(), povm.dim()));
  }
}

TEST_CASE("universal encoding implements the classically infeasible target") {
  const auto proc = ProcessSpec::oblivious({2, 2});
  const auto target = anti_correlated();
  CHECK_FALSE(check_classical_implementable(target, proc).feasible);
  const auto q = build_diagonal_universal(target, proc);
  const auto d = born_joint(q, proc);
  CHECK(max_abs_difference(d, target) < 1e-12);
}

TEST_CASE("universal encoding of the uniform target is maximally mixed on its support") {
  const auto proc = ProcessSpec::oblivious({2, 2});
  const JointDistribution uniform({2, 2}, std::vector<double>(4, 0.25));
  const auto q = build_diagonal_universal(uniform, proc);
  CHECK(q.subsystem_dims == std::vector<int>{4, 4});
  const auto& rho = q.state.matrix();
  for (int s = 0; s < 4; ++s) {
    CHECK(rho(s * 4 + s, s * 4 + s).real() == doctest::Approx(0.25));
  }
  CHECK(rho.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("universal encoding reproduces random targets under any structure") {
  oracles::Rand rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto target = oracles::random_distribution(rng, {2, 2, 2});
    for (const auto& proc :
         {ProcessSpec::oblivious({2, 2, 2}), ProcessSpec::perfect_recall({2, 2, 2})}) {
      const auto q = build_diagonal_universal(target, proc);
      const auto d = born_joint(q, proc);
      CHECK(max_abs_difference(d, target) < 1e-10);
    }
  }
}

TEST_CASE("discordant two-stage build recovers the worked example") {
  DiscordantTwoStageSpec spec;
  spec.latent_probs = {0.5, 0.5};
  spec.g = {0, 1};
  spec.h = {1, 0};
  spec.basis_a = CMatrix::Identity(2, 2);
  spec.states_b = {plus_ket(), minus_ket()};
  spec.declared_basis_b = CMatrix::Identity(2, 2);
  const auto result = build_discordant_two_stage(spec);

  const auto bundle = builtin_example("illex2");
  CHECK((result.model.state.matrix() - bundle.model.state.matrix()).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(max_abs_difference(result.target, bundle.target) == 0.0);
  const auto d = born_joint(result.model, result.process);
  CHECK(max_abs_difference(d, bundle.target) < 1e-12);

  // orthogonal pure states commute, yet they are not diagonal in the
  // declared (computational) basis
  CHECK(result.commutation < 1e-12);
  CHECK_FALSE(result.diagonal_in_declared_basis);
  CHECK(result.max_offdiagonal == doctest::Approx(0.5));
}

TEST_CASE("distinguishability is required across h-classes") {
  DiscordantTwoStageSpec spec;
  spec.latent_probs = {0.5, 0.5};
  spec.g = {0, 1};
  spec.h = {0, 1};
  spec.basis_a = CMatrix::Identity(2, 2);
  spec.states_b = {basis_ket(2, 0), plus_ket()};
  spec.declared_basis_b = CMatrix::Identity(2, 2);
  try {
    build_discordant_two_stage(spec);
    FAIL("expected a construction error");
  } catch (const ConstructionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("overlap") != std::string::npos);
    CHECK(msg.find("0.7071") != std::string::npos);
  }
}

TEST_CASE("skewed weights flow through the discordant build") {
  DiscordantTwoStageSpec spec;
  spec.latent_probs = {0.25, 0.75};
  spec.g = {0, 1};
  spec.h = {0, 1};
  spec.basis_a = CMatrix::Identity(2, 2);
  spec.states_b = {basis_ket(2, 0), basis_ket(2, 1)};
  spec.declared_basis_b = CMatrix::Identity(2, 2);
  const auto result = build_discordant_two_stage(spec);
  const auto d = born_joint(result.model, result.process);
  CHECK(d.at({0, 0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.at({1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d.at({0, 1}) == doctest::Approx(0.0));
  CHECK(d.at({1, 0}) == doctest::Approx(0.0));
  const auto direct = oracles::born(result.model, result.process);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(d[i] - direct[i]) < 1e-12);
  }
  CHECK(result.commutation < 1e-12);
  CHECK(result.diagonal_in_declared_basis);
}

TEST_CASE("the second-stage measurement completes on larger ambient spaces") {
  DiscordantTwoStageSpec spec;
  spec.latent_probs = {0.25, 0.75};
  spec.g = {0, 1};
  spec.h = {0, 1};
  spec.basis_a = CMatrix::Identity(2, 2);
  spec.states_b = {basis_ket(3, 0), basis_ket(3, 1)};  // ambient dimension 3
  spec.declared_basis_b = CMatrix::Identity(3, 3);
  const auto result = build_discordant_two_stage(spec);
  CHECK_NOTHROW(validate_povm(result.model.measurements[1][0].elements(), 3));
  const auto d = born_joint(result.model, result.process);
  CHECK(d.at({0, 0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.at({1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("noncommuting second-stage families are reported as such") {
  DiscordantTwoStageSpec spec;
  spec.latent_probs = {0.5, 0.5};
  spec.g = {0, 1};
  spec.h = {0, 0};  // same class, so no orthogonality requirement
  spec.basis_a = CMatrix::Identity(2, 2);
  spec.states_b = {basis_ket(2, 0), plus_ket()};
  spec.declared_basis_b = CMatrix::Identity(2, 2);
  const auto result = build_discordant_two_stage(spec);
  CHECK(result.commutation == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(result.commutation > 1e-9);

  std::vector<CMatrix> phis = {basis_ket(2, 0) * basis_ket(2, 0).adjoint(),
                               plus_ket() * plus_ket().adjoint()};
  CHECK(result.commutation == doctest::Approx(commutation_witness(phis)));
}

TEST_CASE("builtin examples verify against their bundled targets") {
  for (const auto& name : builtin_example_names()) {
    const auto bundle = builtin_example(name);
    const auto report = verify_model(bundle.model, bundle.process, bundle.target, 1e-12);
    CHECK(report.pass);
    CHECK(report.max_abs_error < 1e-12);

    // information constraint is structural: oblivious stages carry exactly
    // one measurement
    for (int k = 0; k < bundle.process.stages(); ++k) {
      CHECK(bundle.process.stage_is_constant(k));
      CHECK(bundle.model.measurements[static_cast<std::size_t>(k)].size() == 1);
    }
    REQUIRE(bundle.model.decomposition.has_value());
    double wsum = 0.0;
    for (double w : bundle.model.decomposition->weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) <= 1e-12);
  }
}

TEST_CASE("the three-stage example puts mass only on the two alternating tuples") {
  const auto bundle = builtin_example("three-stage");
  const auto d = born_joint(bundle.model, bundle.process);
  CHECK(std::abs(d.at({0, 1, 0}) - 0.5) < 1e-12);
  CHECK(std::abs(d.at({1, 0, 1}) - 0.5) < 1e-12);
  double off = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i != 2 && i != 5) off = std::max(off, d[i]);
  }
  CHECK(off < 1e-12);

  // the middle subsystem carries the noncommuting structure
  std::vector<CMatrix> middle;
  for (const auto& tuple : bundle.model.decomposition->factors) middle.push_back(tuple[1]);
  CHECK(commutation_witness(middle) < 1e-12);  // {|+><+|, |-><-|} commute
}

TEST_CASE("unknown example names list the valid ones") {
  try {
    builtin_example("nope");
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    for (const auto& name : builtin_example_names()) {
      CHECK(msg.find(name) != std::string::npos);
    }
  }
}

TEST_CASE("verify_model distinguishes the right and wrong targets") {
  const auto bundle = builtin_example("illex2");
  const auto good = verify_model(bundle.model, bundle.process, bundle.target, 1e-10);
  CHECK(good.pass);
  CHECK(good.max_abs_error < 1e-12);

  const JointDistribution uniform({2, 2}, std::vector<double>(4, 0.25));
  const auto bad = verify_model(bundle.model, bundle.process, uniform, 1e-10);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_abs_error == doctest::Approx(0.25).epsilon(1e-12));

  const auto self = verify_model(bundle.model, bundle.process,
                                 born_joint(bundle.model, bundle.process), 1e-12);
  CHECK(self.pass);
  CHECK(self.max_abs_error == 0.0);
}
