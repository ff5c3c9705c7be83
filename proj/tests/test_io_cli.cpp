#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qcoord/classical.hpp"
#include "qcoord/constructions.hpp"
#include "qcoord/errors.hpp"
#include "qcoord/io.hpp"

using namespace qcoord;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qcoord_io_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void put_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(QCOORD_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

JointDistribution anti_correlated() {
  return JointDistribution({2, 2}, {0.0, 0.5, 0.5, 0.0});
}

}  // namespace

TEST_CASE("process files parse through the named generators") {
  const auto proc = parse_process_file(
      R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"gen":"constant"}]})");
  CHECK(proc.stages() == 2);
  CHECK(proc.label_count(1) == 1);
  CHECK(proc.stage_is_constant(1));

  const auto recall = parse_process_file(
      R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"gen":"perfect-recall"}]})");
  CHECK(recall.label_count(1) == 2);
  CHECK(recall.stage_is_injective(1));
}

TEST_CASE("explicit info maps must be total") {
  try {
    parse_process_file(
        R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"map":{"0":0},"labels":1}]})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("stage 2") != std::string::npos);
    CHECK(msg.find("(1)") != std::string::npos);
  }
}

TEST_CASE("labels outside the declared range are rejected") {
  CHECK_THROWS_AS(parse_process_file(
                      R"({"n":1,"alphabets":[2],"info":[{"map":{"":3},"labels":2}]})"),
                  ParseError);
}

TEST_CASE("missing fields are named") {
  try {
    parse_process_file(R"({"n":1,"info":[{"gen":"constant"}]})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("alphabets") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_process_file(
                      R"({"n":1,"alphabets":[2],"info":[{"gen":"sometimes"}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_text("{not json"), ParseError);
}

TEST_CASE("documents round-trip byte for byte") {
  oracles::Rand rng(301);

  const auto proc = oracles::random_process(rng, 3, 3);
  const Json p1 = emit_process(proc);
  const Json p2 = emit_process(parse_process(p1));
  CHECK(dump_compact(p1) == dump_compact(p2));

  const auto dist = oracles::random_distribution(rng, proc.alphabet_sizes());
  const Json d1 = emit_distribution(dist);
  CHECK(dump_compact(d1) == dump_compact(emit_distribution(parse_distribution(d1))));

  const auto local = oracles::random_local_model(rng, proc);
  const Json l1 = emit_local_model(local);
  CHECK(dump_compact(l1) == dump_compact(emit_local_model(parse_local_model(l1))));

  const auto latent = oracles::random_latent_model(rng, proc, 3);
  const Json t1 = emit_latent_model(latent);
  CHECK(dump_compact(t1) ==
        dump_compact(emit_latent_model(parse_latent_model(t1, proc))));

  const auto bundle = builtin_example("illex2");
  const Json q1 = emit_quantum_model(bundle.model);
  CHECK(dump_compact(q1) == dump_compact(emit_quantum_model(parse_quantum_model(q1))));
}

TEST_CASE("the deterministic latent shorthand expands to point masses") {
  const auto proc = parse_process_file(
      R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"gen":"constant"}]})");
  const auto model = parse_latent_model(
      parse_text(R"({"latent_probs":[0.5,0.5],"deterministic":[[0,1],[1,0]]})"), proc);
  const auto d = eval_latent(model, proc);
  CHECK(max_abs_difference(d, anti_correlated()) == 0.0);

  // mixed form: explicit tables for stage 1, shorthand for stage 2
  const auto mixed = parse_latent_model(
      parse_text(R"({"latent_probs":[0.5,0.5],
                     "tables":[[[[1.0,0.0]],[[0.0,1.0]]],null],
                     "deterministic":[null,[1,0]]})"),
      proc);
  CHECK(max_abs_difference(eval_latent(mixed, proc), anti_correlated()) == 0.0);

  CHECK_THROWS_AS(parse_latent_model(parse_text(R"({"latent_probs":[1.0]})"), proc),
                  ParseError);
}

TEST_CASE("cli: check reports the infeasibility witness and exits 1") {
  const fs::path proc_path = work_dir() / "process_oblivious.json";
  const fs::path target_path = work_dir() / "target.json";
  put_file(proc_path,
           R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"gen":"constant"}]})");
  put_file(target_path, dump_pretty(emit_distribution(anti_correlated())));

  const std::string args = "check --target " + target_path.string() + " --process " +
                           proc_path.string() + " --format machine";
  const auto r = run_cli(args);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("\"feasible\":false") != std::string::npos);
  CHECK(r.out.find("\"k\":2") != std::string::npos);
  CHECK(r.out.find("\"h\":[0]") != std::string::npos);
  CHECK(r.out.find("\"h2\":[1]") != std::string::npos);
  CHECK(r.out.find("\"gap\":1.0") != std::string::npos);

  const auto again = run_cli(args);
  CHECK(again.out == r.out);  // byte-identical reports

  const fs::path recall_path = work_dir() / "process_recall.json";
  put_file(recall_path,
           R"({"n":2,"alphabets":[2,2],"info":[{"gen":"constant"},{"gen":"perfect-recall"}]})");
  const auto ok = run_cli("check --target " + target_path.string() + " --process " +
                          recall_path.string() + " --format machine");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("\"feasible\":true") != std::string::npos);
}

TEST_CASE("cli: construct example then verify round-trips through files") {
  const fs::path model = work_dir() / "illex2_model.json";
  const fs::path proc = work_dir() / "illex2_process.json";
  const fs::path target = work_dir() / "illex2_target.json";
  const auto build = run_cli("construct example illex2 -o " + model.string() +
                             " --emit-process " + proc.string() + " --emit-target " +
                             target.string() + " --format machine");
  CHECK(build.exit_code == 0);

  const auto verify = run_cli("verify --model " + model.string() + " --process " +
                              proc.string() + " --target " + target.string() +
                              " --tol 1e-10 --format machine");
  CHECK(verify.exit_code == 0);
  CHECK(verify.out.find("\"pass\":true") != std::string::npos);

  const fs::path uniform = work_dir() / "uniform_target.json";
  put_file(uniform, dump_pretty(emit_distribution(
                        JointDistribution({2, 2}, std::vector<double>(4, 0.25)))));
  const auto fail = run_cli("verify --model " + model.string() + " --process " + proc.string() +
                            " --target " + uniform.string() + " --format machine");
  CHECK(fail.exit_code == 1);
  CHECK(fail.out.find("\"pass\":false") != std::string::npos);
  CHECK(fail.out.find("0.25") != std::string::npos);
}

TEST_CASE("cli: invalid quantum models exit 2 with a machine error record") {
  const auto bundle = builtin_example("illex2");
  Json doc = emit_quantum_model(bundle.model);
  doc["povms"][1][0] = Json::array(
      {emit_matrix(CMatrix::Identity(2, 2)), emit_matrix(CMatrix::Identity(2, 2))});
  const fs::path bad = work_dir() / "bad_model.json";
  put_file(bad, dump_pretty(doc));
  const fs::path proc = work_dir() / "illex2_process.json";  // written by the previous case

  const auto r = run_cli("eval quantum --model " + bad.string() + " --process " + proc.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("\"kind\":\"validation\"") != std::string::npos);
  CHECK(r.err.find("completeness") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);  // single line
}

TEST_CASE("cli: eval classical emits the induced distribution") {
  const fs::path proc = work_dir() / "process_oblivious.json";
  const fs::path model = work_dir() / "local_model.json";
  LocalModel m;
  m.tables = {{{0.3, 0.7}}, {{0.2, 0.8}}};
  put_file(model, dump_pretty(emit_local_model(m)));
  const auto r = run_cli("eval classical --model " + model.string() + " --process " +
                         proc.string() + " --format machine");
  CHECK(r.exit_code == 0);
  const Json out = parse_text(r.out);
  CHECK(out["probs"][1].get<double>() == doctest::Approx(0.24).epsilon(1e-15));
}

TEST_CASE("cli: fit reports a deterministic distance") {
  const fs::path proc = work_dir() / "process_oblivious.json";
  const fs::path target = work_dir() / "target.json";
  const std::string args = "fit --target " + target.string() + " --process " + proc.string() +
                           " --metric tv --seed 7 --restarts 8 --format machine";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  const Json out = parse_text(a.out);
  CHECK(out["distance"].get<double>() > 0.40);
  CHECK(out["distance"].get<double>() < 0.43);
}

TEST_CASE("cli: construct thm1 gives a model that verifies against eval latent") {
  const fs::path proc = work_dir() / "process_oblivious.json";
  const fs::path latent = work_dir() / "latent_model.json";
  const fs::path qmodel = work_dir() / "thm1_model.json";
  const fs::path dist = work_dir() / "latent_dist.json";
  put_file(latent, R"({"latent_probs":[0.5,0.5],"deterministic":[[0,1],[1,0]]})");

  CHECK(run_cli("construct thm1 --model " + latent.string() + " --process " + proc.string() +
                " -o " + qmodel.string() + " --format machine")
            .exit_code == 0);
  CHECK(run_cli("eval latent --model " + latent.string() + " --process " + proc.string() +
                " -o " + dist.string() + " --format machine")
            .exit_code == 0);
  const auto verify = run_cli("verify --model " + qmodel.string() + " --process " +
                              proc.string() + " --target " + dist.string() +
                              " --tol 1e-10 --format machine");
  CHECK(verify.exit_code == 0);
  CHECK(verify.out.find("\"pass\":true") != std::string::npos);
}

TEST_CASE("cli: construct diag-universal reproduces the infeasible target") {
  const fs::path proc = work_dir() / "process_oblivious.json";
  const fs::path target = work_dir() / "target.json";
  const fs::path qmodel = work_dir() / "universal_model.json";
  CHECK(run_cli("construct diag-universal --target " + target.string() + " --process " +
                proc.string() + " -o " + qmodel.string() + " --format machine")
            .exit_code == 0);
  const auto verify = run_cli("verify --model " + qmodel.string() + " --process " +
                              proc.string() + " --target " + target.string() +
                              " --tol 1e-10 --format machine");
  CHECK(verify.exit_code == 0);
}

TEST_CASE("cli: construct thm2 reports its diagnostics") {
  const fs::path spec = work_dir() / "discordant_spec.json";
  const double r = 1.0 / std::sqrt(2.0);
  Json doc;
  doc["latent_probs"] = Json::array({0.5, 0.5});
  doc["g"] = Json::array({0, 1});
  doc["h"] = Json::array({1, 0});
  doc["basis_a"] = emit_matrix(CMatrix::Identity(2, 2));
  CVector plus(2), minus(2);
  plus << Cplx(r, 0), Cplx(r, 0);
  minus << Cplx(r, 0), Cplx(-r, 0);
  doc["states_b"] = Json::array({emit_cvector(plus), emit_cvector(minus)});
  doc["declared_basis_b"] = emit_matrix(CMatrix::Identity(2, 2));
  put_file(spec, dump_pretty(doc));

  const auto result = run_cli("construct thm2 --spec " + spec.string() + " --format machine");
  CHECK(result.exit_code == 0);
  const Json out = parse_text(result.out);
  CHECK(out["diagnostics"]["commutation_witness"].get<double>() < 1e-12);
  CHECK(out["diagnostics"]["diagonal_in_declared_basis"].get<bool>() == false);
  CHECK(out["target"]["probs"][1].get<double>() == 0.5);
}

TEST_CASE("cli: discord and witness-cc commands") {
  oracles::Rand rng(311);
  const CMatrix prod =
      oracles::kron(oracles::random_density(rng, 2), oracles::random_density(rng, 2));
  Json state_doc;
  state_doc["dims"] = Json::array({2, 2});
  state_doc["state"] = emit_matrix(prod);
  const fs::path state = work_dir() / "product_state.json";
  put_file(state, dump_pretty(state_doc));

  const auto r = run_cli("discord --state " + state.string() + " --grid 64 --format machine");
  CHECK(r.exit_code == 0);
  CHECK(parse_text(r.out)["discord"].get<double>() <= 1e-6);

  CMatrix p0 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  CMatrix pplus(2, 2);
  pplus << 0.5, 0.5, 0.5, 0.5;
  Json states_doc;
  states_doc["dim"] = 2;
  states_doc["states"] = Json::array({emit_matrix(p0), emit_matrix(pplus)});
  const fs::path states = work_dir() / "witness_states.json";
  put_file(states, dump_pretty(states_doc));

  const auto w = run_cli("witness-cc --states " + states.string() + " --format machine");
  CHECK(w.exit_code == 0);
  CHECK(parse_text(w.out)["witness"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cli: unknown example names exit 2 listing the valid ones") {
  const auto r = run_cli("construct example nope");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("illex2") != std::string::npos);
  CHECK(r.err.find("diagonal-flip") != std::string::npos);
  CHECK(r.err.find("three-stage") != std::string::npos);
}
