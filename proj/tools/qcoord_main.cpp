// Command-line front end: evaluates models, decides classical
// implementability, fits nearest local rules, builds the quantum
// constructions, and verifies models against targets. Reports are
// deterministic byte-for-byte for identical inputs and seed.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qcoord/classical.hpp"
#include "qcoord/constructions.hpp"
#include "qcoord/diagnostics.hpp"
#include "qcoord/errors.hpp"
#include "qcoord/fit.hpp"
#include "qcoord/io.hpp"
#include "qcoord/quantum.hpp"
#include "qcoord/tolerances.hpp"

namespace {

using qcoord::Json;

constexpr int kExitOk = 0;
constexpr int kExitNegativeVerdict = 1;
constexpr int kExitInputError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qcoord::UsageError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qcoord::UsageError("cannot write file '" + path + "'");
  out << text;
}

std::string num(double x) { return Json(x).dump(); }

struct Output {
  std::string format = "human";
  std::string out_path;  // optional file for the primary document

  bool machine() const { return format == "machine"; }
};

void add_format_flag(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "Report format")
      ->check(CLI::IsMember({"human", "machine"}))
      ->capture_default_str();
}

void emit_report(const Output& out, const Json& report, const std::string& human_text) {
  if (out.machine()) {
    std::cout << qcoord::dump_compact(report) << "\n";
  } else {
    std::cout << human_text;
  }
}

qcoord::ProcessSpec load_process(const std::string& path) {
  return qcoord::parse_process_file(read_file(path));
}

qcoord::JointDistribution load_distribution(const std::string& path) {
  return qcoord::parse_distribution(qcoord::parse_text(read_file(path)));
}

Json witness_json(const qcoord::ProcessSpec& proc, const qcoord::Witness& w) {
  Json j;
  j["k"] = w.stage + 1;  // stages are 1-based in reports
  j["y"] = w.label;
  j["h"] = qcoord::decode_prefix(proc, w.stage, w.prefix_a);
  j["h2"] = qcoord::decode_prefix(proc, w.stage, w.prefix_b);
  j["gap"] = w.gap;
  return j;
}

int run_check(const std::string& target_path, const std::string& process_path,
              const Output& out) {
  const auto proc = load_process(process_path);
  const auto target = load_distribution(target_path);
  const auto report = qcoord::check_classical_implementable(target, proc);

  Json doc;
  doc["feasible"] = report.feasible;
  std::ostringstream human;
  if (report.feasible) {
    doc["certificate"] = qcoord::emit_local_model(*report.certificate);
    human << "feasible: yes\n";
    human << "certificate rows reproduce the target (see machine output for tables)\n";
  } else {
    doc["witness"] = witness_json(proc, *report.witness);
    const auto& w = *report.witness;
    human << "feasible: no\n";
    human << "witness: stage " << (w.stage + 1) << ", label " << w.label << ", prefixes "
          << qcoord::format_prefix(proc, w.stage, w.prefix_a) << " vs "
          << qcoord::format_prefix(proc, w.stage, w.prefix_b) << ", gap " << num(w.gap) << "\n";
  }
  emit_report(out, doc, human.str());
  return report.feasible ? kExitOk : kExitNegativeVerdict;
}

int run_eval(const std::string& kind, const std::string& model_path,
             const std::string& process_path, const Output& out) {
  const auto proc = load_process(process_path);
  std::optional<qcoord::JointDistribution> dist;
  if (kind == "classical") {
    dist = qcoord::eval_classical(qcoord::parse_local_model(qcoord::parse_text(read_file(model_path))),
                                  proc);
  } else if (kind == "latent") {
    dist = qcoord::eval_latent(
        qcoord::parse_latent_model(qcoord::parse_text(read_file(model_path)), proc), proc);
  } else {
    dist = qcoord::born_joint(qcoord::parse_quantum_model(qcoord::parse_text(read_file(model_path))),
                              proc);
  }
  const Json doc = qcoord::emit_distribution(*dist);
  if (!out.out_path.empty()) write_file(out.out_path, qcoord::dump_pretty(doc));
  std::ostringstream human;
  human << "distribution over " << dist->size() << " tuples:\n";
  for (std::size_t i = 0; i < dist->size(); ++i) {
    human << "  P" << qcoord::format_prefix(proc, proc.stages(),
                                            i)
          << " = " << num((*dist)[i]) << "\n";
  }
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_fit(const std::string& target_path, const std::string& process_path,
            const std::string& metric_name, const qcoord::SearchParams& params,
            const Output& out) {
  const auto proc = load_process(process_path);
  const auto target = load_distribution(target_path);
  const auto metric = qcoord::metric_from_name(metric_name);
  const auto report = qcoord::fit_local_model(target, proc, metric, params);

  Json doc;
  doc["metric"] = qcoord::metric_name(report.metric);
  doc["distance"] = report.distance;
  doc["restarts_used"] = report.restarts_used;
  doc["iterations"] = report.iterations;
  doc["model"] = qcoord::emit_local_model(report.best_model);
  std::ostringstream human;
  human << "metric: " << qcoord::metric_name(report.metric) << "\n";
  human << "distance: " << num(report.distance) << "\n";
  human << "restarts_used: " << report.restarts_used << ", sweeps: " << report.iterations << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_verify(const std::string& model_path, const std::string& process_path,
               const std::string& target_path, double tolerance, const Output& out) {
  const auto proc = load_process(process_path);
  const auto target = load_distribution(target_path);
  const auto model = qcoord::parse_quantum_model(qcoord::parse_text(read_file(model_path)));
  const auto report = qcoord::verify_model(model, proc, target, tolerance);

  Json doc;
  doc["pass"] = report.pass;
  doc["max_abs_error"] = report.max_abs_error;
  doc["tol"] = report.tolerance;
  doc["residuals"] = report.residuals;
  std::ostringstream human;
  human << (report.pass ? "pass" : "fail") << ": max_abs_error " << num(report.max_abs_error)
        << " (tol " << num(report.tolerance) << ")\n";
  emit_report(out, doc, human.str());
  return report.pass ? kExitOk : kExitNegativeVerdict;
}

int run_discord(const std::string& state_path, const std::string& side, int resolution,
                const Output& out) {
  const auto file = qcoord::parse_bipartite_state(qcoord::parse_text(read_file(state_path)));
  const auto measured =
      side == "A" ? qcoord::MeasuredSide::A : qcoord::MeasuredSide::B;
  const auto result =
      qcoord::discord_one_sided(file.state, file.dim_a, file.dim_b, measured, resolution);

  Json doc;
  doc["discord"] = result.discord;
  doc["mutual_information"] = result.mutual_information;
  doc["min_conditional_entropy"] = result.min_conditional_entropy;
  doc["side"] = side;
  doc["resolution"] = result.resolution;
  doc["theta"] = result.theta;
  doc["phi"] = result.phi;
  std::ostringstream human;
  human << "discord(" << side << ") = " << num(result.discord) << "\n";
  human << "mutual information = " << num(result.mutual_information) << "\n";
  human << "best measurement: theta " << num(result.theta) << ", phi " << num(result.phi)
        << " at resolution " << result.resolution << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_witness(const std::string& states_path, const Output& out) {
  const auto file = qcoord::parse_states(qcoord::parse_text(read_file(states_path)));
  for (const auto& s : file.states) {
    if (s.rows() != file.dim || s.cols() != file.dim) {
      throw qcoord::StructuralError("states file entries must match the declared dimension");
    }
  }
  const double w = qcoord::commutation_witness(file.states);
  Json doc;
  doc["witness"] = w;
  std::ostringstream human;
  human << "commutation witness = " << num(w) << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

struct ConstructFlags {
  std::string out_model;
  std::string out_process;
  std::string out_target;
};

void write_construct_files(const ConstructFlags& flags, const qcoord::QuantumModel& model,
                           const qcoord::ProcessSpec* proc,
                           const qcoord::JointDistribution* target) {
  if (!flags.out_model.empty()) {
    write_file(flags.out_model, qcoord::dump_pretty(qcoord::emit_quantum_model(model)));
  }
  if (!flags.out_process.empty() && proc) {
    write_file(flags.out_process, qcoord::dump_pretty(qcoord::emit_process(*proc)));
  }
  if (!flags.out_target.empty() && target) {
    write_file(flags.out_target, qcoord::dump_pretty(qcoord::emit_distribution(*target)));
  }
}

int run_construct_thm1(const std::string& model_path, const std::string& process_path,
                       const ConstructFlags& flags, const Output& out) {
  const auto proc = load_process(process_path);
  const auto latent =
      qcoord::parse_latent_model(qcoord::parse_text(read_file(model_path)), proc);
  const auto model = qcoord::build_diagonal_encoding(latent, proc);
  write_construct_files(flags, model, nullptr, nullptr);
  Json doc;
  doc["model"] = qcoord::emit_quantum_model(model);
  std::ostringstream human;
  human << "built diagonal-encoding model: subsystem dims all " << model.subsystem_dims[0]
        << ", state dim " << model.state.dim() << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_construct_universal(const std::string& target_path, const std::string& process_path,
                            const ConstructFlags& flags, const Output& out) {
  const auto proc = load_process(process_path);
  const auto target = load_distribution(target_path);
  const auto model = qcoord::build_diagonal_universal(target, proc);
  write_construct_files(flags, model, nullptr, nullptr);
  Json doc;
  doc["model"] = qcoord::emit_quantum_model(model);
  std::ostringstream human;
  human << "built universal diagonal model: one latent value per outcome tuple ("
        << target.size() << "), state dim " << model.state.dim() << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_construct_thm2(const std::string& spec_path, const ConstructFlags& flags,
                       const Output& out) {
  const auto spec =
      qcoord::parse_discordant_spec(qcoord::parse_text(read_file(spec_path)));
  auto result = qcoord::build_discordant_two_stage(spec);
  write_construct_files(flags, result.model, &result.process, &result.target);
  Json doc;
  doc["model"] = qcoord::emit_quantum_model(result.model);
  doc["process"] = qcoord::emit_process(result.process);
  doc["target"] = qcoord::emit_distribution(result.target);
  Json diag;
  diag["commutation_witness"] = result.commutation;
  diag["diagonal_in_declared_basis"] = result.diagonal_in_declared_basis;
  diag["max_offdiagonal"] = result.max_offdiagonal;
  doc["diagnostics"] = std::move(diag);
  std::ostringstream human;
  human << "built discordant two-stage model\n";
  human << "commutation witness over second-stage states: " << num(result.commutation) << "\n";
  human << "diagonal in declared basis: "
        << (result.diagonal_in_declared_basis ? "yes" : "no") << " (max offdiagonal "
        << num(result.max_offdiagonal) << ")\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int run_construct_example(const std::string& name, const ConstructFlags& flags,
                          const Output& out) {
  const auto bundle = qcoord::builtin_example(name);
  write_construct_files(flags, bundle.model, &bundle.process, &bundle.target);
  Json doc;
  doc["name"] = bundle.name;
  doc["model"] = qcoord::emit_quantum_model(bundle.model);
  doc["process"] = qcoord::emit_process(bundle.process);
  doc["target"] = qcoord::emit_distribution(bundle.target);
  std::ostringstream human;
  human << "example '" << bundle.name << "': " << bundle.process.stages()
        << " stages, state dim " << bundle.model.state.dim() << "\n";
  emit_report(out, doc, human.str());
  return kExitOk;
}

int error_record(qcoord::ErrorKind kind, const std::string& message,
                 const qcoord::ValidationError* validation = nullptr) {
  Json doc;
  Json err;
  err["kind"] = qcoord::error_kind_name(kind);
  if (validation) {
    err["check"] = validation->check();
    err["magnitude"] = validation->magnitude();
  }
  err["message"] = message;
  doc["error"] = std::move(err);
  std::cerr << qcoord::dump_compact(doc) << "\n";
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local implementability of joint distributions under information constraints"};
  app.require_subcommand(1);

  Output out;
  std::string model_path, process_path, target_path, spec_path, state_path, states_path;
  std::string metric = "tv";
  std::string side = "B";
  std::string example_name;
  double tolerance = 1e-10;
  int resolution = 512;
  qcoord::SearchParams search;
  ConstructFlags cflags;

  auto* eval = app.add_subcommand("eval", "Evaluate a model's joint distribution");
  eval->require_subcommand(1);
  for (const char* kind : {"classical", "latent", "quantum"}) {
    auto* sub = eval->add_subcommand(kind);
    sub->add_option("--model", model_path, "Model file")->required();
    sub->add_option("--process", process_path, "Process file")->required();
    sub->add_option("-o,--out", out.out_path, "Also write the distribution to a file");
    add_format_flag(sub, out);
  }

  auto* check = app.add_subcommand("check", "Decide classical implementability");
  check->add_option("--target", target_path, "Target distribution file")->required();
  check->add_option("--process", process_path, "Process file")->required();
  add_format_flag(check, out);

  auto* fit = app.add_subcommand("fit", "Fit the nearest local model");
  fit->add_option("--target", target_path, "Target distribution file")->required();
  fit->add_option("--process", process_path, "Process file")->required();
  fit->add_option("--metric", metric, "Distance metric")
      ->check(CLI::IsMember({"tv", "l2", "kl"}))
      ->capture_default_str();
  fit->add_option("--seed", search.seed, "Multistart seed")->capture_default_str();
  fit->add_option("--restarts", search.restarts, "Restart count")->capture_default_str();
  fit->add_option("--grid-step", search.grid_step, "Line-search grid step")
      ->capture_default_str();
  fit->add_option("--sweeps", search.max_sweeps, "Coordinate sweep cap per restart")
      ->capture_default_str();
  add_format_flag(fit, out);

  auto* construct = app.add_subcommand("construct", "Build a quantum model");
  construct->require_subcommand(1);
  auto* thm1 = construct->add_subcommand("thm1", "Diagonal encoding of a latent model");
  thm1->add_option("--model", model_path, "Latent model file")->required();
  thm1->add_option("--process", process_path, "Process file")->required();
  auto* universal =
      construct->add_subcommand("diag-universal", "Diagonal encoding of a fixed target");
  universal->add_option("--target", target_path, "Target distribution file")->required();
  universal->add_option("--process", process_path, "Process file")->required();
  auto* thm2 = construct->add_subcommand("thm2", "Discordant two-stage construction");
  thm2->add_option("--spec", spec_path, "Construction spec file")->required();
  auto* example = construct->add_subcommand("example", "Built-in worked example");
  example->add_option("name", example_name, "illex2 | diagonal-flip | three-stage")->required();
  for (auto* sub : {thm1, universal, thm2, example}) {
    sub->add_option("-o,--out", cflags.out_model, "Write the quantum model to a file");
    sub->add_option("--emit-process", cflags.out_process, "Write the process to a file");
    sub->add_option("--emit-target", cflags.out_target, "Write the target to a file");
    add_format_flag(sub, out);
  }

  auto* verify = app.add_subcommand("verify", "Verify a model against a target");
  verify->add_option("--model", model_path, "Quantum model file")->required();
  verify->add_option("--process", process_path, "Process file")->required();
  verify->add_option("--target", target_path, "Target distribution file")->required();
  verify->add_option("--tol", tolerance, "Max-abs tolerance")->capture_default_str();
  add_format_flag(verify, out);

  auto* discord = app.add_subcommand("discord", "One-sided measured discord of a bipartite state");
  discord->add_option("--state", state_path, "Bipartite state file {dims, state}")->required();
  discord->add_option("--side", side, "Measured side")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  discord->add_option("--grid", resolution, "Grid resolution per angle")->capture_default_str();
  add_format_flag(discord, out);

  auto* witness = app.add_subcommand("witness-cc", "Commutation witness of a state family");
  witness->add_option("--states", states_path, "States file {dim, states}")->required();
  add_format_flag(witness, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (eval->parsed()) {
      for (const char* kind : {"classical", "latent", "quantum"}) {
        if (eval->get_subcommand(kind)->parsed()) {
          return run_eval(kind, model_path, process_path, out);
        }
      }
    }
    if (check->parsed()) return run_check(target_path, process_path, out);
    if (fit->parsed()) return run_fit(target_path, process_path, metric, search, out);
    if (construct->parsed()) {
      if (thm1->parsed()) return run_construct_thm1(model_path, process_path, cflags, out);
      if (universal->parsed()) {
        return run_construct_universal(target_path, process_path, cflags, out);
      }
      if (thm2->parsed()) return run_construct_thm2(spec_path, cflags, out);
      if (example->parsed()) return run_construct_example(example_name, cflags, out);
    }
    if (verify->parsed()) {
      return run_verify(model_path, process_path, target_path, tolerance, out);
    }
    if (discord->parsed()) return run_discord(state_path, side, resolution, out);
    if (witness->parsed()) return run_witness(states_path, out);
    return error_record(qcoord::ErrorKind::Usage, "no command given");
  } catch (const qcoord::ValidationError& e) {
    return error_record(e.kind(), e.what(), &e);
  } catch (const qcoord::Error& e) {
    return error_record(e.kind(), e.what());
  } catch (const std::exception& e) {
    return error_record(qcoord::ErrorKind::Usage, e.what());
  }
}
