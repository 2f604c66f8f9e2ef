#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>

#include "cpg/errors.hpp"
#include "cpg/estimators.hpp"
#include "cpg/format.hpp"
#include "cpg/mdp_io.hpp"
#include "cpg/optim.hpp"
#include "cpg/oracle.hpp"

namespace cpg::cli {
namespace {

using cpg::format_double;

/// Flags shared by every subcommand that loads a model.
struct ModelArgs {
  std::string mdp_path;
  std::string theta_source = "zeros";
  std::optional<double> gamma_override;
};

struct LoadedModel {
  TabularMdp mdp;
  PolicyParams theta;
};

/// Thrown when the loaded model fails validation; the report is printed
/// by the caller.
struct InvalidModel {
  ValidationReport report;
};

void add_model_options(CLI::App& cmd, ModelArgs& args, bool with_theta) {
  cmd.add_option("mdp", args.mdp_path, "MDP text file")->required();
  if (with_theta) {
    cmd.add_option("--theta", args.theta_source, "theta file, or 'zeros'")->capture_default_str();
  }
  cmd.add_option("--gamma", args.gamma_override, "replace the file's discount factor");
}

TabularMdp load_model_only(const ModelArgs& args) {
  TabularMdp mdp = load_mdp(args.mdp_path);
  if (args.gamma_override) mdp.set_gamma(*args.gamma_override);
  return mdp;
}

LoadedModel load_model(const ModelArgs& args) {
  TabularMdp mdp = load_model_only(args);
  if (auto report = validate(mdp); !report.ok()) throw InvalidModel{std::move(report)};
  PolicyParams theta = args.theta_source == "zeros"
                           ? PolicyParams::zeros_for(mdp)
                           : parse_theta(read_text_file(args.theta_source), mdp.layout());
  return {std::move(mdp), std::move(theta)};
}

void write_manifest(std::ostream& out, std::string_view subcommand, const ModelArgs& args,
                    const TabularMdp& mdp) {
  out << "# cpg " << subcommand << "\n";
  out << "# mdp=" << args.mdp_path << "\n";
  out << "# theta=" << args.theta_source << "\n";
  out << "# gamma=" << format_double(mdp.gamma())
      << (args.gamma_override ? " (override)" : " (file)") << "\n";
  out << "# horizon=" << mdp.horizon() << "\n";
}

/// (mean - exact) / stderr, with the degenerate zero-stderr case mapped to
/// 0 on agreement and to a signed infinity otherwise.
double z_score(double mean, double se, double exact) {
  if (se > 0.0) return (mean - exact) / se;
  if (mean == exact) return 0.0;
  return mean > exact ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
}

GradientKind parse_kind_or_throw(const std::string& name) {
  if (auto kind = parse_gradient_kind(name)) return *kind;
  throw CLI::ValidationError("--kind", "unknown kind '" + name + "'");
}

// Default comparison target for an estimator kind: the gradient it is
// commonly used as an estimate of.
GradientKind default_target(GradientKind kind) {
  switch (kind) {
    case GradientKind::start:
    case GradientKind::dropped: return GradientKind::start;
    case GradientKind::classical:
    case GradientKind::classical_oracle_q: return GradientKind::classical;
  }
  return kind;
}

int cmd_validate(const ModelArgs& args, std::ostream& out) {
  const TabularMdp mdp = load_model_only(args);
  const auto report = validate(mdp);
  for (const auto& check : report.checks) {
    if (check.passed()) {
      out << "PASS: " << check.name << "\n";
    } else {
      for (const auto& message : check.violations) out << "FAIL: " << message << "\n";
    }
  }
  out << (report.ok() ? "OK" : "INVALID") << "\n";
  return report.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_evaluate(const ModelArgs& args, std::ostream& out) {
  const auto [mdp, theta] = load_model(args);
  const auto values = state_action_values(mdp, theta);
  const auto occupancy = time_occupancy(mdp, theta);
  const auto& layout = mdp.layout();

  write_manifest(out, "evaluate", args, mdp);
  out << "[objective]\nJ_s,J_c\n"
      << format_double(objective_start(mdp, theta)) << ","
      << format_double(objective_classical(mdp, theta)) << "\n";

  std::size_t widest = 0;
  for (State s = 0; s < mdp.num_states(); ++s) widest = std::max(widest, mdp.num_actions(s));
  out << "[values]\ns,v";
  for (Action a = 0; a < widest; ++a) out << ",q_a" << a;
  out << "\n";
  for (State s = 0; s < mdp.num_states(); ++s) {
    out << s << "," << format_double(values.v[s]);
    for (Action a = 0; a < widest; ++a) {
      out << ",";
      if (a < mdp.num_actions(s)) out << format_double(values.q[layout.index(s, a)]);
    }
    out << "\n";
  }

  out << "[occupancy]\ns,d";
  for (std::size_t t = 0; t < occupancy.rows.size(); ++t) out << ",t" << t;
  out << "\n";
  for (State s = 0; s < mdp.num_states(); ++s) {
    out << s << "," << format_double(occupancy.d[s]);
    for (const auto& row : occupancy.rows) out << "," << format_double(row[s]);
    out << "\n";
  }
  return kExitOk;
}

constexpr double kGradcheckTolerance = 1e-6;

int cmd_gradcheck(const ModelArgs& args, const std::string& kind_name, double eps,
                  std::ostream& out) {
  const GradientKind kind = parse_kind_or_throw(kind_name);
  if (kind != GradientKind::start && kind != GradientKind::classical) {
    throw CLI::ValidationError("--kind", "gradcheck supports 'start' and 'classical'");
  }
  const auto [mdp, theta] = load_model(args);
  const Gradient exact = exact_gradient(mdp, theta, kind);
  const Gradient fd = finite_difference_gradient(mdp, theta, kind, eps);

  write_manifest(out, "gradcheck", args, mdp);
  out << "# kind=" << to_string(kind) << "\n# eps=" << format_double(eps) << "\n";
  out << "component,exact,fd,abs_diff\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double diff = std::abs(exact[k] - fd[k]);
    worst = std::max(worst, diff);
    out << mdp.layout().label(k) << "," << format_double(exact[k]) << "," << format_double(fd[k])
        << "," << format_double(diff) << "\n";
  }
  const bool pass = worst <= kGradcheckTolerance;
  out << "# max_abs_diff=" << format_double(worst) << "\n";
  out << "# result=" << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

struct EstimateArgs {
  std::string kind = "classical";
  std::string against;
  std::size_t episodes = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

int cmd_estimate(const ModelArgs& args, const EstimateArgs& est_args, std::ostream& out) {
  const GradientKind kind = parse_kind_or_throw(est_args.kind);
  GradientKind target = default_target(kind);
  if (!est_args.against.empty()) {
    const auto parsed = parse_gradient_kind(est_args.against);
    if (!parsed) throw CLI::ValidationError("--against", "unknown kind '" + est_args.against + "'");
    target = *parsed;
  }
  const auto [mdp, theta] = load_model(args);
  const Gradient exact = exact_gradient(mdp, theta, target);
  const auto estimate =
      estimate_gradient(mdp, theta, kind, est_args.episodes, est_args.seed, {est_args.workers});

  write_manifest(out, "estimate", args, mdp);
  out << "# kind=" << to_string(kind) << "\n# against=" << to_string(target)
      << "\n# episodes=" << est_args.episodes << "\n# seed=" << est_args.seed << "\n";
  out << "component,mean,stderr,exact,z_score\n";
  std::vector<std::string> flagged;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double z = z_score(estimate.mean[k], estimate.standard_error[k], exact[k]);
    if (std::isinf(z)) flagged.push_back(mdp.layout().label(k));
    out << mdp.layout().label(k) << "," << format_double(estimate.mean[k]) << ","
        << format_double(estimate.standard_error[k]) << "," << format_double(exact[k]) << ","
        << format_double(z) << "\n";
  }
  for (const auto& label : flagged) {
    out << "# flagged: " << label << " has zero standard error but differs from exact\n";
  }
  return kExitOk;
}

struct TrainArgs {
  std::string kind = "classical";
  double alpha = 0.1;
  std::size_t batch = 100;
  std::size_t iters = 2000;
  std::uint64_t seed = 0;
  std::string out_path = "-";
  std::string theta_out;
  unsigned workers = 0;
};

void write_train_row(std::ostream& out, const TrainRecord& r) {
  out << r.iteration << "," << format_double(r.objective_classical) << ","
      << format_double(r.objective_start) << ","
      << (r.grad_norm ? format_double(*r.grad_norm) : std::string{}) << ","
      << format_double(r.theta_norm) << "\n";
  out.flush();
}

int cmd_train(const ModelArgs& args, const TrainArgs& train_args, std::ostream& stdout_stream,
              std::ostream& err) {
  const GradientKind kind = parse_kind_or_throw(train_args.kind);
  const auto [mdp, theta0] = load_model(args);

  std::ofstream file;
  if (train_args.out_path != "-") {
    file.open(train_args.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot write '" + train_args.out_path + "'");
  }
  std::ostream& out = train_args.out_path == "-" ? stdout_stream : file;

  write_manifest(out, "train", args, mdp);
  out << "# kind=" << to_string(kind) << "\n# alpha=" << format_double(train_args.alpha)
      << "\n# batch=" << train_args.batch << "\n# iters=" << train_args.iters
      << "\n# seed=" << train_args.seed << "\n# out=" << train_args.out_path << "\n";
  out << "iter,J_c,J_s,grad_norm,theta_norm\n";

  TrainConfig config{kind, train_args.alpha, train_args.batch, train_args.iters, train_args.seed,
                     train_args.workers};
  try {
    const auto result =
        train(mdp, theta0, config, [&out](const TrainRecord& r) { write_train_row(out, r); });
    if (!train_args.theta_out.empty()) {
      std::ofstream theta_file(train_args.theta_out, std::ios::binary | std::ios::trunc);
      if (!theta_file) throw Error("cannot write '" + train_args.theta_out + "'");
      theta_file << serialize_theta(result.theta);
    }
  } catch (const NonFiniteError& e) {
    out << "# aborted: " << e.what() << "\n";
    out.flush();
    err << "error: training aborted, " << e.what() << "\n";
    return kExitNumericalAbort;
  }
  return kExitOk;
}

int cmd_bias_demo(const ModelArgs& args, const EstimateArgs& est_args, std::ostream& out) {
  const auto [mdp, theta] = load_model(args);
  constexpr GradientKind kinds[] = {GradientKind::start, GradientKind::dropped,
                                    GradientKind::classical};
  std::vector<Gradient> exact;
  for (auto kind : kinds) exact.push_back(exact_gradient(mdp, theta, kind));

  write_manifest(out, "bias-demo", args, mdp);
  out << "# episodes=" << est_args.episodes << "\n# seed=" << est_args.seed << "\n";
  out << "kind,component,mean,stderr";
  for (auto kind : kinds) out << ",exact_" << to_string(kind) << ",z_" << to_string(kind);
  out << "\n";
  for (auto kind : kinds) {
    const auto estimate =
        estimate_gradient(mdp, theta, kind, est_args.episodes, est_args.seed, {est_args.workers});
    for (std::size_t k = 0; k < theta.size(); ++k) {
      out << to_string(kind) << "," << mdp.layout().label(k) << ","
          << format_double(estimate.mean[k]) << "," << format_double(estimate.standard_error[k]);
      for (const auto& target : exact) {
        out << "," << format_double(target[k]) << ","
            << format_double(z_score(estimate.mean[k], estimate.standard_error[k], target[k]));
      }
      out << "\n";
    }
  }
  const double separation = max_abs_diff(exact[1], exact[0]);
  if (separation <= kProbabilityTolerance) {
    out << "# no separation on this MDP\n";
  } else {
    out << "# separation: max |exact_dropped - exact_start| = " << format_double(separation)
        << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo policy gradients for finite-horizon tabular MDPs"};
  app.name(args.empty() ? "cpg" : args.front());
  app.require_subcommand(1);

  ModelArgs model;
  EstimateArgs est;
  TrainArgs tr;
  std::string gradcheck_kind = "classical";
  double eps = kDefaultFiniteDifferenceStep;

  auto* validate_cmd = app.add_subcommand("validate", "check every model invariant");
  add_model_options(*validate_cmd, model, false);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "exact objectives, values and occupancies");
  add_model_options(*evaluate_cmd, model, true);

  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "compare exact gradients with finite differences");
  add_model_options(*gradcheck_cmd, model, true);
  gradcheck_cmd->add_option("--kind", gradcheck_kind, "start | classical")->capture_default_str();
  gradcheck_cmd->add_option("--eps", eps, "central-difference step")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo gradient estimate with z-scores");
  add_model_options(*estimate_cmd, model, true);
  estimate_cmd->add_option("--kind", est.kind, "start | dropped | classical | classical_oracle_q")
      ->capture_default_str();
  estimate_cmd->add_option("--against", est.against,
                           "exact gradient to compare with (default: the kind's usual target)");
  estimate_cmd->add_option("--episodes", est.episodes)->capture_default_str()->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--seed", est.seed)->capture_default_str();
  estimate_cmd->add_option("--workers", est.workers, "threads (0 = all cores); never changes output");

  auto* train_cmd = app.add_subcommand("train", "stochastic gradient ascent with exact logging");
  add_model_options(*train_cmd, model, true);
  train_cmd->add_option("--kind", tr.kind)->capture_default_str();
  train_cmd->add_option("--alpha", tr.alpha)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", tr.batch)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--iters", tr.iters)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", tr.seed)->capture_default_str();
  train_cmd->add_option("--out", tr.out_path, "CSV destination ('-' for stdout)")->capture_default_str();
  train_cmd->add_option("--theta-out", tr.theta_out, "write final theta to this file");
  train_cmd->add_option("--workers", tr.workers, "threads (0 = all cores); never changes output");

  auto* bias_cmd = app.add_subcommand("bias-demo", "three estimators against three exact gradients");
  bias_cmd->alias("bias_demo");
  add_model_options(*bias_cmd, model, true);
  bias_cmd->add_option("--episodes", est.episodes)->capture_default_str()->check(CLI::PositiveNumber);
  bias_cmd->add_option("--seed", est.seed)->capture_default_str();
  bias_cmd->add_option("--workers", est.workers, "threads (0 = all cores); never changes output");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("cpg");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*validate_cmd) return cmd_validate(model, out);
    if (*evaluate_cmd) return cmd_evaluate(model, out);
    if (*gradcheck_cmd) return cmd_gradcheck(model, gradcheck_kind, eps, out);
    if (*estimate_cmd) return cmd_estimate(model, est, out);
    if (*train_cmd) return cmd_train(model, tr, out, err);
    if (*bias_cmd) return cmd_bias_demo(model, est, out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitCheckFailed;
  } catch (const InvalidModel& invalid) {
    for (const auto& message : invalid.report.violations()) err << "FAIL: " << message << "\n";
    err << "error: model is invalid\n";
    return kExitCheckFailed;
  } catch (const EnumerationLimitError& e) {
    err << "error: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const NonFiniteError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitCheckFailed;
}

}  // namespace cpg::cli
