#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "poslin/bellman.hpp"
#include "poslin/error.hpp"
#include "poslin/lp.hpp"
#include "poslin/model.hpp"
#include "poslin/report.hpp"
#include "poslin/sim.hpp"
#include "poslin/solvers.hpp"
#include "poslin/spectral.hpp"
#include "poslin/validate.hpp"

namespace poslin::cli {

namespace {

struct Common {
  std::string input;
  std::string output;
  std::optional<double> tol;
};

struct SolveArgs {
  std::string method = "vi";
  std::size_t max_iter = SolverOptions{}.max_iter;
  std::string schedule = "5";
  bool force = false;
  bool history = false;
  std::string lp_dump;
  std::string sample_bellman;
};

struct SimulateArgs {
  std::string x0;
  std::size_t horizon = 0;
  std::string policy;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::InvalidArgument, "bad " + what + ": '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// --tol beats POSLIN_TOL beats the per-command default.
double resolve_tol(const Common& c, double fallback) {
  if (c.tol) return *c.tol;
  if (const char* env = std::getenv("POSLIN_TOL"); env && *env) return parse_real(env, "POSLIN_TOL");
  return fallback;
}

// Writes to --output when given, else to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) : os_(&out) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void emit_json(const Common& c, std::ostream& out, const nlohmann::json& doc) {
  Sink sink(c.output, out);
  sink.stream() << doc.dump(2) << "\n";
}

int exit_code(SolveStatus st) {
  switch (st) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::Diverged: return kDiverged;
    case SolveStatus::IterLimit: return kIterLimit;
  }
  return kError;
}

Matrix load_policy(const std::string& path, const Problem& prob) {
  Matrix L = parse_gain(read_file(path));
  if (L.rows() != control_dim(prob) || L.cols() != state_dim(prob)) {
    throw Error(ErrorCode::DimensionMismatch, "policy must be " + std::to_string(control_dim(prob)) + "x" +
                                                  std::to_string(state_dim(prob)));
  }
  return L;
}

int cmd_validate(const Common& c, std::ostream& out) {
  const Problem prob = parse_problem(read_file(c.input));
  const ValidationReport rep = validate(prob, resolve_tol(c, kDefaultValidationTol));
  emit_json(c, out, to_json(rep));
  return rep.passed ? kOk : kValidationFailed;
}

void sample_bellman(const Problem& prob, const std::string& spec, std::ostream& os) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "--sample-bellman expects lo:hi:steps");
  const double lo = parse_real(parts[0], "sample range");
  const double hi = parse_real(parts[1], "sample range");
  const double steps = parse_real(parts[2], "sample count");
  if (steps < 1.0 || steps != static_cast<double>(static_cast<std::size_t>(steps)) || !(lo <= hi)) {
    throw Error(ErrorCode::InvalidArgument, "--sample-bellman needs lo <= hi and a positive integer count");
  }
  const std::size_t count = static_cast<std::size_t>(steps);
  const std::size_t n = state_dim(prob);
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",Tp" << i + 1;
  os << "\n";
  os.precision(17);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    const Vector tp = apply_bellman(Vector(n, t), prob);
    os << t;
    for (double v : tp) os << "," << v;
    os << "\n";
  }
}

OpiSchedule parse_schedule(const std::string& text) {
  std::vector<std::size_t> lengths;
  for (const auto& part : split(text, ',')) {
    const double v = parse_real(part, "schedule entry");
    if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(ErrorCode::InvalidArgument, "schedule entries must be positive integers");
    }
    lengths.push_back(static_cast<std::size_t>(v));
  }
  return OpiSchedule(std::move(lengths));
}

int cmd_solve(const Common& c, const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Problem prob = parse_problem(read_file(c.input));

  if (!a.sample_bellman.empty()) {
    Sink sink(c.output, out);
    sample_bellman(prob, a.sample_bellman, sink.stream());
    return kOk;
  }

  Method method;
  if (a.method == "vi") method = Method::VI;
  else if (a.method == "pi") method = Method::PI;
  else if (a.method == "opi") method = Method::OPI;
  else if (a.method == "lp") method = Method::LP;
  else throw Error(ErrorCode::InvalidArgument, "unknown method '" + a.method + "'");

  const ValidationReport rep = validate(prob);
  if (!rep.passed && !a.force) {
    err << "instance fails validation; rerun with --force to solve anyway\n";
    emit_json(c, out, to_json(rep));
    return kValidationFailed;
  }

  SolverOptions opts;
  opts.tol = resolve_tol(c, opts.tol);
  opts.max_iter = a.max_iter;
  opts.record_history = a.history;

  if (method == Method::LP) {
    if (const auto* q = std::get_if<NormProblem>(&prob); q && q->norm == NormKind::Two) {
      err << "warning: no LP for the Euclidean norm; using value iteration\n";
      method = Method::VI;
    }
  }

  if (method == Method::LP && !a.lp_dump.empty()) {
    const LinearProgram lp = std::visit(
        [](const auto& q) {
          if constexpr (std::is_same_v<std::decay_t<decltype(q)>, AbsProblem>) return build_abs_lp(q);
          else return build_norm_program(q);
        },
        prob);
    if (a.lp_dump == "-") {
      dump_lp(err, lp);
    } else {
      std::ofstream f(a.lp_dump);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + a.lp_dump + "'");
      dump_lp(f, lp);
    }
  }

  SolveResult res;
  try {
    switch (method) {
      case Method::VI: res = value_iteration(prob, Vector(state_dim(prob), 0.0), opts); break;
      case Method::PI: res = policy_iteration(prob, std::nullopt, opts); break;
      case Method::OPI: res = optimistic_pi(prob, std::nullopt, parse_schedule(a.schedule), opts); break;
      case Method::LP: res = solve_via_lp(prob); break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoStabilizingPolicy) throw;
    err << e.what() << "\n";
    res = SolveResult{};
    res.method = method;
    res.status = SolveStatus::Diverged;
  }

  nlohmann::json doc = to_json(res, a.history);
  if (!rep.passed) doc["assumptions-not-verified"] = true;
  emit_json(c, out, doc);
  return exit_code(res.status);
}

Vector parse_x0(const std::string& text) {
  Vector x;
  for (const auto& part : split(text, ',')) x.push_back(parse_real(part, "x0 entry"));
  return x;
}

// Optimal gain for simulation when none is supplied.
std::optional<Matrix> optimal_gain(const Problem& prob, std::ostream& err) {
  SolveResult res;
  try {
    if (std::holds_alternative<AbsProblem>(prob)) res = policy_iteration(prob);
    else res = value_iteration(prob, Vector(state_dim(prob), 0.0));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoStabilizingPolicy) throw;
    err << e.what() << "\n";
    return std::nullopt;
  }
  if (res.status != SolveStatus::Converged || !res.policy) {
    err << "no optimal policy: solver status " << to_string(res.status) << "\n";
    return std::nullopt;
  }
  return res.policy->L;
}

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const Problem prob = parse_problem(read_file(c.input));
  const Vector x0 = parse_x0(a.x0);
  if (x0.size() != state_dim(prob)) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has " + std::to_string(x0.size()) + " entries, expected " +
                                                  std::to_string(state_dim(prob)));
  }
  Matrix L;
  if (!a.policy.empty()) {
    L = load_policy(a.policy, prob);
  } else {
    auto opt = optimal_gain(prob, err);
    if (!opt) return kDiverged;
    L = std::move(*opt);
  }
  const Trajectory traj = rollout(prob, L, x0, a.horizon);
  Sink sink(c.output, out);
  write_csv(sink.stream(), traj);
  return kOk;
}

int cmd_spectrum(const Common& c, const std::string& policy, std::ostream& out) {
  const Problem prob = parse_problem(read_file(c.input));
  const Matrix& A = std::visit([](const auto& q) -> const Matrix& { return q.A; }, prob);
  const Matrix& B = std::visit([](const auto& q) -> const Matrix& { return q.B; }, prob);
  const Matrix M = policy.empty() ? A : closed_loop(A, B, load_policy(policy, prob));
  emit_json(c, out, to_json(spectral_radius(M)));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solvers for optimal control of positive linear systems", "poslin"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", common.input, "problem instance (JSON)")->required();
    sub->add_option("-o,--output", common.output, "output file (default stdout)");
    sub->add_option("--tol", common.tol, "tolerance override");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check the positivity assumptions");
  add_common(validate_cmd);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "compute p* and an optimal linear policy");
  add_common(solve_cmd);
  solve_cmd->add_option("-m,--method", solve_args.method, "vi | pi | opi | lp");
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "iteration budget");
  solve_cmd->add_option("--schedule", solve_args.schedule, "OPI sweep lengths, e.g. 5 or 1,2,4");
  solve_cmd->add_flag("--force", solve_args.force, "solve even if validation fails");
  solve_cmd->add_flag("--history", solve_args.history, "include the residual history");
  solve_cmd->add_option("--lp-dump", solve_args.lp_dump, "write the LP rows to a file ('-' for stderr)");
  solve_cmd->add_option("--sample-bellman", solve_args.sample_bellman,
                        "print T(t*1) for t in lo:hi:steps as CSV and exit");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "roll out a linear policy");
  add_common(sim_cmd);
  sim_cmd->add_option("--x0", sim_args.x0, "initial state, comma separated")->required();
  sim_cmd->add_option("--horizon", sim_args.horizon, "number of steps")->required();
  sim_cmd->add_option("--policy", sim_args.policy, "gain JSON (default: optimal policy)");

  std::string spectrum_policy;
  auto* spec_cmd = app.add_subcommand("spectrum", "spectral radius of A or A + BL");
  add_common(spec_cmd);
  spec_cmd->add_option("--policy", spectrum_policy, "gain JSON");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(common, out);
    if (solve_cmd->parsed()) return cmd_solve(common, solve_args, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(common, sim_args, out, err);
    if (spec_cmd->parsed()) return cmd_spectrum(common, spectrum_policy, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace poslin::cli
