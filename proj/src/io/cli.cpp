#include "kframe/io/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"
#include "kframe/piecewise.hpp"
#include "kframe/scalability.hpp"
#include "kframe/variational.hpp"

namespace kframe::io {

namespace {

Json matrix_json(const Mat& m) { return m.to_rows(); }

Json check_json(const ParsevalCheck& c) {
  Json j;
  j["is_parseval"] = c.is_parseval;
  j["defect"] = c.defect;
  j["threshold"] = c.threshold;
  return j;
}

Json certificate_json(const Certificate& c) {
  Json j;
  j["samples"] = c.samples;
  j["min_slack"] = c.min_slack;
  j["ok"] = c.ok;
  return j;
}

Json piecewise_json(const PiecewiseCheckReport& r) {
  Json j;
  j["is_kps"] = r.is_kps;
  j["kps_defect"] = r.kps_defect;
  j["piece_x_defect"] = r.piece_x_defect;
  j["piece_y_defect"] = r.piece_y_defect;
  j["cross_sym_defect"] = r.cross_sym_defect;
  j["cross_full_defect"] = r.cross_full_defect;
  j["threshold"] = r.threshold;
  j["pieces_ok"] = r.pieces_ok;
  j["cross_ok"] = r.cross_ok;
  j["commutator"] = r.commutator;
  j["commutes"] = r.commutes;
  j["equivalence_holds"] = r.equivalence_holds;
  return j;
}

template <class T>
const T& require_field(const std::optional<T>& field, const char* name, const std::string& command) {
  if (!field) throw Error(ErrorCode::SchemaError, std::string(name) + ": missing field (required by " + command + ")");
  return *field;
}

PiecewiseScaling piecewise_from(const ProblemFile& p, const std::string& command) {
  return PiecewiseScaling{require_field(p.a, "a", command), require_field(p.b, "b", command),
                          Projection(require_field(p.p, "P", command))};
}

CommandOutcome analyze(const ProblemFile& p) {
  const KOperator k = p.k_operator();
  const FrameOps ops = build_ops(p.frame);
  const FrameBounds fb = kframe_bounds(p.frame, k);
  Json j;
  j["dimension"] = p.frame.dim();
  j["count"] = p.frame.count();
  j["k_rank"] = k.rank();
  j["frame_operator"] = matrix_json(ops.frame_op);
  j["gram"] = matrix_json(ops.gram);
  j["frame_operator_trace"] = ops.frame_op.trace();
  j["lower_A"] = fb.lower_A;  // +inf renders as null
  j["upper_B"] = fb.upper_B;
  j["is_k_frame"] = fb.is_k_frame;
  j["degenerate_k"] = fb.degenerate_k;
  j["witness"] = fb.witness;
  j["witness_ratio"] = fb.witness_ratio;
  return {j, fb.is_k_frame};
}

CommandOutcome parseval(const ProblemFile& p, const RunOptions& o) {
  const ParsevalCheck c = parseval_k_check(p.frame, p.k_operator(), o.tol);
  return {check_json(c), c.is_parseval};
}

CommandOutcome scale(const ProblemFile& p, const RunOptions& o) {
  const KOperator k = p.k_operator();
  const ScalingSolveResult s = solve_scaling(p.frame, k, o.tol);
  const ParsevalCheck v = verify_scaling(p.frame, k, s.scaling, 10.0 * o.tol);
  Json j;
  j["feasible"] = s.feasible;
  j["residual"] = s.residual;
  j["threshold"] = s.threshold;
  j["scaling"] = s.scaling.weights();
  j["nonunique"] = s.nonunique;
  j["nnls_iterations"] = s.nnls_iterations;
  j["verification"] = check_json(v);
  bool truth = s.feasible && v.is_parseval;
  if (p.c) {
    Json given = check_json(verify_scaling(p.frame, k, Scaling(*p.c), o.tol));
    given["scaling"] = *p.c;
    j["provided_scaling"] = given;
  }
  return {j, truth};
}

CommandOutcome piecewise_check(const ProblemFile& p, const RunOptions& o) {
  const PiecewiseCheckReport r = check_piecewise(p.frame, p.k_operator(), piecewise_from(p, "piecewise-check"), o.tol);
  return {piecewise_json(r), r.is_kps};
}

CommandOutcome piecewise_build(const ProblemFile& p, const RunOptions& o) {
  const Projection proj(require_field(p.p, "P", "piecewise-build"));
  std::vector<std::size_t> idx;
  for (std::size_t i : require_field(p.index_set, "index_set", "piecewise-build")) idx.push_back(i - 1);
  const KOperator k = p.k_operator();
  Json j;
  try {
    const DisjointBuild built = build_disjoint_piecewise(p.frame, k, proj, idx, o.tol);
    const PiecewiseCheckReport r = check_piecewise(p.frame, k, built.scaling, o.tol);
    j["feasible"] = true;
    j["a"] = built.scaling.a;
    j["b"] = built.scaling.b;
    j["x_piece_residual"] = built.x_piece.residual;
    j["y_piece_residual"] = built.y_piece.residual;
    j["check"] = piecewise_json(r);
    return {j, r.is_kps};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InfeasiblePiece) throw;
    j["feasible"] = false;
    j["reason"] = e.what();
    return {j, false};
  }
}

CommandOutcome vi_solve(const ProblemFile& p, const RunOptions& o) {
  const Vec& f0 = require_field(p.f0, "f0", "vi-solve");
  Mat lambda = p.lambda ? *p.lambda : frame_operator(p.frame);
  const VIProblem problem(BilinearForm::from_matrix(std::move(lambda)), p.convex_set.value_or(ConvexSet{}), f0,
                          p.k_operator());
  const ViOptions vo{o.tol, o.max_iter, o.seed, 100};
  const bool symmetric = problem.form.symmetric;
  const VISolveResult r = symmetric ? minimize_symmetric(problem, vo) : solve_vi(problem, vo);
  Json j;
  j["method"] = symmetric ? "minimize_symmetric" : "solve_vi";
  j["convex_set"] = std::string(problem.set.name());
  j["alpha"] = problem.form.alpha;
  j["beta"] = problem.form.beta;
  j["symmetric"] = symmetric;
  j["u0"] = r.u0;
  j["iterations"] = r.iterations;
  j["gamma"] = r.gamma;
  j["contraction_rho"] = r.contraction_rho;
  j["final_step_norm"] = r.final_step_norm;
  j["max_step_ratio"] = r.max_step_ratio;
  j["error_bound"] = r.error_bound;
  j["vi_certificate"] = certificate_json(r.vi_certificate);
  bool truth = r.vi_certificate.ok;
  if (r.j_value) j["j_value"] = *r.j_value;
  if (r.minimality) {
    j["minimality"] = certificate_json(*r.minimality);
    truth = truth && r.minimality->ok;
  }
  return {j, truth};
}

CommandOutcome bounds(const ProblemFile& p, const RunOptions& o) {
  const Vec& f0 = require_field(p.f0, "f0", "bounds");
  const BoundsReport r = bounds_report(p.frame, p.k_operator(), f0, ViOptions{o.tol, o.max_iter, o.seed, 100});
  Json j;
  j["lower"] = r.lower;
  j["j_min"] = r.j_min;
  j["upper"] = r.upper;
  j["holds"] = r.holds;
  j["j_closed_form"] = r.j_closed_form;
  j["lower_A"] = r.frame_lower_A;
  j["upper_B"] = r.frame_upper_B;
  j["kstar_f0_norm"] = r.kstar_f0_norm;
  j["upper_squared_variant"] = r.upper_squared_variant;
  j["iterations"] = r.iterations;
  return {j, r.holds};
}

struct FileRun {
  std::string out;
  std::string err;
  int code = kExitTrue;
};

struct CliArgs {
  std::string command;
  std::vector<std::string> files;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::string output = "text";
  int jobs = 1;
  bool timing = false;
};

RunOptions resolve(const CliArgs& args, const ProblemOptions& file) {
  RunOptions o;
  o.tol = args.tol.value_or(file.tol.value_or(o.tol));
  o.max_iter = args.max_iter.value_or(file.max_iter.value_or(o.max_iter));
  o.seed = args.seed.value_or(file.seed.value_or(o.seed));
  return o;
}

FileRun run_file(const CliArgs& args, const std::string& file) {
  const auto start = std::chrono::steady_clock::now();
  Json report;
  report["command"] = args.command;
  report["input"] = file;
  FileRun run;
  try {
    const std::string bytes = read_file(file);
    report["input_digest"] = digest(bytes);
    const ProblemFile problem = parse_problem_text(bytes);
    const RunOptions o = resolve(args, problem.options);
    Json opts;
    opts["tol"] = o.tol;
    opts["max_iter"] = o.max_iter;
    opts["seed"] = o.seed;
    report["options"] = opts;
    const CommandOutcome outcome = execute(args.command, problem, o);
    run.code = outcome.truth ? kExitTrue : kExitFalse;
    report["status"] = outcome.truth ? "true" : "false";
    report["exit_code"] = run.code;
    report["result"] = outcome.result;
  } catch (const Error& e) {
    run.code = e.kind() == ErrorKind::Numerical ? kExitNumericalFailure : kExitInputError;
    report["status"] = run.code == kExitInputError ? "input_error" : "numerical_failure";
    report["exit_code"] = run.code;
    Json err;
    err["code"] = std::string(to_string(e.code()));
    err["message"] = e.what();
    if (const auto* mi = dynamic_cast<const MaxIterError*>(&e)) {
      err["iterations"] = mi->iterations();
      err["last_step_norm"] = mi->last_step_norm();
      err["error_bound"] = mi->error_bound();
    }
    report["error"] = err;
    run.err = file + ": " + e.what() + "\n";
  }
  if (args.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report["wall_time_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  run.out = args.output == "json" ? format_json(report) : format_text(report);
  return run;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"analyze",         "parseval", "scale",  "piecewise-check",
                                                 "piecewise-build", "vi-solve", "bounds"};
  return names;
}

CommandOutcome execute(const std::string& command, const ProblemFile& problem, const RunOptions& opts) {
  if (command == "analyze") return analyze(problem);
  if (command == "parseval") return parseval(problem, opts);
  if (command == "scale") return scale(problem, opts);
  if (command == "piecewise-check") return piecewise_check(problem, opts);
  if (command == "piecewise-build") return piecewise_build(problem, opts);
  if (command == "vi-solve") return vi_solve(problem, opts);
  if (command == "bounds") return bounds(problem, opts);
  throw Error(ErrorCode::UsageError, "unknown subcommand " + command);
}

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"K-frame toolkit: bounds, Parseval and scalability checks, piecewise scalings, VI solves",
               "kframekit"};
  app.require_subcommand(1);
  CliArgs args;
  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"analyze", "frame operators and optimal K-frame bounds"},
      {"parseval", "check S = KKᵀ"},
      {"scale", "solve for nonnegative weights making the frame a Parseval K-frame"},
      {"piecewise-check", "check a piecewise (P, a, b) scaling"},
      {"piecewise-build", "build a disjoint piecewise scaling from an index set"},
      {"vi-solve", "projected contraction solve of the variational inequality"},
      {"bounds", "sandwich bounds on min J for σ(u, v) = ⟨Su, v⟩"},
  };
  for (const auto& [name, desc] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("files", args.files, "problem files (JSON)")->required();
    sub->add_option("--tol", args.tol, "tolerance (default 1e-9)")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", args.max_iter, "iteration cap (default 10000)")->check(CLI::PositiveNumber);
    sub->add_option("--output", args.output, "report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--seed", args.seed, "seed for sampled certificates (default 42)");
    sub->add_option("--jobs", args.jobs, "problem files processed in parallel")->check(CLI::PositiveNumber);
    sub->add_flag("--timing", args.timing, "add wall time to the report");
    sub->callback([&args, name = name] { args.command = name; });
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitTrue;
  } catch (const CLI::ParseError& e) {
    err << "kframekit: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  std::vector<FileRun> runs(args.files.size());
  const int workers = std::max(1, std::min<int>(args.jobs, static_cast<int>(args.files.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < args.files.size(); ++i) runs[i] = run_file(args, args.files[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < args.files.size(); i = next++) runs[i] = run_file(args, args.files[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  int code = kExitTrue;
  for (const FileRun& r : runs) {
    out << r.out;
    err << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

}  // namespace kframe::io
