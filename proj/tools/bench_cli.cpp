#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "adi/care.hpp"
#include "adi/lyap.hpp"
#include "adi/matcore.hpp"
#include "adi/matrix_market.hpp"
#include "adi/oracle.hpp"
#include "adi/probgen.hpp"
#include "adi/run_record.hpp"
#include "adi/shifts.hpp"
#include "adi/types.hpp"

namespace {

using adi::CareProblem;
using adi::DenseMatrix;
using adi::Family;
using adi::Index;
using adi::LyapProblem;
using adi::RunRecord;
using adi::SparseMatrix;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

Family parse_family(const std::string& name) {
  if (name == "lyap251") return Family::Lyap251;
  if (name == "lyap252") return Family::Lyap252;
  if (name == "care341") return Family::Care341;
  if (name == "care342") return Family::Care342;
  if (name == "random") return Family::RandomPositiveReal;
  throw CLI::ValidationError("--family", "unknown family '" + name + "'");
}

bool is_care_family(Family f) { return f == Family::Care341 || f == Family::Care342; }

// --alpha accepts a literal number or one of the named policies.
struct AlphaSpec {
  enum class Kind { Number, MaxSigma, GeomEig } kind = Kind::MaxSigma;
  double value = 0.0;
};

AlphaSpec parse_alpha(const std::string& text) {
  AlphaSpec spec;
  if (text == "maxsigma") {
    spec.kind = AlphaSpec::Kind::MaxSigma;
    return spec;
  }
  if (text == "geomeig") {
    spec.kind = AlphaSpec::Kind::GeomEig;
    return spec;
  }
  char* end = nullptr;
  spec.value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw CLI::ValidationError("--alpha", "expected a number, 'maxsigma', or 'geomeig'");
  }
  spec.kind = AlphaSpec::Kind::Number;
  return spec;
}

double resolve_alpha(const AlphaSpec& spec, const SparseMatrix<double>& F) {
  switch (spec.kind) {
    case AlphaSpec::Kind::Number:
      return spec.value;
    case AlphaSpec::Kind::MaxSigma:
      return adi::max_singular_value(F, adi::shift_sigma_options());
    case AlphaSpec::Kind::GeomEig: {
      const auto sel = adi::geometric_eig_alpha(F);
      if (!sel) {
        throw adi::SolverError("geomeig shift undefined: spectrum not real and positive");
      }
      return sel->alpha_star;
    }
  }
  throw std::logic_error("unreachable");
}

// Size lists: "64", "64,128", or a doubling range "128..1024".
std::vector<Index> parse_sizes(const std::string& text) {
  std::vector<Index> sizes;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = std::strtol(text.substr(0, dots).c_str(), nullptr, 10);
    const long hi = std::strtol(text.substr(dots + 2).c_str(), nullptr, 10);
    if (lo < 2 || hi < lo) throw CLI::ValidationError("--n", "bad range '" + text + "'");
    for (long n = lo; n <= hi; n *= 2) sizes.push_back(Index(n));
    return sizes;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const long n = std::strtol(text.substr(pos, next - pos).c_str(), nullptr, 10);
    if (n < 2) throw CLI::ValidationError("--n", "bad size in '" + text + "'");
    sizes.push_back(Index(n));
    pos = next + 1;
  }
  if (sizes.empty()) throw CLI::ValidationError("--n", "no sizes given");
  return sizes;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

void emit_records(const std::vector<RunRecord>& records, const std::string& path,
                  const std::string& format) {
  write_text(path, format == "csv" ? adi::to_csv(records) : adi::to_json(records));
}

// Shared solver knobs common to several subcommands.
struct SolveArgs {
  std::string alpha_text = "maxsigma";
  double omega = 0.015;
  std::optional<double> beta;
  double tol = 1e-12;
  Index max_iter = 50;
  std::optional<double> compress_tol;
  std::string out_path;
  std::string format = "json";
  std::string history_path;
};

void add_solve_options(CLI::App* cmd, SolveArgs& args) {
  cmd->add_option("--alpha", args.alpha_text, "shift: number, 'maxsigma', or 'geomeig'");
  cmd->add_option("--omega", args.omega, "relaxation in [0,2)");
  cmd->add_option("--beta", [&args](const std::vector<std::string>& vals) {
    args.beta = std::strtod(vals[0].c_str(), nullptr);
    return true;
  }, "second shift (two-parameter scheme)");
  cmd->add_option("--tol", args.tol, "relative residual target");
  cmd->add_option("--max-iter", args.max_iter, "iteration budget");
  cmd->add_option("--compress-tol", [&args](const std::vector<std::string>& vals) {
    args.compress_tol = std::strtod(vals[0].c_str(), nullptr);
    return true;
  }, "factor recompression tolerance (off when absent)");
  cmd->add_option("--out", args.out_path, "output file (stdout when absent)");
  cmd->add_option("--format", args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--history", args.history_path, "two-column residual-curve CSV file");
}

RunRecord solve_lyap_cell(const std::string& family_name, const LyapProblem<double>& prob,
                          const std::string& solver, const SolveArgs& args) {
  const AlphaSpec aspec = parse_alpha(args.alpha_text);
  const double alpha = resolve_alpha(aspec, prob.F);

  adi::SolveOptions<double> opts;
  opts.omega = args.omega;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  opts.compress_tol = args.compress_tol;

  RunRecord rec;
  rec.family = family_name;
  rec.n = prob.n();
  rec.p = prob.p();
  rec.solver = solver;
  rec.alpha = alpha;
  rec.omega = args.omega;
  rec.tol = args.tol;
  rec.compress_tol = args.compress_tol;

  const auto start = std::chrono::steady_clock::now();
  adi::LyapSolution<double> sol;
  if (solver == "r1adi") {
    sol = adi::r1_adi(prob, alpha, opts);
    rec.omega = 0.0;
  } else if (solver == "r2adi") {
    const double beta = args.beta ? *args.beta : alpha;
    sol = adi::r2_adi(prob, alpha, beta, opts);
    rec.beta = beta;
    rec.omega = 0.0;
  } else if (solver == "gadi") {
    opts.alpha = alpha;
    sol = adi::gadi_dense(prob, opts);
  } else if (solver == "rgadi") {
    opts.alpha = alpha;
    sol = adi::rgadi(prob, opts);
  } else {
    throw CLI::ValidationError("--solver", "unknown solver '" + solver + "'");
  }
  rec.wall_milliseconds = elapsed_ms(start);

  rec.iterations = sol.iterations;
  rec.residual_history = sol.residual_history;
  rec.width_history = sol.width_history;
  rec.converged = sol.converged;
  rec.validate();
  return rec;
}

RunRecord solve_care_cell(const std::string& family_name, const CareProblem<double>& prob,
                          const std::string& criterion, const SolveArgs& args,
                          Index inner_cap, bool fixed_inner_tol) {
  const AlphaSpec aspec = parse_alpha(args.alpha_text);

  adi::SolveOptions<double> opts;
  opts.omega = args.omega;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  opts.inner_sweep_cap = inner_cap;
  opts.adaptive_inner_tol = !fixed_inner_tol;
  opts.criterion = criterion == "feedback" ? adi::StopCriterion::FeedbackChange
                                           : adi::StopCriterion::RelativeResidual;

  RunRecord rec;
  rec.family = family_name;
  rec.n = prob.n();
  rec.p = prob.p();
  rec.m = prob.m();
  rec.solver = "kleinman_newton";
  rec.omega = args.omega;
  rec.criterion = criterion;
  rec.tol = args.tol;

  // alpha 0 in the record means the shift is recomputed per outer step.
  if (aspec.kind == AlphaSpec::Kind::Number) {
    opts.alpha = aspec.value;
    rec.alpha = aspec.value;
  } else if (aspec.kind == AlphaSpec::Kind::GeomEig) {
    throw adi::SolverError("geomeig shift is undefined for the per-step Riccati operators");
  }

  const auto start = std::chrono::steady_clock::now();
  const adi::CareSolution<double> sol =
      adi::kleinman_newton(prob, DenseMatrix<double>::Zero(prob.n(), prob.m()), opts);
  rec.wall_milliseconds = elapsed_ms(start);

  rec.iterations = sol.outer_iterations;
  rec.inner_iterations = sol.inner_iterations;
  rec.residual_history = sol.residual_history;
  rec.width_history = sol.width_history;
  rec.converged = sol.converged;
  rec.validate();
  return rec;
}

LyapProblem<double> lyap_problem_from(const std::string& family_name, Index n,
                                      std::uint64_t seed, const std::string& mtx_f,
                                      const std::string& mtx_c) {
  if (!mtx_f.empty() || !mtx_c.empty()) {
    if (mtx_f.empty() || mtx_c.empty()) {
      throw CLI::ValidationError("--mtx-f/--mtx-c", "both files are required");
    }
    LyapProblem<double> p;
    p.F = adi::read_sparse_matrix_market(mtx_f);
    p.C = adi::read_dense_matrix_market(mtx_c);
    p.validate();
    return p;
  }
  const Family fam = parse_family(family_name);
  if (is_care_family(fam)) {
    throw CLI::ValidationError("--family", "'" + family_name + "' is a Riccati family");
  }
  return adi::generate<double>({fam, n, seed}).as_lyap();
}

CareProblem<double> care_problem_from(const std::string& family_name, Index n,
                                      std::uint64_t seed, const std::string& mtx_a,
                                      const std::string& mtx_b, const std::string& mtx_c) {
  if (!mtx_a.empty() || !mtx_b.empty() || !mtx_c.empty()) {
    if (mtx_a.empty() || mtx_b.empty() || mtx_c.empty()) {
      throw CLI::ValidationError("--mtx-a/--mtx-b/--mtx-c", "all three files are required");
    }
    CareProblem<double> p;
    p.A = adi::read_sparse_matrix_market(mtx_a);
    p.B = adi::read_dense_matrix_market(mtx_b);
    p.C = adi::read_dense_matrix_market(mtx_c);
    p.validate();
    return p;
  }
  const Family fam = parse_family(family_name);
  if (!is_care_family(fam)) {
    throw CLI::ValidationError("--family", "'" + family_name + "' is not a Riccati family");
  }
  return adi::generate<double>({fam, n, seed}).as_care();
}

int run_gen(const std::string& family_name, Index n, std::uint64_t seed,
            const std::string& prefix) {
  const Family fam = parse_family(family_name);
  const auto gen = adi::generate<double>({fam, n, seed});
  std::vector<std::string> written;
  if (gen.is_lyap()) {
    const auto& p = gen.as_lyap();
    adi::write_matrix_market(prefix + "_F.mtx", p.F);
    adi::write_matrix_market(prefix + "_C.mtx", p.C);
    written = {prefix + "_F.mtx", prefix + "_C.mtx"};
  } else {
    const auto& p = gen.as_care();
    adi::write_matrix_market(prefix + "_A.mtx", p.A);
    adi::write_matrix_market(prefix + "_B.mtx", p.B);
    adi::write_matrix_market(prefix + "_C.mtx", p.C);
    written = {prefix + "_A.mtx", prefix + "_B.mtx", prefix + "_C.mtx"};
  }
  for (const auto& path : written) std::cout << path << "\n";
  return 0;
}

int run_scan_omega(const std::string& family_name, Index n, std::uint64_t seed,
                   const std::string& omegas_text, const std::string& alpha_text,
                   Index budget, const std::string& out_path) {
  const LyapProblem<double> prob = lyap_problem_from(family_name, n, seed, "", "");
  std::vector<double> omegas;
  for (const std::string& tok : split_list(omegas_text)) {
    omegas.push_back(std::strtod(tok.c_str(), nullptr));
  }
  const double alpha = resolve_alpha(parse_alpha(alpha_text), prob.F);
  const auto scan = adi::omega_scan(prob, omegas, alpha, budget);

  std::ostringstream out;
  out << "omega,residual\n";
  char buf[64];
  for (const auto& [w, res] : scan.table) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", w, res);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "omega_best,%.17g\n", scan.omega_best);
  out << buf;
  write_text(out_path, out.str());
  return 0;
}

// Oracle cross-checks at desk scale; one pass/fail line each.
int run_verify(Index n) {
  if (n > adi::kOracleMaxDim) {
    throw CLI::ValidationError("--n", "verify is capped at n = " +
                                          std::to_string(adi::kOracleMaxDim));
  }
  bool all_pass = true;
  const auto report = [&](const std::string& name, bool pass) {
    std::cout << name << (pass ? " pass" : " fail") << "\n";
    all_pass = all_pass && pass;
  };

  {  // low-rank relaxed solution vs straightened dense solve
    const auto p = adi::generate<double>({Family::Lyap251, n, 0}).as_lyap();
    const auto sol = adi::rgadi(p);
    const DenseMatrix<double> X = adi::materialize(sol.factors);
    const DenseMatrix<double> X_ref = adi::lyap_kron_solve(
        DenseMatrix<double>(p.F), DenseMatrix<double>(p.C.transpose() * p.C));
    report("lyap_oracle",
           sol.converged && (X - X_ref).norm() <= 1e-9 * (1.0 + X_ref.norm()));
  }
  {  // factored single-parameter sweeps vs their dense recurrence
    const auto p = adi::generate<double>({Family::RandomPositiveReal, n, 1}).as_lyap();
    adi::SolveOptions<double> opts;
    opts.max_iter = 5;
    opts.tol = 1e-300;
    opts.keep_iterates = true;
    const double alpha = adi::max_singular_value(p.F, adi::shift_sigma_options());
    const auto sol = adi::r1_adi(p, alpha, opts);
    const DenseMatrix<double> Fd(p.F);
    const DenseMatrix<double> Q = p.C.transpose() * p.C;
    bool ok = sol.iterates.size() == 5;
    for (Index k = 1; ok && k <= 5; ++k) {
      const DenseMatrix<double> ref = adi::adi1_dense(Fd, Q, alpha, k);
      ok = (sol.iterates[k - 1] - ref).norm() <= 1e-10 * (1.0 + ref.norm());
    }
    report("adi1_oracle", ok);

    const auto sol2 = adi::r2_adi(p, alpha, 0.5 * alpha, opts);
    bool ok2 = sol2.iterates.size() == 5;
    for (Index k = 1; ok2 && k <= 5; ++k) {
      const DenseMatrix<double> ref = adi::adi2_dense(Fd, Q, alpha, 0.5 * alpha, k);
      ok2 = (sol2.iterates[k - 1] - ref).norm() <= 1e-10 * (1.0 + ref.norm());
    }
    report("adi2_oracle", ok2);
  }
  {  // feedback driver vs exact Newton
    const auto p = adi::generate<double>({Family::Care341, n, 0}).as_care();
    const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(n, 1));
    const DenseMatrix<double> X = adi::materialize(sol.factors);
    const DenseMatrix<double> X_ref =
        adi::care_newton_exact(p, DenseMatrix<double>::Zero(n, 1));
    report("care_oracle",
           sol.converged && (X - X_ref).norm() <= 1e-8 * (1.0 + X_ref.norm()));
  }
  {  // one-step radius identity vs an assembled relaxed operator
    const Index ns = std::min<Index>(n, 8);
    const auto p = adi::generate<double>({Family::RandomPositiveReal, ns, 2}).as_lyap();
    const DenseMatrix<double> F(p.F);
    const double alpha = adi::max_singular_value(p.F, adi::shift_sigma_options());
    const double omega = 0.3;
    const auto d = adi::spectral_factors(F, alpha, omega);
    const Index N = ns * ns;
    const DenseMatrix<double> I_n = DenseMatrix<double>::Identity(ns, ns);
    const DenseMatrix<double> A1 = adi::kron(F.transpose(), I_n);
    const DenseMatrix<double> A2 = adi::kron(I_n, F.transpose());
    const DenseMatrix<double> I_N = DenseMatrix<double>::Identity(N, N);
    const DenseMatrix<double> T = (alpha * I_N + A1).inverse() * (alpha * I_N + A2).inverse() *
                                  (alpha * I_N - A2) * (alpha * I_N - A1);
    const DenseMatrix<double> T_relaxed = ((2.0 - omega) * T + omega * I_N) / 2.0;
    Eigen::EigenSolver<DenseMatrix<double>> eig(T_relaxed, false);
    const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
    report("radius_identity", std::abs(d.rho_gadi - rho) <= 1e-10);
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-equation solver bench harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a generated problem as Matrix Market files");
  std::string gen_family;
  Index gen_n = 8;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--family", gen_family, "problem family")->required();
  gen->add_option("--n", gen_n, "dimension");
  gen->add_option("--seed", gen_seed, "random-family seed");
  gen->add_option("--out", gen_out, "output path prefix")->required();

  // lyap
  auto* lyap = app.add_subcommand("lyap", "solve one Lyapunov problem");
  std::string lyap_family = "lyap251", lyap_solver = "rgadi", lyap_f, lyap_c;
  Index lyap_n = 128;
  std::uint64_t lyap_seed = 0;
  SolveArgs lyap_args;
  lyap->add_option("--family", lyap_family, "problem family");
  lyap->add_option("--n", lyap_n, "dimension");
  lyap->add_option("--seed", lyap_seed, "random-family seed");
  lyap->add_option("--solver", lyap_solver, "r1adi, r2adi, gadi, or rgadi")
      ->check(CLI::IsMember({"r1adi", "r2adi", "gadi", "rgadi"}));
  lyap->add_option("--mtx-f", lyap_f, "coefficient matrix file (Matrix Market)");
  lyap->add_option("--mtx-c", lyap_c, "factor C file (Matrix Market)");
  add_solve_options(lyap, lyap_args);

  // care
  auto* care = app.add_subcommand("care", "solve one Riccati problem by Newton iteration");
  std::string care_family = "care341", care_criterion = "res", care_a, care_b, care_c;
  Index care_n = 128, care_inner_cap = 16;
  std::uint64_t care_seed = 0;
  bool care_fixed_inner = false;
  SolveArgs care_args;
  care->add_option("--family", care_family, "problem family");
  care->add_option("--n", care_n, "dimension");
  care->add_option("--seed", care_seed, "random-family seed");
  care->add_option("--criterion", care_criterion, "stopping rule: res or feedback")
      ->check(CLI::IsMember({"res", "feedback"}));
  care->add_option("--inner-cap", care_inner_cap, "sweep cap per outer step");
  care->add_flag("--fixed-inner-tol", care_fixed_inner,
                 "solve every inner equation to --tol (study mode)");
  care->add_option("--mtx-a", care_a, "state matrix file (Matrix Market)");
  care->add_option("--mtx-b", care_b, "input matrix file (Matrix Market)");
  care->add_option("--mtx-c", care_c, "output matrix file (Matrix Market)");
  add_solve_options(care, care_args);

  // scan-omega
  auto* scan = app.add_subcommand("scan-omega", "rank relaxation candidates by final residual");
  std::string scan_family = "lyap251", scan_omegas, scan_alpha = "maxsigma", scan_out;
  Index scan_n = 128, scan_budget = 8;
  std::uint64_t scan_seed = 0;
  scan->add_option("--family", scan_family, "problem family");
  scan->add_option("--n", scan_n, "dimension");
  scan->add_option("--seed", scan_seed, "random-family seed");
  scan->add_option("--omegas", scan_omegas, "comma-separated candidates")->required();
  scan->add_option("--alpha", scan_alpha, "shift: number, 'maxsigma', or 'geomeig'");
  scan->add_option("--budget", scan_budget, "iterations per candidate");
  scan->add_option("--out", scan_out, "output file (stdout when absent)");

  // verify
  auto* verify = app.add_subcommand("verify", "run oracle cross-checks at desk scale");
  Index verify_n = 8;
  verify->add_option("--n", verify_n, "dimension (at most 48)");

  // bench
  auto* bench = app.add_subcommand("bench", "sweep sizes and emit one record per cell");
  std::string bench_family, bench_solvers = "rgadi", bench_sizes = "128..1024";
  std::uint64_t bench_seed = 0;
  SolveArgs bench_args;
  bench->add_option("--family", bench_family, "problem family")->required();
  bench->add_option("--solvers", bench_solvers, "comma-separated solver list");
  bench->add_option("--n", bench_sizes, "sizes: single, comma list, or doubling range lo..hi");
  bench->add_option("--seed", bench_seed, "random-family seed");
  add_solve_options(bench, bench_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << std::endl;
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_family, gen_n, gen_seed, gen_out);

    if (lyap->parsed()) {
      const LyapProblem<double> prob =
          lyap_problem_from(lyap_family, lyap_n, lyap_seed, lyap_f, lyap_c);
      const std::string family_name = lyap_f.empty() ? lyap_family : "file";
      const RunRecord rec = solve_lyap_cell(family_name, prob, lyap_solver, lyap_args);
      emit_records({rec}, lyap_args.out_path, lyap_args.format);
      if (!lyap_args.history_path.empty()) {
        write_text(lyap_args.history_path, adi::residual_history_csv(rec));
      }
      return 0;
    }

    if (care->parsed()) {
      const CareProblem<double> prob =
          care_problem_from(care_family, care_n, care_seed, care_a, care_b, care_c);
      const std::string family_name = care_a.empty() ? care_family : "file";
      const RunRecord rec = solve_care_cell(family_name, prob, care_criterion, care_args,
                                            care_inner_cap, care_fixed_inner);
      emit_records({rec}, care_args.out_path, care_args.format);
      if (!care_args.history_path.empty()) {
        write_text(care_args.history_path, adi::residual_history_csv(rec));
      }
      return 0;
    }

    if (scan->parsed()) {
      return run_scan_omega(scan_family, scan_n, scan_seed, scan_omegas, scan_alpha,
                            scan_budget, scan_out);
    }

    if (verify->parsed()) return run_verify(verify_n);

    if (bench->parsed()) {
      const Family fam = parse_family(bench_family);
      const std::vector<Index> sizes = parse_sizes(bench_sizes);
      const std::vector<std::string> solvers = split_list(bench_solvers);
      if (is_care_family(fam)) {
        for (const std::string& s : solvers) {
          if (s != "kn" && s != "kleinman_newton" && s != "rgadi") {
            throw CLI::ValidationError("--solvers",
                                       "Riccati families run kleinman_newton only");
          }
        }
      }
      std::vector<RunRecord> records;
      for (const Index n : sizes) {
        if (is_care_family(fam)) {
          const auto prob = adi::generate<double>({fam, n, bench_seed}).as_care();
          records.push_back(solve_care_cell(bench_family, prob, "res", bench_args, 16, false));
        } else {
          const auto prob = adi::generate<double>({fam, n, bench_seed}).as_lyap();
          for (const std::string& solver : solvers) {
            records.push_back(solve_lyap_cell(bench_family, prob, solver, bench_args));
          }
        }
      }
      emit_records(records, bench_args.out_path, bench_args.format);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: usage: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: solver: " << e.what() << std::endl;
    return 3;
  }
  return 0;
}
