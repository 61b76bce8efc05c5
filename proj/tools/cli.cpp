#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "mrms/bdf.hpp"
#include "mrms/harness.hpp"
#include "mrms/mre.hpp"
#include "mrms/problems.hpp"

namespace mrms::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOutput {
  std::string out;
  std::string svg;
  unsigned jobs = 1;
};

struct ConvergenceArgs {
  std::string dist = "uniform";
  double lmax = 100.0;
  std::vector<double> mrange{-7.0, 7.0};
  std::size_t n = 100;
  std::vector<int> p;
  int k_offset = 0;
  std::size_t steps_base = 16;
  std::size_t steps_count = 10;
  double t_end = 1.0;
  bool no_ie = false;
  bool no_cache = false;
  CommonOutput io;
};

struct HeatArgs {
  std::size_t grid = 20;
  std::size_t steps_base = 50;
  std::size_t steps_count = 6;
  std::vector<int> k{1, 2, 3, 4, 5};
  std::vector<std::string> methods{"mrms", "bdf"};
  bool no_cache = false;
  CommonOutput io;
};

struct MreArgs {
  std::string sweep;
  std::optional<double> z3;
  double eta_max = 2.0;
  std::size_t eta_count = 41;
  std::optional<std::size_t> bn;
  std::string out;
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_output_flags(CLI::App* cmd, CommonOutput& io) {
  cmd->add_option("--out", io.out, "CSV output path")->required();
  cmd->add_option("--svg", io.svg, "Optional log-log (seconds, err) chart");
  cmd->add_option("--jobs", io.jobs, "Worker threads (use 1 for timing runs)")->check(CLI::PositiveNumber);
}

int finish(const std::vector<harness::ExperimentRecord>& records, const CommonOutput& io, std::ostream& out,
           std::ostream& err) {
  harness::write_csv(records, std::filesystem::path(io.out));
  if (!io.svg.empty()) harness::write_svg(records, std::filesystem::path(io.svg));
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failed;
      err << "failed: " << harness::method_name(r.method) << "(" << r.k << "," << r.p << ") steps=" << r.steps
          << ": " << r.failure << '\n';
    }
  }
  out << "wrote " << records.size() << " rows to " << io.out << '\n';
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out, std::ostream& err) {
  EigenvalueSpec spec;
  if (a.dist == "uniform") {
    spec.kind = EigenvalueSpec::Kind::uniform;
  } else if (a.dist == "log") {
    spec.kind = EigenvalueSpec::Kind::log_spaced;
  } else {
    throw UsageError("--dist must be 'uniform' or 'log'");
  }
  if (a.p.empty()) throw UsageError("--p needs at least one order");
  for (int p : a.p) {
    if (p < 1 || p > kMaxBdfOrder) throw UsageError("--p values must lie in [1, 6] (BDF order cap)");
  }
  if (a.k_offset < 0) throw UsageError("--k-offset must be >= 0");
  if (!(a.lmax > 0.0)) throw UsageError("--lmax must be positive");
  if (a.mrange.size() != 2 || a.mrange[0] > a.mrange[1]) throw UsageError("--mrange needs <lo> <hi> with lo <= hi");
  if (a.n < 1 || a.steps_base < 1 || a.steps_count < 1) throw UsageError("--n and --steps-* must be positive");
  if (!(a.t_end > 0.0)) throw UsageError("--t-end must be positive");
  spec.n = a.n;
  spec.lambda_max = a.lmax;
  spec.m_lo = a.mrange[0];
  spec.m_hi = a.mrange[1];

  std::vector<harness::MethodSpec> methods;
  for (int p : a.p) methods.push_back(harness::MethodSpec::mrms(p + a.k_offset, p));
  if (!a.no_ie) methods.push_back(harness::MethodSpec::implicit_euler());

  const LinearProblem problem = diagonal_test_problem(spec);
  const auto records = harness::run_convergence(problem, methods, {a.steps_base, a.steps_count}, 0.0, a.t_end,
                                                {a.io.jobs, !a.no_cache});
  return finish(records, a.io, out, err);
}

int cmd_heat(const HeatArgs& a, std::ostream& out, std::ostream& err) {
  if (a.grid < 2) throw UsageError("--grid must be >= 2");
  if (a.k.empty()) throw UsageError("--k needs at least one value");
  for (int k : a.k) {
    if (k < 1 || k > kMaxBdfOrder) throw UsageError("--k values must lie in [1, 6]");
  }
  if (a.steps_base < 1 || a.steps_count < 1) throw UsageError("--steps-* must be positive");
  harness::HeatMethods which{false, false};
  for (const auto& m : a.methods) {
    if (m == "mrms") {
      which.mrms = true;
    } else if (m == "bdf") {
      which.bdf = true;
    } else {
      throw UsageError("--methods accepts mrms and bdf");
    }
  }
  if (!which.mrms && !which.bdf) throw UsageError("--methods is empty");
  const auto records =
      harness::run_heat_benchmark(a.grid, {a.steps_base, a.steps_count}, a.k, which, {a.io.jobs, !a.no_cache});
  return finish(records, a.io, out, err);
}

int cmd_mre(const MreArgs& a, std::ostream& out) {
  const bool sweep = !a.sweep.empty();
  if (sweep == a.bn.has_value()) throw UsageError("mre needs exactly one of --sweep eta or --bn <n>");

  std::ostringstream table;
  if (a.bn) {
    if (*a.bn < 2) throw UsageError("--bn needs n >= 2");
    const auto roots = mre::bn_roots(*a.bn);
    if (!roots) {
      table << "none\n";
    } else {
      table << "a_n=" << format_real(roots->first) << " b_n=" << format_real(roots->second) << '\n';
    }
  } else {
    if (a.sweep != "eta") throw UsageError("--sweep supports only 'eta'");
    if (!a.z3) throw UsageError("--sweep eta needs --z3 <real>");
    if (a.eta_count < 1 || !(a.eta_max >= 0.0)) throw UsageError("--eta-count must be >= 1, --eta-max >= 0");
    table << "eta,R_z3,R_0,R_z3_fit,R_0_fit\n";
    for (std::size_t i = 0; i < a.eta_count; ++i) {
      const double eta =
          a.eta_count == 1 ? 0.0 : a.eta_max * static_cast<double>(i) / static_cast<double>(a.eta_count - 1);
      const auto closed = mre::three_mode_response(*a.z3, eta);
      const auto fit = mre::mre_solve(mre::three_mode_instance(*a.z3, eta));
      table << format_real(eta) << ',' << format_real(closed.r_at_z3) << ',' << format_real(closed.r_at_0) << ','
            << format_real(mre::mre_R(fit, *a.z3)) << ',' << format_real(mre::mre_R(fit, 0.0)) << '\n';
    }
  }
  if (a.out.empty()) {
    out << table.str();
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open '" + a.out + "' for writing");
    f << table.str();
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal residual multistep integrators: convergence and heat benchmarks, MRE analysis", "mrms"};
  app.require_subcommand(1);

  ConvergenceArgs conv;
  auto* c = app.add_subcommand("convergence", "Convergence sweep on the diagonal stiff test problem");
  c->add_option("--dist", conv.dist, "Eigenvalue layout: uniform | log");
  c->add_option("--lmax", conv.lmax, "Uniform layout: eigenvalues on [-lmax, 0]");
  c->add_option("--mrange", conv.mrange, "Log layout: lambda_i = -10^m, m on [lo, hi]")->expected(2);
  c->add_option("--n", conv.n, "Problem dimension");
  c->add_option("--p", conv.p, "BDF orders, comma separated")->delimiter(',')->required();
  c->add_option("--k-offset", conv.k_offset, "k = p + offset");
  c->add_option("--steps-base", conv.steps_base, "Smallest step count");
  c->add_option("--steps-count", conv.steps_count, "Number of step counts, doubling from --steps-base");
  c->add_option("--t-end", conv.t_end, "Integrate on [0, t-end]");
  c->add_flag("--no-ie", conv.no_ie, "Skip the implicit Euler reference rows");
  c->add_flag("--no-cache", conv.no_cache, "Recompute every A*V column");
  add_output_flags(c, conv.io);

  HeatArgs heat;
  auto* h = app.add_subcommand("heat", "Time/error benchmark on the 2D heat equation over [0, 10]");
  h->add_option("--grid", heat.grid, "Interior grid size N (dimension N^2)");
  h->add_option("--steps-base", heat.steps_base, "Smallest step count");
  h->add_option("--steps-count", heat.steps_count, "Number of step counts, doubling from --steps-base");
  h->add_option("--k", heat.k, "Step counts k, comma separated")->delimiter(',');
  h->add_option("--methods", heat.methods, "mrms,bdf")->delimiter(',');
  h->add_flag("--no-cache", heat.no_cache, "Recompute every A*V column");
  add_output_flags(h, heat.io);

  MreArgs mre_args;
  auto* m = app.add_subcommand("mre", "Minimal residual Euler analysis");
  m->add_option("--sweep", mre_args.sweep, "Sweep parameter (eta)");
  m->add_option("--z3", mre_args.z3, "Stiff eigenvalue z3 of the three-mode instance");
  m->add_option("--eta-max", mre_args.eta_max, "Largest eta in the sweep");
  m->add_option("--eta-count", mre_args.eta_count, "Number of sweep points from eta = 0");
  m->add_option("--bn", mre_args.bn, "Report the negative roots of B_n");
  m->add_option("--out", mre_args.out, "Write the table to a file instead of stdout");

  std::vector<const char*> argv{"mrms"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*c) return cmd_convergence(conv, out, err);
    if (*h) return cmd_heat(heat, out, err);
    if (*m) return cmd_mre(mre_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mrms::cli
