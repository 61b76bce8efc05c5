#pragma once

// Fixed-step experiment drivers: convergence sweeps on problems with a
// known solution and the heat-equation time/error benchmark.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrms/problems.hpp"

namespace mrms::harness {

enum class Method { bdf, ie, mrms };

std::string_view method_name(Method m);
/// Accepts "BDF", "IE", "MRMS" (any case). Throws std::invalid_argument.
Method parse_method(std::string_view name);

struct MethodSpec {
  Method method = Method::mrms;
  int k = 1;
  int p = 1;

  static MethodSpec mrms(int k, int p) { return {Method::mrms, k, p}; }
  static MethodSpec bdf(int p) { return {Method::bdf, p, p}; }
  static MethodSpec implicit_euler() { return {Method::ie, 1, 1}; }
};

struct ExperimentRecord {
  Method method = Method::mrms;
  int k = 1;
  int p = 1;
  std::size_t steps = 0;
  double tau = 0.0;
  /// Endpoint max-norm error; NaN when the run failed.
  double err = 0.0;
  double seconds = 0.0;
  double factor_seconds = 0.0;
  /// Empty on success. Not part of the CSV schema.
  std::string failure;

  bool ok() const { return failure.empty(); }
};

/// steps_s = base * 2^s, s = 0..count-1.
struct StepSchedule {
  std::size_t base = 16;
  std::size_t count = 1;

  std::vector<std::size_t> steps() const;
};

struct RunOptions {
  /// Worker threads for independent rows. Keep 1 when timings matter.
  unsigned jobs = 1;
  bool cache_av = true;
};

/// One fixed-step run on [t0, t1] seeded from the exact solution.
/// Failures are reported in the record, never thrown.
ExperimentRecord run_single(const LinearProblem& problem, const MethodSpec& method,
                            std::size_t steps, double t0, double t1, bool cache_av = true);

std::vector<ExperimentRecord> run_convergence(const LinearProblem& problem,
                                              const std::vector<MethodSpec>& methods,
                                              const StepSchedule& schedule, double t0, double t1,
                                              const RunOptions& options = {});

struct HeatMethods {
  bool mrms = true;
  bool bdf = true;
};

/// MRMS(k, k) and/or BDF(k) for each k on [0, 10].
std::vector<ExperimentRecord> run_heat_benchmark(std::size_t grid, const StepSchedule& schedule,
                                                 const std::vector<int>& ks,
                                                 const HeatMethods& methods = {},
                                                 const RunOptions& options = {});

/// Orders rows by (method, k, steps), then p.
void sort_records(std::vector<ExperimentRecord>& records);

inline constexpr std::string_view kCsvHeader = "method,k,p,steps,tau,err,seconds,factor_seconds";

/// Header plus one row per record; reals with 17 significant digits.
void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void write_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);
std::vector<ExperimentRecord> read_csv(std::istream& in);
std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path);

/// Log-log scatter of (seconds, err), one polyline per (method, k, p).
void write_svg(const std::vector<ExperimentRecord>& records, std::ostream& out);
void write_svg(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);

struct SlopeFit {
  /// Observed order: -d log(err) / d log(steps).
  double slope = 0.0;
  std::size_t first = 0;
  std::size_t count = 0;
  /// RMS deviation of log10(err) from the fitted line.
  double rms = 0.0;
};

/// Observed order from the best-fitting stretch of the log-log curve: the
/// window of at least `min_points` consecutive entries (sorted by steps,
/// every err above `err_floor` and strictly decreasing) with the smallest
/// RMS deviation from its least-squares line. `err_floor` should sit above
/// the rounding floor.
/// Empty when no window qualifies.
std::optional<SlopeFit> asymptotic_slope(const std::vector<ExperimentRecord>& series,
                                         double err_floor, std::size_t min_points = 4);

}  // namespace mrms::harness
