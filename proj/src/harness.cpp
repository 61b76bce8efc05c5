#include "mrms/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mrms/bdf.hpp"
#include "mrms/history.hpp"
#include "mrms/stepper.hpp"

namespace mrms::harness {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::bdf:
      return "BDF";
    case Method::ie:
      return "IE";
    case Method::mrms:
      return "MRMS";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "BDF") return Method::bdf;
  if (upper == "IE") return Method::ie;
  if (upper == "MRMS") return Method::mrms;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::vector<std::size_t> StepSchedule::steps() const {
  if (base == 0) throw std::invalid_argument("StepSchedule: base must be positive");
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(base << s);
  return out;
}

ExperimentRecord run_single(const LinearProblem& problem, const MethodSpec& method,
                            std::size_t steps, double t0, double t1, bool cache_av) {
  ExperimentRecord rec;
  rec.method = method.method;
  rec.k = method.k;
  rec.p = method.p;
  rec.steps = steps;
  rec.err = std::numeric_limits<double>::quiet_NaN();
  try {
    if (steps == 0) throw std::invalid_argument("step count must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("empty integration interval");
    rec.tau = (t1 - t0) / static_cast<double>(steps);
    const auto starting = static_cast<std::size_t>(method.method == Method::mrms ? method.k : method.p);
    if (steps + 1 < starting) {
      throw std::invalid_argument("fewer grid points than starting values");
    }
    // Starting values are outside the timed region.
    const HistoryWindow history = HistoryWindow::from_exact(problem, t0, rec.tau, starting);
    const std::size_t remaining = steps + 1 - starting;

    Trajectory traj;
    if (method.method == Method::mrms) {
      MrmsConfig config{method.k, method.p, cache_av};
      traj = mrms_integrate(problem, history, config, remaining, {false, false}).trajectory;
    } else {
      traj = bdf_integrate(problem, history, rec.tau, remaining, method.p, {false});
    }
    rec.seconds = traj.total_seconds;
    rec.factor_seconds = traj.factor_seconds;
    const Vector exact = *problem.exact_at(traj.final_time);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      err = std::max(err, std::abs(traj.final_state[i] - exact[i]));
    }
    rec.err = err;
  } catch (const std::exception& e) {
    rec.failure = e.what();
    if (rec.failure.empty()) rec.failure = "integration failed";
  }
  return rec;
}

namespace {

struct Task {
  MethodSpec method;
  std::size_t steps;
};

std::vector<ExperimentRecord> run_tasks(const LinearProblem& problem, const std::vector<Task>& tasks,
                                        double t0, double t1, const RunOptions& options) {
  std::vector<ExperimentRecord> out(tasks.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      out[i] = run_single(problem, tasks[i].method, tasks[i].steps, t0, t1, options.cache_av);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          out[i] = run_single(problem, tasks[i].method, tasks[i].steps, t0, t1, options.cache_av);
        }
      });
    }
  }
  sort_records(out);
  return out;
}

}  // namespace

std::vector<ExperimentRecord> run_convergence(const LinearProblem& problem,
                                              const std::vector<MethodSpec>& methods,
                                              const StepSchedule& schedule, double t0, double t1,
                                              const RunOptions& options) {
  if (!problem.has_exact()) throw std::invalid_argument("run_convergence: problem needs an exact solution");
  std::vector<Task> tasks;
  for (const auto& m : methods) {
    for (std::size_t s : schedule.steps()) tasks.push_back({m, s});
  }
  return run_tasks(problem, tasks, t0, t1, options);
}

std::vector<ExperimentRecord> run_heat_benchmark(std::size_t grid, const StepSchedule& schedule,
                                                 const std::vector<int>& ks, const HeatMethods& methods,
                                                 const RunOptions& options) {
  const LinearProblem problem = heat2d_problem(grid);
  std::vector<MethodSpec> specs;
  for (int k : ks) {
    if (methods.mrms) specs.push_back(MethodSpec::mrms(k, k));
    if (methods.bdf) specs.push_back(MethodSpec::bdf(k));
  }
  return run_convergence(problem, specs, schedule, 0.0, 10.0, options);
}

void sort_records(std::vector<ExperimentRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return std::make_tuple(method_name(a.method), a.k, a.steps, a.p) <
           std::make_tuple(method_name(b.method), b.k, b.steps, b.p);
  });
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad real '" + s + "'");
  return v;
}

}  // namespace

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << method_name(r.method) << ',' << r.k << ',' << r.p << ',' << r.steps << ','
        << format_real(r.tau) << ',' << format_real(r.err) << ',' << format_real(r.seconds) << ','
        << format_real(r.factor_seconds) << '\n';
  }
}

void write_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header '" + line + "'");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw std::runtime_error("read_csv: expected 8 fields in '" + line + "'");
    ExperimentRecord r;
    r.method = parse_method(f[0]);
    r.k = std::stoi(f[1]);
    r.p = std::stoi(f[2]);
    r.steps = std::stoull(f[3]);
    r.tau = parse_real(f[4]);
    r.err = parse_real(f[5]);
    r.seconds = parse_real(f[6]);
    r.factor_seconds = parse_real(f[7]);
    if (std::isnan(r.err)) r.failure = "failed";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// SVG

void write_svg(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  constexpr double width = 720, height = 480, margin = 60;
  std::map<std::tuple<std::string, int, int>, std::vector<const ExperimentRecord*>> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& r : records) {
    if (!r.ok() || !(r.err > 0.0) || !(r.seconds > 0.0)) continue;
    series[{std::string(method_name(r.method)), r.k, r.p}].push_back(&r);
    xmin = std::min(xmin, std::log10(r.seconds));
    xmax = std::max(xmax, std::log10(r.seconds));
    ymin = std::min(ymin, std::log10(r.err));
    ymax = std::max(ymax, std::log10(r.err));
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"12\">log10(seconds)</text>\n";
  out << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
      << ")\" text-anchor=\"middle\" font-size=\"12\">log10(err)</text>\n";
  if (series.empty()) {
    out << "</svg>\n";
    return;
  }
  if (xmax - xmin < 1e-9) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-9) { ymin -= 0.5; ymax += 0.5; }
  auto px = [&](double s) { return margin + (std::log10(s) - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double e) {
    return height - margin - (std::log10(e) - ymin) / (ymax - ymin) * (height - 2 * margin);
  };
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::size_t idx = 0;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->steps < b->steps; });
    const char* color = palette[idx % std::size(palette)];
    const bool dashed = std::get<0>(key) != "MRMS";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\"" << (dashed ? " stroke-dasharray=\"4 3\"" : "")
        << " points=\"";
    for (const auto* r : pts) out << px(r->seconds) << ',' << py(r->err) << ' ';
    out << "\"/>\n";
    for (const auto* r : pts) {
      out << "<circle cx=\"" << px(r->seconds) << "\" cy=\"" << py(r->err) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 14.0 * static_cast<double>(idx)
        << "\" font-size=\"10\" fill=\"" << color << "\">" << std::get<0>(key) << '(' << std::get<1>(key)
        << ',' << std::get<2>(key) << ")</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

void write_svg(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_svg(records, out);
}

// ---------------------------------------------------------------------------

std::optional<SlopeFit> asymptotic_slope(const std::vector<ExperimentRecord>& series, double err_floor,
                                         std::size_t min_points) {
  std::vector<const ExperimentRecord*> pts;
  for (const auto& r : series) pts.push_back(&r);
  std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->steps < b->steps; });
  if (min_points < 2) min_points = 2;

  const auto usable = [&](std::size_t i) {
    return pts[i]->ok() && std::isfinite(pts[i]->err) && pts[i]->err > err_floor;
  };

  std::optional<SlopeFit> best;
  for (std::size_t first = 0; first + min_points <= pts.size(); ++first) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t end = first; end < pts.size() && usable(end); ++end) {
      if (end > first && !(pts[end]->err < pts[end - 1]->err)) break;
      const double x = std::log10(static_cast<double>(pts[end]->steps));
      const double y = std::log10(pts[end]->err);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      const std::size_t count = end - first + 1;
      if (count < min_points) continue;

      const double m = static_cast<double>(count);
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / m;
      double ss = 0;
      for (std::size_t i = first; i <= end; ++i) {
        const double d = std::log10(pts[i]->err) - (icpt + slope * std::log10(static_cast<double>(pts[i]->steps)));
        ss += d * d;
      }
      const SlopeFit fit{-slope, first, count, std::sqrt(ss / m)};
      // Near-ties (within 10%, or both at rounding level) go to the longer window.
      const double slack = best ? std::max(0.1 * best->rms, 1e-6) : 0.0;
      const bool better = !best || fit.rms < best->rms - slack ||
                          (fit.rms <= best->rms + slack && fit.count > best->count);
      if (better) best = fit;
    }
  }
  return best;
}

}  // namespace mrms::harness
