#include "geomflow/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <mutex>
#include <thread>
#include <variant>

#include <fmt/format.h>
#include <json.hpp>

#include "geomflow/errors.hpp"
#include "geomflow/snapshot_io.hpp"

namespace geomflow {

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

bool is_integral_ratio(double num, double den) {
  const double r = num / den;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("GEOMFLOW_CACHE_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

std::string reference_cache_key(const ReferenceSpec& spec) {
  std::string key = fmt::format("ref_{}_{}_N{}_tau{}_T{}_mr{}_{}", shape_key(spec.shape), to_string(spec.flow),
                                spec.n_ref, num(spec.tau_ref), num(spec.t_end),
                                num(spec.mesh_ratio_threshold), to_string(spec.init_mode));
  for (char& c : key) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return key + ".json";
}

bool has_exact_reference(const ShapeSpec& shape, FlowKind flow) {
  return flow == FlowKind::CSF && std::holds_alternative<shape::Circle>(shape);
}

PolygonalCurve reference_solution(const ReferenceSpec& spec,
                                  const std::optional<std::filesystem::path>& cache_dir) {
  if (has_exact_reference(spec.shape, spec.flow)) {
    return shrinking_circle(std::get<shape::Circle>(spec.shape).radius, spec.t_end, spec.n_ref);
  }
  SchemeConfig cfg;
  cfg.flow = spec.flow;
  cfg.scheme = SchemeKind::BGN2;
  cfg.tau = spec.tau_ref;
  cfg.t_end = spec.t_end;
  cfg.mesh_ratio_threshold = spec.mesh_ratio_threshold;
  cfg.init_mode = spec.init_mode;
  cfg.n_nodes = spec.n_ref;
  validate(cfg);

  std::optional<std::filesystem::path> file;
  if (cache_dir) file = *cache_dir / reference_cache_key(spec);
  if (file) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    if (std::filesystem::exists(*file)) {
      Snapshot s = read_snapshot(*file);
      if (s.curve.size() == spec.n_ref && s.time == spec.t_end) return std::move(s.curve);
    }
  }
  const SchemeState state = run(spec.shape, cfg);
  if (file) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    std::filesystem::create_directories(file->parent_path());
    write_snapshot(*file, state.curr.curve, spec.t_end);
  }
  return state.curr.curve;
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) orders.push_back(std::log2(errors[k] / errors[k + 1]));
  return orders;
}

StudyConfig default_study(bool large_mesh) {
  StudyConfig cfg;
  if (large_mesh) {
    cfg.n = 10000;
    cfg.n_ref = 10000;
    cfg.tau_ref = 1.0 / 20480.0;
  }
  return cfg;
}

std::vector<ConvergenceReport> convergence_study(const StudyConfig& cfg) {
  if (cfg.levels < 1) throw InvalidArgument("a convergence study needs at least one level");
  if (cfg.metrics.empty()) throw InvalidArgument("no metric requested");
  std::vector<double> taus(cfg.levels);
  for (std::size_t k = 0; k < cfg.levels; ++k) taus[k] = cfg.tau0 / std::ldexp(1.0, static_cast<int>(k));
  if (!is_integral_ratio(cfg.t_end, cfg.tau0)) {
    throw InvalidArgument(fmt::format("T = {} is not an integer multiple of tau0 = {}", cfg.t_end, cfg.tau0));
  }

  ReferenceSpec ref;
  ref.shape = cfg.shape;
  ref.flow = cfg.flow;
  ref.n_ref = cfg.n_ref ? cfg.n_ref : cfg.n;
  ref.tau_ref = cfg.tau_ref > 0.0 ? cfg.tau_ref : taus.back() / 8.0;
  ref.t_end = cfg.t_end;
  ref.mesh_ratio_threshold = cfg.mesh_ratio_threshold;
  ref.init_mode = cfg.init_mode;
  if (!has_exact_reference(cfg.shape, cfg.flow)) {
    for (double t : taus) {
      if (!is_integral_ratio(t, ref.tau_ref)) {
        throw InvalidArgument(fmt::format("reference step {} does not divide ladder step {}", ref.tau_ref, t));
      }
    }
  }
  const PolygonalCurve reference = reference_solution(ref, cfg.cache_dir);

  struct Level {
    std::vector<double> errors;
    double seconds = 0.0;
    std::string failure;
  };
  auto run_level = [&](double tau) {
    Level out;
    SchemeConfig sc;
    sc.flow = cfg.flow;
    sc.scheme = cfg.scheme;
    sc.tau = tau;
    sc.t_end = cfg.t_end;
    sc.mesh_ratio_threshold = cfg.mesh_ratio_threshold;
    sc.init_mode = cfg.init_mode;
    sc.n_nodes = cfg.n;
    try {
      const PolygonalCurve x0 = equidistributed_sample(cfg.shape, cfg.n);
      const auto t0 = std::chrono::steady_clock::now();
      const SchemeState state = run(x0, sc);
      out.seconds = seconds_since(t0);
      for (MetricKind m : cfg.metrics) out.errors.push_back(evaluate(m, state.curr.curve, reference));
    } catch (const Error& e) {
      out.failure = fmt::format("tau = {}: {}", num(tau), e.what());
    }
    return out;
  };

  std::vector<Level> levels;
  if (cfg.parallel && std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<Level>> jobs;
    for (double tau : taus) jobs.push_back(std::async(std::launch::async, run_level, tau));
    for (auto& j : jobs) levels.push_back(j.get());
  } else {
    for (double tau : taus) levels.push_back(run_level(tau));
  }

  std::vector<ConvergenceReport> reports(cfg.metrics.size());
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i) {
    ConvergenceReport& r = reports[i];
    r.metric = cfg.metrics[i];
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (!levels[k].failure.empty()) {
        r.partial = true;
        r.failure = levels[k].failure;
        break;
      }
      r.taus.push_back(taus[k]);
      r.errors.push_back(levels[k].errors[i]);
      r.runtimes.push_back(levels[k].seconds);
    }
    r.orders = convergence_orders(r.errors);
  }
  return reports;
}

ConvergenceReport convergence_study(const StudyConfig& cfg, MetricKind metric) {
  StudyConfig one = cfg;
  one.metrics = {metric};
  return convergence_study(one).front();
}

Observer DiagnosticsRecorder::observer() {
  return [this](const StepRecord& r) { record(r); };
}

void DiagnosticsRecorder::record(const StepRecord& r) {
  const StepDiagnostics& d = r.diagnostics;
  if (series_.times.empty()) {
    area0_ = d.area;
    perimeter0_ = d.perimeter;
  }
  series_.steps.push_back(r.step);
  series_.times.push_back(r.time);
  series_.rel_area_loss.push_back((d.area - area0_) / area0_);
  series_.norm_perimeter.push_back(d.perimeter / perimeter0_);
  series_.mesh_ratio.push_back(d.mesh_ratio);
  series_.energy.push_back(d.energy);
  series_.mr_count.push_back(d.mr_count);
  series_.regularized.push_back(d.regularized);
}

std::vector<CpuRow> cpu_comparison(const CpuConfig& cfg) {
  if (!(cfg.tau_factor > 0.0) || !(cfg.t_end > 0.0)) throw InvalidArgument("tau factor and T must be positive");
  const bool exact = has_exact_reference(cfg.shape, cfg.flow);
  std::vector<CpuRow> rows;
  for (SchemeKind scheme : cfg.schemes) {
    for (std::size_t n : cfg.n_values) {
      CpuRow row;
      row.scheme = scheme;
      row.n = n;
      row.tau = cfg.tau_factor / static_cast<double>(n);
      row.steps = static_cast<std::size_t>(std::floor(cfg.t_end / row.tau + 1e-9));
      if (row.steps < 1) throw InvalidArgument(fmt::format("T = {} is shorter than one step at N = {}", cfg.t_end, n));
      row.t_realized = static_cast<double>(row.steps) * row.tau;

      ReferenceSpec ref;
      ref.shape = cfg.shape;
      ref.flow = cfg.flow;
      ref.n_ref = (exact ? cfg.exact_ref_factor : cfg.ref_factor) * n;
      ref.tau_ref = cfg.tau_factor / static_cast<double>(ref.n_ref);
      ref.t_end = row.t_realized;
      ref.mesh_ratio_threshold = cfg.mesh_ratio_threshold;
      const PolygonalCurve reference = reference_solution(ref, cfg.cache_dir);

      SchemeConfig sc;
      sc.flow = cfg.flow;
      sc.scheme = scheme;
      sc.tau = row.tau;
      sc.t_end = row.t_realized;
      sc.mesh_ratio_threshold = cfg.mesh_ratio_threshold;
      sc.n_nodes = n;
      const PolygonalCurve x0 = equidistributed_sample(cfg.shape, n);
      const auto t0 = std::chrono::steady_clock::now();
      const SchemeState state = run(x0, sc);
      row.seconds = seconds_since(t0);
      row.manifold = manifold_distance(state.curr.curve, reference);
      row.hausdorff = hausdorff_distance(state.curr.curve, reference);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_report_csv(const ConvergenceReport& report) {
  std::string out = "tau,error,order,seconds\n";
  for (std::size_t k = 0; k < report.errors.size(); ++k) {
    const std::string order = k < report.orders.size() ? num(report.orders[k]) : "";
    out += fmt::format("{},{},{},{}\n", num(report.taus[k]), num(report.errors[k]), order, num(report.runtimes[k]));
  }
  return out;
}

std::string format_report_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["metric"] = to_string(report.metric);
  j["taus"] = report.taus;
  j["errors"] = report.errors;
  j["orders"] = report.orders;
  j["runtimes"] = report.runtimes;
  j["partial"] = report.partial;
  if (report.partial) j["failure"] = report.failure;
  return j.dump(2) + "\n";
}

std::string format_diagnostics_csv(const DiagnosticsSeries& s) {
  std::string out = "t,dA,L_ratio,Psi,mr_count\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += fmt::format("{},{},{},{},{}\n", num(s.times[k]), num(s.rel_area_loss[k]), num(s.norm_perimeter[k]),
                       num(s.mesh_ratio[k]), s.mr_count[k]);
  }
  return out;
}

std::string format_cpu_csv(const std::vector<CpuRow>& rows) {
  std::string out = "scheme,N,tau,T,E_M,E_H,seconds\n";
  for (const CpuRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(r.scheme), r.n, num(r.tau), num(r.t_realized),
                       num(r.manifold), num(r.hausdorff), num(r.seconds));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw InvalidArgument("failed to write " + path.string());
}

}  // namespace geomflow
