#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geomflow/geometry.hpp"
#include "geomflow/metrics.hpp"
#include "geomflow/schemes.hpp"
#include "geomflow/shapes.hpp"

namespace geomflow {

struct ReferenceSpec {
  ShapeSpec shape;
  FlowKind flow = FlowKind::CSF;
  std::size_t n_ref = 0;
  double tau_ref = 0.0;
  double t_end = 0.0;
  double mesh_ratio_threshold = kDefaultMeshRatioThreshold;
  InitMode init_mode = InitMode::KappaFormula;
};

/// Cache directory from GEOMFLOW_CACHE_DIR, if set and non-empty.
std::optional<std::filesystem::path> cache_dir_from_env();

/// File name of a cached reference, unique per (shape, flow, N_ref, tau_ref, T).
std::string reference_cache_key(const ReferenceSpec& spec);

/// True when the reference is the exact shrinking circle (CSF from a circle).
bool has_exact_reference(const ShapeSpec& shape, FlowKind flow);

/// Curve at exactly t = T. CSF from a circle returns the exact shrinking circle
/// sampled with N_ref nodes; otherwise a BGN2 run with (N_ref, tau_ref) whose
/// result is stored in cache_dir when given. Cache access is serialized within
/// the process.
PolygonalCurve reference_solution(const ReferenceSpec& spec,
                                  const std::optional<std::filesystem::path>& cache_dir);

struct ConvergenceReport {
  MetricKind metric = MetricKind::Manifold;
  std::vector<double> taus;
  std::vector<double> errors;
  std::vector<double> orders;
  std::vector<double> runtimes;
  /// Set when a level failed; the columns stop before that level.
  bool partial = false;
  std::string failure;
};

/// order_k = log2(E_k / E_{k+1}).
std::vector<double> convergence_orders(const std::vector<double>& errors);

struct StudyConfig {
  ShapeSpec shape = shape::Ellipse{};
  FlowKind flow = FlowKind::CSF;
  SchemeKind scheme = SchemeKind::BGN2;
  std::vector<MetricKind> metrics{MetricKind::Manifold};
  double tau0 = 1.0 / 40.0;
  std::size_t levels = 4;
  std::size_t n = 2000;
  double t_end = 0.25;
  double mesh_ratio_threshold = kDefaultMeshRatioThreshold;
  InitMode init_mode = InitMode::KappaFormula;
  /// 0 selects N.
  std::size_t n_ref = 0;
  /// 0 selects tau_min / 8.
  double tau_ref = 0.0;
  std::optional<std::filesystem::path> cache_dir;
  /// Run ladder levels concurrently when more than one hardware thread exists.
  bool parallel = true;
};

/// Desk-scale defaults for the given study, or the large-mesh parameters
/// (N = N_ref = 10000, tau_ref = 1/20480) when large_mesh is set.
StudyConfig default_study(bool large_mesh);

/// One report per requested metric, all measured on the same runs.
std::vector<ConvergenceReport> convergence_study(const StudyConfig& cfg);
ConvergenceReport convergence_study(const StudyConfig& cfg, MetricKind metric);

struct DiagnosticsSeries {
  std::vector<std::size_t> steps;
  std::vector<double> times;
  std::vector<double> rel_area_loss;   ///< (A^m - A^0) / A^0
  std::vector<double> norm_perimeter;  ///< L^m / L^0
  std::vector<double> mesh_ratio;
  std::vector<double> energy;
  std::vector<std::size_t> mr_count;
  std::vector<bool> regularized;

  std::size_t size() const { return times.size(); }
};

/// Observer that fills a DiagnosticsSeries; must outlive the run.
class DiagnosticsRecorder {
 public:
  Observer observer();
  const DiagnosticsSeries& series() const { return series_; }

 private:
  void record(const StepRecord& r);

  DiagnosticsSeries series_;
  double area0_ = 0.0;
  double perimeter0_ = 0.0;
};

struct CpuRow {
  SchemeKind scheme = SchemeKind::BGN2;
  std::size_t n = 0;
  double tau = 0.0;
  std::size_t steps = 0;
  double t_realized = 0.0;
  double manifold = 0.0;
  double hausdorff = 0.0;
  double seconds = 0.0;
};

struct CpuConfig {
  ShapeSpec shape = shape::Circle{};
  FlowKind flow = FlowKind::CSF;
  std::vector<SchemeKind> schemes{SchemeKind::BGN1, SchemeKind::BGN2};
  std::vector<std::size_t> n_values{160, 320, 640, 1280};
  /// tau = tau_factor / N
  double tau_factor = 0.5;
  double t_end = 0.05;
  double mesh_ratio_threshold = kDefaultMeshRatioThreshold;
  /// Reference resolution as a multiple of N: the exact circle is sampled with
  /// exact_ref_factor * N nodes, BGN2 references use ref_factor * N nodes and
  /// tau = tau_factor / N_ref.
  std::size_t exact_ref_factor = 64;
  std::size_t ref_factor = 4;
  std::optional<std::filesystem::path> cache_dir;
};

/// Rows ordered by scheme, then N. The step count is T / tau rounded down and
/// the realized final time is reported.
std::vector<CpuRow> cpu_comparison(const CpuConfig& cfg);

/// CSV with columns tau,error,order,seconds (order empty on the last row).
std::string format_report_csv(const ConvergenceReport& report);
std::string format_report_json(const ConvergenceReport& report);
/// CSV with columns t,dA,L_ratio,Psi,mr_count.
std::string format_diagnostics_csv(const DiagnosticsSeries& series);
/// CSV with columns scheme,N,tau,T,E_M,E_H,seconds.
std::string format_cpu_csv(const std::vector<CpuRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace geomflow
