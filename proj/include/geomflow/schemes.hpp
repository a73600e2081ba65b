#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geomflow/errors.hpp"
#include "geomflow/fem_core.hpp"
#include "geomflow/geometry.hpp"
#include "geomflow/linsolve.hpp"
#include "geomflow/shapes.hpp"
#include "geomflow/wellposedness.hpp"

namespace geomflow {

/// Normal velocity law: CSF  V = -kappa,  APCSF  V = -kappa + <kappa>,
/// SDF  V = kappa_ss.
enum class FlowKind { CSF, APCSF, SDF };

/// BGN1: implicit Euler type, first order. BGN2: Crank-Nicolson leap-frog on
/// the current polygon, second order, with BGN1 as mesh regularization.
enum class SchemeKind { BGN1, BGN2 };

enum class InitMode {
  KappaFormula,  ///< kappa^0 by least squares, (X^1, kappa^1) by one BGN1 step
  DoubleBGN1,    ///< (X^1, kappa^1), (X^2, kappa^2) by two BGN1 steps
};

std::string to_string(FlowKind flow);
std::string to_string(SchemeKind scheme);
std::string to_string(InitMode mode);
FlowKind parse_flow(const std::string& text);
SchemeKind parse_scheme(const std::string& text);
InitMode parse_init_mode(const std::string& text);

inline constexpr double kDefaultMeshRatioThreshold = 10.0;

struct SchemeConfig {
  FlowKind flow = FlowKind::CSF;
  SchemeKind scheme = SchemeKind::BGN2;
  double tau = 0.0;
  double t_end = 0.0;
  /// Mesh regularization triggers when the mesh ratio exceeds this value;
  /// +infinity disables it.
  double mesh_ratio_threshold = kDefaultMeshRatioThreshold;
  InitMode init_mode = InitMode::KappaFormula;
  std::size_t n_nodes = 0;
};

/// Throws InvalidArgument unless tau > 0, t_end >= tau, threshold > 1, N >= 3
/// and t_end / tau is an integer (to relative precision 1e-9).
void validate(const SchemeConfig& cfg);
/// Number of uniform steps t_end / tau.
std::size_t step_count(const SchemeConfig& cfg);

struct CurveState {
  PolygonalCurve curve;
  NodalField kappa;
};

struct MeshRegularizationEvent {
  std::size_t step = 0;
  double ratio_before = 0.0;
  double ratio_after = 0.0;
};

/// Two-level history (X^{m-1}, kappa^{m-1}), (X^m, kappa^m) at t_m = m tau.
struct SchemeState {
  CurveState prev;
  CurveState curr;
  std::size_t step = 0;
  double time = 0.0;
  std::vector<MeshRegularizationEvent> mr_events;
};

/// Linear system of one BGN1 step on Gamma^m, unknowns interleaved per node as
/// (kappa_j, x_j, y_j).
BlockSystem bgn1_system(FlowKind flow, const PolygonalCurve& curve, double tau);
/// Linear system of one BGN2 step on Gamma^m = state.curr. The equations are
/// scaled by 2 so that the matrix coincides with the BGN1 matrix; all
/// m-1 terms are on the right-hand side.
BlockSystem bgn2_system(FlowKind flow, const SchemeState& state, double tau);

/// Throws WellPosednessViolation, SingularSystem or DegenerateEdge. The
/// optional solver lets a run reuse its symbolic factorization.
CurveState bgn1_step(FlowKind flow, const PolygonalCurve& curve, double tau,
                     DirectSolver* solver = nullptr);
CurveState bgn2_step(FlowKind flow, const SchemeState& state, double tau,
                     DirectSolver* solver = nullptr);

/// Initial two-level history. KappaFormula: state at m = 1; DoubleBGN1: m = 2.
SchemeState initialize(const ShapeSpec& shape, const SchemeConfig& cfg);
SchemeState initialize(const PolygonalCurve& initial, const SchemeConfig& cfg);

struct StepDiagnostics {
  double mesh_ratio = 1.0;
  double area = 0.0;
  double perimeter = 0.0;
  double energy = 0.0;
  bool regularized = false;        ///< this level was replaced by a BGN1 step
  std::size_t mr_count = 0;        ///< cumulative regularizations so far
};

/// Delivered once per accepted time level, in increasing step order. The
/// references are valid only for the duration of the callback.
struct StepRecord {
  std::size_t step;
  double time;
  const PolygonalCurve& curve;
  const NodalField* kappa;  ///< null for levels without a curvature (X^0 in DoubleBGN1 runs)
  StepDiagnostics diagnostics;
};

using Observer = std::function<void(const StepRecord&)>;

/// Raised when a run cannot continue; carries the last consistent state.
class RunAborted : public Error {
 public:
  RunAborted(std::size_t step, const std::string& cause, std::shared_ptr<const SchemeState> state);
  std::size_t step() const noexcept { return step_; }
  const SchemeState* state() const noexcept { return state_.get(); }

 private:
  std::size_t step_;
  std::shared_ptr<const SchemeState> state_;
};

/// Full time integration up to t_end. For BGN2, before each BGN2 step the
/// current level is replaced by a BGN1 step from the previous level whenever
/// its mesh ratio exceeds the threshold (checked once per step). BGN1 runs
/// never regularize. Throws RunAborted.
SchemeState run(const ShapeSpec& shape, const SchemeConfig& cfg,
                std::span<const Observer> observers = {});
SchemeState run(const PolygonalCurve& initial, const SchemeConfig& cfg,
                std::span<const Observer> observers = {});

}  // namespace geomflow
