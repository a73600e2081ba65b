#include "geomflow/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace geomflow {

namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::Index kap(std::size_t j) { return static_cast<Eigen::Index>(3 * j); }
Eigen::Index xpos(std::size_t j) { return static_cast<Eigen::Index>(3 * j + 1); }
Eigen::Index ypos(std::size_t j) { return static_cast<Eigen::Index>(3 * j + 2); }

void require_wellposed(const PolygonalCurve& curve) {
  if (const auto report = check_wellposed(curve.nodes()); !report.ok()) {
    throw WellPosednessViolation(report.violated_condition, report.detail);
  }
}

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument(fmt::format("time step must be positive, got {}", tau));
  }
}

Eigen::VectorXd coordinate(const PolygonalCurve& c, bool y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) v[static_cast<Eigen::Index>(j)] = y ? c[j].y : c[j].x;
  return v;
}

// Left-hand side shared by BGN1 and (scaled) BGN2 on the polygon the
// operators were assembled on.
BlockSystem assemble_lhs(FlowKind flow, const AssembledOperators& ops, double tau) {
  const std::size_t n = ops.size();
  const auto dim = static_cast<Eigen::Index>(3 * n);
  std::vector<Triplet> t;
  t.reserve(13 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    const std::size_t prev = (j + n - 1) % n;
    const auto jj = static_cast<Eigen::Index>(j);
    const double d = ops.stiffness_diag[jj];
    const double up = ops.stiffness_upper[jj];
    const double lo = ops.stiffness_upper[static_cast<Eigen::Index>(prev)];
    const Vec2 nm = ops.normal[j];

    if (flow == FlowKind::SDF) {
      t.emplace_back(kap(j), kap(j), d);
      t.emplace_back(kap(j), kap(next), up);
      t.emplace_back(kap(j), kap(prev), lo);
    } else {
      t.emplace_back(kap(j), kap(j), ops.mass[jj]);
    }
    t.emplace_back(kap(j), xpos(j), nm.x / tau);
    t.emplace_back(kap(j), ypos(j), nm.y / tau);

    t.emplace_back(xpos(j), kap(j), nm.x);
    t.emplace_back(xpos(j), xpos(j), -d);
    t.emplace_back(xpos(j), xpos(next), -up);
    t.emplace_back(xpos(j), xpos(prev), -lo);

    t.emplace_back(ypos(j), kap(j), nm.y);
    t.emplace_back(ypos(j), ypos(j), -d);
    t.emplace_back(ypos(j), ypos(next), -up);
    t.emplace_back(ypos(j), ypos(prev), -lo);
  }
  BlockSystem s;
  s.matrix.resize(dim, dim);
  s.matrix.setFromTriplets(t.begin(), t.end());
  s.matrix.makeCompressed();
  s.rhs = Eigen::VectorXd::Zero(dim);
  if (flow == FlowKind::APCSF) {
    // -(kappa, 1)^h (1, phi_i)^h / (1, 1)^h
    RankOneTerm r;
    r.u = Eigen::VectorXd::Zero(dim);
    for (std::size_t j = 0; j < n; ++j) r.u[kap(j)] = ops.mass[static_cast<Eigen::Index>(j)];
    r.v = r.u;
    r.scale = -1.0 / ops.mass.sum();
    s.rank1 = std::move(r);
  }
  return s;
}

CurveState unpack(const Eigen::VectorXd& sol, std::size_t n) {
  std::vector<Vec2> nodes(n);
  Eigen::VectorXd kappa(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    nodes[j] = {sol[xpos(j)], sol[ypos(j)]};
    kappa[static_cast<Eigen::Index>(j)] = sol[kap(j)];
  }
  return {PolygonalCurve(std::move(nodes), Orientation::Keep), NodalField{std::move(kappa)}};
}

CurveState solve_system(const BlockSystem& system, std::size_t n, DirectSolver* solver) {
  Eigen::VectorXd sol;
  if (solver) {
    sol = solver->solve(system);
  } else {
    DirectSolver local;
    sol = local.solve(system);
  }
  return unpack(sol, n);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '-' || c == '_'; }), s.end());
  return s;
}

}  // namespace

WellPosednessReport check_wellposed(std::span<const Vec2> nodes) {
  WellPosednessReport report;
  const std::size_t n = nodes.size();
  if (n < 3) {
    report.violated_condition = 1;
    report.detail = fmt::format("only {} nodes", n);
    return report;
  }
  std::vector<Vec2> h(n);
  std::size_t longest = 0;
  for (std::size_t j = 0; j < n; ++j) {
    h[j] = nodes[j] - nodes[(j + n - 1) % n];
    if (norm(h[j]) > norm(h[longest])) longest = j;
  }
  const double lref = norm(h[longest]);
  bool spans = false;
  if (lref > 0.0) {
    for (std::size_t j = 0; j < n && !spans; ++j) {
      spans = std::abs(cross(h[longest], h[j])) > kParallelTolerance * lref * norm(h[j]);
    }
  }
  if (!spans) {
    report.violated_condition = 1;
    report.detail = "all edge vectors are parallel";
    return report;
  }
  const double threshold = degenerate_edge_threshold(nodes);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(norm(h[j]) > threshold)) {
      report.violated_condition = 2;
      report.detail = fmt::format("edge {} has length {:.3g} (threshold {:.3g})", j, norm(h[j]), threshold);
      return report;
    }
  }
  return report;
}

std::string to_string(FlowKind flow) {
  switch (flow) {
    case FlowKind::CSF: return "csf";
    case FlowKind::APCSF: return "apcsf";
    case FlowKind::SDF: return "sdf";
  }
  return "?";
}

std::string to_string(SchemeKind scheme) { return scheme == SchemeKind::BGN1 ? "bgn1" : "bgn2"; }

std::string to_string(InitMode mode) {
  return mode == InitMode::KappaFormula ? "kappa-formula" : "double-bgn1";
}

FlowKind parse_flow(const std::string& text) {
  const std::string s = lower(text);
  if (s == "csf") return FlowKind::CSF;
  if (s == "apcsf") return FlowKind::APCSF;
  if (s == "sdf") return FlowKind::SDF;
  throw InvalidArgument("unknown flow '" + text + "' (expected csf, apcsf or sdf)");
}

SchemeKind parse_scheme(const std::string& text) {
  const std::string s = lower(text);
  if (s == "bgn1") return SchemeKind::BGN1;
  if (s == "bgn2") return SchemeKind::BGN2;
  throw InvalidArgument("unknown scheme '" + text + "' (expected bgn1 or bgn2)");
}

InitMode parse_init_mode(const std::string& text) {
  const std::string s = lower(text);
  if (s == "kappaformula" || s == "kappa") return InitMode::KappaFormula;
  if (s == "doublebgn1" || s == "double") return InitMode::DoubleBGN1;
  throw InvalidArgument("unknown init mode '" + text + "' (expected kappa-formula or double-bgn1)");
}

void validate(const SchemeConfig& cfg) {
  require_tau(cfg.tau);
  if (!(cfg.t_end >= cfg.tau) || !std::isfinite(cfg.t_end)) {
    throw InvalidArgument(fmt::format("final time {} must be at least tau = {}", cfg.t_end, cfg.tau));
  }
  if (!(cfg.mesh_ratio_threshold > 1.0)) {
    throw InvalidArgument(fmt::format("mesh ratio threshold must exceed 1, got {}", cfg.mesh_ratio_threshold));
  }
  if (cfg.n_nodes < 3) throw InvalidArgument(fmt::format("need at least 3 nodes, got {}", cfg.n_nodes));
  const double steps = cfg.t_end / cfg.tau;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw InvalidArgument(
        fmt::format("final time {} is not an integer multiple of tau = {}", cfg.t_end, cfg.tau));
  }
}

std::size_t step_count(const SchemeConfig& cfg) {
  validate(cfg);
  return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.tau));
}

BlockSystem bgn1_system(FlowKind flow, const PolygonalCurve& curve, double tau) {
  require_tau(tau);
  const AssembledOperators ops = assemble(curve);
  BlockSystem s = assemble_lhs(flow, ops, tau);
  for (std::size_t j = 0; j < curve.size(); ++j) s.rhs[kap(j)] = dot(ops.normal[j], curve[j]) / tau;
  return s;
}

BlockSystem bgn2_system(FlowKind flow, const SchemeState& state, double tau) {
  require_tau(tau);
  const PolygonalCurve& curr = state.curr.curve;
  const PolygonalCurve& prev = state.prev.curve;
  const Eigen::VectorXd& kprev = state.prev.kappa.values;
  const std::size_t n = curr.size();
  if (prev.size() != n || static_cast<std::size_t>(kprev.size()) != n) {
    throw SizeMismatch(fmt::format("history levels have sizes {}, {} and {}", prev.size(), n, kprev.size()));
  }
  const AssembledOperators ops = assemble(curr);
  BlockSystem s = assemble_lhs(flow, ops, tau);

  const Eigen::VectorXd pk = flow == FlowKind::SDF ? ops.apply_stiffness(kprev)
                                                   : Eigen::VectorXd(ops.mass.cwiseProduct(kprev));
  const Eigen::VectorXd ax = ops.apply_stiffness(coordinate(prev, false));
  const Eigen::VectorXd ay = ops.apply_stiffness(coordinate(prev, true));
  double mean = 0.0;
  if (flow == FlowKind::APCSF) mean = ops.mass.dot(kprev) / ops.mass.sum();
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const Vec2 nm = ops.normal[j];
    s.rhs[kap(j)] = dot(nm, prev[j]) / tau - pk[jj] + mean * ops.mass[jj];
    s.rhs[xpos(j)] = -nm.x * kprev[jj] + ax[jj];
    s.rhs[ypos(j)] = -nm.y * kprev[jj] + ay[jj];
  }
  return s;
}

CurveState bgn1_step(FlowKind flow, const PolygonalCurve& curve, double tau, DirectSolver* solver) {
  require_wellposed(curve);
  return solve_system(bgn1_system(flow, curve, tau), curve.size(), solver);
}

CurveState bgn2_step(FlowKind flow, const SchemeState& state, double tau, DirectSolver* solver) {
  require_wellposed(state.curr.curve);
  return solve_system(bgn2_system(flow, state, tau), state.curr.curve.size(), solver);
}

RunAborted::RunAborted(std::size_t step, const std::string& cause,
                       std::shared_ptr<const SchemeState> state)
    : Error(fmt::format("run aborted at step {}: {}", step, cause)), step_(step), state_(std::move(state)) {}

namespace {

class Runner {
 public:
  Runner(const SchemeConfig& cfg, std::span<const Observer> observers)
      : cfg_(cfg), observers_(observers) {}

  SchemeState execute(const PolygonalCurve& x0) {
    const std::size_t steps = step_count(cfg_);
    if (x0.size() != cfg_.n_nodes) {
      throw InvalidArgument(fmt::format("initial curve has {} nodes, config says {}", x0.size(), cfg_.n_nodes));
    }
    return cfg_.scheme == SchemeKind::BGN1 ? run_bgn1(x0, steps) : run_bgn2(x0, steps);
  }

  SchemeState start(const PolygonalCurve& x0, std::size_t steps) {
    const FlowKind flow = cfg_.flow;
    if (cfg_.init_mode == InitMode::KappaFormula) {
      CurveState s0 = guarded(0, [&] { return CurveState{x0, discrete_curvature(x0)}; });
      deliver(0, s0.curve, &s0.kappa, false);
      CurveState s1 = guarded(0, [&] { return bgn1_step(flow, x0, cfg_.tau, &solver_); });
      return SchemeState{std::move(s0), std::move(s1), 1, cfg_.tau, {}};
    }
    deliver(0, x0, nullptr, false);
    CurveState s1 = guarded(0, [&] { return bgn1_step(flow, x0, cfg_.tau, &solver_); });
    if (steps < 2) {
      CurveState s0 = guarded(0, [&] { return CurveState{x0, discrete_curvature(x0)}; });
      return SchemeState{std::move(s0), std::move(s1), 1, cfg_.tau, {}};
    }
    deliver(1, s1.curve, &s1.kappa, false);
    CurveState s2 = guarded(1, [&] { return bgn1_step(flow, s1.curve, cfg_.tau, &solver_); });
    return SchemeState{std::move(s1), std::move(s2), 2, 2 * cfg_.tau, {}};
  }

 private:
  SchemeState run_bgn1(const PolygonalCurve& x0, std::size_t steps) {
    // A BGN1 run keeps its last two levels in the same state layout.
    CurveState s0{x0, NodalField{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x0.size()))}};
    deliver(0, x0, nullptr, false);
    SchemeState state{s0, s0, 0, 0.0, {}};
    for (std::size_t m = 0; m < steps; ++m) {
      CurveState next = guarded(m, [&] { return bgn1_step(cfg_.flow, state.curr.curve, cfg_.tau, &solver_); },
                                &state);
      state.prev = std::move(state.curr);
      state.curr = std::move(next);
      state.step = m + 1;
      state.time = static_cast<double>(m + 1) * cfg_.tau;
      deliver(state.step, state.curr.curve, &state.curr.kappa, false);
    }
    return state;
  }

  SchemeState run_bgn2(const PolygonalCurve& x0, std::size_t steps) {
    SchemeState state = start(x0, steps);
    while (state.step < steps) {
      bool regularized = false;
      const double before = mesh_ratio(state.curr.curve);
      if (before > cfg_.mesh_ratio_threshold) {
        state.curr = guarded(state.step, [&] {
          return bgn1_step(cfg_.flow, state.prev.curve, cfg_.tau, &solver_);
        }, &state);
        state.mr_events.push_back({state.step, before, mesh_ratio(state.curr.curve)});
        mr_count_ = state.mr_events.size();
        regularized = true;
      }
      deliver(state.step, state.curr.curve, &state.curr.kappa, regularized);
      CurveState next = guarded(state.step, [&] { return bgn2_step(cfg_.flow, state, cfg_.tau, &solver_); },
                                &state);
      state.prev = std::move(state.curr);
      state.curr = std::move(next);
      state.step += 1;
      state.time = static_cast<double>(state.step) * cfg_.tau;
    }
    deliver(state.step, state.curr.curve, &state.curr.kappa, false);
    return state;
  }

  template <class F>
  CurveState guarded(std::size_t step, F&& f, const SchemeState* state = nullptr) {
    try {
      return f();
    } catch (const Error& e) {
      std::shared_ptr<const SchemeState> snap;
      if (state) snap = std::make_shared<const SchemeState>(*state);
      throw RunAborted(step, e.what(), std::move(snap));
    }
  }

  void deliver(std::size_t step, const PolygonalCurve& curve, const NodalField* kappa, bool regularized) {
    if (observers_.empty()) return;
    StepDiagnostics d;
    d.mesh_ratio = mesh_ratio(curve);
    d.area = enclosed_area(curve);
    d.perimeter = perimeter(curve);
    d.energy = energy(curve);
    d.regularized = regularized;
    d.mr_count = mr_count_;
    const StepRecord record{step, static_cast<double>(step) * cfg_.tau, curve, kappa, d};
    for (const auto& obs : observers_) obs(record);
  }

  SchemeConfig cfg_;
  std::span<const Observer> observers_;
  DirectSolver solver_;
  std::size_t mr_count_ = 0;
};

}  // namespace

SchemeState initialize(const PolygonalCurve& initial, const SchemeConfig& cfg) {
  const std::size_t steps = step_count(cfg);
  Runner runner(cfg, {});
  return runner.start(initial, steps);
}

SchemeState initialize(const ShapeSpec& shape, const SchemeConfig& cfg) {
  validate(cfg);
  return initialize(equidistributed_sample(shape, cfg.n_nodes), cfg);
}

SchemeState run(const PolygonalCurve& initial, const SchemeConfig& cfg, std::span<const Observer> observers) {
  Runner runner(cfg, observers);
  return runner.execute(initial);
}

SchemeState run(const ShapeSpec& shape, const SchemeConfig& cfg, std::span<const Observer> observers) {
  validate(cfg);
  return run(equidistributed_sample(shape, cfg.n_nodes), cfg, observers);
}

}  // namespace geomflow
