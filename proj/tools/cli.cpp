#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "geomflow/errors.hpp"
#include "geomflow/harness.hpp"
#include "geomflow/metrics.hpp"
#include "geomflow/schemes.hpp"
#include "geomflow/shapes.hpp"
#include "geomflow/snapshot_io.hpp"

#ifndef GEOMFLOW_VERSION
#define GEOMFLOW_VERSION "0.0.0"
#endif

namespace geomflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

double parse_real(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  std::string low = s;
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  if (low == "inf" || low == "+inf" || low == "infinity" || low == "off" || low == "none") {
    return std::numeric_limits<double>::infinity();
  }
  auto number = [&](const std::string& part) {
    if (part.empty()) throw InvalidArgument("empty number in '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + text + "'");
    }
    if (used != part.size()) throw InvalidArgument("not a number: '" + text + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return number(s);
  const double p = number(s.substr(0, slash));
  const double q = number(s.substr(slash + 1));
  if (q == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
  return p / q;
}

namespace {

struct ShapeOptions {
  std::string name;
  std::string radius, ellipse_a, ellipse_b, tube_length;

  void add_to(CLI::App& app, bool required, const std::string& fallback) {
    name = fallback;
    auto* o = app.add_option("--shape", name, "Initial shape (see `geomflow shapes`)");
    if (required) o->required();
    app.add_option("--radius", radius, "Circle radius or tube cap radius");
    app.add_option("--ellipse-a", ellipse_a, "Ellipse semi-axis along x");
    app.add_option("--ellipse-b", ellipse_b, "Ellipse semi-axis along y");
    app.add_option("--tube-length", tube_length, "Length of the tube's rectangle");
  }

  ShapeSpec build() const {
    ShapeSpec spec = shape_from_name(name);
    if (auto* c = std::get_if<shape::Circle>(&spec); c && !radius.empty()) c->radius = parse_real(radius);
    if (auto* e = std::get_if<shape::Ellipse>(&spec)) {
      if (!ellipse_a.empty()) e->a = parse_real(ellipse_a);
      if (!ellipse_b.empty()) e->b = parse_real(ellipse_b);
    }
    if (auto* t = std::get_if<shape::Tube>(&spec)) {
      if (!radius.empty()) t->radius = parse_real(radius);
      if (!tube_length.empty()) t->rect_length = parse_real(tube_length);
    }
    validate(spec);
    return spec;
  }

  void echo(std::map<std::string, std::string>& cfg) const {
    cfg["shape"] = name;
    if (!radius.empty()) cfg["radius"] = radius;
    if (!ellipse_a.empty()) cfg["ellipse-a"] = ellipse_a;
    if (!ellipse_b.empty()) cfg["ellipse-b"] = ellipse_b;
    if (!tube_length.empty()) cfg["tube-length"] = tube_length;
  }
};

struct RunOptions {
  std::string flow;
  ShapeOptions shape;
  std::string scheme = "bgn2";
  std::size_t n = 0;
  std::string tau;
  std::string t_end;
  std::string n_mr = "10";
  std::string init = "kappa-formula";
  std::vector<std::string> snapshot_times;
  std::string out = "geomflow_run";
  std::string format = "csv";
};

struct ConvergeOptions {
  std::string flow = "csf";
  ShapeOptions shape;
  std::string scheme = "bgn2";
  std::vector<std::string> metrics{"manifold"};
  std::string tau0 = "1/40";
  std::size_t levels = 4;
  std::size_t n = 0;
  std::string t_end = "0.25";
  std::size_t n_ref = 0;
  std::string tau_ref;
  std::string n_mr = "10";
  std::string init = "kappa-formula";
  bool paper_scale = false;
  bool serial = false;
  std::string out = "geomflow_converge";
  std::string cache_dir;
};

struct MetricOptions {
  std::string file_a, file_b;
  std::string kind = "manifold";
  std::string resolution;
};

struct CpuOptions {
  std::string flow = "csf";
  ShapeOptions shape;
  std::vector<std::string> schemes{"bgn1", "bgn2"};
  std::vector<std::size_t> n_values{160, 320, 640, 1280};
  std::string tau_factor = "0.5";
  std::string t_end = "0.05";
  std::size_t exact_ref_factor = 64;
  std::size_t ref_factor = 4;
  std::string n_mr = "10";
  std::string out = "geomflow_cpu";
  std::string cache_dir;
};

std::string env_name(const std::string& long_name) {
  std::string e = "GEOMFLOW_";
  for (char c : long_name) e += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return e;
}

bool truthy(std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  return v == "1" || v == "true" || v == "yes" || v == "on";
}

void append_setting(std::vector<std::string>& out, const CLI::Option* opt, const std::string& name,
                    const std::vector<std::string>& values) {
  if (opt->get_type_size() == 0) {
    if (!values.empty() && truthy(values.front())) out.push_back("--" + name);
    return;
  }
  out.push_back("--" + name);
  for (const auto& v : values) out.push_back(v);
}

// Effective argument list with increasing precedence: config file, then
// GEOMFLOW_* environment variables, then the command line itself. Single
// valued options keep the last occurrence.
std::vector<std::string> layered_args(CLI::App& app, const std::vector<std::string>& raw) {
  std::vector<std::string> rest;
  std::string config;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == "--config" && i + 1 < raw.size()) {
      config = raw[++i];
    } else if (raw[i].rfind("--config=", 0) == 0) {
      config = raw[i].substr(9);
    } else {
      rest.push_back(raw[i]);
    }
  }
  const auto sub_it = std::find_if(rest.begin(), rest.end(), [](const std::string& s) { return s.empty() || s[0] != '-'; });
  if (sub_it == rest.end()) return rest;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(*sub_it);
  } catch (const CLI::OptionNotFound&) {
    return rest;
  }
  const std::string sub_name = *sub_it;
  rest.erase(sub_it);

  std::vector<std::string> layered{sub_name};
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw CLI::FileError::Missing(config);
    CLI::ConfigTOML parser;
    for (const CLI::ConfigItem& item : parser.from_config(in)) {
      if (item.name == "++" || item.name == "--") continue;
      if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub_name)) continue;
      const CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
      if (opt == nullptr) throw CLI::ConfigError::NotConfigurable(item.name);
      append_setting(layered, opt, item.name, item.inputs);
    }
  }
  for (const CLI::Option* opt : sub->get_options()) {
    for (const std::string& name : opt->get_lnames()) {
      if (name == "help") continue;
      const char* v = std::getenv(env_name(name).c_str());
      if (v == nullptr || *v == '\0') continue;
      append_setting(layered, opt, name, {v});
    }
  }
  layered.insert(layered.end(), rest.begin(), rest.end());
  return layered;
}

std::size_t parse_steps(double t, double tau, const std::string& what) {
  const double r = t / tau;
  if (!(r >= 0.0) || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
    throw InvalidArgument(fmt::format("{} = {} is not an integer multiple of tau = {}", what, t, tau));
  }
  return static_cast<std::size_t>(std::llround(r));
}

std::string toml_config(const std::map<std::string, std::string>& cfg,
                        const std::map<std::string, std::vector<std::string>>& lists) {
  std::string out;
  for (const auto& [k, v] : cfg) out += fmt::format("{} = \"{}\"\n", k, v);
  for (const auto& [k, vs] : lists) {
    out += k + " = [";
    for (std::size_t i = 0; i < vs.size(); ++i) out += fmt::format("{}\"{}\"", i ? ", " : "", vs[i]);
    out += "]\n";
  }
  return out;
}

int cmd_run(const RunOptions& o) {
  SchemeConfig cfg;
  ShapeSpec shape;
  std::set<std::size_t> snapshot_steps;
  SnapshotFormat format = SnapshotFormat::Csv;
  try {
    cfg.flow = parse_flow(o.flow);
    cfg.scheme = parse_scheme(o.scheme);
    cfg.tau = parse_real(o.tau);
    cfg.t_end = parse_real(o.t_end);
    cfg.mesh_ratio_threshold = parse_real(o.n_mr);
    cfg.init_mode = parse_init_mode(o.init);
    cfg.n_nodes = o.n;
    shape = o.shape.build();
    validate(cfg);
    const std::size_t steps = step_count(cfg);
    for (const auto& t : o.snapshot_times) {
      const std::size_t m = parse_steps(parse_real(t), cfg.tau, "snapshot time");
      if (m > steps) throw InvalidArgument(fmt::format("snapshot time {} lies beyond T", t));
      snapshot_steps.insert(m);
    }
    snapshot_steps.insert(steps);
    if (o.format == "json") {
      format = SnapshotFormat::Json;
    } else if (o.format != "csv") {
      throw InvalidArgument("snapshot format must be csv or json");
    }
  } catch (const Error& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }

  const fs::path out(o.out);
  fs::create_directories(out);
  std::vector<std::string> outputs;
  DiagnosticsRecorder recorder;
  const std::string ext = format == SnapshotFormat::Json ? "json" : "csv";
  std::vector<Observer> observers{recorder.observer(), [&](const StepRecord& r) {
                                    if (!snapshot_steps.count(r.step)) return;
                                    const fs::path p = out / fmt::format("snapshot_{:06d}.{}", r.step, ext);
                                    write_text_file(p, format_snapshot(r.curve, r.time, format));
                                    outputs.push_back(p.string());
                                  }};
  int code = kOk;
  std::string failure;
  std::size_t mr_count = 0;
  try {
    const SchemeState state = run(shape, cfg, observers);
    mr_count = state.mr_events.size();
  } catch (const RunAborted& e) {
    failure = e.what();
    code = kSolverFailure;
  } catch (const Error& e) {
    failure = fmt::format("solver failure at step 0: {}", e.what());
    code = kSolverFailure;
  }

  const fs::path diag = out / "diagnostics.csv";
  write_text_file(diag, format_diagnostics_csv(recorder.series()));
  outputs.push_back(diag.string());

  std::map<std::string, std::string> echo{{"flow", o.flow},     {"scheme", o.scheme}, {"n", std::to_string(o.n)},
                                          {"tau", o.tau},       {"t-end", o.t_end},   {"n-mr", o.n_mr},
                                          {"init", o.init},     {"out", o.out},       {"format", o.format}};
  o.shape.echo(echo);
  std::map<std::string, std::vector<std::string>> lists;
  if (!o.snapshot_times.empty()) lists["snapshot-times"] = o.snapshot_times;
  const fs::path config_path = out / "run.toml";
  write_text_file(config_path, toml_config(echo, lists));
  outputs.push_back(config_path.string());

  json manifest;
  manifest["version"] = GEOMFLOW_VERSION;
  manifest["command"] = "run";
  manifest["config"] = echo;
  manifest["config"]["snapshot-times"] = o.snapshot_times;
  manifest["config_file"] = config_path.string();
  manifest["realized"] = {{"N", cfg.n_nodes},
                          {"tau", cfg.tau},
                          {"T", cfg.t_end},
                          {"n_MR", std::isfinite(cfg.mesh_ratio_threshold) ? json(cfg.mesh_ratio_threshold) : json("inf")},
                          {"init_mode", to_string(cfg.init_mode)},
                          {"flow", to_string(cfg.flow)},
                          {"scheme", to_string(cfg.scheme)},
                          {"shape", shape_key(shape)},
                          {"mr_count", mr_count}};
  manifest["outputs"] = outputs;
  if (code != kOk) manifest["failure"] = failure;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");

  if (code != kOk) {
    fmt::print(stderr, "{}\n", failure);
    return code;
  }
  const DiagnosticsSeries& s = recorder.series();
  fmt::print("run complete: {} steps, T = {:.17g}, mr_count = {}, final area = {:.17g}, final Psi = {:.17g}\n",
             s.steps.back(), s.times.back(), mr_count, s.rel_area_loss.back() + 1.0, s.mesh_ratio.back());
  fmt::print("outputs written to {}\n", out.string());
  return kOk;
}

int cmd_converge(const ConvergeOptions& o) {
  StudyConfig cfg = default_study(o.paper_scale);
  try {
    cfg.shape = o.shape.build();
    cfg.flow = parse_flow(o.flow);
    cfg.scheme = parse_scheme(o.scheme);
    cfg.metrics.clear();
    for (const auto& m : o.metrics) {
      if (m == "all") {
        cfg.metrics = {MetricKind::L2, MetricKind::Linf, MetricKind::Manifold, MetricKind::Hausdorff};
        break;
      }
      cfg.metrics.push_back(parse_metric(m));
    }
    cfg.tau0 = parse_real(o.tau0);
    cfg.levels = o.levels;
    if (o.n) cfg.n = o.n;
    cfg.t_end = parse_real(o.t_end);
    if (o.n_ref) cfg.n_ref = o.n_ref;
    if (!o.tau_ref.empty()) cfg.tau_ref = parse_real(o.tau_ref);
    cfg.mesh_ratio_threshold = parse_real(o.n_mr);
    cfg.init_mode = parse_init_mode(o.init);
    cfg.parallel = !o.serial;
    if (!o.cache_dir.empty()) cfg.cache_dir = fs::path(o.cache_dir);
    for (MetricKind m : cfg.metrics) {
      const std::size_t nref = cfg.n_ref ? cfg.n_ref : cfg.n;
      if (!is_shape_metric(m) && nref != cfg.n) {
        throw InvalidArgument("function metrics need N_ref = N");
      }
    }
  } catch (const Error& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }

  std::vector<ConvergenceReport> reports;
  try {
    reports = convergence_study(cfg);
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    fmt::print(stderr, "solver failure while computing the reference: {}\n", e.what());
    return kSolverFailure;
  }

  const fs::path out(o.out);
  std::vector<std::string> outputs;
  bool partial = false;
  for (const auto& r : reports) {
    fmt::print("metric {} ({} {}, N = {})\n", to_string(r.metric), to_string(cfg.scheme), to_string(cfg.flow), cfg.n);
    fmt::print("  {:>14}  {:>12}  {:>7}  {:>9}\n", "tau", "error", "order", "seconds");
    for (std::size_t k = 0; k < r.errors.size(); ++k) {
      const std::string order = k < r.orders.size() ? fmt::format("{:.2f}", r.orders[k]) : "";
      fmt::print("  {:>14.6g}  {:>12.4e}  {:>7}  {:>9.3f}\n", r.taus[k], r.errors[k], order, r.runtimes[k]);
    }
    if (r.partial) fmt::print(stderr, "  partial report: {}\n", r.failure);
    partial = partial || r.partial;
    const fs::path csv = out / fmt::format("report_{}.csv", to_string(r.metric));
    const fs::path js = out / fmt::format("report_{}.json", to_string(r.metric));
    write_text_file(csv, format_report_csv(r));
    write_text_file(js, format_report_json(r));
    outputs.push_back(csv.string());
    outputs.push_back(js.string());
  }
  json manifest;
  manifest["version"] = GEOMFLOW_VERSION;
  manifest["command"] = "converge";
  manifest["realized"] = {{"N", cfg.n},
                          {"N_ref", cfg.n_ref ? cfg.n_ref : cfg.n},
                          {"tau0", cfg.tau0},
                          {"levels", cfg.levels},
                          {"tau_ref", cfg.tau_ref > 0.0 ? cfg.tau_ref : cfg.tau0 / std::ldexp(1.0, static_cast<int>(cfg.levels - 1)) / 8.0},
                          {"T", cfg.t_end},
                          {"n_MR", std::isfinite(cfg.mesh_ratio_threshold) ? json(cfg.mesh_ratio_threshold) : json("inf")},
                          {"init_mode", to_string(cfg.init_mode)},
                          {"flow", to_string(cfg.flow)},
                          {"scheme", to_string(cfg.scheme)},
                          {"shape", shape_key(cfg.shape)},
                          {"paper_scale", o.paper_scale}};
  manifest["outputs"] = outputs;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  return partial ? kSolverFailure : kOk;
}

int cmd_metric(const MetricOptions& o) {
  MetricKind kind;
  Snapshot a{0.0, PolygonalCurve({{0, 0}, {1, 0}, {0, 1}})};
  Snapshot b = a;
  HausdorffOptions hopt;
  try {
    kind = parse_metric(o.kind);
    if (!o.resolution.empty()) hopt.resolution = parse_real(o.resolution);
    a = read_snapshot(o.file_a);
    b = read_snapshot(o.file_b);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfigError;
  }
  try {
    const double v = kind == MetricKind::Hausdorff ? hausdorff_distance(a.curve, b.curve, hopt)
                                                    : evaluate(kind, a.curve, b.curve);
    fmt::print("{:.17g}\n", v);
  } catch (const SizeMismatch& e) {
    fmt::print(stderr, "metric misuse: {}\n", e.what());
    return kMetricMisuse;
  } catch (const ClippingFailure& e) {
    fmt::print(stderr, "metric failure: {}\n", e.what());
    return kMetricMisuse;
  }
  return kOk;
}

int cmd_shapes() {
  for (const auto& e : shape_catalog()) fmt::print("{:<10} {}\n", e.name, e.description);
  return kOk;
}

int cmd_cpu(const CpuOptions& o) {
  CpuConfig cfg;
  try {
    cfg.shape = o.shape.build();
    cfg.flow = parse_flow(o.flow);
    cfg.schemes.clear();
    for (const auto& s : o.schemes) cfg.schemes.push_back(parse_scheme(s));
    cfg.n_values = o.n_values;
    cfg.tau_factor = parse_real(o.tau_factor);
    cfg.t_end = parse_real(o.t_end);
    cfg.exact_ref_factor = o.exact_ref_factor;
    cfg.ref_factor = o.ref_factor;
    cfg.mesh_ratio_threshold = parse_real(o.n_mr);
    if (!o.cache_dir.empty()) cfg.cache_dir = fs::path(o.cache_dir);
  } catch (const Error& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }
  std::vector<CpuRow> rows;
  try {
    rows = cpu_comparison(cfg);
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  }
  fmt::print("{:>6} {:>6} {:>12} {:>12} {:>12} {:>10}\n", "scheme", "N", "T", "E_M", "E_H", "seconds");
  for (const auto& r : rows) {
    fmt::print("{:>6} {:>6} {:>12.6g} {:>12.4e} {:>12.4e} {:>10.3f}\n", to_string(r.scheme), r.n, r.t_realized,
               r.manifold, r.hausdorff, r.seconds);
  }
  const fs::path csv = fs::path(o.out) / "cpu.csv";
  write_text_file(csv, format_cpu_csv(rows));
  return kOk;
}

}  // namespace

int main(const std::vector<std::string>& args) {
  CLI::App app{"Parametric finite element curve evolution (CSF, AP-CSF, SDF) with BGN1/BGN2 time stepping.\n"
               "Settings are read from a TOML/INI file given by --config, then from GEOMFLOW_<OPTION>\n"
               "environment variables (e.g. GEOMFLOW_TAU, GEOMFLOW_CACHE_DIR), then from flags; later\n"
               "sources override earlier ones. Numbers accept decimal or p/q forms (e.g. 1/1280).",
               "geomflow"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_dummy;
  app.add_option("--config", config_dummy, "Configuration file (TOML/INI)");
  app.set_version_flag("--version", GEOMFLOW_VERSION);

  RunOptions run_o;
  auto* run_cmd = app.add_subcommand("run", "Evolve one curve and write snapshots, diagnostics and a manifest");
  run_cmd->add_option("--flow", run_o.flow, "csf | apcsf | sdf")->required();
  run_o.shape.add_to(*run_cmd, true, "");
  run_cmd->add_option("--scheme", run_o.scheme, "bgn1 | bgn2")->capture_default_str();
  run_cmd->add_option("--n", run_o.n, "Number of nodes")->required();
  run_cmd->add_option("--tau", run_o.tau, "Time step")->required();
  run_cmd->add_option("--t-end", run_o.t_end, "Final time (integer multiple of tau)")->required();
  run_cmd->add_option("--n-mr", run_o.n_mr, "Mesh-ratio threshold for regularization (inf disables)")
      ->capture_default_str();
  run_cmd->add_option("--init", run_o.init, "kappa-formula | double-bgn1")->capture_default_str();
  run_cmd->add_option("--snapshot-times", run_o.snapshot_times, "Extra snapshot times")->delimiter(',');
  run_cmd->add_option("--out", run_o.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--format", run_o.format, "Snapshot format: csv | json")->capture_default_str();

  ConvergeOptions conv_o;
  auto* conv_cmd = app.add_subcommand("converge", "Temporal convergence study against a reference solution");
  conv_cmd->add_option("--flow", conv_o.flow, "csf | apcsf | sdf")->capture_default_str();
  conv_o.shape.add_to(*conv_cmd, false, "ellipse");
  conv_cmd->add_option("--scheme", conv_o.scheme, "bgn1 | bgn2")->capture_default_str();
  conv_cmd->add_option("--metric", conv_o.metrics, "l2 | linf | manifold | hausdorff | all")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  conv_cmd->add_option("--tau0", conv_o.tau0, "Coarsest time step")->capture_default_str();
  conv_cmd->add_option("--levels", conv_o.levels, "Number of halvings of tau0")->capture_default_str();
  conv_cmd->add_option("--n", conv_o.n, "Number of nodes (default 2000, 10000 with --paper-scale)");
  conv_cmd->add_option("--t-end", conv_o.t_end, "Final time")->capture_default_str();
  conv_cmd->add_option("--n-ref", conv_o.n_ref, "Reference node count (default N)");
  conv_cmd->add_option("--tau-ref", conv_o.tau_ref, "Reference time step (default tau_min/8)");
  conv_cmd->add_option("--n-mr", conv_o.n_mr, "Mesh-ratio threshold")->capture_default_str();
  conv_cmd->add_option("--init", conv_o.init, "kappa-formula | double-bgn1")->capture_default_str();
  conv_cmd->add_flag("--paper-scale", conv_o.paper_scale, "N = N_ref = 10000 and tau_ref = 1/20480");
  conv_cmd->add_flag("--serial", conv_o.serial, "Run ladder levels one after another");
  conv_cmd->add_option("--out", conv_o.out, "Output directory")->capture_default_str();
  conv_cmd->add_option("--cache-dir", conv_o.cache_dir, "Reference cache directory");

  MetricOptions met_o;
  auto* met_cmd = app.add_subcommand("metric", "Distance between two snapshot files");
  met_cmd->add_option("file_a", met_o.file_a, "First snapshot")->required();
  met_cmd->add_option("file_b", met_o.file_b, "Second snapshot")->required();
  met_cmd->add_option("--kind", met_o.kind, "l2 | linf | manifold | hausdorff")->capture_default_str();
  met_cmd->add_option("--resolution", met_o.resolution, "Hausdorff subdivision resolution");

  app.add_subcommand("shapes", "List the built-in shapes");

  CpuOptions cpu_o;
  auto* cpu_cmd = app.add_subcommand("cpu-compare", "Errors and run times of BGN1/BGN2 over a ladder of N");
  cpu_cmd->add_option("--flow", cpu_o.flow, "csf | apcsf | sdf")->capture_default_str();
  cpu_o.shape.add_to(*cpu_cmd, false, "circle");
  cpu_cmd->add_option("--schemes", cpu_o.schemes, "Schemes to compare")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cpu_cmd->add_option("--n-values", cpu_o.n_values, "Node counts")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cpu_cmd->add_option("--tau-factor", cpu_o.tau_factor, "tau = factor / N")->capture_default_str();
  cpu_cmd->add_option("--t-end", cpu_o.t_end, "Final time")->capture_default_str();
  cpu_cmd->add_option("--exact-ref-factor", cpu_o.exact_ref_factor, "Exact reference N_ref / N")
      ->capture_default_str();
  cpu_cmd->add_option("--ref-factor", cpu_o.ref_factor, "Computed reference N_ref / N")->capture_default_str();
  cpu_cmd->add_option("--n-mr", cpu_o.n_mr, "Mesh-ratio threshold")->capture_default_str();
  cpu_cmd->add_option("--out", cpu_o.out, "Output directory")->capture_default_str();
  cpu_cmd->add_option("--cache-dir", cpu_o.cache_dir, "Reference cache directory");

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
  try {
    std::vector<std::string> layered = layered_args(app, argv);
    std::reverse(layered.begin(), layered.end());
    app.parse(layered);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_o);
    if (*conv_cmd) return cmd_converge(conv_o);
    if (*met_cmd) return cmd_metric(met_o);
    if (*cpu_cmd) return cmd_cpu(cpu_o);
    return cmd_shapes();
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSolverFailure;
  }
}

}  // namespace geomflow::cli
