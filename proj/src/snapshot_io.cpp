#include "geomflow/snapshot_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geomflow/errors.hpp"

namespace geomflow {

namespace {

double parse_double(const std::string& token, const std::string& context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || (end && *end != '\0')) {
    throw ParseError("cannot parse number '" + token + "' in " + context);
  }
  return value;
}

Snapshot parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  double time = 0.0;
  long declared = -1;
  bool header = false;
  std::vector<Vec2> nodes;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto tpos = line.find("t=");
      const auto npos = line.find("N=");
      if (tpos == std::string::npos || npos == std::string::npos) {
        throw ParseError("snapshot header must read '# t=<time>, N=<count>'");
      }
      const auto comma = line.find(',', tpos);
      time = parse_double(line.substr(tpos + 2, comma - tpos - 2), "header time");
      declared = static_cast<long>(parse_double(line.substr(npos + 2), "header count"));
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("row without comma: '" + line + "'");
    nodes.push_back({parse_double(line.substr(0, comma), "x column"),
                     parse_double(line.substr(comma + 1), "y column")});
  }
  if (!header) throw ParseError("missing '# t=..., N=...' header");
  if (declared != static_cast<long>(nodes.size())) {
    throw ParseError("header declares N=" + std::to_string(declared) + " but file has " +
                     std::to_string(nodes.size()) + " rows");
  }
  try {
    return Snapshot{time, PolygonalCurve(std::move(nodes), Orientation::Keep)};
  } catch (const Error& e) {
    throw ParseError(std::string("invalid curve: ") + e.what());
  }
}

Snapshot parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON snapshot: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("t") || !doc.contains("nodes") ||
      !doc["nodes"].is_array()) {
    throw ParseError("JSON snapshot needs fields 't' and 'nodes'");
  }
  std::vector<Vec2> nodes;
  nodes.reserve(doc["nodes"].size());
  for (const auto& p : doc["nodes"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ParseError("each node must be a pair [x, y]");
    }
    nodes.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (!doc["t"].is_number()) throw ParseError("'t' must be a number");
  try {
    return Snapshot{doc["t"].get<double>(), PolygonalCurve(std::move(nodes), Orientation::Keep)};
  } catch (const Error& e) {
    throw ParseError(std::string("invalid curve: ") + e.what());
  }
}

}  // namespace

std::string format_snapshot(const PolygonalCurve& curve, double time, SnapshotFormat format) {
  fmt::memory_buffer out;
  if (format == SnapshotFormat::Csv) {
    fmt::format_to(std::back_inserter(out), "# t={:.17g}, N={}\n", time, curve.size());
    for (const Vec2& p : curve.nodes()) {
      fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g}\n", p.x, p.y);
    }
  } else {
    fmt::format_to(std::back_inserter(out), "{{\"t\": {:.17g}, \"nodes\": [", time);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      fmt::format_to(std::back_inserter(out), "{}[{:.17g}, {:.17g}]", i ? ", " : "", curve[i].x,
                     curve[i].y);
    }
    fmt::format_to(std::back_inserter(out), "]}}\n");
  }
  return fmt::to_string(out);
}

SnapshotFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? SnapshotFormat::Json : SnapshotFormat::Csv;
}

void write_snapshot(const std::filesystem::path& path, const PolygonalCurve& curve, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << format_snapshot(curve, time, format_for(path));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Snapshot parse_snapshot(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  return parse_csv(text);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshot(buf.str());
}

}  // namespace geomflow
