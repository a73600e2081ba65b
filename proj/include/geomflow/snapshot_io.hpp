#pragma once

#include <filesystem>
#include <string>

#include "geomflow/geometry.hpp"

namespace geomflow {

struct Snapshot {
  double time = 0.0;
  PolygonalCurve curve;
};

enum class SnapshotFormat { Csv, Json };

/// CSV: a `# t=<time>, N=<count>` header line followed by `x,y` rows.
/// JSON: {"t": <time>, "nodes": [[x, y], ...]}. Numbers are written with 17
/// significant digits so that reading back is bit-exact.
std::string format_snapshot(const PolygonalCurve& curve, double time, SnapshotFormat format);
void write_snapshot(const std::filesystem::path& path, const PolygonalCurve& curve, double time);

/// Node order is kept as stored. Throws ParseError.
Snapshot parse_snapshot(const std::string& text);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Json for ".json" paths, Csv otherwise.
SnapshotFormat format_for(const std::filesystem::path& path);

}  // namespace geomflow
