#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "geomflow/errors.hpp"
#include "geomflow/shapes.hpp"
#include "geomflow/snapshot_io.hpp"

using namespace geomflow;

TEST_CASE("round trip is bit exact") {
  auto c = equidistributed_sample(shape::Flower{}, 97);
  for (auto fmt : {SnapshotFormat::Csv, SnapshotFormat::Json}) {
    auto s = parse_snapshot(format_snapshot(c, 0.1 + 0.2, fmt));
    CHECK(s.time == 0.1 + 0.2);
    CHECK(s.curve == c);
  }
}

TEST_CASE("csv header") {
  PolygonalCurve sq({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  auto text = format_snapshot(sq, 0.5, SnapshotFormat::Csv);
  CHECK(text.rfind("# t=0.5, N=4\n", 0) == 0);
}

TEST_CASE("files") {
  auto dir = std::filesystem::temp_directory_path() / "geomflow_snapshot_test";
  std::filesystem::create_directories(dir);
  auto c = equidistributed_sample(shape::Ellipse{}, 33);
  write_snapshot(dir / "a.csv", c, 1.0);
  write_snapshot(dir / "a.json", c, 2.0);
  CHECK(format_for(dir / "a.json") == SnapshotFormat::Json);
  CHECK(format_for(dir / "a.csv") == SnapshotFormat::Csv);
  CHECK(read_snapshot(dir / "a.csv").curve == c);
  CHECK(read_snapshot(dir / "a.json").time == 2.0);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.csv"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_snapshot(""), ParseError);
  CHECK_THROWS_AS(parse_snapshot("# t=0, N=3\n0,0\n1,x\n0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_snapshot("# t=0, N=4\n0,0\n1,0\n0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_snapshot("{\"t\": 0, \"nodes\": [[0,0],[1]]}"), ParseError);
  // clockwise order is not imposed when reading
  auto s = parse_snapshot("# t=0, N=3\n0,0\n1,0\n0,1\n");
  CHECK(signed_area(s.curve.nodes()) > 0);
}
