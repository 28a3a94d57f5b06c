#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "lqglab/harness.hpp"
#include "lqglab/io_util.hpp"
#include "lqglab/render.hpp"

using namespace lqglab;
using namespace lqglab::harness;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::path("harness_work") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string digest_of(const fs::path& dir, const std::string& name) {
  return file_digest((dir / name).string());
}

}  // namespace

TEST_CASE("config parsing: round trip, comments, unknown keys, malformed lines") {
  const auto c = parse_config(
      "# comment\n"
      "experiment = field\n"
      "grid_size = 64\n"
      "epsilon_list = 0.5, 0.25\n"
      "seed = 99\n"
      "boundary = zero\n"
      "export_csv = true\n");
  CHECK(c.experiment == "field");
  CHECK(c.grid_size == 64);
  CHECK(c.epsilon_list == std::vector<double>{0.5, 0.25});
  CHECK(c.seed == 99);
  CHECK(c.boundary == "zero");
  CHECK(c.export_csv);

  CHECK_THROWS_WITH_AS(parse_config("bogus_key = 3\n"), doctest::Contains("unknown config key"),
                       Error);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), Error);
}

TEST_CASE("config validation names the offending field and writes nothing") {
  ExperimentConfig c;
  c.experiment = "field";
  c.grid_size = 32;
  c.gamma = 3.0;
  c.output_dir = (work_dir("invalid") / "out").string();
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("gamma"), Error);
  CHECK_FALSE(fs::exists(c.output_dir));

  c.gamma = 1.5;
  c.experiment = "warp";
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("experiment"), Error);
  c.experiment = "field";
  c.grid_size = 100;  // torus sampling needs a power of two
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("power-of-two"), Error);
}

TEST_CASE("field experiment: deterministic outputs, manifest digests, replica seeds") {
  const fs::path d1 = work_dir("field1");
  const fs::path d2 = work_dir("field2");
  ExperimentConfig c;
  c.experiment = "field";
  c.grid_size = 32;
  c.replicas = 3;
  c.seed = 1234;
  c.export_csv = true;

  c.output_dir = d1.string();
  const RunManifest m1 = run(c);
  c.output_dir = d2.string();
  const RunManifest m2 = run(c);

  CHECK(m1.replica_seeds.size() == 3);
  CHECK(m1.replica_seeds == m2.replica_seeds);
  CHECK(m1.outputs.size() == m2.outputs.size());
  for (std::size_t i = 0; i < m1.outputs.size(); ++i) {
    CHECK(m1.outputs[i].first == m2.outputs[i].first);    // same file set
    CHECK(m1.outputs[i].second == m2.outputs[i].second);  // identical bytes
  }
  CHECK(fs::exists(m1.manifest_path));
  CHECK(read_file(m1.manifest_path).find("\"outputs\"") != std::string::npos);

  // A different seed changes the field bytes.
  const fs::path d3 = work_dir("field3");
  c.output_dir = d3.string();
  c.seed = 77;
  run(c);
  CHECK(digest_of(d1, "field_0.grf") != digest_of(d3, "field_0.grf"));
}

TEST_CASE("geodesic, ball and sle experiments write their documented outputs") {
  ExperimentConfig c;
  c.grid_size = 64;
  c.replicas = 1;
  c.seed = 5;

  c.experiment = "geodesic";
  c.output_dir = work_dir("geo").string();
  run(c);
  CHECK(fs::exists(fs::path(c.output_dir) / "geodesic_0.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "summary.json"));

  c.experiment = "ball";
  c.ball_radius = 0.35;
  c.output_dir = work_dir("ball").string();
  run(c);
  CHECK(fs::exists(fs::path(c.output_dir) / "ball_0.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "ball_0_fan.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "field_0.grf"));

  c.experiment = "sle";
  c.kappa = 2.0;
  c.dt = 1e-3;
  c.horizon = 0.1;
  c.output_dir = work_dir("sle").string();
  run(c);
  CHECK(fs::exists(fs::path(c.output_dir) / "trace_0.csv"));

  c.sle_kind = "whole_plane";
  c.horizon = 7.5;
  c.output_dir = work_dir("slewp").string();
  run(c);
  CHECK(fs::exists(fs::path(c.output_dir) / "trace_0.csv"));
}

TEST_CASE("crossings experiment aggregates per-epsilon frequencies deterministically") {
  ExperimentConfig c;
  c.experiment = "crossings";
  c.kappa = 6.0;
  c.dt = 1e-4;
  c.horizon = 0.05;
  c.epsilon_list = {0.25};
  c.alpha = 1.2;
  c.replicas = 3;
  c.seed = 11;
  c.output_dir = work_dir("xing1").string();
  run(c);
  const std::string csv = read_file((fs::path(c.output_dir) / "sle_max_counts.csv").string());
  CHECK(csv.rfind("replica,epsilon,max_count,skipped_centers\n", 0) == 0);
  const std::string d1 = digest_of(fs::path(c.output_dir), "summary.json");

  c.output_dir = work_dir("xing2").string();
  run(c);
  CHECK(digest_of(fs::path(c.output_dir), "summary.json") == d1);
}

TEST_CASE("scales experiment reports ratio statistics") {
  ExperimentConfig c;
  c.experiment = "scales";
  c.grid_size = 128;
  c.base_radius = 4.0;
  c.K = 3;
  c.replicas = 2;
  c.seed = 21;
  c.output_dir = work_dir("scales").string();
  run(c);
  const std::string summary = read_file((fs::path(c.output_dir) / "summary.json").string());
  CHECK(summary.find("smallest_c_for_80pct") != std::string::npos);
  CHECK(fs::exists(fs::path(c.output_dir) / "scales.csv"));
}

TEST_CASE("dimension experiment fits slopes and a straight control") {
  ExperimentConfig c;
  c.experiment = "dimension";
  c.grid_size = 128;
  c.epsilon_list = {0.5, 0.25, 0.125};
  c.replicas = 2;
  c.seed = 31;
  c.output_dir = work_dir("dim").string();
  run(c);
  const std::string summary = read_file((fs::path(c.output_dir) / "summary.json").string());
  CHECK(summary.find("control_slope") != std::string::npos);
  CHECK(read_file((fs::path(c.output_dir) / "holder.csv").string()).rfind("delta,modulus\n", 0) ==
        0);
}

TEST_CASE("removability experiment emits depth totals and the proxy flag") {
  ExperimentConfig c;
  c.experiment = "removability";
  c.grid_size = 64;
  c.max_depth = 6;
  c.walkers_per_cube = 16;
  c.replicas = 1;
  c.seed = 41;
  c.output_dir = work_dir("remov").string();
  run(c);
  const std::string summary = read_file((fs::path(c.output_dir) / "summary.json").string());
  CHECK(summary.find("\"proxy\": true") != std::string::npos);
  CHECK(read_file((fs::path(c.output_dir) / "shadow_depth_totals.csv").string())
            .rfind("depth,cube_count,sum_diam_sq,sum_core_sq\n", 0) == 0);
}

TEST_CASE("compare experiment writes the joint table for both path laws") {
  ExperimentConfig c;
  c.experiment = "compare";
  c.grid_size = 128;
  c.kappa = 6.0;
  c.dt = 1e-4;
  c.horizon = 0.05;
  c.epsilon_list = {0.25};
  c.replicas = 2;
  c.num_pairs = 1;
  c.seed = 51;
  c.output_dir = work_dir("compare").string();
  run(c);
  const std::string csv = read_file((fs::path(c.output_dir) / "compare.csv").string());
  CHECK(csv.find("sle,") != std::string::npos);
  CHECK(csv.find("geodesic,") != std::string::npos);
}

TEST_CASE("renders are deterministic byte for byte") {
  const fs::path dir = work_dir("render");
  ExperimentConfig c;
  c.experiment = "ball";
  c.grid_size = 64;
  c.ball_radius = 0.35;
  c.seed = 5;
  c.output_dir = dir.string();
  run(c);

  const std::string field_png1 = (dir / "f1.png").string();
  const std::string field_png2 = (dir / "f2.png").string();
  render::render_file((dir / "field_0.grf").string(), "field", field_png1);
  render::render_file((dir / "field_0.grf").string(), "field", field_png2);
  CHECK(file_digest(field_png1) == file_digest(field_png2));
  CHECK(read_file(field_png1).substr(1, 3) == "PNG");

  render::render_file((dir / "ball_0.csv").string(), "ball", (dir / "ball.png").string());
  CHECK(fs::exists(dir / "ball.png"));
  CHECK(fs::exists(dir / "ball_0.png"));  // experiment-produced figure
  CHECK_THROWS_AS(render::render_file((dir / "ball_0.csv").string(), "bogus", "x.png"), Error);

  // Malformed rows are reported with their byte offset.
  const fs::path broken = dir / "broken.csv";
  {
    std::ofstream out(broken);
    out << "x,y,dist_to_center\n1.0,2.0,0.5\nnot a row\n";
  }
  CHECK_THROWS_WITH_AS(render::render_file(broken.string(), "ball", (dir / "nope.png").string()),
                       doctest::Contains("parse error at byte 31"), Error);
}

TEST_CASE("flat-field ball render shows the diamond level sets") {
  // On the flat metric the LFPP ball is an L1 diamond; check the raster's
  // four-fold symmetry through the image buffer.
  grf::GridField flat;
  flat.n = 64;
  flat.spacing = 4.0 / 64;
  flat.origin = {-2.0, -2.0};
  flat.boundary = grf::BoundaryKind::torus_whole_plane;
  flat.values.assign(64 * 64, 0.0);
  const lfpp::MetricGraph g(flat, 0.41);
  const int center = g.vertex_at(32, 32);
  const auto ball = lfpp::metric_ball(g, center, 0.8);
  // Membership symmetric under (i,j) -> (2*32-i, j) reflections.
  std::vector<bool> member(g.vertex_count(), false);
  for (int v : ball.member_vertices) member[v] = true;
  for (int v : ball.member_vertices) {
    const int i = v / 64, j = v % 64;
    CHECK(member[(64 - i) * 64 + j] == member[v]);  // mirror row about the center
  }
  const auto fan = lfpp::geodesic_fan(g, ball);
  const Image img = render::render_ball(g, ball, fan, 256);
  CHECK(img.width == 256);
}
