#include "lqglab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "lqglab/analysis.hpp"
#include "lqglab/crossings.hpp"
#include "lqglab/gff.hpp"
#include "lqglab/grid_field.hpp"
#include "lqglab/harmonic.hpp"
#include "lqglab/io_util.hpp"
#include "lqglab/loewner.hpp"
#include "lqglab/metric_graph.hpp"
#include "lqglab/render.hpp"
#include "lqglab/rng.hpp"

namespace lqglab::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kExperiments = {"field",  "geodesic",  "ball",
                                               "sle",    "crossings", "scales",
                                               "dimension", "removability", "compare"};

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    const std::string item = value.substr(pos, (comma == std::string::npos ? value.size() : comma) - pos);
    if (!item.empty()) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (end == item.c_str()) fail(ErrorCode::invalid_parameter, "bad number in " + key + ": " + item);
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) fail(ErrorCode::invalid_parameter, key + " must list at least one value");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

int worker_count(int replicas) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LAB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return std::max(1, std::min<int>(static_cast<int>(hw), replicas));
}

/// Runs fn(replica_index) on a small pool; rethrows the first failure.
template <typename F>
void parallel_replicas(int replicas, F&& fn) {
  const int workers = worker_count(replicas);
  if (workers == 1) {
    for (int r = 0; r < replicas; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicas) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Tracks files created by a run so a failure can remove partial outputs.
class OutputRegistry {
 public:
  explicit OutputRegistry(const fs::path& dir) : dir_(dir) {}

  std::string path(const std::string& name) {
    std::lock_guard<std::mutex> lock(mutex_);
    files_.push_back(name);
    return (dir_ / name).string();
  }

  std::vector<std::pair<std::string, std::string>> digests() const {
    std::vector<std::string> names = files_;
    std::sort(names.begin(), names.end());
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(names.size());
    for (const auto& name : names) out.emplace_back(name, file_digest((dir_ / name).string()));
    return out;
  }

  void remove_all() {
    for (const auto& name : files_) {
      std::error_code ec;
      fs::remove(dir_ / name, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
  mutable std::mutex mutex_;
};

grf::GridField sample_field(const ExperimentConfig& c, std::uint64_t seed) {
  const double s = c.effective_spacing();
  if (c.boundary == "zero") return grf::sample_zero_boundary_gff(c.grid_size, s, seed);
  return grf::sample_whole_plane_gff(c.grid_size, s, seed);
}

std::pair<int, int> sample_far_pair(const lfpp::MetricGraph& g, Rng& rng) {
  const int n = g.side();
  const double extent = (n - 1) * g.spacing();
  auto sample = [&] {
    const int lo = n / 4, span = n / 2;
    return g.vertex_at(lo + static_cast<int>(rng.below(span)),
                       lo + static_cast<int>(rng.below(span)));
  };
  int a = sample(), b = sample();
  while (dist(g.position(a), g.position(b)) < extent / 3.0) b = sample();
  return {a, b};
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["grid_size"] = c.grid_size;
  j["spacing"] = c.spacing;
  j["xi"] = c.xi;
  j["gamma"] = c.gamma;
  j["kappa"] = c.kappa;
  j["epsilon_list"] = c.epsilon_list;
  j["alpha"] = c.alpha;
  j["K"] = c.K;
  j["M"] = c.M;
  j["c"] = c.c;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["boundary"] = c.boundary;
  j["sle_kind"] = c.sle_kind;
  j["num_pairs"] = c.num_pairs;
  j["ball_radius"] = c.ball_radius;
  j["base_radius"] = c.base_radius;
  j["walkers_per_cube"] = c.walkers_per_cube;
  j["max_depth"] = c.max_depth;
  j["stride"] = c.stride;
  j["export_csv"] = c.export_csv;
  return j;
}

void write_json(const json& j, const std::string& path) {
  FileWriter out(path);
  const std::string text = j.dump(2) + "\n";
  out.write_bytes(text.data(), text.size());
}

void write_text(const std::string& text, const std::string& path) {
  FileWriter out(path);
  out.write_bytes(text.data(), text.size());
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_field(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
               json& summary) {
  std::vector<json> rows(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    grf::save_field(field, reg.path("field_" + std::to_string(r) + ".grf"));
    if (c.export_csv) grf::export_field_csv(field, reg.path("field_" + std::to_string(r) + ".csv"));
    const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
    rows[r] = {{"replica", r}, {"seed", man.replica_seeds[r]}, {"min", *lo}, {"max", *hi}};
  });
  summary["fields"] = rows;
}

void run_geodesic(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                  json& summary) {
  std::vector<json> rows(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    const lfpp::MetricGraph graph(field, c.xi);
    Rng rng(derive_seed(man.replica_seeds[r], 1));
    const auto [a, b] = sample_far_pair(graph, rng);
    const PlanarPath geo = lfpp::geodesic(graph, a, b);
    export_path_csv(geo, reg.path("geodesic_" + std::to_string(r) + ".csv"));
    if (c.export_csv) grf::save_field(field, reg.path("field_" + std::to_string(r) + ".grf"));
    rows[r] = {{"replica", r},
               {"a", {graph.position(a).x, graph.position(a).y}},
               {"b", {graph.position(b).x, graph.position(b).y}},
               {"distance", geo.length()},
               {"vertices", geo.size()}};
  });
  summary["geodesics"] = rows;
}

void run_ball(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
              json& summary) {
  std::vector<json> rows(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    const lfpp::MetricGraph graph(field, c.xi);
    const int center = graph.vertex_at(graph.side() / 2, graph.side() / 2);
    const lfpp::MetricBall ball = lfpp::metric_ball(graph, center, c.ball_radius);
    const auto fan = lfpp::geodesic_fan(graph, ball);
    const std::string stem = "ball_" + std::to_string(r);
    lfpp::export_ball_csv(graph, ball, reg.path(stem + ".csv"));
    // Fan CSV: (path_id, index, x, y).
    std::string fan_csv = "path_id,index,x,y\n";
    char buf[160];
    for (std::size_t p = 0; p < fan.size(); ++p) {
      for (std::size_t i = 0; i < fan[p].vertices.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", p, i, fan[p].vertices[i].x,
                      fan[p].vertices[i].y);
        fan_csv += buf;
      }
    }
    write_text(fan_csv, reg.path(stem + "_fan.csv"));
    grf::save_field(field, reg.path("field_" + std::to_string(r) + ".grf"));
    // Metric ball colored by distance to the center with the geodesic fan
    // drawn from the outer boundary inward.
    write_png(render::render_ball(graph, ball, fan), reg.path(stem + ".png"));
    rows[r] = {{"replica", r},
               {"members", ball.member_vertices.size()},
               {"boundary", ball.boundary_vertices.size()}};
  });
  summary["balls"] = rows;
}

void run_sle(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
             json& summary) {
  std::vector<json> rows(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    PlanarPath trace;
    std::vector<double> times;
    if (c.sle_kind == "whole_plane") {
      trace = loewner::whole_plane_trace(c.kappa, c.horizon, c.dt, man.replica_seeds[r], c.stride);
      const double t0 = -(std::log(1.0 / c.dt) + 1.0);
      for (std::size_t i = 0; i < trace.size(); ++i)
        times.push_back(t0 + c.stride * c.dt * static_cast<double>(i + 1));
    } else {
      const auto driving = loewner::sample_driving(c.kappa, c.horizon, c.dt, man.replica_seeds[r]);
      trace = loewner::chordal_trace(driving, c.stride);
      for (std::size_t i = 0; i < trace.size(); ++i)
        times.push_back(c.stride * c.dt * static_cast<double>(i));
    }
    loewner::export_trace_csv(trace, times, reg.path("trace_" + std::to_string(r) + ".csv"));
    const Rect bb = trace.bounding_box();
    rows[r] = {{"replica", r},
               {"points", trace.size()},
               {"bbox", {bb.x0, bb.y0, bb.x1, bb.y1}}};
  });
  summary["traces"] = rows;
}

void run_crossings(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                   json& summary) {
  // Chordal SLE scan over the reference rectangle [-1,1] x [0,1].
  const Rect region{-1.0, 0.0, 1.0, 1.0};
  std::vector<std::vector<int>> max_counts(c.epsilon_list.size(),
                                           std::vector<int>(c.replicas, 0));
  std::vector<std::vector<int>> skipped(c.epsilon_list.size(), std::vector<int>(c.replicas, 0));
  parallel_replicas(c.replicas, [&](int r) {
    const auto driving = loewner::sample_driving(c.kappa, c.horizon, c.dt, man.replica_seeds[r]);
    const PlanarPath trace = loewner::chordal_trace(driving, c.stride);
    std::vector<render::AnnulusOverlay> overlays;
    std::vector<Vec2> markers;
    for (std::size_t e = 0; e < c.epsilon_list.size(); ++e) {
      const double eps = c.epsilon_list[e];
      const auto rep = crossings::max_crossings_over_grid(trace, eps, c.alpha, region, eps / 2.0);
      max_counts[e][r] = rep.max_count;
      skipped[e][r] = static_cast<int>(rep.skipped_centers.size());
      if (c.replicas == 1 && c.export_csv) {
        crossings::export_crossing_report_csv(
            rep, reg.path("crossings_eps" + std::to_string(e) + ".csv"));
        for (const auto& [z, count] : rep.per_center) {
          if (count == rep.max_count && rep.max_count > 0) {
            overlays.push_back({z, std::pow(eps, c.alpha), eps});
            markers.push_back(z);
            break;
          }
        }
      }
    }
    if (c.replicas == 1 && c.export_csv)
      write_png(render::render_trace(trace, overlays, markers),
                reg.path("crossings_trace.png"));
  });
  std::string csv = "replica,epsilon,max_count,skipped_centers\n";
  char buf[128];
  std::vector<json> per_eps;
  for (std::size_t e = 0; e < c.epsilon_list.size(); ++e) {
    int ge5 = 0;
    for (int r = 0; r < c.replicas; ++r) {
      ge5 += max_counts[e][r] >= 5 ? 1 : 0;
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%d\n", r, c.epsilon_list[e], max_counts[e][r],
                    skipped[e][r]);
      csv += buf;
    }
    const auto [lo, hi] = crossings::wilson_interval(ge5, c.replicas);
    per_eps.push_back({{"epsilon", c.epsilon_list[e]},
                       {"num_max_ge5", ge5},
                       {"frequency_ge5", static_cast<double>(ge5) / c.replicas},
                       {"wilson_lo", lo},
                       {"wilson_hi", hi},
                       {"max_counts", max_counts[e]}});
  }
  write_text(csv, reg.path("sle_max_counts.csv"));
  summary["sle_crossings"] = per_eps;
}

void run_scales(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                json& summary) {
  const double base = c.base_radius > 0.0 ? c.base_radius : c.grid_size * c.effective_spacing();
  std::vector<crossings::ScaleScan> scans(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    const lfpp::MetricGraph graph(field, c.xi);
    scans[r] = crossings::scale_scan(graph, field.center(), base, c.K, c.c);
  });
  std::string csv = "replica,k,r_k,L1,L2,S1,S2\n";
  char buf[256];
  std::vector<double> ratios;
  int n_good = 0, n_s = 0, n_entries = 0;
  for (int r = 0; r < c.replicas; ++r) {
    for (const auto& e : scans[r].per_scale) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r, e.k,
                    std::ldexp(base, -e.k), e.l1, e.l2, e.s1, e.s2);
      csv += buf;
      ratios.push_back(e.l1 / e.l2);
      ++n_entries;
      n_good += e.l1 <= c.c * e.l2 ? 1 : 0;
      n_s += e.s1 < e.s2 ? 1 : 0;
    }
  }
  write_text(csv, reg.path("scales.csv"));
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  // Smallest c with empirical fraction {L1 <= c L2} >= 0.8: the 80th
  // percentile of the observed ratios.
  const double c80 = sorted[std::min(sorted.size() - 1,
                                     static_cast<std::size_t>(std::ceil(0.8 * sorted.size())) - 1)];
  summary["scales"] = {{"base_radius", base},
                       {"K", c.K},
                       {"c", c.c},
                       {"entries", n_entries},
                       {"fraction_l1_le_c_l2", static_cast<double>(n_good) / n_entries},
                       {"fraction_s1_lt_s2", static_cast<double>(n_s) / n_entries},
                       {"smallest_c_for_80pct", c80},
                       {"max_ratio", sorted.back()}};
}

void run_dimension(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                   json& summary) {
  std::vector<analysis::BoxCountResult> results(c.replicas);
  std::vector<std::pair<double, double>> holder_rows;
  std::mutex holder_mutex;
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    const lfpp::MetricGraph graph(field, c.xi);
    Rng rng(derive_seed(man.replica_seeds[r], 1));
    const auto [a, b] = sample_far_pair(graph, rng);
    const PlanarPath geo = lfpp::geodesic(graph, a, b);
    results[r] = analysis::box_counting_dimension(geo, c.epsilon_list);
    if (r == 0) {
      std::lock_guard<std::mutex> lock(holder_mutex);
      for (double delta : {0.1, 0.25, 0.5})
        holder_rows.emplace_back(delta, analysis::holder_modulus(geo, delta));
    }
  });
  std::string holder_csv = "delta,modulus\n";
  char hbuf[96];
  for (const auto& [delta, modulus] : holder_rows) {
    std::snprintf(hbuf, sizeof(hbuf), "%.17g,%.17g\n", delta, modulus);
    holder_csv += hbuf;
  }
  write_text(holder_csv, reg.path("holder.csv"));
  std::string csv = "replica,scale,count\n";
  char buf[96];
  double mean_slope = 0.0;
  std::vector<double> slopes;
  for (int r = 0; r < c.replicas; ++r) {
    for (std::size_t i = 0; i < results[r].scales.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%lld\n", r, results[r].scales[i],
                    results[r].counts[i]);
      csv += buf;
    }
    slopes.push_back(results[r].slope);
    mean_slope += results[r].slope;
  }
  mean_slope /= c.replicas;
  write_text(csv, reg.path("dimension.csv"));

  // Straight-segment control at the same scales.
  std::vector<Vec2> seg;
  const double y0 = 0.013;
  for (int i = 0; i <= 256; ++i) seg.push_back({0.001 + 0.998 * i / 256.0, y0});
  const auto control = analysis::box_counting_dimension(make_path(std::move(seg)), c.epsilon_list);
  summary["dimension"] = {{"slopes", slopes},
                          {"mean_slope", mean_slope},
                          {"control_slope", control.slope}};
}

void run_removability(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                      json& summary) {
  std::vector<std::vector<analysis::DepthTotal>> totals(c.replicas);
  std::atomic<long long> factor8_violations{0};
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, man.replica_seeds[r]);
    const lfpp::MetricGraph graph(field, c.xi);
    Rng rng(derive_seed(man.replica_seeds[r], 1));
    const auto [a, b] = sample_far_pair(graph, rng);
    const PlanarPath geo = lfpp::geodesic(graph, a, b);
    Rect bb = geo.bounding_box();
    const double side = std::max(bb.x1 - bb.x0, bb.y1 - bb.y0) * 1.5;
    const Vec2 mid{0.5 * (bb.x0 + bb.x1), 0.5 * (bb.y0 + bb.y1)};
    const Rect box{mid.x - side / 2, mid.y - side / 2, mid.x + side / 2, mid.y + side / 2};
    const auto dec = analysis::whitney_decomposition(geo, box, c.max_depth);
    for (const auto& cube : dec.cubes)
      if (cube.dist_to_path < cube.side / 8.0 || cube.dist_to_path > 8.0 * cube.side)
        factor8_violations.fetch_add(1);
    const auto shadows =
        analysis::shadow_sum_estimate(geo, dec.cubes, c.walkers_per_cube, man.replica_seeds[r]);
    totals[r] = analysis::shadow_totals_by_depth(shadows);
  });
  // Aggregate per-depth totals across replicas.
  std::vector<analysis::DepthTotal> agg;
  for (const auto& per : totals) {
    for (const auto& t : per) {
      auto it = std::find_if(agg.begin(), agg.end(),
                             [&](const analysis::DepthTotal& x) { return x.depth == t.depth; });
      if (it == agg.end())
        agg.push_back(t);
      else {
        it->cube_count += t.cube_count;
        it->sum_diam_sq += t.sum_diam_sq;
        it->sum_core_sq += t.sum_core_sq;
      }
    }
  }
  std::sort(agg.begin(), agg.end(),
            [](const analysis::DepthTotal& a, const analysis::DepthTotal& b) {
              return a.depth < b.depth;
            });
  analysis::export_depth_totals_csv(agg, reg.path("shadow_depth_totals.csv"));
  std::vector<double> tail_ratios, core_ratios;
  for (std::size_t i = 1; i < agg.size(); ++i) {
    if (agg[i - 1].sum_diam_sq > 0.0) tail_ratios.push_back(agg[i].sum_diam_sq / agg[i - 1].sum_diam_sq);
    if (agg[i - 1].sum_core_sq > 0.0) core_ratios.push_back(agg[i].sum_core_sq / agg[i - 1].sum_core_sq);
  }
  summary["removability"] = {{"factor8_violations", factor8_violations.load()},
                             {"depth_ratios", tail_ratios},
                             {"core_depth_ratios", core_ratios},
                             {"proxy", true}};
}

void run_compare(const ExperimentConfig& c, const RunManifest& man, OutputRegistry& reg,
                 json& summary) {
  // SLE half: one chordal trace per replica, scanned over the reference
  // rectangle.
  const Rect region{-1.0, 0.0, 1.0, 1.0};
  std::vector<std::vector<int>> sle_max(c.epsilon_list.size(), std::vector<int>(c.replicas, 0));
  parallel_replicas(c.replicas, [&](int r) {
    const auto driving =
        loewner::sample_driving(c.kappa, c.horizon, c.dt, derive_seed(man.replica_seeds[r], 11));
    const PlanarPath trace = loewner::chordal_trace(driving, c.stride);
    for (std::size_t e = 0; e < c.epsilon_list.size(); ++e) {
      const double eps = c.epsilon_list[e];
      sle_max[e][r] =
          crossings::max_crossings_over_grid(trace, eps, c.alpha, region, eps / 2.0).max_count;
    }
  });
  // Geodesic half: per replica an independent field carrying num_pairs
  // geodesics; results pooled over replicas.
  std::vector<std::vector<int>> geo_max(c.epsilon_list.size());
  std::vector<std::vector<std::vector<int>>> per_replica(c.replicas);
  parallel_replicas(c.replicas, [&](int r) {
    const grf::GridField field = sample_field(c, derive_seed(man.replica_seeds[r], 12));
    const lfpp::MetricGraph graph(field, c.xi);
    const auto sums = crossings::geodesic_crossing_experiment(
        graph, c.num_pairs, c.epsilon_list, c.alpha, derive_seed(man.replica_seeds[r], 13));
    per_replica[r].resize(sums.size());
    for (std::size_t e = 0; e < sums.size(); ++e) per_replica[r][e] = sums[e].max_counts;
  });
  geo_max.assign(c.epsilon_list.size(), {});
  for (int r = 0; r < c.replicas; ++r)
    for (std::size_t e = 0; e < c.epsilon_list.size(); ++e)
      geo_max[e].insert(geo_max[e].end(), per_replica[r][e].begin(), per_replica[r][e].end());

  std::string csv = "kind,epsilon,n,num_gt4,frequency_gt4,wilson_lo,wilson_hi,mean_max\n";
  char buf[256];
  auto emit = [&](const char* kind, const std::vector<std::vector<int>>& table, json& dest) {
    std::vector<json> rows;
    for (std::size_t e = 0; e < c.epsilon_list.size(); ++e) {
      int gt4 = 0;
      double mean = 0.0;
      for (int v : table[e]) {
        gt4 += v > 4 ? 1 : 0;
        mean += v;
      }
      const int n_table = static_cast<int>(table[e].size());
      mean /= n_table;
      const double freq = static_cast<double>(gt4) / n_table;
      const auto [lo, hi] = crossings::wilson_interval(gt4, n_table);
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g\n", kind,
                    c.epsilon_list[e], n_table, gt4, freq, lo, hi, mean);
      csv += buf;
      rows.push_back({{"epsilon", c.epsilon_list[e]},
                      {"num_gt4", gt4},
                      {"frequency_gt4", freq},
                      {"wilson_lo", lo},
                      {"wilson_hi", hi},
                      {"mean_max", mean}});
    }
    dest = rows;
  };
  json sle_rows, geo_rows;
  emit("sle", sle_max, sle_rows);
  emit("geodesic", geo_max, geo_rows);
  write_text(csv, reg.path("compare.csv"));
  summary["compare"] = {{"sle", sle_rows}, {"geodesic", geo_rows}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::invalid_parameter, "config line " + std::to_string(line_no) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto as_int = [&] { return static_cast<int>(std::strtol(value.c_str(), nullptr, 10)); };
    auto as_double = [&] { return std::strtod(value.c_str(), nullptr); };
    if (key == "experiment") c.experiment = value;
    else if (key == "grid_size") c.grid_size = as_int();
    else if (key == "spacing") c.spacing = as_double();
    else if (key == "xi") c.xi = as_double();
    else if (key == "gamma") c.gamma = as_double();
    else if (key == "kappa") c.kappa = as_double();
    else if (key == "epsilon_list") c.epsilon_list = parse_double_list(value, key);
    else if (key == "alpha") c.alpha = as_double();
    else if (key == "K") c.K = as_int();
    else if (key == "M") c.M = as_double();
    else if (key == "c") c.c = as_double();
    else if (key == "dt") c.dt = as_double();
    else if (key == "horizon") c.horizon = as_double();
    else if (key == "replicas") c.replicas = as_int();
    else if (key == "seed") c.seed = std::strtoull(value.c_str(), nullptr, 10);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "boundary") c.boundary = value;
    else if (key == "sle_kind") c.sle_kind = value;
    else if (key == "num_pairs") c.num_pairs = as_int();
    else if (key == "ball_radius") c.ball_radius = as_double();
    else if (key == "base_radius") c.base_radius = as_double();
    else if (key == "walkers_per_cube") c.walkers_per_cube = as_int();
    else if (key == "max_depth") c.max_depth = as_int();
    else if (key == "stride") c.stride = as_int();
    else if (key == "export_csv") c.export_csv = value == "1" || value == "true";
    else fail(ErrorCode::invalid_parameter, "unknown config key '" + key + "'");
    if (end == text.size()) break;
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config(read_file(path));
}

void validate_config(const ExperimentConfig& c) {
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
    fail(ErrorCode::invalid_parameter, "experiment must be one of field, geodesic, ball, sle, "
                                       "crossings, scales, dimension, removability, compare; got '" +
                                           c.experiment + "'");
  if (c.grid_size < 8) fail(ErrorCode::invalid_parameter, "grid_size must be at least 8");
  if (c.spacing < 0.0) fail(ErrorCode::invalid_parameter, "spacing must be nonnegative");
  if (!(c.xi > 0.0)) fail(ErrorCode::invalid_parameter, "xi must be positive");
  if (!(c.gamma > 0.0 && c.gamma < 2.0)) fail(ErrorCode::invalid_parameter, "gamma must lie in (0, 2)");
  if (!(c.kappa >= 0.0)) fail(ErrorCode::invalid_parameter, "kappa must be nonnegative");
  for (double e : c.epsilon_list)
    if (!(e > 0.0 && e < 1.0)) fail(ErrorCode::invalid_parameter, "epsilon_list entries must lie in (0, 1)");
  if (!(c.alpha > 1.0)) fail(ErrorCode::invalid_parameter, "alpha must exceed 1");
  if (c.K < 1) fail(ErrorCode::invalid_parameter, "K must be at least 1");
  if (!(c.M > 0.0)) fail(ErrorCode::invalid_parameter, "M must be positive");
  if (!(c.c > 0.0)) fail(ErrorCode::invalid_parameter, "c must be positive");
  if (!(c.dt > 0.0)) fail(ErrorCode::invalid_parameter, "dt must be positive");
  if (!(c.horizon >= c.dt)) fail(ErrorCode::invalid_parameter, "horizon must be at least dt");
  if (c.replicas < 1) fail(ErrorCode::invalid_parameter, "replicas must be at least 1");
  if (c.boundary != "torus" && c.boundary != "zero")
    fail(ErrorCode::invalid_parameter, "boundary must be torus or zero");
  if (c.sle_kind != "chordal" && c.sle_kind != "whole_plane")
    fail(ErrorCode::invalid_parameter, "sle_kind must be chordal or whole_plane");
  if (c.num_pairs < 1) fail(ErrorCode::invalid_parameter, "num_pairs must be at least 1");
  if (!(c.ball_radius > 0.0)) fail(ErrorCode::invalid_parameter, "ball_radius must be positive");
  if (c.base_radius < 0.0) fail(ErrorCode::invalid_parameter, "base_radius must be nonnegative");
  if (c.walkers_per_cube < 16) fail(ErrorCode::invalid_parameter, "walkers_per_cube must be at least 16");
  if (c.max_depth < 1 || c.max_depth > 30) fail(ErrorCode::invalid_parameter, "max_depth must be in [1, 30]");
  if (c.stride < 1) fail(ErrorCode::invalid_parameter, "stride must be at least 1");
  if (c.boundary == "torus" && (c.grid_size & (c.grid_size - 1)) != 0)
    fail(ErrorCode::invalid_parameter, "torus sampling needs a power-of-two grid_size");
  if (c.output_dir.empty()) fail(ErrorCode::invalid_parameter, "output_dir must not be empty");
}

RunManifest run(const ExperimentConfig& config) {
  validate_config(config);
  const auto t_start = std::chrono::steady_clock::now();

  RunManifest man;
  man.config = config;
  man.version = kVersion;
  man.seed = config.seed;
  man.replica_seeds.reserve(config.replicas);
  for (int r = 0; r < config.replicas; ++r)
    man.replica_seeds.push_back(derive_seed(config.seed, static_cast<std::uint64_t>(r)));

  fs::create_directories(config.output_dir);
  OutputRegistry reg(config.output_dir);
  json summary;
  summary["experiment"] = config.experiment;
  summary["seed"] = config.seed;
  try {
    if (config.experiment == "field") run_field(config, man, reg, summary);
    else if (config.experiment == "geodesic") run_geodesic(config, man, reg, summary);
    else if (config.experiment == "ball") run_ball(config, man, reg, summary);
    else if (config.experiment == "sle") run_sle(config, man, reg, summary);
    else if (config.experiment == "crossings") run_crossings(config, man, reg, summary);
    else if (config.experiment == "scales") run_scales(config, man, reg, summary);
    else if (config.experiment == "dimension") run_dimension(config, man, reg, summary);
    else if (config.experiment == "removability") run_removability(config, man, reg, summary);
    else if (config.experiment == "compare") run_compare(config, man, reg, summary);
    write_json(summary, reg.path("summary.json"));
  } catch (...) {
    reg.remove_all();
    throw;
  }

  man.outputs = reg.digests();
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  json mj;
  mj["version"] = man.version;
  mj["config"] = config_json(config);
  mj["seed"] = man.seed;
  mj["replica_seeds"] = man.replica_seeds;
  mj["wall_seconds"] = man.wall_seconds;
  json outs = json::array();
  for (const auto& [name, digest] : man.outputs) outs.push_back({{"path", name}, {"digest", digest}});
  mj["outputs"] = outs;
  man.manifest_path = (fs::path(config.output_dir) / "run_manifest.json").string();
  write_json(mj, man.manifest_path);
  return man;
}

}  // namespace lqglab::harness
