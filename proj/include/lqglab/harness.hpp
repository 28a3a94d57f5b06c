#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqglab/common.hpp"

namespace lqglab::harness {

inline constexpr const char* kVersion = "lqglab 0.1.0";

/// Flat key = value experiment configuration.  Unknown keys are rejected;
/// preconditions of the dispatched modules are validated before any file is
/// written.
struct ExperimentConfig {
  std::string experiment;  // field, geodesic, ball, sle, crossings, scales,
                           // dimension, removability, compare
  int grid_size = 256;
  double spacing = 0.0;  // 0 -> 4/grid_size (lattice spans [-2, 2))
  double xi = 0.41;
  double gamma = 1.6329931618554521;  // sqrt(8/3)
  double kappa = 6.0;
  std::vector<double> epsilon_list = {0.25, 0.125, 0.0625};
  double alpha = 1.2;
  int K = 5;
  double M = 4.0;
  double c = 16.0;
  double dt = 1e-3;
  double horizon = 1.0;
  int replicas = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  // Per-experiment knobs.
  std::string boundary = "torus";    // field sampler: torus | zero
  std::string sle_kind = "chordal";  // sle experiment: chordal | whole_plane
  int num_pairs = 8;                 // geodesic pairs per graph
  double ball_radius = 0.4;          // metric radius of the ball experiment
  double base_radius = 0.0;          // scale scans; 0 -> grid extent / 2
  int walkers_per_cube = 32;
  int max_depth = 8;
  int stride = 1;  // trace output stride
  bool export_csv = false;

  double effective_spacing() const { return spacing > 0.0 ? spacing : 4.0 / grid_size; }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Validates cross-field consistency and module preconditions that can be
/// checked statically.  Throws with the offending field named.
void validate_config(const ExperimentConfig& config);

struct RunManifest {
  ExperimentConfig config;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> replica_seeds;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> outputs;  // (path, digest)
  std::string manifest_path;
};

/// Executes the configured experiment, writes outputs plus a manifest JSON
/// into config.output_dir, and removes partial outputs on failure.
/// Replicas derive independent streams via (seed, index) hashing and run on
/// a worker pool capped by the LAB_THREADS environment variable.
RunManifest run(const ExperimentConfig& config);

}  // namespace lqglab::harness
