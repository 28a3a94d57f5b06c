#pragma once

#include <string>
#include <vector>

#include "lqglab/grid_field.hpp"
#include "lqglab/metric_graph.hpp"
#include "lqglab/png_io.hpp"

namespace lqglab::render {

/// Field heat map, nearest-neighbor upscaled to at least target pixels.
Image render_field(const grf::GridField& field, int target = 512);

/// Metric ball colored by distance to the center, with the geodesic fan
/// drawn on top (one polyline per boundary vertex).
Image render_ball(const lfpp::MetricGraph& graph, const lfpp::MetricBall& ball,
                  const std::vector<PlanarPath>& fan, int target = 512);

/// Trace polyline; optional annulus overlays (center, r_in, r_out triples)
/// and a marker on the argmax center of a crossing scan.
struct AnnulusOverlay {
  Vec2 center{};
  double r_in = 0.0;
  double r_out = 0.0;
};
Image render_trace(const PlanarPath& path, const std::vector<AnnulusOverlay>& annuli,
                   const std::vector<Vec2>& markers, int target = 800);

/// Crossing report as a colored center grid with the argmax marked.
Image render_crossing_report(const std::vector<std::pair<Vec2, int>>& per_center, int target = 512);

/// File-level entry point: dispatches on style in {field, ball, trace,
/// crossings}; input formats follow the experiment exports.
void render_file(const std::string& input, const std::string& style, const std::string& out_png);

}  // namespace lqglab::render
