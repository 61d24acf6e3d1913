#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topicena/network.hpp"

namespace topicena {

struct PlotOptions {
  double width = 640.0;
  double height = 640.0;
  double margin = 56.0;
  double node_radius_min = 3.0;
  double node_radius_max = 18.0;  // radius of the strongest node
  double edge_width_min = 0.5;
  double edge_width_max = 8.0;    // width of the heaviest edge
  double point_radius = 2.0;
  std::string positive_color = "#1f5fbf";  // first group / positive edges
  std::string negative_color = "#d62728";  // second group / negative edges
  std::string neutral_color = "#7f7f7f";
  /// Group label -> color for unit markers and group-mean edges.
  std::map<std::string, std::string> group_colors;
  bool show_points = true;
  bool show_labels = true;
};

/// Renders nodes at their co-registered positions (first two dimensions)
/// over group-colored unit markers. Node radius and edge width are affine in
/// strength and |weight|; zero-weight edges are omitted. Elements are
/// emitted in topic and pair order, so equal inputs give equal bytes.
/// Throws MissingLayout without a layout of at least two dimensions.
std::string render_network_svg(const NetworkGraph& graph, const std::optional<NodeLayout>& layout,
                               const std::vector<UnitPoint>& points, const PlotOptions& options);

}  // namespace topicena
