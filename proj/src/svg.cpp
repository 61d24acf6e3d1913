#include "topicena/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) { return io::format_fixed(v, 2); }

struct Frame {
  double cx = 0.0;
  double cy = 0.0;
  double scale = 1.0;
  double width = 0.0;
  double height = 0.0;

  double x(double v) const { return width / 2.0 + (v - cx) * scale; }
  double y(double v) const { return height / 2.0 - (v - cy) * scale; }
};

}  // namespace

std::string render_network_svg(const NetworkGraph& graph, const std::optional<NodeLayout>& layout,
                               const std::vector<UnitPoint>& points, const PlotOptions& options) {
  if (!layout || layout->dims() < 2 ||
      static_cast<std::size_t>(layout->positions.rows()) != graph.nodes.size()) {
    throw Error(ErrorCode::MissingLayout, "network plot needs a node layout with >= 2 dimensions");
  }
  const auto& pos = layout->positions;
  const std::size_t k = graph.nodes.size();

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  auto extend = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (std::size_t i = 0; i < k; ++i) {
    extend(pos(static_cast<Eigen::Index>(i), 0), pos(static_cast<Eigen::Index>(i), 1));
  }
  if (options.show_points) {
    for (const auto& p : points) {
      if (p.coords.size() >= 2) extend(p.coords[0], p.coords[1]);
    }
  }
  Frame frame;
  frame.width = options.width;
  frame.height = options.height;
  if (k > 0 || !points.empty()) {
    frame.cx = (xmin + xmax) / 2.0;
    frame.cy = (ymin + ymax) / 2.0;
    const double extent = std::max(xmax - xmin, ymax - ymin);
    const double room = std::min(options.width, options.height) - 2.0 * options.margin;
    frame.scale = extent > 0.0 ? room / extent : 1.0;
  }

  const auto strength = graph.node_strengths();
  const double max_strength =
      strength.empty() ? 0.0 : *std::max_element(strength.begin(), strength.end());
  double max_weight = 0.0;
  for (double w : graph.weights) max_weight = std::max(max_weight, std::abs(w));
  const double node_slope =
      max_strength > 0.0 ? (options.node_radius_max - options.node_radius_min) / max_strength : 0.0;
  const double edge_slope =
      max_weight > 0.0 ? (options.edge_width_max - options.edge_width_min) / max_weight : 0.0;

  auto color_of_group = [&](const std::string& name) {
    auto it = options.group_colors.find(name);
    return it == options.group_colors.end() ? options.neutral_color : it->second;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(options.width) +
         "\" height=\"" + num(options.height) + "\" viewBox=\"0 0 " + num(options.width) + " " +
         num(options.height) + "\">\n";
  svg += "<title>" + xml_escape(graph.kind.describe()) + "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(options.width) + "\" height=\"" +
         num(options.height) + "\" fill=\"#ffffff\"/>\n";

  if (options.show_points) {
    svg += "<g class=\"points\">\n";
    for (const auto& p : points) {
      if (p.coords.size() < 2) continue;
      const auto color = p.group ? color_of_group(p.group->name) : options.neutral_color;
      svg += "<circle cx=\"" + num(frame.x(p.coords[0])) + "\" cy=\"" + num(frame.y(p.coords[1])) +
             "\" r=\"" + num(options.point_radius) + "\" fill=\"" + color +
             "\" fill-opacity=\"0.35\"/>\n";
    }
    svg += "</g>\n";
  }

  svg += "<g class=\"edges\">\n";
  for (auto [i, j] : pair_order(k)) {
    const double w = graph.weights[pair_index(i, j, k)];
    if (w == 0.0) continue;
    std::string color;
    if (graph.kind.kind == NetworkKind::Kind::Subtraction) {
      color = w > 0.0 ? options.positive_color : options.negative_color;
    } else {
      color = color_of_group(graph.kind.group_a.name);
    }
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    svg += "<line x1=\"" + num(frame.x(pos(a, 0))) + "\" y1=\"" + num(frame.y(pos(a, 1))) +
           "\" x2=\"" + num(frame.x(pos(b, 0))) + "\" y2=\"" + num(frame.y(pos(b, 1))) +
           "\" stroke=\"" + color + "\" stroke-width=\"" +
           num(options.edge_width_min + edge_slope * std::abs(w)) +
           "\" stroke-linecap=\"round\" data-i=\"" + std::to_string(graph.nodes[i].topic_id) +
           "\" data-j=\"" + std::to_string(graph.nodes[j].topic_id) + "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g class=\"nodes\">\n";
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x = frame.x(pos(r, 0));
    const double y = frame.y(pos(r, 1));
    const double radius = options.node_radius_min + node_slope * strength[i];
    svg += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(radius) +
           "\" fill=\"#333333\" data-topic=\"" + std::to_string(graph.nodes[i].topic_id) + "\"/>\n";
    if (options.show_labels) {
      svg += "<text x=\"" + num(x + radius + 2.0) + "\" y=\"" + num(y - radius - 2.0) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#111111\">" +
             xml_escape(graph.nodes[i].label) + "</text>\n";
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace topicena
