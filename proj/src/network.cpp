#include "topicena/network.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>

#include "topicena/error.hpp"
#include "topicena/stats.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

std::string NetworkKind::describe() const {
  if (kind == Kind::GroupMean) return "group_mean:" + group_a.name;
  return "subtraction:" + group_a.name + "-" + group_b.name;
}

double NetworkGraph::weight(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  return weights[pair_index(i, j, nodes.size())];
}

std::vector<double> NetworkGraph::node_strengths() const {
  const bool absolute = kind.kind == NetworkKind::Kind::Subtraction;
  std::vector<double> strength(nodes.size(), 0.0);
  for (auto [i, j] : pair_order(nodes.size())) {
    const double w = weights[pair_index(i, j, nodes.size())];
    const double s = absolute ? std::abs(w) : w;
    strength[i] += s;
    strength[j] += s;
  }
  return strength;
}

double NetworkGraph::l1_mass() const {
  double total = 0.0;
  for (double w : weights) total += std::abs(w);
  return total;
}

NetworkGraph group_mean_network(const AccumulatedModel& model, const GroupLabel& group) {
  NetworkGraph g;
  g.nodes = model.topics;
  g.weights = group_mean_vector(model, group);
  g.kind = {NetworkKind::Kind::GroupMean, group, {}};
  return g;
}

NetworkGraph subtract_network(const NetworkGraph& a, const NetworkGraph& b) {
  if (a.nodes != b.nodes || a.weights.size() != b.weights.size()) {
    throw Error(ErrorCode::NodeSetMismatch, "cannot subtract networks over different nodes");
  }
  if (a.kind.kind != NetworkKind::Kind::GroupMean ||
      b.kind.kind != NetworkKind::Kind::GroupMean) {
    throw Error(ErrorCode::InvalidArgument, "subtraction needs two group-mean networks");
  }
  NetworkGraph out;
  out.nodes = a.nodes;
  out.kind = {NetworkKind::Kind::Subtraction, a.kind.group_a, b.kind.group_a};
  out.weights.resize(a.weights.size());
  for (std::size_t p = 0; p < a.weights.size(); ++p) out.weights[p] = a.weights[p] - b.weights[p];
  return out;
}

CentroidSystem centroid_system(const AccumulatedModel& model) {
  const std::size_t k = model.topics.size();
  const auto pairs = pair_order(k);
  CentroidSystem sys;
  sys.coefficients = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.units.size()),
                                           static_cast<Eigen::Index>(k));
  sys.included.assign(model.units.size(), false);
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    const auto& w = model.units[u].values;
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) continue;
    sys.included[u] = true;
    const auto row = static_cast<Eigen::Index>(u);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (w[p] == 0.0) continue;
      const double half = w[p] / (2.0 * total);
      sys.coefficients(row, static_cast<Eigen::Index>(pairs[p].first)) += half;
      sys.coefficients(row, static_cast<Eigen::Index>(pairs[p].second)) += half;
    }
  }
  return sys;
}

namespace {

Eigen::MatrixXd point_matrix(const AccumulatedModel& model, const std::vector<UnitPoint>& points,
                             std::size_t dims) {
  std::map<UnitId, const UnitPoint*> by_id;
  for (const auto& pt : points) by_id.emplace(pt.unit_id, &pt);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(model.units.size()),
                      static_cast<Eigen::Index>(dims));
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    auto it = by_id.find(model.units[u].unit_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "unit '" + model.units[u].unit_id.str() + "' has no point");
    }
    if (it->second->coords.size() < dims) {
      throw Error(ErrorCode::DimensionMismatch,
                  "point for '" + model.units[u].unit_id.str() + "' has too few dimensions");
    }
    for (std::size_t k = 0; k < dims; ++k) {
      out(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) = it->second->coords[k];
    }
  }
  return out;
}

}  // namespace

double layout_objective(const AccumulatedModel& model, const std::vector<UnitPoint>& points,
                        const Eigen::MatrixXd& positions) {
  const auto sys = centroid_system(model);
  const auto p = point_matrix(model, points, static_cast<std::size_t>(positions.cols()));
  const Eigen::MatrixXd centroids = sys.coefficients * positions;
  double total = 0.0;
  for (std::size_t u = 0; u < sys.included.size(); ++u) {
    if (!sys.included[u]) continue;
    const auto r = static_cast<Eigen::Index>(u);
    total += (p.row(r) - centroids.row(r)).squaredNorm();
  }
  return total;
}

NodeLayout optimize_node_positions(const AccumulatedModel& model,
                                   const std::vector<UnitPoint>& points,
                                   const ProjectionModel& projection) {
  const std::size_t dims = projection.dims();
  const std::size_t k = model.topics.size();
  if (projection.pair_count() != model.pair_count()) {
    throw Error(ErrorCode::DimensionMismatch, "projection and model pair counts differ");
  }
  const auto sys = centroid_system(model);
  const auto p = point_matrix(model, points, dims);

  std::vector<Eigen::Index> rows;
  for (std::size_t u = 0; u < sys.included.size(); ++u) {
    if (sys.included[u]) rows.push_back(static_cast<Eigen::Index>(u));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::AllUnitsEmpty, "no unit has a non-zero adjacency vector");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(k));
  Eigen::MatrixXd target(n, static_cast<Eigen::Index>(dims));
  for (Eigen::Index r = 0; r < n; ++r) {
    a.row(r) = sys.coefficients.row(rows[static_cast<std::size_t>(r)]);
    target.row(r) = p.row(rows[static_cast<std::size_t>(r)]);
  }

  NodeLayout layout;
  layout.units_used = rows.size();
  layout.isolated.assign(k, false);
  std::vector<Eigen::Index> active;
  for (std::size_t i = 0; i < k; ++i) {
    if (a.col(static_cast<Eigen::Index>(i)).cwiseAbs().sum() == 0.0) {
      layout.isolated[i] = true;
    } else {
      active.push_back(static_cast<Eigen::Index>(i));
    }
  }

  layout.positions = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                           static_cast<Eigen::Index>(dims));
  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a_active(n, m);
  for (Eigen::Index c = 0; c < m; ++c) a_active.col(c) = a.col(active[static_cast<std::size_t>(c)]);

  Eigen::MatrixXd normal = a_active.transpose() * a_active;
  const Eigen::MatrixXd rhs = a_active.transpose() * target;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(min_ev > max_ev * 1e-12)) {
    normal.diagonal().array() += kLayoutRidge;
    layout.ridge_applied = true;
  }
  const Eigen::MatrixXd solved = normal.ldlt().solve(rhs);
  for (Eigen::Index c = 0; c < m; ++c) {
    layout.positions.row(active[static_cast<std::size_t>(c)]) = solved.row(c);
  }

  const Eigen::MatrixXd centroids = a * layout.positions;
  layout.objective = (target - centroids).squaredNorm();
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
      x[static_cast<std::size_t>(r)] = target(r, static_cast<Eigen::Index>(d));
      y[static_cast<std::size_t>(r)] = centroids(r, static_cast<Eigen::Index>(d));
    }
    DimensionFit fit;
    fit.pearson = pearson_correlation(x, y);
    fit.spearman = spearman_correlation(x, y);
    fit.degenerate = std::isnan(fit.pearson);
    layout.fit.push_back(fit);
  }
  return layout;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  // Variance below rounding noise of the data counts as zero.
  const double scale_x = std::max(std::abs(mx), 1.0);
  const double scale_y = std::max(std::abs(my), 1.0);
  const double floor = 1e-24 * static_cast<double>(n);
  if (sxx <= floor * scale_x * scale_x || syy <= floor * scale_y * scale_y) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson_correlation(midranks(x), midranks(y));
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

namespace {

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

ordered_json network_to_json(const NetworkGraph& graph, const std::optional<NodeLayout>& layout) {
  ordered_json j;
  j["schema_version"] = 1;
  if (graph.kind.kind == NetworkKind::Kind::GroupMean) {
    j["kind"] = "group_mean";
    j["group"] = graph.kind.group_a.name;
  } else {
    j["kind"] = "subtraction";
    j["groups"] = {graph.kind.group_a.name, graph.kind.group_b.name};
    j["l1_mass"] = graph.l1_mass();
  }
  const auto strength = graph.node_strengths();
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    ordered_json n;
    n["topic_id"] = graph.nodes[i].topic_id;
    n["label"] = graph.nodes[i].label;
    n["top_words"] = graph.nodes[i].top_words;
    n["strength"] = strength[i];
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (auto [a, b] : pair_order(graph.nodes.size())) {
    edges.push_back({{"i", graph.nodes[a].topic_id},
                     {"j", graph.nodes[b].topic_id},
                     {"weight", graph.weights[pair_index(a, b, graph.nodes.size())]}});
  }
  j["edges"] = std::move(edges);
  if (layout) {
    ordered_json l;
    l["dims"] = layout->dims();
    ordered_json positions = ordered_json::array();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      std::vector<double> coords;
      for (std::size_t d = 0; d < layout->dims(); ++d) {
        coords.push_back(layout->positions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)));
      }
      positions.push_back({{"topic_id", graph.nodes[i].topic_id},
                           {"coords", coords},
                           {"isolated", static_cast<bool>(layout->isolated[i])}});
    }
    l["positions"] = std::move(positions);
    ordered_json fit = ordered_json::array();
    for (std::size_t d = 0; d < layout->fit.size(); ++d) {
      fit.push_back({{"dim", d + 1},
                     {"pearson", nan_to_null(layout->fit[d].pearson)},
                     {"spearman", nan_to_null(layout->fit[d].spearman)},
                     {"degenerate", layout->fit[d].degenerate}});
    }
    l["fit"] = std::move(fit);
    l["ridge_applied"] = layout->ridge_applied;
    l["ridge_lambda"] = kLayoutRidge;
    l["units_used"] = layout->units_used;
    l["objective"] = layout->objective;
    j["layout"] = std::move(l);
  }
  return j;
}

NetworkFile network_from_json(const json& j) {
  NetworkFile file;
  try {
    auto& g = file.graph;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "group_mean") {
      g.kind = {NetworkKind::Kind::GroupMean, {j.at("group").get<std::string>()}, {}};
    } else if (kind == "subtraction") {
      const auto groups = j.at("groups").get<std::vector<std::string>>();
      if (groups.size() != 2) throw Error(ErrorCode::ParseError, "subtraction needs 2 groups");
      g.kind = {NetworkKind::Kind::Subtraction, {groups[0]}, {groups[1]}};
    } else {
      throw Error(ErrorCode::ParseError, "unknown network kind '" + kind + "'");
    }
    std::map<int, std::size_t> index_of;
    for (const auto& n : j.at("nodes")) {
      TopicInfo t;
      t.topic_id = n.at("topic_id").get<int>();
      t.label = n.at("label").get<std::string>();
      t.top_words = n.value("top_words", std::vector<std::string>{});
      index_of[t.topic_id] = g.nodes.size();
      g.nodes.push_back(std::move(t));
    }
    const std::size_t k = g.nodes.size();
    g.weights.assign(pair_count(k), 0.0);
    for (const auto& e : j.at("edges")) {
      auto a = index_of.at(e.at("i").get<int>());
      auto b = index_of.at(e.at("j").get<int>());
      if (a == b) throw Error(ErrorCode::ParseError, "self edge");
      if (a > b) std::swap(a, b);
      g.weights[pair_index(a, b, k)] = e.at("weight").get<double>();
    }
    if (j.contains("layout") && !j["layout"].is_null()) {
      const auto& l = j["layout"];
      NodeLayout layout;
      const auto dims = l.at("dims").get<std::size_t>();
      layout.positions = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                               static_cast<Eigen::Index>(dims));
      layout.isolated.assign(k, false);
      for (const auto& pos : l.at("positions")) {
        const auto i = index_of.at(pos.at("topic_id").get<int>());
        const auto coords = pos.at("coords").get<std::vector<double>>();
        if (coords.size() != dims) throw Error(ErrorCode::DimensionMismatch, "node coords");
        for (std::size_t d = 0; d < dims; ++d) {
          layout.positions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = coords[d];
        }
        layout.isolated[i] = pos.value("isolated", false);
      }
      for (const auto& f : l.value("fit", json::array())) {
        DimensionFit fit;
        fit.pearson = f.at("pearson").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : f.at("pearson").get<double>();
        fit.spearman = f.at("spearman").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                  : f.at("spearman").get<double>();
        fit.degenerate = f.value("degenerate", false);
        layout.fit.push_back(fit);
      }
      layout.ridge_applied = l.value("ridge_applied", false);
      layout.units_used = l.value("units_used", std::size_t{0});
      layout.objective = l.value("objective", 0.0);
      file.layout = std::move(layout);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("network: ") + e.what());
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::ParseError, "network: edge or position names an unknown topic");
  }
  return file;
}

void write_network(const std::filesystem::path& path, const NetworkGraph& graph,
                   const std::optional<NodeLayout>& layout) {
  io::write_file(path, network_to_json(graph, layout).dump(2) + "\n");
}

NetworkFile read_network(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return network_from_json(j);
}

}  // namespace topicena
