#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "topicena/accumulate.hpp"
#include "topicena/project.hpp"

namespace topicena {

inline constexpr double kLayoutRidge = 1e-8;

struct NetworkKind {
  enum class Kind { GroupMean, Subtraction };
  Kind kind = Kind::GroupMean;
  GroupLabel group_a;  // the group for GroupMean; minuend for Subtraction
  GroupLabel group_b;  // subtrahend for Subtraction

  std::string describe() const;
  friend bool operator==(const NetworkKind&, const NetworkKind&) = default;
};

/// Undirected weighted topic network. `weights` follows the model's
/// lexicographic pair order, so weights[pair_index(i, j, K)] is edge (i, j).
struct NetworkGraph {
  std::vector<TopicInfo> nodes;
  std::vector<double> weights;
  NetworkKind kind;

  double weight(std::size_t i, std::size_t j) const;
  /// Sum of incident edge weights; absolute weights for subtraction graphs
  /// so node size stays non-negative.
  std::vector<double> node_strengths() const;
  /// Sum of |weight| over all edges.
  double l1_mass() const;
};

struct DimensionFit {
  double pearson = 0.0;   // NaN when either side has zero variance
  double spearman = 0.0;  // NaN when either side has zero variance
  bool degenerate = false;
};

struct NodeLayout {
  Eigen::MatrixXd positions;  // topic x dimension
  std::vector<DimensionFit> fit;
  std::vector<bool> isolated;  // no incident weight in any included unit
  bool ridge_applied = false;
  std::size_t units_used = 0;
  double objective = 0.0;

  std::size_t dims() const { return static_cast<std::size_t>(positions.cols()); }
};

NetworkGraph group_mean_network(const AccumulatedModel& model, const GroupLabel& group);

/// Edge-wise a - b. Throws NodeSetMismatch unless both graphs share nodes and
/// pair order.
NetworkGraph subtract_network(const NetworkGraph& a, const NetworkGraph& b);

/// Per-unit centroid coefficients: centroid_u = sum_i coef(u, i) * X_i with
/// coef(u, i) = sum_j w_u(i, j) / (2 * sum w_u). Rows for zero-weight units
/// are zero and flagged false in `included`.
struct CentroidSystem {
  Eigen::MatrixXd coefficients;  // unit x topic
  std::vector<bool> included;
};
CentroidSystem centroid_system(const AccumulatedModel& model);

/// Least-squares node positions so each unit's weighted edge-midpoint
/// centroid lands on its projected point. Isolated topics sit at the origin;
/// the ridge term is added only if the remaining normal equations are
/// singular. Throws AllUnitsEmpty.
NodeLayout optimize_node_positions(const AccumulatedModel& model,
                                   const std::vector<UnitPoint>& points,
                                   const ProjectionModel& projection);

/// Sum over included units of |p_u - centroid_u(X)|^2.
double layout_objective(const AccumulatedModel& model, const std::vector<UnitPoint>& points,
                        const Eigen::MatrixXd& positions);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::ordered_json network_to_json(const NetworkGraph& graph,
                                       const std::optional<NodeLayout>& layout);
struct NetworkFile {
  NetworkGraph graph;
  std::optional<NodeLayout> layout;
};
NetworkFile network_from_json(const nlohmann::json& j);
void write_network(const std::filesystem::path& path, const NetworkGraph& graph,
                   const std::optional<NodeLayout>& layout);
NetworkFile read_network(const std::filesystem::path& path);

}  // namespace topicena
