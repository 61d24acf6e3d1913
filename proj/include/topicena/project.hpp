#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "topicena/accumulate.hpp"

namespace topicena {

inline constexpr double kOrthonormalityTolerance = 1e-9;
inline constexpr double kDegenerateMeansTolerance = 1e-12;

struct ProjectionMethod {
  enum class Kind { Svd, MeansRotation };
  Kind kind = Kind::Svd;
  GroupLabel group_a;
  GroupLabel group_b;

  static ProjectionMethod svd() { return {}; }
  static ProjectionMethod means_rotation(GroupLabel a, GroupLabel b) {
    return {Kind::MeansRotation, std::move(a), std::move(b)};
  }
  /// "svd" or "means:A,B"; parse() accepts the same.
  std::string describe() const;
  static ProjectionMethod parse(const std::string& text);
};

/// Orthonormal basis (one column per dimension, rows follow the model's pair
/// order) fitted on grand-mean-centered unit vectors.
struct ProjectionModel {
  ProjectionMethod method;
  Eigen::VectorXd center;
  Eigen::MatrixXd basis;
  std::vector<double> variance_explained;

  std::size_t dims() const { return static_cast<std::size_t>(basis.cols()); }
  std::size_t pair_count() const { return static_cast<std::size_t>(basis.rows()); }
};

struct UnitPoint {
  UnitId unit_id;
  std::vector<double> coords;
  std::optional<GroupLabel> group;

  friend bool operator==(const UnitPoint&, const UnitPoint&) = default;
};

struct Projection {
  ProjectionModel model;
  std::vector<UnitPoint> points;
};

/// Top-d right singular directions of the centered unit matrix. Each basis
/// vector's largest-magnitude entry is made positive. Throws RankDeficient if
/// the centered matrix has rank < d.
Projection svd_projection(const AccumulatedModel& model, std::size_t dims);

/// dim1 is the normalized difference of the two group means; dims 2..d are
/// the leading singular directions of the data with the dim1 component
/// removed, padded with standard axes when that residual has too few
/// directions. Throws EmptyGroup, DegenerateMeans, or RankDeficient when the
/// pair space itself has fewer than d dimensions.
Projection means_rotation_projection(const AccumulatedModel& model, const GroupLabel& group_a,
                                     const GroupLabel& group_b, std::size_t dims);

Projection fit_projection(const AccumulatedModel& model, const ProjectionMethod& method,
                          std::size_t dims);

/// coords[k] = <basis_k, v - center>. Throws DimensionMismatch.
std::vector<UnitPoint> project_units(const ProjectionModel& projection,
                                     const AccumulatedModel& model);

/// Flips `v` so that its first largest-magnitude entry is positive.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v);

nlohmann::ordered_json projection_to_json(const ProjectionModel& projection);
ProjectionModel projection_from_json(const nlohmann::json& j);
void write_projection(const std::filesystem::path& path, const ProjectionModel& projection);
ProjectionModel read_projection(const std::filesystem::path& path);

/// CSV `unit_id,group,dim1,dim2,...`; unit_id parts joined by '|'.
std::string serialize_points(const std::vector<UnitPoint>& points);
std::vector<UnitPoint> parse_points(const std::string& csv_text);
void write_points(const std::filesystem::path& path, const std::vector<UnitPoint>& points);
std::vector<UnitPoint> read_points(const std::filesystem::path& path);

}  // namespace topicena
