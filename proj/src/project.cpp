#include "topicena/project.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

std::string ProjectionMethod::describe() const {
  if (kind == Kind::Svd) return "svd";
  return "means:" + group_a.name + "," + group_b.name;
}

ProjectionMethod ProjectionMethod::parse(const std::string& text) {
  if (text == "svd") return svd();
  if (text.rfind("means:", 0) == 0) {
    const auto rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma != std::string::npos && comma > 0 && comma + 1 < rest.size()) {
      return means_rotation({rest.substr(0, comma)}, {rest.substr(comma + 1)});
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              "projection must be 'svd' or 'means:GROUPA,GROUPB', got '" + text + "'");
}

void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double max_abs = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Near-ties resolve to the lowest index so reruns agree bit for bit.
    if (std::abs(v[i]) >= max_abs * (1.0 - 1e-9)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

namespace {

void require_sphere(const AccumulatedModel& model) {
  if (model.normalization != Normalization::Sphere) {
    throw Error(ErrorCode::InvalidArgument, "projection needs a sphere-normalized model");
  }
  if (model.units.empty()) throw Error(ErrorCode::RankDeficient, "model has no units");
}

Eigen::MatrixXd unit_matrix(const AccumulatedModel& model) {
  const auto n = static_cast<Eigen::Index>(model.units.size());
  const auto p = static_cast<Eigen::Index>(model.pair_count());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto& values = model.units[static_cast<std::size_t>(u)].values;
    if (static_cast<Eigen::Index>(values.size()) != p) {
      throw Error(ErrorCode::DimensionMismatch, "unit vector length differs from pair count");
    }
    for (Eigen::Index j = 0; j < p; ++j) x(u, j) = values[static_cast<std::size_t>(j)];
  }
  return x;
}

Eigen::VectorXd grand_mean(const Eigen::MatrixXd& x) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index u = 0; u < x.rows(); ++u) c += x.row(u).transpose();
  return c / static_cast<double>(x.rows());
}

/// Numerical rank threshold scaled by the uncentered data's Frobenius norm,
/// so centering noise on identical units does not count as rank.
double rank_tolerance(const Eigen::MatrixXd& x) {
  return static_cast<double>(std::max(x.rows(), x.cols())) *
         std::numeric_limits<double>::epsilon() * x.norm();
}

struct RightSingular {
  Eigen::MatrixXd v;
  Eigen::VectorXd sigma;
  std::size_t rank = 0;
};

RightSingular right_singular(const Eigen::MatrixXd& m, double tol) {
  RightSingular out;
  if (m.size() == 0) return out;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  out.v = svd.matrixV();
  out.sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < out.sigma.size(); ++i) {
    if (out.sigma[i] > tol) ++out.rank;
  }
  return out;
}

std::vector<double> variance_fractions(const Eigen::MatrixXd& centered,
                                       const Eigen::MatrixXd& basis) {
  const double total = centered.squaredNorm();
  std::vector<double> out;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const double v = total > 0 ? (centered * basis.col(k)).squaredNorm() / total : 0.0;
    out.push_back(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

}  // namespace

Projection svd_projection(const AccumulatedModel& model, std::size_t dims) {
  require_sphere(model);
  if (dims < 1) throw Error(ErrorCode::InvalidArgument, "svd projection needs d >= 1");
  const Eigen::MatrixXd x = unit_matrix(model);
  Projection out;
  out.model.method = ProjectionMethod::svd();
  out.model.center = grand_mean(x);
  const Eigen::MatrixXd centered = x.rowwise() - out.model.center.transpose();

  const auto sv = right_singular(centered, rank_tolerance(x));
  if (sv.rank < dims) {
    throw Error(ErrorCode::RankDeficient,
                "centered unit matrix has rank " + std::to_string(sv.rank) + " < d = " +
                    std::to_string(dims));
  }
  const auto d = static_cast<Eigen::Index>(dims);
  out.model.basis = sv.v.leftCols(d);
  for (Eigen::Index k = 0; k < d; ++k) apply_sign_convention(out.model.basis.col(k));
  const double total = sv.sigma.squaredNorm();
  for (Eigen::Index k = 0; k < d; ++k) {
    out.model.variance_explained.push_back(
        std::clamp(sv.sigma[k] * sv.sigma[k] / total, 0.0, 1.0));
  }
  out.points = project_units(out.model, model);
  return out;
}

Projection means_rotation_projection(const AccumulatedModel& model, const GroupLabel& group_a,
                                     const GroupLabel& group_b, std::size_t dims) {
  require_sphere(model);
  if (dims < 2) throw Error(ErrorCode::InvalidArgument, "means rotation needs d >= 2");
  if (group_a == group_b) {
    throw Error(ErrorCode::InvalidArgument, "means rotation needs two distinct groups");
  }
  const Eigen::MatrixXd x = unit_matrix(model);
  Projection out;
  out.model.method = ProjectionMethod::means_rotation(group_a, group_b);
  out.model.center = grand_mean(x);
  const Eigen::MatrixXd centered = x.rowwise() - out.model.center.transpose();

  Eigen::VectorXd mean_a = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd mean_b = Eigen::VectorXd::Zero(x.cols());
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    auto g = model.group_of(model.units[u].unit_id);
    if (!g) continue;
    const auto row = centered.row(static_cast<Eigen::Index>(u)).transpose();
    if (*g == group_a) {
      mean_a += row;
      ++n_a;
    } else if (*g == group_b) {
      mean_b += row;
      ++n_b;
    }
  }
  if (n_a == 0 || n_b == 0) {
    throw Error(ErrorCode::EmptyGroup, "group '" + (n_a == 0 ? group_a : group_b).name +
                                           "' has no units");
  }
  mean_a /= static_cast<double>(n_a);
  mean_b /= static_cast<double>(n_b);
  const Eigen::VectorXd diff = mean_a - mean_b;
  const double gap = diff.norm();
  if (gap < kDegenerateMeansTolerance) {
    throw Error(ErrorCode::DegenerateMeans, "group means coincide (|diff| = " +
                                                io::format_double(gap) + ")");
  }
  const Eigen::VectorXd dim1 = diff / gap;

  const Eigen::MatrixXd residual = centered - (centered * dim1) * dim1.transpose();
  if (static_cast<std::size_t>(x.cols()) < dims) {
    throw Error(ErrorCode::RankDeficient, "pair space has " + std::to_string(x.cols()) +
                                              " dimensions < d = " + std::to_string(dims));
  }
  const auto sv = right_singular(residual, rank_tolerance(x));
  const auto d = static_cast<Eigen::Index>(dims);
  out.model.basis.resize(x.cols(), d);
  out.model.basis.col(0) = dim1;
  // Residual directions first, then standard axes for any dimension the
  // residual cannot supply (those carry zero variance).
  Eigen::Index filled = 1;
  auto orthogonalize = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index prev = 0; prev < filled; ++prev) {
        v -= out.model.basis.col(prev).dot(v) * out.model.basis.col(prev);
      }
    }
    return v;
  };
  for (std::size_t r = 0; r < sv.rank && filled < d; ++r) {
    Eigen::VectorXd v = orthogonalize(sv.v.col(static_cast<Eigen::Index>(r)));
    v.normalize();
    apply_sign_convention(v);
    out.model.basis.col(filled++) = v;
  }
  if (filled < d) {
    spdlog::warn("means rotation: residual has rank {}; {} axis-aligned dimension(s) added",
                 sv.rank, d - filled);
  }
  for (Eigen::Index axis = 0; axis < x.cols() && filled < d; ++axis) {
    Eigen::VectorXd v = orthogonalize(Eigen::VectorXd::Unit(x.cols(), axis));
    if (v.norm() < 0.5) continue;
    v.normalize();
    apply_sign_convention(v);
    out.model.basis.col(filled++) = v;
  }
  out.model.variance_explained = variance_fractions(centered, out.model.basis);
  out.points = project_units(out.model, model);
  return out;
}

Projection fit_projection(const AccumulatedModel& model, const ProjectionMethod& method,
                          std::size_t dims) {
  if (method.kind == ProjectionMethod::Kind::Svd) return svd_projection(model, dims);
  return means_rotation_projection(model, method.group_a, method.group_b, dims);
}

std::vector<UnitPoint> project_units(const ProjectionModel& projection,
                                     const AccumulatedModel& model) {
  const std::size_t p = projection.pair_count();
  if (static_cast<std::size_t>(projection.center.size()) != p) {
    throw Error(ErrorCode::DimensionMismatch, "projection center/basis length mismatch");
  }
  const std::size_t d = projection.dims();
  std::vector<UnitPoint> points;
  points.reserve(model.units.size());
  std::vector<double> shifted(p);
  for (const auto& unit : model.units) {
    if (unit.values.size() != p) {
      throw Error(ErrorCode::DimensionMismatch,
                  "unit '" + unit.unit_id.str() + "' has " + std::to_string(unit.values.size()) +
                      " values, projection expects " + std::to_string(p));
    }
    for (std::size_t j = 0; j < p; ++j) {
      shifted[j] = unit.values[j] - projection.center[static_cast<Eigen::Index>(j)];
    }
    UnitPoint pt;
    pt.unit_id = unit.unit_id;
    pt.group = model.group_of(unit.unit_id);
    pt.coords.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        acc += projection.basis(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
               shifted[j];
      }
      pt.coords[k] = acc;
    }
    points.push_back(std::move(pt));
  }
  return points;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

ordered_json projection_to_json(const ProjectionModel& projection) {
  ordered_json j;
  j["schema_version"] = 1;
  if (projection.method.kind == ProjectionMethod::Kind::Svd) {
    j["method"] = "svd";
  } else {
    j["method"] = "means_rotation";
    j["groups"] = {projection.method.group_a.name, projection.method.group_b.name};
  }
  j["dims"] = projection.dims();
  j["pair_count"] = projection.pair_count();
  j["centering"] = "grand_mean";
  j["sign_convention"] = "largest_magnitude_entry_positive";
  std::vector<double> center(projection.center.data(),
                             projection.center.data() + projection.center.size());
  j["center"] = center;
  ordered_json basis = ordered_json::array();
  for (Eigen::Index k = 0; k < projection.basis.cols(); ++k) {
    std::vector<double> row(projection.basis.col(k).data(),
                            projection.basis.col(k).data() + projection.basis.rows());
    basis.push_back(row);
  }
  j["basis"] = std::move(basis);
  j["variance_explained"] = projection.variance_explained;
  j["tolerances"] = {{"orthonormality", kOrthonormalityTolerance},
                     {"degenerate_means", kDegenerateMeansTolerance}};
  return j;
}

ProjectionModel projection_from_json(const json& j) {
  ProjectionModel m;
  try {
    const auto method = j.at("method").get<std::string>();
    if (method == "svd") {
      m.method = ProjectionMethod::svd();
    } else if (method == "means_rotation") {
      const auto groups = j.at("groups").get<std::vector<std::string>>();
      if (groups.size() != 2) throw Error(ErrorCode::ParseError, "means_rotation needs 2 groups");
      m.method = ProjectionMethod::means_rotation({groups[0]}, {groups[1]});
    } else {
      throw Error(ErrorCode::ParseError, "unknown projection method '" + method + "'");
    }
    const auto center = j.at("center").get<std::vector<double>>();
    const auto basis = j.at("basis").get<std::vector<std::vector<double>>>();
    const auto p = static_cast<Eigen::Index>(center.size());
    m.center = Eigen::Map<const Eigen::VectorXd>(center.data(), p);
    m.basis.resize(p, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (static_cast<Eigen::Index>(basis[k].size()) != p) {
        throw Error(ErrorCode::DimensionMismatch, "basis row length differs from center");
      }
      m.basis.col(static_cast<Eigen::Index>(k)) =
          Eigen::Map<const Eigen::VectorXd>(basis[k].data(), p);
    }
    m.variance_explained = j.at("variance_explained").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("projection: ") + e.what());
  }
  return m;
}

void write_projection(const std::filesystem::path& path, const ProjectionModel& projection) {
  io::write_file(path, projection_to_json(projection).dump(2) + "\n");
}

ProjectionModel read_projection(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return projection_from_json(j);
}

std::string serialize_points(const std::vector<UnitPoint>& points) {
  const std::size_t d = points.empty() ? 0 : points.front().coords.size();
  std::vector<std::string> header{"unit_id", "group"};
  for (std::size_t k = 0; k < d; ++k) header.push_back("dim" + std::to_string(k + 1));
  std::string out = io::csv_join(header) + "\n";
  for (const auto& pt : points) {
    std::vector<std::string> row{pt.unit_id.str(), pt.group ? pt.group->name : ""};
    for (double c : pt.coords) row.push_back(io::format_double(c));
    out += io::csv_join(row) + "\n";
  }
  return out;
}

std::vector<UnitPoint> parse_points(const std::string& csv_text) {
  const auto records = io::parse_csv(csv_text);
  if (records.empty() || records.front().fields.size() < 2 ||
      records.front().fields[0] != "unit_id" || records.front().fields[1] != "group") {
    throw Error(ErrorCode::ParseError, "points header must start with unit_id,group", 1);
  }
  const std::size_t d = records.front().fields.size() - 2;
  std::vector<UnitPoint> points;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != d + 2) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(d + 2) + " fields",
                  rec.line);
    }
    UnitPoint pt;
    std::string_view id = rec.fields[0];
    std::size_t start = 0;
    while (true) {
      const auto bar = id.find('|', start);
      pt.unit_id.parts.emplace_back(id.substr(start, bar - start));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    if (!rec.fields[1].empty()) pt.group = GroupLabel{rec.fields[1]};
    for (std::size_t k = 0; k < d; ++k) {
      pt.coords.push_back(io::parse_double(rec.fields[k + 2], rec.line));
    }
    points.push_back(std::move(pt));
  }
  return points;
}

void write_points(const std::filesystem::path& path, const std::vector<UnitPoint>& points) {
  io::write_file(path, serialize_points(points));
}

std::vector<UnitPoint> read_points(const std::filesystem::path& path) {
  return parse_points(io::read_file(path));
}

}  // namespace topicena
