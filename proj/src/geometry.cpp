#include "perinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "perinv/error.hpp"

namespace perinv {
namespace {

Matrix complement_frame(const Matrix& basis, int dim) {
  const int rank = static_cast<int>(basis.rows());
  std::vector<RowVector> frame;
  for (int i = 0; i < rank; ++i) {
    RowVector v = basis.row(i);
    for (const auto& u : frame) v -= v.dot(u) * u;
    frame.push_back(v.normalized());
  }
  Matrix out(dim - rank, dim);
  int filled = 0;
  for (int axis = 0; axis < dim && filled < dim - rank; ++axis) {
    RowVector v = RowVector::Unit(dim, axis);
    for (const auto& u : frame) v -= v.dot(u) * u;
    if (v.norm() < 1e-8) continue;
    v.normalize();
    frame.push_back(v);
    out.row(filled++) = v;
  }
  return out;
}

double wrap_unit(double f) {
  f -= std::floor(f);
  if (1.0 - f <= PeriodicSet::kWrapTol) f = 0.0;
  return f;
}

bool shift_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

PeriodicSet::PeriodicSet(int dim, int rank, Matrix basis, Matrix motif,
                         std::vector<std::string> species, std::string id)
    : dim_(dim), rank_(rank), basis_(std::move(basis)), motif_(std::move(motif)),
      species_(std::move(species)), id_(std::move(id)) {
  if (dim_ < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
  if (rank_ < 0 || rank_ > dim_)
    throw Error(ErrorCode::DimensionMismatch, "rank must lie in [0, dim]");
  if (basis_.rows() != rank_ || (rank_ > 0 && basis_.cols() != dim_))
    throw Error(ErrorCode::DimensionMismatch, "basis must hold rank vectors of length dim");
  if (rank_ == 0) basis_.resize(0, dim_);
  if (motif_.rows() < 1) throw Error(ErrorCode::DimensionMismatch, "motif is empty");
  if (motif_.cols() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "motif points must have dim coordinates");
  if (!species_.empty() && static_cast<Eigen::Index>(species_.size()) != motif_.rows())
    throw Error(ErrorCode::DimensionMismatch, "species list must match motif size");
  if (!motif_.allFinite() || !basis_.allFinite())
    throw Error(ErrorCode::DimensionMismatch, "non-finite coordinates");

  if (rank_ > 0) {
    const Matrix gram = basis_ * basis_.transpose();
    double scale = 1.0;
    for (int i = 0; i < rank_; ++i) scale *= gram(i, i);
    if (scale <= 0.0 || gram.determinant() <= kRankEps * scale)
      throw Error(ErrorCode::RankDeficientBasis, "basis vectors are linearly dependent");
    dual_ = gram.inverse() * basis_;
  } else {
    dual_.resize(0, dim_);
  }
  complement_ = complement_frame(basis_, dim_);

  for (Eigen::Index i = 0; i < motif_.rows(); ++i)
    for (int j = 0; j < rank_; ++j) motif_(i, j) = wrap_unit(motif_(i, j));

  cartesian_.resize(motif_.rows(), dim_);
  for (Eigen::Index i = 0; i < motif_.rows(); ++i) cartesian_.row(i) = to_cartesian(motif_.row(i));

  // Two motif points closer than 2 eps_point modulo the lattice are duplicates.
  for (Eigen::Index i = 0; i < motif_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < motif_.rows(); ++j) {
      RowVector diff = motif_.row(j) - motif_.row(i);
      for (int c = 0; c < rank_; ++c) diff(c) -= std::round(diff(c));
      if (to_cartesian(diff).norm() <= 2.0 * kPointEps)
        throw Error(ErrorCode::DuplicateMotifPoint,
                    "motif points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    }
  }
}

PeriodicSet PeriodicSet::from_cartesian(int dim, int rank, const Matrix& basis,
                                        const Matrix& points, std::vector<std::string> species,
                                        std::string id) {
  if (points.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "points must have dim columns");
  if (basis.rows() != rank || (rank > 0 && basis.cols() != dim))
    throw Error(ErrorCode::DimensionMismatch, "basis must hold rank vectors of length dim");
  Matrix b = basis;
  if (rank == 0) b.resize(0, dim);
  Matrix mixed(points.rows(), dim);
  if (rank > 0) {
    const Matrix gram = b * b.transpose();
    const Matrix dual = gram.inverse() * b;
    mixed.leftCols(rank) = points * dual.transpose();
  }
  if (rank < dim) {
    const Matrix comp = complement_frame(b, dim);
    mixed.rightCols(dim - rank) = points * comp.transpose();
  }
  return PeriodicSet(dim, rank, std::move(b), std::move(mixed), std::move(species), std::move(id));
}

PeriodicSet PeriodicSet::with_id(std::string id) const {
  PeriodicSet copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

RowVector PeriodicSet::to_mixed(const RowVector& point) const {
  RowVector out(dim_);
  if (rank_ > 0) out.head(rank_) = point * dual_.transpose();
  if (rank_ < dim_) out.tail(dim_ - rank_) = point * complement_.transpose();
  return out;
}

RowVector PeriodicSet::to_cartesian(const RowVector& mixed) const {
  RowVector out = RowVector::Zero(dim_);
  if (rank_ > 0) out += mixed.head(rank_) * basis_;
  if (rank_ < dim_) out += mixed.tail(dim_ - rank_) * complement_;
  return out;
}

std::vector<LatticePoint> points_in_ball(const PeriodicSet& set, const Ball& ball) {
  if (ball.center.size() != set.dim())
    throw Error(ErrorCode::DimensionMismatch, "ball centre has wrong dimension");
  if (!(ball.radius >= 0.0) || !std::isfinite(ball.radius))
    throw Error(ErrorCode::InvalidArgument, "ball radius must be finite and non-negative");

  const int l = set.rank();
  const double r = ball.radius;
  std::vector<LatticePoint> out;

  RowVector center_frac;
  std::vector<double> reach(l);
  if (l > 0) {
    center_frac = ball.center * set.dual_basis().transpose();
    for (int a = 0; a < l; ++a) reach[a] = r * set.dual_basis().row(a).norm();
  }

  IntVector lo(l), hi(l), shift(l);
  for (int i = 0; i < set.size(); ++i) {
    const RowVector& p = set.points().row(i);
    for (int a = 0; a < l; ++a) {
      const double offset = center_frac(a) - set.motif_mixed()(i, a);
      lo(a) = static_cast<int>(std::floor(offset - reach[a]));
      hi(a) = static_cast<int>(std::ceil(offset + reach[a]));
    }
    shift = lo;
    while (true) {
      RowVector q = p;
      for (int a = 0; a < l; ++a) q += shift(a) * set.basis().row(a);
      const double dist = (q - ball.center).norm();
      if (dist <= r) out.push_back({q, i, shift, dist});
      int a = 0;
      for (; a < l; ++a) {
        if (shift(a) < hi(a)) {
          ++shift(a);
          break;
        }
        shift(a) = lo(a);
      }
      if (a == l) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const LatticePoint& x, const LatticePoint& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.motif_index != y.motif_index) return x.motif_index < y.motif_index;
    return shift_less(x.shift, y.shift);
  });
  return out;
}

double packing_radius(const PeriodicSet& set) {
  double best = std::numeric_limits<double>::infinity();
  if (set.is_finite()) {
    for (int i = 0; i < set.size(); ++i)
      for (int j = i + 1; j < set.size(); ++j)
        best = std::min(best, (set.points().row(i) - set.points().row(j)).norm());
    return 0.5 * best;
  }
  // Every point has its own lattice translate within the shortest basis vector.
  double reach = std::numeric_limits<double>::infinity();
  for (int a = 0; a < set.rank(); ++a) reach = std::min(reach, set.basis().row(a).norm());
  for (int i = 0; i < set.size(); ++i) {
    for (const auto& lp : points_in_ball(set, {set.points().row(i), reach})) {
      if (lp.motif_index == i && lp.shift.isZero()) continue;
      best = std::min(best, lp.distance);
      break;
    }
  }
  return 0.5 * best;
}

double cell_diagonal(const PeriodicSet& set) {
  const int l = set.rank();
  if (l == 0) return 0.0;
  double best = 0.0;
  const unsigned combos = 1u << (l - 1);
  for (unsigned mask = 0; mask < combos; ++mask) {
    RowVector v = set.basis().row(0);
    for (int a = 1; a < l; ++a) {
      if (mask & (1u << (a - 1)))
        v -= set.basis().row(a);
      else
        v += set.basis().row(a);
    }
    best = std::max(best, v.norm());
  }
  return best;
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double cell_volume(const PeriodicSet& set) {
  if (!set.is_full_rank()) throw Error(ErrorCode::NotFullRank, "cell volume needs rank == dim");
  return std::abs(set.basis().determinant());
}

double ppc(const PeriodicSet& set) {
  if (!set.is_full_rank())
    throw Error(ErrorCode::NotFullRank, "point packing coefficient needs rank == dim");
  const int n = set.dim();
  return std::pow(cell_volume(set) / (set.size() * unit_ball_volume(n)), 1.0 / n);
}

PeriodicSet perturb(const PeriodicSet& set, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be non-negative");
  if (epsilon == 0.0) return set;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = set.dim();
  Matrix points = set.points();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    RowVector dir(n);
    do {
      for (int c = 0; c < n; ++c) dir(c) = normal(rng);
    } while (dir.norm() == 0.0);
    dir.normalize();
    const double radius = epsilon * std::pow(unit(rng), 1.0 / n);
    points.row(i) += radius * dir;
  }
  return PeriodicSet::from_cartesian(n, set.rank(), set.basis(), points, set.species(), set.id());
}

PeriodicSet supercell(const PeriodicSet& set, const std::vector<int>& factors) {
  const int l = set.rank();
  if (static_cast<int>(factors.size()) != l)
    throw Error(ErrorCode::DimensionMismatch, "one factor per basis vector expected");
  int copies = 1;
  for (int f : factors) {
    if (f < 1) throw Error(ErrorCode::InvalidArgument, "supercell factors must be positive");
    copies *= f;
  }
  Matrix basis = set.basis();
  for (int a = 0; a < l; ++a) basis.row(a) *= factors[a];
  Matrix motif(set.size() * copies, set.dim());
  std::vector<std::string> species;
  IntVector offset = IntVector::Zero(l);
  Eigen::Index row = 0;
  for (int c = 0; c < copies; ++c) {
    for (int i = 0; i < set.size(); ++i) {
      RowVector mixed = set.motif_mixed().row(i);
      for (int a = 0; a < l; ++a) mixed(a) = (mixed(a) + offset(a)) / factors[a];
      motif.row(row++) = mixed;
      if (!set.species().empty()) species.push_back(set.species()[i]);
    }
    for (int a = 0; a < l; ++a) {
      if (++offset(a) < factors[a]) break;
      offset(a) = 0;
    }
  }
  return PeriodicSet(set.dim(), l, std::move(basis), std::move(motif), std::move(species), set.id());
}

PeriodicSet apply_isometry(const PeriodicSet& set, const Matrix& rotation,
                           const RowVector& translation) {
  const int n = set.dim();
  if (rotation.rows() != n || rotation.cols() != n || translation.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "isometry has wrong dimension");
  Matrix basis = set.basis() * rotation.transpose();
  Matrix points = set.points() * rotation.transpose();
  points.rowwise() += translation;
  return PeriodicSet::from_cartesian(n, set.rank(), basis, points, set.species(), set.id());
}

}  // namespace perinv
