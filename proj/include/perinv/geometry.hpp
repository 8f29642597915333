#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perinv/types.hpp"

namespace perinv {

/// A finite (rank 0) or l-periodic point set in R^n.
///
/// The motif is stored in mixed coordinates: the first `rank` columns are
/// fractional coordinates along the basis vectors, the remaining `dim - rank`
/// columns are absolute coordinates (Angstrom) along an orthonormal frame of
/// the orthogonal complement of the lattice span. The complement frame is
/// obtained deterministically by Gram-Schmidt on the standard axes, so for a
/// basis such as (4, 0) in R^2 the second column is simply the y coordinate.
///
/// Instances are immutable after construction.
class PeriodicSet {
 public:
  static constexpr double kRankEps = 1e-12;
  static constexpr double kPointEps = 1e-12;
  static constexpr double kWrapTol = 1e-12;

  /// `basis` holds `rank` rows of length `dim`; `motif` holds `m` rows of
  /// mixed coordinates of length `dim`. Throws RankDeficientBasis,
  /// DimensionMismatch or DuplicateMotifPoint.
  PeriodicSet(int dim, int rank, Matrix basis, Matrix motif,
              std::vector<std::string> species = {}, std::string id = {});

  /// Builds a set from Cartesian motif positions.
  static PeriodicSet from_cartesian(int dim, int rank, const Matrix& basis,
                                    const Matrix& points,
                                    std::vector<std::string> species = {},
                                    std::string id = {});

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return rank_; }
  int size() const noexcept { return static_cast<int>(motif_.rows()); }
  bool is_finite() const noexcept { return rank_ == 0; }
  bool is_full_rank() const noexcept { return rank_ == dim_; }

  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& motif_mixed() const noexcept { return motif_; }
  const Matrix& points() const noexcept { return cartesian_; }
  const Matrix& complement() const noexcept { return complement_; }
  /// Rows b_i* with b_i* . v_j = delta_ij.
  const Matrix& dual_basis() const noexcept { return dual_; }

  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::string& id() const noexcept { return id_; }

  PeriodicSet with_id(std::string id) const;

  /// Mixed coordinates of an arbitrary Cartesian point.
  RowVector to_mixed(const RowVector& point) const;
  RowVector to_cartesian(const RowVector& mixed) const;

 private:
  int dim_;
  int rank_;
  Matrix basis_;
  Matrix complement_;
  Matrix dual_;
  Matrix motif_;
  Matrix cartesian_;
  std::vector<std::string> species_;
  std::string id_;
};

inline PeriodicSet make_periodic_set(int dim, int rank, Matrix basis, Matrix motif,
                                     std::vector<std::string> species = {},
                                     std::string id = {}) {
  return PeriodicSet(dim, rank, std::move(basis), std::move(motif), std::move(species),
                     std::move(id));
}

struct Ball {
  RowVector center;
  double radius = 0.0;
};

struct LatticePoint {
  RowVector point;
  int motif_index = 0;
  IntVector shift;
  double distance = 0.0;  // to the query centre
};

/// All points p + v of the infinite set with |p + v - center| <= radius,
/// sorted by (distance, motif index, shift).
std::vector<LatticePoint> points_in_ball(const PeriodicSet& set, const Ball& ball);

/// Half the minimum distance between distinct points of the set. Infinite for
/// a single-point finite set.
double packing_radius(const PeriodicSet& set);

/// Longest diagonal of the unit cell spanned by the basis.
double cell_diagonal(const PeriodicSet& set);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// |det| of the basis; requires a full-rank set.
double cell_volume(const PeriodicSet& set);

/// Point packing coefficient (vol[U] / (m V_n))^(1/n). Throws NotFullRank.
double ppc(const PeriodicSet& set);

/// Displaces every motif point by an independent uniform vector in the ball of
/// radius `epsilon`. Deterministic for a given seed.
PeriodicSet perturb(const PeriodicSet& set, double epsilon, std::uint64_t seed);

/// Same infinite set described by a cell enlarged `factors[i]` times along
/// basis vector i.
PeriodicSet supercell(const PeriodicSet& set, const std::vector<int>& factors);

/// Image of the set under x -> rotation * x + translation. `rotation` must be
/// orthogonal (reflections allowed).
PeriodicSet apply_isometry(const PeriodicSet& set, const Matrix& rotation,
                           const RowVector& translation);

}  // namespace perinv
