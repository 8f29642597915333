#pragma once

#include <string>
#include <vector>

#include "perinv/geometry.hpp"
#include "perinv/types.hpp"

namespace perinv {

/// Unordered rows of k non-decreasing values with positive weights summing
/// to one. Houses PDD, PDD^{h}, PDA^{h} and PSD matrices.
struct RowDistribution {
  Vector weights;
  Matrix rows;
  /// Number of rows before any collapsing (the motif size m).
  int expanded_rows = 0;
  bool collapsed = false;

  int size() const noexcept { return static_cast<int>(rows.rows()); }
  int columns() const noexcept { return static_cast<int>(rows.cols()); }

  /// Equal-weight distribution over the given rows.
  static RowDistribution uniform(Matrix rows);
};

inline constexpr double kCollapseTolerance = 1e-10;

/// Merges rows that agree entrywise within `tol`; the first occurrence keeps
/// its position.
RowDistribution collapse(const RowDistribution& dist, double tol = kCollapseTolerance);

/// Keeps the first `k` columns.
RowDistribution truncate(const RowDistribution& dist, int k);

/// Column-wise concatenation of distributions whose rows correspond one to
/// one (same motif order, uncollapsed).
RowDistribution concat(const std::vector<RowDistribution>& parts);

/// True when both describe the same weighted multiset of rows (within `tol`).
bool same_distribution(const RowDistribution& a, const RowDistribution& b, double tol = 1e-9);

/// m x k matrix of distances from each motif point to its k nearest
/// neighbours in the infinite set.
Matrix knn_rows(const PeriodicSet& set, int k);

RowDistribution pdd(const PeriodicSet& set, int k, bool collapse_rows = false);

/// Order-h distribution: per motif point the k smallest averages of all
/// pairwise distances between the point and h further points.
RowDistribution pdd_h(const PeriodicSet& set, int h, int k);

/// Orders 1..h side by side (k*h columns).
RowDistribution pdd_concat(const PeriodicSet& set, int h, int k);

struct MomentsMatrix {
  Matrix values;  // t x k
  std::string source;
  int order = 1;
};

/// Column-wise moments mu_1..mu_t. Negative entries (PDA inputs) use a signed
/// power mean for odd t and a sign-carrying absolute power mean for even t.
MomentsMatrix moments(const RowDistribution& dist, int t);

/// Weighted column means (first moment).
RowVector column_means(const RowDistribution& dist);

RowVector amd(const PeriodicSet& set, int k);

/// b(h, k) = b + 1 where C(b, h) lies in (k-1, k].
double b_coefficient(int h, int k);

/// (h! j)^(1/(h n)) for j = 1..k.
RowVector asymptote_shape(int h, int n, int k);

/// c(S; h, k): PPC(S) for h = 1, least-squares fit of the column means of
/// PDD^{h} against the asymptote shape for h >= 2.
double fit_coefficient(const PeriodicSet& set, int h, int k);

/// Closed-form least-squares coefficient of an already computed PDD^{h}.
double fit_least_squares(const RowDistribution& pdd_h_dist, int h, int n);

/// rho_k = sum x_j / sum x_j^2 for the asymptote shape x.
double rho_coefficient(int h, int n, int k);

/// PDD^{h} minus c(S;h,k) (h! j)^(1/(hn)) in every row.
RowDistribution pda_h(const PeriodicSet& set, int h, int k);
RowDistribution pda_from_pdd(const RowDistribution& pdd_h_dist, int h, int n, double coefficient);

RowVector ada_h(const PeriodicSet& set, int h, int k);

/// Pointwise Shift Distribution of a 1D sequence (periodic or finite).
RowDistribution psd(const PeriodicSet& set, int k);

/// Rebuilds a periodic sequence from PSD(S; m) (m columns). The result is
/// verified by recomputing its PSD.
PeriodicSet psd_reconstruct(const RowDistribution& psd_matrix);

/// PSD row of the mirror image for an m-column row whose last entry is the
/// period.
RowVector psd_mirror(const RowVector& row, double period);

/// PSD(S; m) of the reflected sequence.
RowDistribution psd_mirror(const RowDistribution& psd_matrix);

/// Isometry test for periodic sequences via PSD(.; m) and its mirror.
bool psd_isometric(const PeriodicSet& a, const PeriodicSet& b, double tol = 1e-9);

}  // namespace perinv
