#include "perinv/invariants.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "perinv/error.hpp"

namespace perinv {
namespace {

// Sorted distances (and positions) from motif point `center` to other points
// of the set. Every point closer than `complete_radius` is present.
struct Neighbourhood {
  std::vector<double> dist;
  std::vector<RowVector> points;
  double complete_radius = 0.0;

  int size() const { return static_cast<int>(dist.size()); }
};

Neighbourhood finite_neighbourhood(const PeriodicSet& set, int center) {
  Neighbourhood nb;
  std::vector<std::pair<double, int>> order;
  const RowVector& p = set.points().row(center);
  for (int j = 0; j < set.size(); ++j) {
    if (j == center) continue;
    order.emplace_back((set.points().row(j) - p).norm(), j);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, j] : order) {
    nb.dist.push_back(d);
    nb.points.push_back(set.points().row(j));
  }
  nb.complete_radius = std::numeric_limits<double>::infinity();
  return nb;
}

Neighbourhood neighbourhood_within(const PeriodicSet& set, int center, double radius) {
  if (set.is_finite()) return finite_neighbourhood(set, center);
  Neighbourhood nb;
  for (auto& lp : points_in_ball(set, {set.points().row(center), radius})) {
    if (lp.motif_index == center && lp.shift.isZero()) continue;
    nb.dist.push_back(lp.distance);
    nb.points.push_back(std::move(lp.point));
  }
  nb.complete_radius = radius;
  return nb;
}

double initial_search_radius(const PeriodicSet& set, int count) {
  const double diag = cell_diagonal(set);
  if (set.is_full_rank())
    return ppc(set) * std::pow(count + 1.0, 1.0 / set.dim()) + 1.5 * diag;
  return std::max(diag, 1e-6) * std::pow(count + 1.0, 1.0 / set.rank());
}

// At least `count` nearest neighbours of a motif point (all of them for a
// finite set).
Neighbourhood nearest(const PeriodicSet& set, int center, int count) {
  if (set.is_finite()) return finite_neighbourhood(set, center);
  double radius = initial_search_radius(set, count);
  while (true) {
    Neighbourhood nb = neighbourhood_within(set, center, radius);
    if (nb.size() >= count) return nb;
    radius *= 2.0;
  }
}

Neighbourhood prefix_within(const Neighbourhood& nb, double radius) {
  Neighbourhood out;
  for (int j = 0; j < nb.size() && nb.dist[j] <= radius; ++j) {
    out.dist.push_back(nb.dist[j]);
    out.points.push_back(nb.points[j]);
  }
  out.complete_radius = std::min(radius, nb.complete_radius);
  return out;
}

// k smallest h-order averages over tuples drawn from `nb`, in increasing
// order. Candidates are sorted by distance to the centre, so the largest
// distance of a tuple is the one of its last index; that gives the cut-off
// 2 d / (h + 1) from the lower distance bound.
class TupleEnumerator {
 public:
  TupleEnumerator(const Neighbourhood& nb, int h, int k)
      : nb_(nb), h_(h), k_(k), scale_(2.0 / (h * (h + 1.0))) {
    const int n = nb.size();
    pair_ = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) pair_(a, b) = pair_(b, a) = (nb.points[a] - nb.points[b]).norm();
    chosen_.reserve(h);
  }

  std::vector<double> run() {
    descend(0, 0, 0.0);
    std::vector<double> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  bool full() const { return static_cast<int>(heap_.size()) == k_; }

  void descend(int depth, int start, double partial) {
    const int n = nb_.size();
    for (int j = start; j <= n - (h_ - depth); ++j) {
      if (full() && 2.0 * nb_.dist[j] / (h_ + 1.0) >= heap_.top()) break;
      double sum = partial + nb_.dist[j];
      for (int c : chosen_) sum += pair_(c, j);
      if (full() && sum * scale_ >= heap_.top()) continue;
      if (depth + 1 == h_) {
        push(sum * scale_, nb_.dist[j]);
      } else {
        chosen_.push_back(j);
        descend(depth + 1, j + 1, sum);
        chosen_.pop_back();
      }
    }
  }

  void push(double value, [[maybe_unused]] double radius) {
    assert(value >= 2.0 * radius / (h_ + 1.0) - 1e-9 * (1.0 + radius));
    assert(value <= 2.0 * h_ * radius / (h_ + 1.0) + 1e-9 * (1.0 + radius));
    if (!full()) {
      heap_.push(value);
    } else if (value < heap_.top()) {
      heap_.pop();
      heap_.push(value);
    }
  }

  const Neighbourhood& nb_;
  int h_;
  int k_;
  double scale_;
  Matrix pair_;
  std::vector<int> chosen_;
  std::priority_queue<double> heap_;
};

RowVector finish_row(std::vector<double> values, int k) {
  if (values.empty())
    throw Error(ErrorCode::TooFewPoints, "no tuples of the requested order exist");
  // Non-existing entries repeat the largest existing value.
  RowVector row(k);
  for (int j = 0; j < k; ++j) row(j) = values[std::min<std::size_t>(j, values.size() - 1)];
  return row;
}

RowVector order_row(const PeriodicSet& set, int center, int h, int k) {
  if (h == 1) {
    Neighbourhood nb = nearest(set, center, k);
    nb.dist.resize(std::min(nb.size(), k));
    return finish_row(nb.dist, k);
  }
  const int count = std::max(h, static_cast<int>(std::ceil(b_coefficient(h, k) - 1.0 - 1e-9)));
  Neighbourhood nb = nearest(set, center, count);
  if (set.is_finite()) return finish_row(TupleEnumerator(nb, h, k).run(), k);

  const double radius = nb.dist[count - 1];
  std::vector<double> values = TupleEnumerator(prefix_within(nb, radius), h, k).run();
  if (static_cast<int>(values.size()) == k && values.back() <= 2.0 * radius / (h + 1.0))
    return finish_row(std::move(values), k);

  // Any tuple reaching beyond h R averages more than 2 h R / (h + 1), the
  // bound every tuple inside the first ball satisfies.
  const double wide = h * radius;
  const Neighbourhood big =
      nb.complete_radius >= wide ? prefix_within(nb, wide) : neighbourhood_within(set, center, wide);
  values = TupleEnumerator(big, h, k).run();
  if (static_cast<int>(values.size()) != k)
    throw Error(ErrorCode::SolverFailure, "candidate ball too small for order-h tuples");
  return finish_row(std::move(values), k);
}

void require_order(int h, int k) {
  if (h < 1) throw Error(ErrorCode::InvalidOrder, "order h must be at least 1");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
}

bool rows_close(const Matrix& rows, Eigen::Index a, const Matrix& other, Eigen::Index b, double tol) {
  return ((rows.row(a) - other.row(b)).cwiseAbs().array() <= tol).all();
}

double factorial(int h) {
  double f = 1.0;
  for (int i = 2; i <= h; ++i) f *= i;
  return f;
}

}  // namespace

RowDistribution RowDistribution::uniform(Matrix rows) {
  RowDistribution d;
  const auto m = rows.rows();
  d.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
  d.rows = std::move(rows);
  d.expanded_rows = static_cast<int>(m);
  return d;
}

RowDistribution collapse(const RowDistribution& dist, double tol) {
  std::vector<Eigen::Index> keep;
  std::vector<double> weight;
  for (Eigen::Index i = 0; i < dist.rows.rows(); ++i) {
    bool merged = false;
    for (std::size_t g = 0; g < keep.size(); ++g) {
      if (rows_close(dist.rows, keep[g], dist.rows, i, tol)) {
        weight[g] += dist.weights(i);
        merged = true;
        break;
      }
    }
    if (!merged) {
      keep.push_back(i);
      weight.push_back(dist.weights(i));
    }
  }
  RowDistribution out;
  out.rows.resize(static_cast<Eigen::Index>(keep.size()), dist.rows.cols());
  out.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t g = 0; g < keep.size(); ++g) {
    out.rows.row(static_cast<Eigen::Index>(g)) = dist.rows.row(keep[g]);
    out.weights(static_cast<Eigen::Index>(g)) = weight[g];
  }
  out.expanded_rows = dist.expanded_rows;
  out.collapsed = true;
  return out;
}

RowDistribution truncate(const RowDistribution& dist, int k) {
  if (k < 1 || k > dist.columns())
    throw Error(ErrorCode::InvalidArgument, "cannot truncate to " + std::to_string(k) + " columns");
  RowDistribution out = dist;
  out.rows = dist.rows.leftCols(k);
  return out;
}

RowDistribution concat(const std::vector<RowDistribution>& parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to concatenate");
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.collapsed || p.size() != parts.front().size())
      throw Error(ErrorCode::InvalidArgument, "concatenation needs uncollapsed rows in motif order");
    cols += p.rows.cols();
  }
  RowDistribution out = parts.front();
  out.rows.resize(parts.front().rows.rows(), cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.rows.middleCols(at, p.rows.cols()) = p.rows;
    at += p.rows.cols();
  }
  return out;
}

bool same_distribution(const RowDistribution& a, const RowDistribution& b, double tol) {
  if (a.columns() != b.columns()) return false;
  auto canonical = [tol](const RowDistribution& d) {
    RowDistribution c = collapse(d, tol);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(c.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      for (Eigen::Index j = 0; j < c.rows.cols(); ++j) {
        if (std::abs(c.rows(x, j) - c.rows(y, j)) > tol) return c.rows(x, j) < c.rows(y, j);
      }
      return false;
    });
    RowDistribution s = c;
    for (std::size_t i = 0; i < order.size(); ++i) {
      s.rows.row(static_cast<Eigen::Index>(i)) = c.rows.row(order[i]);
      s.weights(static_cast<Eigen::Index>(i)) = c.weights(order[i]);
    }
    return s;
  };
  const RowDistribution ca = canonical(a);
  const RowDistribution cb = canonical(b);
  if (ca.size() != cb.size()) return false;
  for (Eigen::Index i = 0; i < ca.rows.rows(); ++i) {
    if (!rows_close(ca.rows, i, cb.rows, i, tol)) return false;
    if (std::abs(ca.weights(i) - cb.weights(i)) > 1e-9) return false;
  }
  return true;
}

Matrix knn_rows(const PeriodicSet& set, int k) {
  require_order(1, k);
  Matrix out(set.size(), k);
  for (int i = 0; i < set.size(); ++i) out.row(i) = order_row(set, i, 1, k);
  return out;
}

RowDistribution pdd(const PeriodicSet& set, int k, bool collapse_rows) {
  RowDistribution d = RowDistribution::uniform(knn_rows(set, k));
  return collapse_rows ? collapse(d) : d;
}

RowDistribution pdd_h(const PeriodicSet& set, int h, int k) {
  require_order(h, k);
  Matrix rows(set.size(), k);
  for (int i = 0; i < set.size(); ++i) rows.row(i) = order_row(set, i, h, k);
  return RowDistribution::uniform(std::move(rows));
}

RowDistribution pdd_concat(const PeriodicSet& set, int h, int k) {
  require_order(h, k);
  std::vector<RowDistribution> parts;
  for (int order = 1; order <= h; ++order) parts.push_back(pdd_h(set, order, k));
  return concat(parts);
}

RowVector column_means(const RowDistribution& dist) {
  return dist.weights.transpose() * dist.rows;
}

MomentsMatrix moments(const RowDistribution& dist, int t) {
  if (t < 1) throw Error(ErrorCode::InvalidArgument, "moment count t must be at least 1");
  const double m = dist.expanded_rows > 0 ? dist.expanded_rows : dist.size();
  MomentsMatrix out;
  out.values.resize(t, dist.columns());
  out.order = t;
  out.source = "distribution";
  const RowVector mean = column_means(dist);
  for (int j = 0; j < dist.columns(); ++j) {
    out.values(0, j) = mean(j);
    for (int r = 2; r <= t; ++r) {
      const double norm = std::pow(m, 1.0 - r);
      double value = 0.0;
      if (r % 2 == 1) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < dist.rows.rows(); ++i) s += dist.weights(i) * std::pow(dist.rows(i, j), r);
        s *= norm;
        value = std::copysign(std::pow(std::abs(s), 1.0 / r), s);
      } else {
        double s = 0.0;
        for (Eigen::Index i = 0; i < dist.rows.rows(); ++i)
          s += dist.weights(i) * std::pow(std::abs(dist.rows(i, j)), r);
        value = std::pow(norm * s, 1.0 / r);
        if (mean(j) < 0.0) value = -value;
      }
      out.values(r - 1, j) = value;
    }
  }
  return out;
}

RowVector amd(const PeriodicSet& set, int k) { return column_means(pdd(set, k)); }

double b_coefficient(int h, int k) {
  require_order(h, k);
  if (h == 1) return k + 1.0;
  if (h == 2) return 1.5 + std::sqrt(2.0 * k);
  // C(b, h) is increasing for b >= h; take the b with C(b, h) = k.
  auto binom = [h](double b) {
    double v = 1.0;
    for (int i = 0; i < h; ++i) v *= (b - i) / (i + 1.0);
    return v;
  };
  double lo = h;
  double hi = h;
  while (binom(hi) < k) hi *= 2.0;
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (binom(mid) < k ? lo : hi) = mid;
  }
  return hi + 1.0;
}

RowVector asymptote_shape(int h, int n, int k) {
  RowVector x(k);
  const double hf = factorial(h);
  for (int j = 1; j <= k; ++j) x(j - 1) = std::pow(hf * j, 1.0 / (h * n));
  return x;
}

double fit_least_squares(const RowDistribution& pdd_h_dist, int h, int n) {
  const RowVector a = column_means(pdd_h_dist);
  const RowVector x = asymptote_shape(h, n, pdd_h_dist.columns());
  return a.dot(x) / x.squaredNorm();
}

double fit_coefficient(const PeriodicSet& set, int h, int k) {
  require_order(h, k);
  if (h == 1) return ppc(set);
  return fit_least_squares(pdd_h(set, h, k), h, set.dim());
}

double rho_coefficient(int h, int n, int k) {
  const RowVector x = asymptote_shape(h, n, k);
  return x.sum() / x.squaredNorm();
}

RowDistribution pda_from_pdd(const RowDistribution& pdd_h_dist, int h, int n, double coefficient) {
  RowDistribution out = pdd_h_dist;
  const RowVector curve = coefficient * asymptote_shape(h, n, pdd_h_dist.columns());
  out.rows.rowwise() -= curve;
  return out;
}

RowDistribution pda_h(const PeriodicSet& set, int h, int k) {
  require_order(h, k);
  if (h == 1) {
    const double c = ppc(set);
    return pda_from_pdd(pdd_h(set, 1, k), 1, set.dim(), c);
  }
  RowDistribution dist = pdd_h(set, h, k);
  const double c = fit_least_squares(dist, h, set.dim());
  return pda_from_pdd(dist, h, set.dim(), c);
}

RowVector ada_h(const PeriodicSet& set, int h, int k) { return column_means(pda_h(set, h, k)); }

RowDistribution psd(const PeriodicSet& set, int k) {
  if (set.dim() != 1) throw Error(ErrorCode::NotOneDimensional, "PSD is defined for sequences in R");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const int m = set.size();
  std::vector<double> x(static_cast<std::size_t>(m));
  if (set.is_finite()) {
    for (int i = 0; i < m; ++i) x[i] = set.points()(i, 0);
    std::sort(x.begin(), x.end());
    if (m < k + 1)
      throw Error(ErrorCode::TooFewPoints, "finite PSD needs at least k + 1 points");
    // Only points with k right neighbours contribute a row.
    Matrix rows(m - k, k);
    for (int i = 0; i + k < m; ++i)
      for (int j = 1; j <= k; ++j) rows(i, j - 1) = x[i + j] - x[i];
    return RowDistribution::uniform(std::move(rows));
  }
  const double period = std::abs(set.basis()(0, 0));
  for (int i = 0; i < m; ++i) {
    const double v = set.points()(i, 0);
    x[i] = v - period * std::floor(v / period);
  }
  std::sort(x.begin(), x.end());
  Matrix rows(m, k);
  for (int i = 0; i < m; ++i) {
    for (int j = 1; j <= k; ++j) {
      const int t = i + j;
      rows(i, j - 1) = x[t % m] + period * (t / m) - x[i];
    }
  }
  return RowDistribution::uniform(std::move(rows));
}

PeriodicSet psd_reconstruct(const RowDistribution& psd_matrix) {
  const int m = psd_matrix.columns();
  if (psd_matrix.size() < 1 || m < 1)
    throw Error(ErrorCode::UnrealizablePSD, "empty PSD matrix");
  const RowVector a = psd_matrix.rows.row(0);
  if (a(0) <= 0.0) throw Error(ErrorCode::UnrealizablePSD, "shifts must be positive");
  for (int j = 1; j < m; ++j)
    if (!(a(j) > a(j - 1))) throw Error(ErrorCode::UnrealizablePSD, "row is not strictly increasing");
  const double period = a(m - 1);
  Matrix motif(m, 1);
  for (int j = 0; j < m; ++j) motif(j, 0) = (a(j) - a(0)) / period;
  Matrix basis(1, 1);
  basis(0, 0) = period;
  try {
    PeriodicSet rebuilt(1, 1, basis, motif);
    if (!same_distribution(psd(rebuilt, m), psd_matrix, 1e-9 * std::max(1.0, period)))
      throw Error(ErrorCode::UnrealizablePSD, "rebuilt sequence does not reproduce the PSD");
    return rebuilt;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnrealizablePSD) throw;
    throw Error(ErrorCode::UnrealizablePSD, e.what());
  }
}

RowVector psd_mirror(const RowVector& row, double period) {
  const auto k = row.size();
  if (k < 1 || !(period > 0.0)) throw Error(ErrorCode::MalformedRow, "empty row or non-positive period");
  const double tol = 1e-9 * std::max(1.0, period);
  if (row(0) <= 0.0) throw Error(ErrorCode::MalformedRow, "shifts must be positive");
  for (Eigen::Index j = 1; j < k; ++j)
    if (!(row(j) > row(j - 1))) throw Error(ErrorCode::MalformedRow, "row is not strictly increasing");
  Eigen::Index m = -1;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (std::abs(row(j) - period) <= tol) {
      m = j + 1;
      break;
    }
  }
  if (m < 0) throw Error(ErrorCode::MalformedRow, "row does not contain the period");
  // Left neighbours sit at s L - a_j for s >= 1 and a_0 = 0.
  std::vector<double> left;
  const Eigen::Index cycles = k / m + 1;
  for (Eigen::Index s = 1; s <= cycles; ++s) {
    left.push_back(s * period);
    for (Eigen::Index j = 0; j + 1 < m; ++j) left.push_back(s * period - row(j));
  }
  std::sort(left.begin(), left.end());
  RowVector out(k);
  for (Eigen::Index j = 0; j < k; ++j) out(j) = left[static_cast<std::size_t>(j)];
  return out;
}

RowDistribution psd_mirror(const RowDistribution& psd_matrix) {
  const int m = psd_matrix.expanded_rows > 0 ? psd_matrix.expanded_rows : psd_matrix.size();
  if (psd_matrix.columns() < m)
    throw Error(ErrorCode::MalformedRow, "mirror needs at least m columns");
  RowDistribution out = psd_matrix;
  for (Eigen::Index i = 0; i < psd_matrix.rows.rows(); ++i)
    out.rows.row(i) = psd_mirror(RowVector(psd_matrix.rows.row(i)), psd_matrix.rows(i, m - 1));
  return out;
}

bool psd_isometric(const PeriodicSet& a, const PeriodicSet& b, double tol) {
  if (a.dim() != 1 || b.dim() != 1)
    throw Error(ErrorCode::NotOneDimensional, "PSD comparison needs sequences in R");
  if (a.rank() != 1 || b.rank() != 1)
    throw Error(ErrorCode::InvalidArgument, "PSD comparison needs periodic sequences");
  const int k = std::max(a.size(), b.size());
  const RowDistribution pa = psd(a, k);
  const RowDistribution pb = psd(b, k);
  if (same_distribution(pa, pb, tol)) return true;
  return same_distribution(psd_mirror(pa), pb, tol);
}

}  // namespace perinv
