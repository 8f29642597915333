#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "perinv/error.hpp"

namespace fixtures {

using perinv::RowVector;

PeriodicSet sequence(const std::vector<double>& points, double period, const std::string& id) {
  Matrix basis(1, 1);
  basis(0, 0) = period;
  Matrix motif(static_cast<Eigen::Index>(points.size()), 1);
  for (std::size_t i = 0; i < points.size(); ++i) motif(static_cast<Eigen::Index>(i), 0) = points[i] / period;
  return PeriodicSet(1, 1, basis, motif, {}, id);
}

PeriodicSet sequence_s(double r) { return sequence({0.0, r, 2.0 + r, 4.0}, 8.0, "S"); }

namespace {

PeriodicSet six_point(double a, double b, double c, double sign, const std::string& id) {
  Matrix basis(1, 2);
  basis << 4.0, 0.0;
  Matrix pts(6, 2);
  pts << 0.0, a, 2.0, -a, b, 0.0, 2.0 + b, 0.0, 1.0, sign * c, 3.0, -sign * c;
  return PeriodicSet::from_cartesian(2, 1, basis, pts, {}, id);
}

}  // namespace

PeriodicSet six_point_s(double a, double b, double c) { return six_point(a, b, c, 1.0, "S"); }
PeriodicSet six_point_q(double a, double b, double c) { return six_point(a, b, c, -1.0, "Q"); }

PeriodicSet lattice(const Matrix& basis, const std::string& id) {
  Matrix motif = Matrix::Zero(1, basis.cols());
  return PeriodicSet(static_cast<int>(basis.cols()), static_cast<int>(basis.rows()), basis, motif, {}, id);
}

std::vector<NamedLattice> six_lattices() {
  auto make = [](double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
  };
  return {
      {"generic", lattice(make(1.25, 0.25, 0.25, 0.75), "L1"), 0.525},
      {"hexagonal", lattice(make(1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0), "L2"), 0.528},
      {"rhombic-1", lattice(make(1.0, 0.5, 1.0, -0.5), "L3"), 0.564},
      {"rhombic-2", lattice(make(1.0, 1.5, 1.0, -1.5), "L4"), 0.977},
      {"square", lattice(make(1.0, 0.0, 0.0, 1.0), "L5"), 0.564},
      {"rectangular", lattice(make(2.0, 0.0, 0.0, 1.0), "L6"), 0.798},
  };
}

PeriodicSet random_periodic_set(std::mt19937_64& rng, int n, int m, double min_packing, const std::string& id) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> skew(-0.3, 0.3);
  while (true) {
    Matrix basis(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) basis(i, j) = (i == j ? 1.5 + 2.0 * unit(rng) : skew(rng));
    Matrix motif(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) motif(i, j) = unit(rng);
    try {
      PeriodicSet s(n, n, basis, motif, {}, id);
      if (perinv::packing_radius(s) >= min_packing) return s;
    } catch (const perinv::Error&) {
    }
  }
}

RowDistribution random_distribution(std::mt19937_64& rng, int rows, int k, double scale) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(rows, k);
  for (int i = 0; i < rows; ++i) {
    std::vector<double> v(static_cast<std::size_t>(k));
    for (double& x : v) x = scale * unit(rng);
    std::sort(v.begin(), v.end());
    for (int j = 0; j < k; ++j) m(i, j) = v[static_cast<std::size_t>(j)];
  }
  RowDistribution d = RowDistribution::uniform(m);
  for (int i = 0; i < rows; ++i) d.weights(i) = 0.1 + unit(rng);
  d.weights /= d.weights.sum();
  return d;
}

namespace {

std::vector<RowVector> box_points(const PeriodicSet& set, int extent) {
  std::vector<RowVector> out;
  const int l = set.rank();
  std::vector<int> shift(static_cast<std::size_t>(l), -extent);
  while (true) {
    RowVector offset = RowVector::Zero(set.dim());
    for (int a = 0; a < l; ++a) offset += shift[static_cast<std::size_t>(a)] * set.basis().row(a);
    for (int p = 0; p < set.size(); ++p) out.push_back(set.points().row(p) + offset);
    int a = 0;
    while (a < l && ++shift[static_cast<std::size_t>(a)] > extent) shift[static_cast<std::size_t>(a++)] = -extent;
    if (a == l) break;
  }
  return out;
}

}  // namespace

std::vector<double> brute_distances(const PeriodicSet& set, int i, int extent) {
  std::vector<double> d;
  const RowVector p = set.points().row(i);
  for (const auto& q : box_points(set, extent)) {
    const double v = (q - p).norm();
    if (v > 1e-12) d.push_back(v);
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> brute_order_row(const PeriodicSet& set, int i, int h, int k, int extent, int pool) {
  const RowVector p = set.points().row(i);
  std::vector<std::pair<double, RowVector>> near;
  for (const auto& q : box_points(set, extent)) {
    const double v = (q - p).norm();
    if (v > 1e-12) near.emplace_back(v, q);
  }
  std::sort(near.begin(), near.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  near.resize(std::min<std::size_t>(near.size(), static_cast<std::size_t>(pool)));
  std::vector<double> values;
  std::vector<int> idx(static_cast<std::size_t>(h));
  for (int a = 0; a < h; ++a) idx[static_cast<std::size_t>(a)] = a;
  const int n = static_cast<int>(near.size());
  while (n >= h) {
    std::vector<RowVector> tuple{p};
    for (int a : idx) tuple.push_back(near[static_cast<std::size_t>(a)].second);
    double sum = 0.0;
    for (std::size_t x = 0; x < tuple.size(); ++x)
      for (std::size_t y = x + 1; y < tuple.size(); ++y) sum += (tuple[x] - tuple[y]).norm();
    values.push_back(2.0 * sum / (h * (h + 1.0)));
    int a = h - 1;
    while (a >= 0 && idx[static_cast<std::size_t>(a)] == n - h + a) --a;
    if (a < 0) break;
    ++idx[static_cast<std::size_t>(a)];
    for (int b = a + 1; b < h; ++b) idx[static_cast<std::size_t>(b)] = idx[static_cast<std::size_t>(b - 1)] + 1;
  }
  std::sort(values.begin(), values.end());
  values.resize(std::min<std::size_t>(values.size(), static_cast<std::size_t>(k)));
  return values;
}

std::vector<double> pdf_multiset(const std::vector<double>& points, double period, int periods) {
  std::vector<double> out;
  for (double x : points)
    for (double y : points)
      for (int s = -periods - 1; s <= periods + 1; ++s) {
        const double d = y + s * period - x;
        if (d > 1e-12 && d <= periods * period + 1e-12) out.push_back(d);
      }
  std::sort(out.begin(), out.end());
  return out;
}

bool translation_equivalent(const std::vector<double>& a, const std::vector<double>& b, double period, double tol) {
  if (a.size() != b.size()) return false;
  auto canon = [period, tol](std::vector<double> v, double shift) {
    for (double& x : v) {
      x = std::fmod(x - shift, period);
      if (x < 0) x += period;
      if (x > period - tol) x = 0.0;
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto ca = canon(a, a.front());
  for (double s : b) {
    const auto cb = canon(b, s);
    bool same = true;
    for (std::size_t i = 0; i < ca.size() && same; ++i) {
      double d = std::abs(ca[i] - cb[i]);
      d = std::min(d, period - d);
      same = d <= tol;
    }
    if (same) return true;
  }
  return false;
}

}  // namespace fixtures
