#include "lp_oracle.hpp"

#include <cmath>
#include <limits>

namespace oracle {
namespace {

constexpr double kEps = 1e-12;

struct Tableau {
  std::vector<std::vector<double>> t;  // rows: constraints, last row: objective
  std::vector<int> basis;
  int cols = 0;  // variables (rhs is column `cols`)

  void pivot(int r, int c) {
    const double p = t[r][c];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == r || std::abs(t[i][c]) < kEps) continue;
      const double f = t[i][c];
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Bland's rule; `allowed(j)` filters entering columns. Returns false if unbounded.
  template <typename Allowed>
  bool optimise(Allowed allowed) {
    const int m = static_cast<int>(basis.size());
    while (true) {
      int enter = -1;
      for (int j = 0; j < cols; ++j)
        if (allowed(j) && t[m][j] < -1e-11) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= 1e-12) continue;
        const double ratio = t[i][cols] / t[i][enter];
        if (ratio < best - 1e-14 || (leave >= 0 && std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_standard_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                           const std::vector<double>& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  Tableau tab;
  tab.cols = n + m;  // originals then artificials
  tab.t.assign(m + 1, std::vector<double>(tab.cols + 1, 0.0));
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.t[i][j] = sign * A[i][j];
    tab.t[i][n + i] = 1.0;
    tab.t[i][tab.cols] = sign * b[i];
    tab.basis[i] = n + i;
  }
  // Phase 1 objective: sum of artificials, expressed in non-basic terms.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= tab.cols; ++j)
      if (j < n || j == tab.cols) tab.t[m][j] -= tab.t[i][j];
  tab.optimise([](int) { return true; });
  LpResult out;
  if (-tab.t[m][tab.cols] > 1e-9) return out;

  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    for (int j = 0; j < n; ++j)
      if (std::abs(tab.t[i][j]) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
  }
  // Phase 2 objective.
  for (int j = 0; j <= tab.cols; ++j) tab.t[m][j] = j < n ? c[j] : 0.0;
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis[i];
    if (bj >= n) continue;
    const double f = tab.t[m][bj];
    if (f == 0.0) continue;
    for (int j = 0; j <= tab.cols; ++j) tab.t[m][j] -= f * tab.t[i][j];
  }
  if (!tab.optimise([n](int j) { return j < n; })) return out;
  out.feasible = true;
  out.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.t[i][tab.cols];
  out.value = 0.0;
  for (int j = 0; j < n; ++j) out.value += c[j] * out.x[j];
  return out;
}

LpResult transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<std::vector<double>>& cost) {
  const std::size_t p = a.size(), q = b.size();
  std::vector<std::vector<double>> A;
  std::vector<double> rhs, c;
  for (std::size_t i = 0; i < p; ++i) {
    std::vector<double> row(p * q, 0.0);
    for (std::size_t j = 0; j < q; ++j) row[i * q + j] = 1.0;
    A.push_back(row);
    rhs.push_back(a[i]);
  }
  for (std::size_t j = 0; j < q; ++j) {
    std::vector<double> row(p * q, 0.0);
    for (std::size_t i = 0; i < p; ++i) row[i * q + j] = 1.0;
    A.push_back(row);
    rhs.push_back(b[j]);
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) c.push_back(cost[i][j]);
  return solve_standard_lp(A, rhs, c);
}

}  // namespace oracle
