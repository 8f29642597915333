#include "perinv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "perinv/error.hpp"

namespace perinv {
namespace {

constexpr int kDegenerateStreakForBland = 50;

// Spanning tree of basic cells over m row nodes and n column nodes
// (column j is node m + j).
class BasisTree {
 public:
  BasisTree(int m, int n) : m_(m), n_(n), adj_(static_cast<std::size_t>(m + n)) {}

  void add(int i, int j) {
    adj_[i].push_back(m_ + j);
    adj_[m_ + j].push_back(i);
  }

  void remove(int i, int j) {
    auto drop = [](std::vector<int>& v, int x) { v.erase(std::find(v.begin(), v.end(), x)); };
    drop(adj_[i], m_ + j);
    drop(adj_[m_ + j], i);
  }

  // Potentials u (rows) and v (columns) with u_i + v_j = c_ij on the tree.
  void potentials(const Matrix& cost, std::vector<double>& u, std::vector<double>& v) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<int> stack{0};
    u.assign(m_, 0.0);
    v.assign(n_, 0.0);
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int next : adj_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        if (node < m_)
          v[next - m_] = cost(node, next - m_) - u[node];
        else
          u[next] = cost(next, node - m_) - v[node - m_];
        stack.push_back(next);
      }
    }
  }

  // Tree path from row node `i` to column node m + j, as a node list.
  std::vector<int> path(int i, int j) const {
    std::vector<int> parent(adj_.size(), -1);
    std::vector<int> queue{i};
    parent[i] = i;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int node = queue[head];
      if (node == m_ + j) break;
      for (int next : adj_[node]) {
        if (parent[next] != -1) continue;
        parent[next] = node;
        queue.push_back(next);
      }
    }
    std::vector<int> out;
    for (int node = m_ + j; node != i; node = parent[node]) {
      if (parent[node] == -1) throw Error(ErrorCode::SolverFailure, "basis is not a spanning tree");
      out.push_back(node);
    }
    out.push_back(i);
    return out;  // starts at column j, ends at row i
  }

 private:
  int m_;
  int n_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace

TransportSolution solve_transport(const Vector& supply, const Vector& demand, const Matrix& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) throw Error(ErrorCode::InvalidArgument, "empty transport problem");
  if (cost.rows() != m || cost.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "cost matrix does not match weights");
  if ((supply.array() <= 0.0).any() || (demand.array() <= 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "weights must be positive");
  if (std::abs(supply.sum() - demand.sum()) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "supply and demand totals differ");

  Matrix flow = Matrix::Zero(m, n);
  std::vector<char> basic(static_cast<std::size_t>(m) * n, 0);
  BasisTree tree(m, n);

  // North-west corner start: m + n - 1 basic cells forming a tree.
  {
    std::vector<double> s(supply.data(), supply.data() + m);
    std::vector<double> d(demand.data(), demand.data() + n);
    int i = 0;
    int j = 0;
    while (true) {
      const double x = std::max(0.0, std::min(s[i], d[j]));
      flow(i, j) = x;
      basic[static_cast<std::size_t>(i) * n + j] = 1;
      tree.add(i, j);
      s[i] -= x;
      d[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && s[i] <= d[j]))
        ++i;
      else
        ++j;
    }
  }

  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double enter_tol = 1e-12 * scale;
  std::vector<double> u;
  std::vector<double> v;
  int degenerate_streak = 0;
  int pivots = 0;
  const long max_pivots = 1000L + 50L * (m + n) * static_cast<long>(std::max(m, n));

  while (true) {
    tree.potentials(cost, u, v);
    const bool bland = degenerate_streak >= kDegenerateStreakForBland;
    int enter_i = -1;
    int enter_j = -1;
    double best = -enter_tol;
    for (int i = 0; i < m && !(bland && enter_i >= 0); ++i) {
      for (int j = 0; j < n; ++j) {
        if (basic[static_cast<std::size_t>(i) * n + j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          enter_i = i;
          enter_j = j;
          if (bland) break;
        }
      }
    }
    if (enter_i < 0) break;
    if (++pivots > max_pivots) throw Error(ErrorCode::SolverFailure, "pivot limit exceeded");

    // Cycle: entering cell gets +, then signs alternate along the tree path
    // from column enter_j back to row enter_i, starting with -.
    const std::vector<int> nodes = tree.path(enter_i, enter_j);
    double theta = std::numeric_limits<double>::infinity();
    int leave_i = -1;
    int leave_j = -1;
    for (std::size_t e = 0; e + 1 < nodes.size(); e += 2) {
      const int col = nodes[e] - m;
      const int row = nodes[e + 1];
      const double x = flow(row, col);
      const bool smaller = x < theta;
      const bool tie_lower_index =
          x == theta && static_cast<long>(row) * n + col < static_cast<long>(leave_i) * n + leave_j;
      if (smaller || tie_lower_index) {
        theta = x;
        leave_i = row;
        leave_j = col;
      }
    }
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
      const bool minus = e % 2 == 0;
      const int a = nodes[e];
      const int b = nodes[e + 1];
      const int row = a < m ? a : b;
      const int col = (a < m ? b : a) - m;
      flow(row, col) += minus ? -theta : theta;
    }
    flow(enter_i, enter_j) += theta;
    flow(leave_i, leave_j) = 0.0;
    basic[static_cast<std::size_t>(leave_i) * n + leave_j] = 0;
    tree.remove(leave_i, leave_j);
    basic[static_cast<std::size_t>(enter_i) * n + enter_j] = 1;
    tree.add(enter_i, enter_j);
    degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
  }

  // Complementary slackness certificate.
  tree.potentials(cost, u, v);
  double residual = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double reduced = cost(i, j) - u[i] - v[j];
      if (basic[static_cast<std::size_t>(i) * n + j])
        residual = std::max(residual, std::abs(reduced));
      else
        residual = std::max(residual, -reduced);
      if (flow(i, j) < 0.0) flow(i, j) = 0.0;
    }
  }
  if (residual > 1e-10 * scale)
    throw Error(ErrorCode::SolverFailure, "optimality certificate failed");

  TransportSolution out;
  out.plan.flow = std::move(flow);
  out.plan.total_flow = out.plan.flow.sum();
  out.plan.cost = out.plan.flow.cwiseProduct(cost).sum();
  out.value = out.plan.cost;
  out.pivots = pivots;
  return out;
}

}  // namespace perinv
