#include "perinv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace perinv {

GroundMetric GroundMetric::lq(double q) {
  if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "Minkowski exponent must be >= 1");
  if (std::isinf(q)) return linf();
  return {Kind::Lq, q};
}

GroundMetric GroundMetric::parse(const std::string& text) {
  if (text == "linf" || text == "inf" || text == "Linf") return linf();
  if (text == "rms" || text == "RMS") return rms();
  if (text == "l1") return lq(1.0);
  if (text == "l2") return lq(2.0);
  if (text.rfind("q:", 0) == 0) {
    const std::string value = text.substr(2);
    if (value == "inf") return linf();
    std::size_t used = 0;
    double q = 0.0;
    try {
      q = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == value.size() && used > 0) return lq(q);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown ground metric '" + text + "'");
}

std::string GroundMetric::name() const {
  switch (kind) {
    case Kind::Linf: return "linf";
    case Kind::RMS: return "rms";
    case Kind::Lq:
      if (q == 1.0) return "l1";
      if (q == 2.0) return "l2";
      {
        std::string s = std::to_string(q);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return "q:" + s;
      }
  }
  return "?";
}

double GroundMetric::linf_inflation(int k) const {
  return kind == Kind::RMS ? std::sqrt(static_cast<double>(k)) : 1.0;
}

Matrix ground_costs(const RowDistribution& a, const RowDistribution& b, const GroundMetric& g) {
  if (a.columns() != b.columns())
    throw Error(ErrorCode::ColumnMismatch, "distributions have " + std::to_string(a.columns()) +
                                               " and " + std::to_string(b.columns()) + " columns");
  Matrix cost(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) cost(i, j) = ground_distance(a.rows.row(i), b.rows.row(j), g);
  return cost;
}

EmdResult emd(const RowDistribution& a, const RowDistribution& b, const GroundMetric& g) {
  const Matrix cost = ground_costs(a, b, g);
  TransportSolution sol = solve_transport(a.weights, b.weights, cost);
  return {sol.value, std::move(sol.plan)};
}

InvariantKind parse_invariant_kind(const std::string& text) {
  if (text == "pdd" || text == "PDD") return InvariantKind::PDD;
  if (text == "pda" || text == "PDA") return InvariantKind::PDA;
  throw Error(ErrorCode::InvalidArgument, "unknown invariant '" + text + "'");
}

std::string to_string(InvariantKind kind) { return kind == InvariantKind::PDD ? "pdd" : "pda"; }

std::vector<RowDistribution> invariant_orders(const PeriodicSet& set, int h, int k, InvariantKind kind) {
  if (h < 1) throw Error(ErrorCode::InvalidOrder, "order h must be at least 1");
  std::vector<RowDistribution> out;
  for (int order = 1; order <= h; ++order)
    out.push_back(kind == InvariantKind::PDD ? pdd_h(set, order, k) : pda_h(set, order, k));
  return out;
}

double emd_h(const PeriodicSet& a, const PeriodicSet& b, int h, int k, const GroundMetric& g,
             InvariantKind kind) {
  if (h < 1) throw Error(ErrorCode::InvalidOrder, "order h must be at least 1");
  if (kind == InvariantKind::PDD) return emd(pdd_h(a, h, k), pdd_h(b, h, k), g).value;
  return emd(pda_h(a, h, k), pda_h(b, h, k), g).value;
}

double emd_max(const std::vector<RowDistribution>& a, const std::vector<RowDistribution>& b,
               const GroundMetric& g) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::InvalidArgument, "order lists must be non-empty and of equal length");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, emd(a[i], b[i], g).value);
  return best;
}

double emd_max(const PeriodicSet& a, const PeriodicSet& b, int h, int k, const GroundMetric& g,
               InvariantKind kind) {
  return emd_max(invariant_orders(a, h, k, kind), invariant_orders(b, h, k, kind), g);
}

LndResult lnd(const PeriodicSet& query, const std::vector<PeriodicSet>& corpus, const LndConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "novelty distance needs a non-empty corpus");
  const auto q = invariant_orders(query, config.h, config.k, config.kind);
  LndResult out;
  out.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const double d = emd_max(q, invariant_orders(corpus[i], config.h, config.k, config.kind), config.ground);
    out.distances.push_back(d);
    if (d < out.distance) {
      out.distance = d;
      out.index = static_cast<int>(i);
    }
  }
  out.id = corpus[static_cast<std::size_t>(out.index)].id();
  return out;
}

namespace {

void check(BoundsReport& report, std::string name, double lower, double upper, double tol) {
  BoundCheck c{std::move(name), lower, upper};
  if (c.slack() < -tol) report.violations.push_back(c);
  report.checks.push_back(std::move(c));
}

void add_checks(BoundsReport& report, const std::vector<RowDistribution>& a,
                const std::vector<RowDistribution>& b, const GroundMetric& g, double tol,
                bool column_checks, const std::string& label) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::InvalidArgument, "order lists must be non-empty and of equal length");
  std::vector<double> per_order;
  for (std::size_t i = 0; i < a.size(); ++i) per_order.push_back(emd(a[i], b[i], g).value);

  double running = 0.0;
  std::vector<double> prefix_max;
  for (double e : per_order) prefix_max.push_back(running = std::max(running, e));
  const std::size_t h = per_order.size();
  for (std::size_t go = 1; go < h; ++go)
    check(report, label + "(a) order " + std::to_string(go) + " <= " + std::to_string(h),
          prefix_max[go - 1], prefix_max[h - 1], tol);

  for (std::size_t i = 0; i < h; ++i) {
    const std::string order = std::to_string(i + 1);
    const int k = a[i].columns();
    if (column_checks && g.kind != GroundMetric::Kind::RMS) {
      std::set<int> shorter{1, (k + 1) / 2, k - 1};
      for (int kp : shorter) {
        if (kp < 1 || kp >= k) continue;
        const double e = emd(truncate(a[i], kp), truncate(b[i], kp), g).value;
        check(report, label + "(b) order " + order + " k'=" + std::to_string(kp), e, per_order[i], tol);
      }
    }
    const double centroid = ground_distance(column_means(a[i]), column_means(b[i]), g);
    check(report, label + "(c) order " + order + " centroid", centroid, per_order[i], tol);
  }
}

}  // namespace

BoundsReport check_bounds(const std::vector<RowDistribution>& a, const std::vector<RowDistribution>& b,
                          const GroundMetric& g, double tol) {
  BoundsReport report;
  add_checks(report, a, b, g, tol, true, "");
  return report;
}

BoundsReport check_bounds(const PeriodicSet& a, const PeriodicSet& b, int h, int k,
                          const GroundMetric& g, double tol) {
  BoundsReport report;
  add_checks(report, invariant_orders(a, h, k, InvariantKind::PDD),
             invariant_orders(b, h, k, InvariantKind::PDD), g, tol, true, "PDD ");
  if (a.is_full_rank() && b.is_full_rank()) {
    // c(S; h, k) depends on k, so truncated PDA columns are not PDA(S; k').
    add_checks(report, invariant_orders(a, h, k, InvariantKind::PDA),
               invariant_orders(b, h, k, InvariantKind::PDA), g, tol, false, "PDA ");
  }
  return report;
}

}  // namespace perinv
