#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "perinv/error.hpp"
#include "perinv/geometry.hpp"
#include "perinv/invariants.hpp"
#include "perinv/transport.hpp"

namespace perinv {

/// Ground metric on rows: Minkowski L_q (q in [1, inf]) or RMS = L_2 / sqrt(k).
struct GroundMetric {
  enum class Kind { Lq, Linf, RMS };

  Kind kind = Kind::Linf;
  double q = std::numeric_limits<double>::infinity();

  static GroundMetric linf() { return {Kind::Linf, std::numeric_limits<double>::infinity()}; }
  static GroundMetric rms() { return {Kind::RMS, 2.0}; }
  static GroundMetric lq(double q);

  /// Accepts "linf", "l1", "l2", "q:<r>" and "rms".
  static GroundMetric parse(const std::string& text);
  std::string name() const;

  /// Multiplier turning this metric into an upper bound of L_inf on k-vectors.
  double linf_inflation(int k) const;
};

template <typename DerivedA, typename DerivedB>
double ground_distance(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v,
                       const GroundMetric& g) {
  if (u.size() != v.size()) throw Error(ErrorCode::LengthMismatch, "rows have different lengths");
  if (u.size() == 0) return 0.0;
  const auto diff = (u.derived().reshaped() - v.derived().reshaped()).cwiseAbs().eval();
  switch (g.kind) {
    case GroundMetric::Kind::Linf:
      return diff.maxCoeff();
    case GroundMetric::Kind::RMS:
      return std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    case GroundMetric::Kind::Lq:
      if (g.q == 1.0) return diff.sum();
      if (g.q == 2.0) return diff.norm();
      return std::pow(diff.array().pow(g.q).sum(), 1.0 / g.q);
  }
  return 0.0;
}

/// Cost matrix of ground distances between the rows of two distributions.
Matrix ground_costs(const RowDistribution& a, const RowDistribution& b, const GroundMetric& g);

struct EmdResult {
  double value = 0.0;
  TransportPlan plan;
};

/// Exact Earth Mover's Distance between weighted row distributions.
EmdResult emd(const RowDistribution& a, const RowDistribution& b, const GroundMetric& g);

enum class InvariantKind { PDD, PDA };

InvariantKind parse_invariant_kind(const std::string& text);
std::string to_string(InvariantKind kind);

/// The order-1..h distributions (PDD^{i} or PDA^{i}) of a set.
std::vector<RowDistribution> invariant_orders(const PeriodicSet& set, int h, int k, InvariantKind kind);

double emd_h(const PeriodicSet& a, const PeriodicSet& b, int h, int k, const GroundMetric& g,
             InvariantKind kind);

/// Maximum of the EMDs over orders 1..h.
double emd_max(const PeriodicSet& a, const PeriodicSet& b, int h, int k, const GroundMetric& g,
               InvariantKind kind);
double emd_max(const std::vector<RowDistribution>& a, const std::vector<RowDistribution>& b,
               const GroundMetric& g);

struct LndConfig {
  int h = 2;
  int k = 100;
  GroundMetric ground = GroundMetric::linf();
  InvariantKind kind = InvariantKind::PDA;
};

struct LndResult {
  double distance = 0.0;
  int index = 0;  // into the corpus
  std::string id;
  std::vector<double> distances;  // to every corpus entry, corpus order
};

/// Local Novelty Distance: smallest max-over-orders EMD from `query` to the
/// corpus. Ties go to the earliest corpus entry.
LndResult lnd(const PeriodicSet& query, const std::vector<PeriodicSet>& corpus, const LndConfig& config);

struct BoundCheck {
  std::string name;
  double lower = 0.0;  // must not exceed `upper`
  double upper = 0.0;
  double slack() const { return upper - lower; }
};

struct BoundsReport {
  std::vector<BoundCheck> checks;
  std::vector<BoundCheck> violations;
  bool ok() const { return violations.empty(); }
};

/// Lower-bound relations between EMDs on orders 1..h of two sets:
/// order monotonicity of the max metric, monotonicity in the number of
/// columns (L_q grounds only), and the centroid bound L(mu1 A, mu1 B) <= EMD.
BoundsReport check_bounds(const std::vector<RowDistribution>& a,
                          const std::vector<RowDistribution>& b, const GroundMetric& g,
                          double tol = 1e-9);
BoundsReport check_bounds(const PeriodicSet& a, const PeriodicSet& b, int h, int k,
                          const GroundMetric& g, double tol = 1e-9);

}  // namespace perinv
