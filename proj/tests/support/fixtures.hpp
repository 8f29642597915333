#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "perinv/geometry.hpp"
#include "perinv/invariants.hpp"

namespace fixtures {

using perinv::Matrix;
using perinv::PeriodicSet;
using perinv::RowDistribution;

/// S(r) = {0, r, 2 + r, 4} + 8Z.
PeriodicSet sequence_s(double r);
/// Sequence with the given points and period.
PeriodicSet sequence(const std::vector<double>& points, double period, const std::string& id = {});

/// 1-periodic sets in R^2 (period 4 along x) built from parameters a, b, c:
/// S = {(0,a), (2,-a), (b,0), (2+b,0), (1,c), (3,-c)}; Q flips the sign of c.
PeriodicSet six_point_s(double a, double b, double c);
PeriodicSet six_point_q(double a, double b, double c);

struct NamedLattice {
  std::string name;
  PeriodicSet set;
  double ppc_expected;
};
/// The six planar lattices with their reference PPC values.
std::vector<NamedLattice> six_lattices();

PeriodicSet lattice(const Matrix& basis, const std::string& id = {});

/// Random full-rank set in R^n with m motif points whose packing radius is at
/// least `min_packing`.
PeriodicSet random_periodic_set(std::mt19937_64& rng, int n, int m, double min_packing,
                                const std::string& id = {});

/// Random distribution with `rows` rows of `k` non-decreasing values and
/// random positive weights.
RowDistribution random_distribution(std::mt19937_64& rng, int rows, int k, double scale = 3.0);

/// Distances from motif point i to all other points over the shift box
/// [-extent, extent]^rank, sorted.
std::vector<double> brute_distances(const PeriodicSet& set, int i, int extent);

/// Order-h averages by full enumeration of h-subsets of the `pool` nearest
/// points (box enumeration), k smallest.
std::vector<double> brute_order_row(const PeriodicSet& set, int i, int h, int k, int extent, int pool);

/// Cyclic inter-point distance multiset of a periodic sequence over one
/// period: every difference x_j - x_i + sL in (0, L] for i, j in the motif.
std::vector<double> pdf_multiset(const std::vector<double>& points, double period, int periods = 1);

/// True if the two periodic sequences coincide after some translation.
bool translation_equivalent(const std::vector<double>& a, const std::vector<double>& b, double period,
                            double tol = 1e-9);

}  // namespace fixtures
