#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "perinv/error.hpp"
#include "perinv/invariants.hpp"

using namespace perinv;

namespace {

RowVector row(std::initializer_list<double> v) {
  RowVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

std::vector<double> positions(const PeriodicSet& s) {
  std::vector<double> out;
  for (int i = 0; i < s.size(); ++i) out.push_back(s.points()(i, 0));
  return out;
}

std::vector<double> random_sequence(std::mt19937_64& rng, int m, double period) {
  std::uniform_real_distribution<double> u(0.0, period);
  while (true) {
    std::vector<double> p(static_cast<std::size_t>(m));
    for (double& x : p) x = u(rng);
    std::sort(p.begin(), p.end());
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      const double next = i + 1 < m ? p[i + 1] : p[0] + period;
      ok = next - p[i] > 1e-3;
    }
    if (ok) return p;
  }
}

}  // namespace

TEST_SUITE("psd") {
  TEST_CASE("PSD examples") {
    const RowDistribution z = psd(fixtures::sequence({0.0}, 1.0), 3);
    REQUIRE(z.size() == 1);
    CHECK((z.rows.row(0) - row({1, 2, 3})).norm() < 1e-12);

    const RowDistribution s = psd(fixtures::sequence({0.0, 1.0}, 3.0), 3);
    REQUIRE(s.size() == 2);
    CHECK((s.rows.row(0) - row({1, 3, 4})).norm() < 1e-12);
    CHECK((s.rows.row(1) - row({2, 3, 5})).norm() < 1e-12);
  }

  TEST_CASE("the m-th column is the period") {
    std::mt19937_64 rng(1);
    for (int m = 1; m <= 8; ++m) {
      const auto p = random_sequence(rng, m, 5.0);
      const RowDistribution d = psd(fixtures::sequence(p, 5.0), m + 2);
      for (int i = 0; i < m; ++i) CHECK(d.rows(i, m - 1) == doctest::Approx(5.0));
    }
  }

  TEST_CASE("reconstruction") {
    const PeriodicSet z = psd_reconstruct(psd(fixtures::sequence({0.0}, 1.0), 1));
    CHECK(z.size() == 1);
    CHECK(z.basis()(0, 0) == doctest::Approx(1.0));

    const PeriodicSet s = psd_reconstruct(psd(fixtures::sequence({0.0, 1.0}, 3.0), 2));
    CHECK(s.basis()(0, 0) == doctest::Approx(3.0));
    CHECK(fixtures::translation_equivalent(positions(s), {0.0, 1.0}, 3.0));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 1 + trial % 8;
      const auto p = random_sequence(rng, m, 10.0);
      const PeriodicSet rebuilt = psd_reconstruct(psd(fixtures::sequence(p, 10.0), m));
      CHECK(fixtures::translation_equivalent(positions(rebuilt), p, 10.0));
    }
  }

  TEST_CASE("unrealizable input") {
    RowDistribution bad = RowDistribution::uniform(Matrix::Constant(1, 2, 1.0));
    try {
      psd_reconstruct(bad);
      FAIL("expected UnrealizablePSD");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnrealizablePSD);
    }
    // Rows from two different sequences.
    Matrix two(2, 2);
    two << 1, 3, 1.5, 3;
    try {
      psd_reconstruct(RowDistribution::uniform(two));
      FAIL("expected UnrealizablePSD");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnrealizablePSD);
    }
  }

  TEST_CASE("mirror rows") {
    CHECK((psd_mirror(row({1, 3}), 3.0) - row({2, 3})).norm() < 1e-12);
    const RowVector r = row({0.5, 1.7, 4.0});
    CHECK((psd_mirror(psd_mirror(r, 4.0), 4.0) - r).norm() < 1e-12);
    // Longer rows continue into the next period.
    CHECK((psd_mirror(row({1, 3, 4, 6}), 3.0) - row({2, 3, 5, 6})).norm() < 1e-12);
    CHECK_THROWS_AS(psd_mirror(row({1, 2}), 3.0), Error);
  }

  TEST_CASE("mirror of PSD equals PSD of the reflection") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const int m = 1 + trial % 8;
      const auto p = random_sequence(rng, m, 7.0);
      std::vector<double> reflected;
      for (double x : p) reflected.push_back(7.0 - x);
      std::sort(reflected.begin(), reflected.end());
      if (reflected.back() >= 7.0) {
        reflected.pop_back();
        reflected.insert(reflected.begin(), 0.0);
      }
      const RowDistribution a = psd(fixtures::sequence(p, 7.0), m);
      const RowDistribution b = psd(fixtures::sequence(reflected, 7.0), m);
      CHECK(same_distribution(psd_mirror(a), b));
      CHECK(psd_isometric(fixtures::sequence(p, 7.0), fixtures::sequence(reflected, 7.0)));
    }
  }

  TEST_CASE("palindromic sequences are their own mirror") {
    const RowDistribution d = psd(fixtures::sequence({0.0, 1.0, 3.0}, 4.0), 3);
    CHECK(same_distribution(psd_mirror(d), d));
  }

  TEST_CASE("non-isometric sequences are told apart") {
    CHECK_FALSE(psd_isometric(fixtures::sequence_s(0.5), fixtures::sequence({0.0, 0.5, 2.0, 4.5}, 8.0)));
  }

  TEST_CASE("finite sequences and errors") {
    Matrix pts(4, 1);
    pts << 0, 1, 3, 7;
    const PeriodicSet f = PeriodicSet::from_cartesian(1, 0, Matrix(0, 1), pts);
    const RowDistribution d = psd(f, 2);
    REQUIRE(d.size() == 2);
    CHECK((d.rows.row(0) - row({1, 3})).norm() < 1e-12);
    CHECK((d.rows.row(1) - row({2, 6})).norm() < 1e-12);
    try {
      psd(f, 4);
      FAIL("expected TooFewPoints");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooFewPoints);
    }
    try {
      psd(fixtures::six_lattices()[4].set, 2);
      FAIL("expected NotOneDimensional");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotOneDimensional);
    }
  }
}
