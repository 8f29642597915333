#include <doctest.h>

#include <random>

#include "lp_oracle.hpp"
#include "perinv/error.hpp"
#include "perinv/transport.hpp"

using namespace perinv;

namespace {

Vector random_weights(std::mt19937_64& rng, int n, bool round) {
  std::uniform_int_distribution<int> pick(1, 4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = round ? pick(rng) : u(rng);
  return w / w.sum();
}

void check_plan(const TransportSolution& s, const Vector& a, const Vector& b) {
  const Matrix& f = s.plan.flow;
  CHECK(f.minCoeff() >= 0.0);
  for (Eigen::Index i = 0; i < f.rows(); ++i) CHECK(f.row(i).sum() <= a(i) + 1e-9);
  for (Eigen::Index j = 0; j < f.cols(); ++j) CHECK(f.col(j).sum() <= b(j) + 1e-9);
  CHECK(s.plan.total_flow == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

oracle::LpResult solve_oracle(const Vector& a, const Vector& b, const Matrix& c) {
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(c.rows()));
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) cost[static_cast<std::size_t>(i)].push_back(c(i, j));
  return oracle::transport_lp(std::vector<double>(a.data(), a.data() + a.size()),
                              std::vector<double>(b.data(), b.data() + b.size()), cost);
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("oracle self-check on a hand-solved instance") {
    // Diagonal plan: 0.5 * 1 + 0.5 * 1.
    const auto r = oracle::transport_lp({0.5, 0.5}, {0.5, 0.5}, {{1, 2}, {3, 1}});
    REQUIRE(r.feasible);
    CHECK(r.value == doctest::Approx(1.0));
  }

  TEST_CASE("identical supports cost nothing") {
    Vector a(3);
    a << 0.2, 0.3, 0.5;
    Matrix c(3, 3);
    c << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const TransportSolution s = solve_transport(a, a, c);
    CHECK(s.value == doctest::Approx(0.0));
    check_plan(s, a, a);
  }

  TEST_CASE("single source to two sinks") {
    Vector a(1), b(2);
    a << 1.0;
    b << 0.5, 0.5;
    Matrix c(1, 2);
    c << 0.0, 2.0;
    const TransportSolution s = solve_transport(a, b, c);
    CHECK(s.value == doctest::Approx(1.0));
    check_plan(s, a, b);
  }

  TEST_CASE("random instances match the dense LP") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::uniform_int_distribution<int> coarse(0, 3);
    for (int trial = 0; trial < 300; ++trial) {
      const int p = size(rng), q = size(rng);
      const bool degenerate = trial % 3 == 0;
      const Vector a = random_weights(rng, p, degenerate), b = random_weights(rng, q, degenerate);
      Matrix c(p, q);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) c(i, j) = degenerate ? coarse(rng) : u(rng);
      const TransportSolution s = solve_transport(a, b, c);
      const auto ref = solve_oracle(a, b, c);
      REQUIRE(ref.feasible);
      CHECK(s.value == doctest::Approx(ref.value).epsilon(1e-8));
      CHECK(std::abs(s.value - ref.value) <= 1e-8);
      CHECK((s.plan.flow.cwiseProduct(c)).sum() == doctest::Approx(s.value).epsilon(1e-12));
      check_plan(s, a, b);
    }
  }

  TEST_CASE("larger instance against the oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vector a = random_weights(rng, 9, false), b = random_weights(rng, 11, false);
    Matrix c(9, 11);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 11; ++j) c(i, j) = u(rng);
    CHECK(solve_transport(a, b, c).value == doctest::Approx(solve_oracle(a, b, c).value).epsilon(1e-10));
  }

  TEST_CASE("input validation") {
    Vector a(2), b(2);
    a << 0.5, 0.5;
    b << 0.5, 0.5;
    CHECK_THROWS_AS(solve_transport(a, b, Matrix::Zero(2, 3)), Error);
    Vector bad(2);
    bad << 0.7, 0.7;
    CHECK_THROWS_AS(solve_transport(a, bad, Matrix::Zero(2, 2)), Error);
  }
}
