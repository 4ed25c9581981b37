#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "flagcert/errors.hpp"
#include "flagcert/linalg.hpp"
#include "oracles.hpp"

using namespace flagcert;
using fixtures::random_matrix;

namespace {

oracle::Dense to_dense(const Matrix& m) {
  oracle::Dense d(m.dim(), std::vector<oracle::Real>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) d[i][j] = m(i, j);
  return d;
}

double reconstruction_residual(const Matrix& m, const SingularDecomposition& s) {
  const Matrix us = s.u * Matrix::diagonal(s.sigma);
  return (us * s.v.transpose() - m).max_abs();
}

double orthogonality_defect(const Matrix& q) { return (q.transpose() * q - Matrix::identity(q.dim())).max_abs(); }

Matrix jordan3() { return Matrix::from_rows({{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}); }

}  // namespace

TEST_CASE("svd of a diagonal matrix is itself up to column signs") {
  const auto s = svd(Matrix::diagonal(Vec{4, 2, 1}));
  CHECK(s.sigma == Vec{4, 2, 1});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(s.u(i, i)) == doctest::Approx(1.0));
    CHECK(std::abs(s.v(i, i)) == doctest::Approx(1.0));
  }
}

TEST_CASE("svd of an orthogonal matrix has unit singular values") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = svd(random_matrix(rng, 5)).u;
    for (double x : svd(q).sigma) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("svd of [[2,1],[0,1]] matches the quadratic formula") {
  const auto s = svd(Matrix::from_rows({{2, 1}, {0, 1}}));
  const auto want = oracle::singular_values_2x2(2, 1, 0, 1);
  CHECK(s.sigma[0] == doctest::Approx(std::sqrt(3 + std::sqrt(5.0))).epsilon(1e-14));
  CHECK(s.sigma[1] == doctest::Approx(std::sqrt(3 - std::sqrt(5.0))).epsilon(1e-14));
  CHECK(std::abs(s.sigma[0] - static_cast<double>(want[0])) < 1e-14);
  CHECK(std::abs(s.sigma[1] - static_cast<double>(want[1])) < 1e-14);
}

TEST_CASE("svd round trip, orthogonality and ordering on random matrices") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix m = random_matrix(rng, dim(rng));
    const auto s = svd(m);
    CHECK(reconstruction_residual(m, s) <= 1e-9 * m.max_abs());
    CHECK(orthogonality_defect(s.u) <= 1e-10);
    CHECK(orthogonality_defect(s.v) <= 1e-10);
    for (std::size_t i = 0; i + 1 < s.sigma.size(); ++i) CHECK(s.sigma[i] >= s.sigma[i + 1]);
  }
}

TEST_CASE("svd agrees with a long-double Jacobi eigen oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = random_matrix(rng, 2 + trial % 6);
    const auto got = svd(m).sigma;
    const auto want = oracle::singular_values(to_dense(m));
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(std::abs(got[i] - static_cast<double>(want[i])) <= 1e-10 * static_cast<double>(want[0]));
  }
}

TEST_CASE("svd column signs put the largest entry of each u column nonnegative") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = svd(random_matrix(rng, 4));
    for (std::size_t j = 0; j < 4; ++j) {
      const Vec col = s.u.column(j);
      const auto it = std::max_element(col.begin(), col.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(*it >= 0.0);
    }
  }
}

TEST_CASE("svd rejects a singular input unless allowed") {
  const Matrix m = Matrix::from_rows({{1, 2}, {2, 4}});
  CHECK_THROWS_AS(svd(m), Error);
  const auto s = svd(m, SvdOptions{.allow_singular = true});
  CHECK(s.sigma[1] == doctest::Approx(0.0));
}

TEST_CASE("cartan projection examples") {
  const auto mu = cartan_projection(Matrix::diagonal(Vec{std::exp(2.0), std::exp(-2.0)})).mu;
  CHECK(mu[0] == doctest::Approx(2.0));
  CHECK(mu[1] == doctest::Approx(-2.0));
  for (double x : cartan_projection(Matrix::identity(4)).mu) CHECK(std::abs(x) < 1e-12);

  for (double n : {1.0, 10.0, 1000.0, 1e6}) {
    const auto got = cartan_projection(Matrix::from_rows({{1, n}, {0, 1}})).mu;
    const auto s = oracle::singular_values_2x2(1, n, 0, 1);
    CHECK(got[0] == doctest::Approx(static_cast<double>(std::log(s[0]))).epsilon(1e-12));
  }
}

TEST_CASE("cartan vectors are sorted and sum to zero") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mu = cartan_projection(random_matrix(rng, 2 + trial % 5)).mu;
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      sum += mu[i];
      if (i > 0) CHECK(mu[i - 1] >= mu[i]);
    }
    CHECK(std::abs(sum) < 1e-9);
  }
}

TEST_CASE("top log-singular value is subadditive") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix g = random_matrix(rng, 4), h = random_matrix(rng, 4);
    const double lhs = cartan_projection(g * h).mu[0];
    CHECK(lhs <= cartan_projection(g).mu[0] + cartan_projection(h).mu[0] + 1e-9);
  }
}

TEST_CASE("simple root gaps") {
  const auto g1 = simple_root_gaps(CartanVector{{2, -2}});
  REQUIRE(g1.size() == 1);
  CHECK(g1[0] == doctest::Approx(4.0));
  const auto g2 = simple_root_gaps(cartan_projection(Matrix::diagonal(Vec{4, 2, 1})));
  CHECK(g2[0] == doctest::Approx(std::log(2.0)));
  CHECK(g2[1] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("gaps of Jordan block powers grow monotonically") {
  std::vector<double> gaps;
  for (long long n = 1; n <= 400; ++n) {
    // Entries of J3^n are binomial coefficients, formed exactly.
    const double nn = static_cast<double>(n);
    const Matrix jn = Matrix::from_rows({{1, nn, nn * (nn - 1) / 2}, {0, 1, nn}, {0, 0, 1}});
    CHECK((power(jordan3(), n) - jn).max_abs() == 0.0);
    const auto want = oracle::singular_values(to_dense(jn));
    const double g = simple_root_gaps(cartan_projection(jn))[0];
    CHECK(g == doctest::Approx(static_cast<double>(std::log(want[0] / want[1]))).epsilon(1e-8));
    gaps.push_back(g);
  }
  for (std::size_t i = 10; i < gaps.size(); ++i) CHECK(gaps[i] > gaps[i - 1]);
  CHECK(gaps.back() > 5.0);
}

TEST_CASE("exterior powers") {
  std::mt19937_64 rng(6);
  const Matrix m = random_matrix(rng, 4);
  CHECK((exterior_power(m, 1) - m).max_abs() == 0.0);

  const Matrix d2 = exterior_power(Matrix::diagonal(Vec{2, 3, 5}), 2);
  CHECK((d2 - Matrix::diagonal(Vec{6, 10, 15})).max_abs() < 1e-14);
  CHECK(k_subsets(3, 2) == std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(20, 10) == 184756);
  CHECK_THROWS_AS(exterior_power(m, 0), Error);
  CHECK_THROWS_AS(exterior_power(m, 5), Error);
}

TEST_CASE("singular values of the second exterior power are pairwise products") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = random_matrix(rng, 4);
    const auto sigma = oracle::singular_values(to_dense(m));
    std::vector<oracle::Real> products;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) products.push_back(sigma[i] * sigma[j]);
    std::sort(products.rbegin(), products.rend());
    const auto got = svd(exterior_power(m, 2)).sigma;
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(std::abs(got[i] - static_cast<double>(products[i])) <= 1e-8 * static_cast<double>(products[i]) +
                                                                       1e-12 * static_cast<double>(products[0]));
  }
}

TEST_CASE("exterior power is a homomorphism") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 3 + trial % 3;
    const std::size_t k = 1 + trial % (d - 1);
    const Matrix g = random_matrix(rng, d), h = random_matrix(rng, d);
    const Matrix lhs = exterior_power(g * h, k);
    const Matrix rhs = exterior_power(g, k) * exterior_power(h, k);
    CHECK((lhs - rhs).max_abs() <= 1e-8 * std::max(1.0, rhs.max_abs()));
  }
}

TEST_CASE("gap at position zero of a wedge power is the k-th gap") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 4 + trial % 2;
    const Matrix g = random_matrix(rng, d);
    const auto sigma = oracle::singular_values(to_dense(g));
    for (std::size_t k = 1; k < d; ++k) {
      const double want = static_cast<double>(std::log(sigma[k - 1] / sigma[k]));
      const double got = simple_root_gaps(cartan_projection(exterior_power(g, k)))[0];
      CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("gap traces") {
  const std::vector<Matrix> ids(30, Matrix::identity(3));
  const auto flat = gap_trace(ids, 1);
  for (double v : flat.values) CHECK(std::abs(v) < 1e-12);
  CHECK_FALSE(flat.divergent);

  std::vector<Matrix> diag;
  for (int n = 1; n <= 30; ++n) diag.push_back(power(Matrix::diagonal(Vec{2.0, 0.5}), n));
  const auto lin = gap_trace(diag, 1);
  for (int n = 1; n <= 30; ++n) CHECK(lin.values[n - 1] == doctest::Approx(2 * n * std::log(2.0)).epsilon(1e-12));
  CHECK(lin.divergent);

  std::vector<Matrix> unip;
  for (int n = 1; n <= 500; ++n) unip.push_back(Matrix::from_rows({{1.0, double(n)}, {0.0, 1.0}}));
  const auto tr = gap_trace(unip, 1);
  for (int n = 1; n <= 500; ++n) {
    const auto s = oracle::singular_values_2x2(1, n, 0, 1);
    CHECK(tr.values[n - 1] == doctest::Approx(static_cast<double>(std::log(s[0] / s[1]))).epsilon(1e-10));
  }
  CHECK(tr.values.back() - 2 * std::log(500.0) == doctest::Approx(0.0).epsilon(1e-4));

  std::vector<Matrix> rot;
  for (int n = 1; n <= 100; ++n) rot.push_back(fixtures::rotation(0.3 * n));
  CHECK_FALSE(gap_trace(rot, 1).divergent);
  CHECK_THROWS_AS(gap_trace(rot, 2), Error);
}

TEST_CASE("projective normalization is canonical") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = fixtures::random_invertible(rng, 3);
    const Matrix n = projective_normalize(m);
    CHECK(std::abs(std::abs(determinant(n)) - 1.0) < 1e-12);
    CHECK(projectively_equal(n, projective_normalize(-3.5 * m)));
    CHECK(projectively_equal(m, 7.0 * m));
  }
  CHECK_FALSE(projectively_equal(Matrix::diagonal(Vec{1, 2}), Matrix::diagonal(Vec{2, 1})));
}

TEST_CASE("determinant, inverse, power and expm") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = fixtures::random_invertible(rng, 4);
    CHECK((m * inverse(m) - Matrix::identity(4)).max_abs() < 1e-10);
    CHECK((power(m, -3) * power(m, 3) - Matrix::identity(4)).max_abs() < 1e-8);
  }
  CHECK(determinant(Matrix::from_rows({{1, 2}, {3, 4}})) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(inverse(Matrix::from_rows({{1, 2}, {2, 4}})), Error);

  const Matrix e = expm(Matrix::diagonal(Vec{1.0, -2.0}));
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  const Matrix n = Matrix::from_rows({{0, 1}, {0, 0}});
  CHECK((expm(n) - Matrix::from_rows({{1, 1}, {0, 1}})).max_abs() < 1e-15);
  const Matrix r = expm(Matrix::from_rows({{0, -0.7}, {0.7, 0}}));
  CHECK((r - fixtures::rotation(0.7)).max_abs() < 1e-14);
}

TEST_CASE("integer matrices are flagged exact") {
  CHECK(Matrix::from_rows({{1, 1}, {0, 1}}).is_exact_integer());
  CHECK_FALSE(Matrix::from_rows({{1, 0.5}, {0, 1}}).is_exact_integer());
}

TEST_CASE("wedge of basis vectors and number formatting") {
  const Vec w = wedge({{1, 0, 0}, {0, 1, 0}});
  CHECK(w == Vec{1, 0, 0});
  CHECK(format_double(0.1) == "1.0000000000000001e-01");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}
