#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "hh/linalg.hpp"

using namespace hh;
using namespace hh::linalg;

namespace {

Matrix random_matrix(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = scale * unif(rng);
  return A;
}

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return v;
}

}  // namespace

TEST_CASE("lu_solve basics") {
  Matrix I = Matrix::Identity(4, 4);
  Vector b(4);
  b << 1, 2, 3, 4;
  CHECK((lu_solve(I, b) - b).norm() == 0.0);

  Matrix D(2, 2);
  D << 2, 0, 0, 4;
  Vector b2(2);
  b2 << 2, 4;
  Vector x = lu_solve(D, b2);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));
}

TEST_CASE("lu_solve on a random 50x50 system with known solution") {
  Matrix A = random_matrix(50, 42u);
  Vector x_true(50);
  std::mt19937 rng(43u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) x_true(i) = unif(rng);
  Vector b = A * x_true;
  Vector x = lu_solve(A, b);
  CHECK((x - x_true).norm() / x_true.norm() < 1e-9);
}

TEST_CASE("singular matrices are rejected") {
  Matrix S(3, 3);
  S << 1, 2, 3, 2, 4, 6, 1, 1, 1;  // rank 2
  Vector b(3);
  b << 1, 1, 1;
  CHECK_THROWS_AS(lu_solve(S, b), SingularMatrix);
}

TEST_CASE("eigenvalues of a diagonal matrix") {
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 2;
  D(2, 2) = 3;
  auto r = eigenvalues(D);
  REQUIRE(r.converged);
  CHECK(r.eigenvalues[0] == std::complex<double>(3, 0));
  CHECK(r.eigenvalues[1] == std::complex<double>(2, 0));
  CHECK(r.eigenvalues[2] == std::complex<double>(1, 0));
}

TEST_CASE("rotation matrix has eigenvalues +-i") {
  Matrix R(2, 2);
  R << 0, -1, 1, 0;
  auto r = eigenvalues(R);
  REQUIRE(r.converged);
  CHECK(std::abs(r.eigenvalues[0] - std::complex<double>(0, 1)) < 1e-14);
  CHECK(std::abs(r.eigenvalues[1] - std::complex<double>(0, -1)) < 1e-14);
}

TEST_CASE("companion matrix of z^3 - 6z^2 + 11z - 6") {
  Matrix C = Matrix::Zero(3, 3);
  C(0, 0) = 6;
  C(0, 1) = -11;
  C(0, 2) = 6;
  C(1, 0) = 1;
  C(2, 1) = 1;
  auto r = eigenvalues(C);
  REQUIRE(r.converged);
  CHECK(std::abs(r.eigenvalues[0] - 3.0) < 1e-8);
  CHECK(std::abs(r.eigenvalues[1] - 2.0) < 1e-8);
  CHECK(std::abs(r.eigenvalues[2] - 1.0) < 1e-8);
}

TEST_CASE("eigenvalue sum matches the trace") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Matrix A = random_matrix(60, seed);
    auto r = eigenvalues(A);
    REQUIRE(r.converged);
    std::complex<double> sum = 0.0;
    for (auto z : r.eigenvalues) sum += z;
    double norm = A.norm();
    CHECK(std::fabs(sum.real() - A.trace()) < 1e-8 * norm);
    CHECK(std::fabs(sum.imag()) < 1e-8 * norm);
  }
}

TEST_CASE("complex eigenvalues appear in conjugate pairs") {
  Matrix A = random_matrix(41, 7u);
  auto r = eigenvalues(A);
  REQUIRE(r.converged);
  std::vector<std::complex<double>> complexes;
  for (auto z : r.eigenvalues)
    if (z.imag() != 0.0) complexes.push_back(z);
  CHECK(complexes.size() % 2 == 0);
  auto rest = complexes;
  while (!rest.empty()) {
    auto z = rest.back();
    rest.pop_back();
    auto it = std::min_element(rest.begin(), rest.end(), [&](auto a, auto b) {
      return std::abs(a - std::conj(z)) < std::abs(b - std::conj(z));
    });
    REQUIRE(it != rest.end());
    CHECK(std::abs(*it - std::conj(z)) < 1e-10 * (1.0 + std::abs(z)));
    rest.erase(it);
  }
}

TEST_CASE("similarity invariance, including badly scaled transforms") {
  Matrix A = random_matrix(30, 11u);
  auto base = eigenvalues(A);
  REQUIRE(base.converged);

  // diagonal scaling with wide dynamic range exercises the balancing step
  Matrix P = Matrix::Zero(30, 30);
  for (int i = 0; i < 30; ++i) P(i, i) = std::pow(10.0, (i % 7) - 3);
  Matrix B = P.inverse() * A * P;
  auto scaled = eigenvalues(B);
  REQUIRE(scaled.converged);

  auto want = sorted(base.eigenvalues);
  auto got = sorted(scaled.eigenvalues);
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(std::abs(want[i] - got[i]) < 1e-6 * (1.0 + std::abs(want[i])));
}

TEST_CASE("eigenvalue residuals via inverse iteration") {
  const int n = 120;
  Matrix A = random_matrix(n, 99u);
  auto r = eigenvalues(A);
  REQUIRE(r.converged);

  Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
  std::mt19937 rng(100u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const auto& mu : r.eigenvalues) {
    Eigen::MatrixXcd shifted = Ac;
    std::complex<double> shift = mu + std::complex<double>(1e-9, 1e-9);
    for (int i = 0; i < n; ++i) shifted(i, i) -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::complex<double>(unif(rng), unif(rng));
    v.normalize();
    for (int it = 0; it < 3; ++it) {
      v = lu.solve(v);
      v.normalize();
    }
    double resid = (Ac * v - mu * v).norm();
    CHECK(resid < 1e-6);
  }
}

TEST_CASE("dimension guard") {
  Matrix big = Matrix::Zero(2001, 2001);
  CHECK_THROWS_AS(eigenvalues(big), std::invalid_argument);
}
