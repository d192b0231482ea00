#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chisel/linalg.hpp>

#include <cmath>
#include <random>

using namespace chisel;

TEST_CASE("dense lu solves random systems") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n : {1, 3, 8, 20}) {
    std::vector<double> a(n * n), x(n), b(n, 0.0);
    for (double& v : a) v = dist(rng);
    for (int i = 0; i < n; ++i) a[i * n + i] += 3.0;  // keep it comfortably nonsingular
    for (double& v : x) v = dist(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b[i] += a[i * n + j] * x[j];
    DenseLU lu;
    REQUIRE(lu.factor(a.data(), n));
    lu.solve(b.data());
    for (int i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-10));
  }
}

TEST_CASE("dense lu reports singularity") {
  std::vector<double> a = {1.0, 2.0, 2.0, 4.0};
  DenseLU lu;
  CHECK_FALSE(lu.factor(a.data(), 2));
}

TEST_CASE("block tridiagonal lu matches dense solve") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = 4, nb = 6, n = m * nb;

  std::vector<std::vector<double>> B(nb), C(nb), D(nb);
  for (int j = 0; j < nb; ++j) {
    B[j].assign(m * m, 0.0);
    C[j].assign(m * m, 0.0);
    D[j].assign(m * m, 0.0);
    for (double& v : B[j]) v = dist(rng);
    for (int i = 0; i < m; ++i) B[j][i * m + i] += 5.0;
    if (j > 0)
      for (double& v : C[j]) v = 0.3 * dist(rng);
    if (j + 1 < nb)
      for (double& v : D[j]) v = 0.3 * dist(rng);
  }

  // dense assembly
  std::vector<double> A(n * n, 0.0);
  auto put = [&](int jb, int jc, const std::vector<double>& blk) {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) A[(jb * m + r) * n + jc * m + c] = blk[r * m + c];
  };
  for (int j = 0; j < nb; ++j) {
    put(j, j, B[j]);
    if (j > 0) put(j, j - 1, C[j]);
    if (j + 1 < nb) put(j, j + 1, D[j]);
  }

  std::vector<double> x_true(n), b(n, 0.0);
  for (double& v : x_true) v = dist(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b[i] += A[i * n + j] * x_true[j];

  BlockTridiagonalLU blu;
  REQUIRE(blu.factor(B, C, D, m));
  std::vector<double> x = b;
  blu.solve(x);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-9));

  DenseLU dlu;
  REQUIRE(dlu.factor(A.data(), n));
  std::vector<double> xd = b;
  dlu.solve(xd.data());
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-9));
}
