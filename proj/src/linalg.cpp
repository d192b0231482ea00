#include <chisel/linalg.hpp>

#include <cmath>
#include <cstring>

namespace chisel {

bool DenseLU::factor(const double* a, int n) {
  n_ = n;
  lu_.assign(a, a + static_cast<size_t>(n) * n);
  piv_.resize(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(lu_[static_cast<size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(lu_[static_cast<size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[k] = p;
    if (best == 0.0) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j)
        std::swap(lu_[static_cast<size_t>(k) * n + j], lu_[static_cast<size_t>(p) * n + j]);
    }
    const double pivot = lu_[static_cast<size_t>(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      double m = lu_[static_cast<size_t>(i) * n + k] / pivot;
      lu_[static_cast<size_t>(i) * n + k] = m;
      if (m != 0.0) {
        const double* rk = &lu_[static_cast<size_t>(k) * n];
        double* ri = &lu_[static_cast<size_t>(i) * n];
        for (int j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
      }
    }
  }
  return true;
}

void DenseLU::solve(double* b) const {
  const int n = n_;
  for (int k = 0; k < n; ++k)
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
  for (int k = 0; k < n; ++k) {
    double bk = b[k];
    if (bk != 0.0) {
      for (int i = k + 1; i < n; ++i) b[i] -= lu_[static_cast<size_t>(i) * n + k] * bk;
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    const double* ri = &lu_[static_cast<size_t>(i) * n];
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= ri[j] * b[j];
    b[i] = s / ri[i];
  }
}

void DenseLU::solve_multi(double* b, int k) const {
  for (int j = 0; j < k; ++j) solve(b + static_cast<size_t>(j) * n_);
}

void DenseLU::solve_multi_rowmajor(double* b, int k) const {
  const int n = n_;
  auto row = [&](int i) { return b + static_cast<size_t>(i) * k; };
  for (int i = 0; i < n; ++i) {
    if (piv_[i] != i) {
      double* a = row(i);
      double* c = row(piv_[i]);
      for (int j = 0; j < k; ++j) std::swap(a[j], c[j]);
    }
  }
  for (int kk = 0; kk < n; ++kk) {
    const double* bk = row(kk);
    for (int i = kk + 1; i < n; ++i) {
      double m = lu_[static_cast<size_t>(i) * n + kk];
      if (m == 0.0) continue;
      double* bi = row(i);
      for (int j = 0; j < k; ++j) bi[j] -= m * bk[j];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    const double* ri = &lu_[static_cast<size_t>(i) * n];
    double* bi = row(i);
    for (int jj = i + 1; jj < n; ++jj) {
      double u = ri[jj];
      if (u == 0.0) continue;
      const double* bj = row(jj);
      for (int j = 0; j < k; ++j) bi[j] -= u * bj[j];
    }
    double d = ri[i];
    for (int j = 0; j < k; ++j) bi[j] /= d;
  }
}

void dense_gemv(const double* a, int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) {
    const double* row = a + static_cast<size_t>(i) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] += alpha * s;
  }
}

void dense_gemm_sub(const double* a, const double* b, double* c, int m) {
  // c -= a*b, all row-major m*m (ikj loop order)
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * m;
    double* crow = c + static_cast<size_t>(i) * m;
    for (int k = 0; k < m; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b + static_cast<size_t>(k) * m;
      for (int j = 0; j < m; ++j) crow[j] -= aik * brow[j];
    }
  }
}

bool BlockTridiagonalLU::factor(const std::vector<std::vector<double>>& B,
                                const std::vector<std::vector<double>>& C,
                                const std::vector<std::vector<double>>& D,
                                int m) {
  m_ = m;
  nb_ = static_cast<int>(B.size());
  pivots_.assign(nb_, DenseLU());
  couplers_.assign(2 * static_cast<size_t>(nb_), {});

  std::vector<double> s = B[0];
  if (!pivots_[0].factor(s.data(), m)) return false;

  std::vector<double> t(static_cast<size_t>(m) * m);
  for (int j = 1; j < nb_; ++j) {
    // T = S_{j-1}^{-1} D_{j-1}
    t = D[j - 1];
    pivots_[j - 1].solve_multi_rowmajor(t.data(), m);
    s = B[j];
    dense_gemm_sub(C[j].data(), t.data(), s.data(), m);
    if (!pivots_[j].factor(s.data(), m)) return false;

    couplers_[2 * static_cast<size_t>(j)] = C[j];
    couplers_[2 * static_cast<size_t>(j - 1) + 1] = D[j - 1];
  }
  return true;
}

void BlockTridiagonalLU::solve(std::vector<double>& x) const {
  const int m = m_;
  std::vector<double> tmp(m);
  // forward sweep: z_j = S_j^{-1} (b_j - C_j z_{j-1})
  for (int j = 0; j < nb_; ++j) {
    double* xj = x.data() + static_cast<size_t>(j) * m;
    if (j > 0) {
      const auto& cj = couplers_[2 * static_cast<size_t>(j)];
      dense_gemv(cj.data(), m, -1.0, x.data() + static_cast<size_t>(j - 1) * m, xj);
    }
    pivots_[j].solve(xj);
  }
  // backward sweep: x_j = z_j - S_j^{-1} D_j x_{j+1}
  for (int j = nb_ - 2; j >= 0; --j) {
    const auto& dj = couplers_[2 * static_cast<size_t>(j) + 1];
    std::fill(tmp.begin(), tmp.end(), 0.0);
    dense_gemv(dj.data(), m, 1.0, x.data() + static_cast<size_t>(j + 1) * m, tmp.data());
    pivots_[j].solve(tmp.data());
    double* xj = x.data() + static_cast<size_t>(j) * m;
    for (int i = 0; i < m; ++i) xj[i] -= tmp[i];
  }
}

}  // namespace chisel
