#pragma once

#include <cstddef>
#include <vector>

namespace chisel {

/// Dense LU factorization with partial pivoting, row-major storage.
class DenseLU {
 public:
  DenseLU() = default;

  // Factors the n-by-n matrix a (row-major, overwritten conceptually: a copy
  // is kept internally). Returns false on exact singularity.
  bool factor(const double* a, int n);

  // Solves A x = b in place.
  void solve(double* b) const;

  // Solves A X = B for k right-hand sides stored column-contiguous
  // (B is n*k, column j at b + j*n).
  void solve_multi(double* b, int k) const;

  // Solves A X = B for X, B row-major n-by-k (cache-friendly AXPY sweeps).
  void solve_multi_rowmajor(double* b, int k) const;

  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> piv_;
};

/// Block-tridiagonal LU for systems with dense m-by-m blocks:
///
///   B_0 x_0 + D_0 x_1                   = b_0
///   C_j x_{j-1} + B_j x_j + D_j x_{j+1} = b_j      0 < j < nb-1
///   C_{nb-1} x_{nb-2} + B_{nb-1} x_{nb-1} = b_{nb-1}
///
/// Off-diagonal blocks here are scalar multiples of a fixed sparse coupling
/// (supplied as dense matrices); the forward elimination densifies the pivot
/// blocks only. No pivoting across blocks.
class BlockTridiagonalLU {
 public:
  // blocks are row-major m*m; C[0] and D[nb-1] are ignored.
  bool factor(const std::vector<std::vector<double>>& B,
              const std::vector<std::vector<double>>& C,
              const std::vector<std::vector<double>>& D,
              int m);

  // Solves in place; x has nb*m entries, block j at x + j*m.
  void solve(std::vector<double>& x) const;

  int block_size() const { return m_; }
  int num_blocks() const { return nb_; }

 private:
  int m_ = 0;
  int nb_ = 0;
  std::vector<DenseLU> pivots_;               // LU of the Schur pivots S_j
  std::vector<std::vector<double>> couplers_; // copies of C_j and D_j
};

// y += alpha * A * x for row-major n-by-n A.
void dense_gemv(const double* a, int n, double alpha, const double* x, double* y);

// C -= A * B for row-major m-by-m matrices.
void dense_gemm_sub(const double* a, const double* b, double* c, int m);

}  // namespace chisel
