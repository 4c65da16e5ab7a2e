#pragma once

#include <string>
#include <vector>

#include "ocfem/errors.hpp"

namespace ocfem {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Sparse symmetric matrix in compressed row storage. Both triangles are
// stored explicitly; assembly inserts (i,j) and (j,i) with the same element
// value, so symmetry holds exactly, not just to rounding.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  static SparseSymMatrix from_triplets(int n, std::vector<Triplet> triplets);

  int rows() const { return n_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(int i, int j) const;
  std::vector<double> diagonal() const;
  bool is_symmetric() const;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> apply(const std::vector<double>& x) const;

  // x' A y
  double inner(const std::vector<double>& x, const std::vector<double>& y) const;

  // Submatrix on rows/cols given by sorted index lists.
  SparseSymMatrix restricted(const std::vector<int>& rows,
                             const std::vector<int>& cols) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

// a + scale * b (patterns are merged).
SparseSymMatrix add(const SparseSymMatrix& a, const SparseSymMatrix& b, double scale = 1.0);

struct LinearSolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct SolveError : NumericsError {
  SolveError(const std::string& msg, LinearSolveReport rep)
      : NumericsError(msg), report(rep) {}
  LinearSolveReport report;
};

struct PcgOptions {
  double tol = 1e-12;   // on ||b - Ax|| / ||b||
  int max_iter = 0;     // 0 means 20 * dimension
};

// Conjugate gradients with diagonal preconditioning. Zero rhs returns the
// zero vector in zero iterations; an optional x0 warm-starts the iteration.
// Throws SolveError when the iteration cap is hit.
std::vector<double> spd_solve(const SparseSymMatrix& a, const std::vector<double>& rhs,
                              LinearSolveReport* report = nullptr, PcgOptions opts = {},
                              const std::vector<double>* x0 = nullptr);

}  // namespace ocfem
