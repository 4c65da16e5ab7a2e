#include "ocfem/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace ocfem {

SparseSymMatrix SparseSymMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw ValidationError("sparse: triplet index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  SparseSymMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(static_cast<size_t>(n) + 1, 0);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  size_t i = 0;
  while (i < triplets.size()) {
    int r = triplets[i].row, c = triplets[i].col;
    double v = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
      v += triplets[i++].value;
    m.col_idx_.push_back(c);
    m.values_.push_back(v);
    m.row_ptr_[static_cast<size_t>(r) + 1] = static_cast<int>(m.col_idx_.size());
  }
  for (int r = 0; r < n; ++r)
    m.row_ptr_[static_cast<size_t>(r) + 1] =
        std::max(m.row_ptr_[static_cast<size_t>(r) + 1], m.row_ptr_[r]);
  return m;
}

double SparseSymMatrix::coeff(int i, int j) const {
  for (int k = row_ptr_[i]; k < row_ptr_[static_cast<size_t>(i) + 1]; ++k)
    if (col_idx_[k] == j) return values_[k];
  return 0.0;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i) d[i] = coeff(i, i);
  return d;
}

bool SparseSymMatrix::is_symmetric() const {
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[static_cast<size_t>(i) + 1]; ++k)
      if (values_[k] != coeff(col_idx_[k], i)) return false;
  return true;
}

void SparseSymMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[static_cast<size_t>(i) + 1]; ++k)
      s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseSymMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return y;
}

double SparseSymMatrix::inner(const std::vector<double>& x, const std::vector<double>& y) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[static_cast<size_t>(i) + 1]; ++k)
      row += values_[k] * y[col_idx_[k]];
    s += x[i] * row;
  }
  return s;
}

SparseSymMatrix SparseSymMatrix::restricted(const std::vector<int>& rows,
                                            const std::vector<int>& cols) const {
  std::vector<int> col_pos(n_, -1);
  for (size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);

  std::vector<Triplet> triplets;
  for (size_t ri = 0; ri < rows.size(); ++ri) {
    int i = rows[ri];
    for (int k = row_ptr_[i]; k < row_ptr_[static_cast<size_t>(i) + 1]; ++k) {
      int cj = col_pos[col_idx_[k]];
      if (cj >= 0) triplets.push_back({static_cast<int>(ri), cj, values_[k]});
    }
  }
  int dim = static_cast<int>(std::max(rows.size(), cols.size()));
  return from_triplets(dim, std::move(triplets));
}

SparseSymMatrix add(const SparseSymMatrix& a, const SparseSymMatrix& b, double scale) {
  if (a.rows() != b.rows()) throw ValidationError("sparse: dimension mismatch in add");
  std::vector<Triplet> triplets;
  triplets.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
      triplets.push_back({i, a.col_idx()[k], a.values()[k]});
  for (int i = 0; i < b.rows(); ++i)
    for (int k = b.row_ptr()[i]; k < b.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
      triplets.push_back({i, b.col_idx()[k], scale * b.values()[k]});
  return SparseSymMatrix::from_triplets(a.rows(), std::move(triplets));
}

std::vector<double> spd_solve(const SparseSymMatrix& a, const std::vector<double>& rhs,
                              LinearSolveReport* report, PcgOptions opts,
                              const std::vector<double>* x0) {
  const int n = a.rows();
  if (static_cast<int>(rhs.size()) != n)
    throw ValidationError("spd_solve: rhs size mismatch");
  const int cap = opts.max_iter > 0 ? opts.max_iter : 20 * std::max(n, 1);

  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    if (report) *report = {0, 0.0};
    return std::vector<double>(n, 0.0);
  }

  std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
  std::vector<double> r(n), z(n), p(n), ap(n);
  a.apply(x, ap);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];

  double rel = norm2(r) / bnorm;
  if (rel <= opts.tol) {
    if (report) *report = {0, rel};
    return x;
  }

  std::vector<double> d = a.diagonal();
  for (int i = 0; i < n; ++i)
    d[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;

  for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  for (int it = 1; it <= cap; ++it) {
    a.apply(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0))
      throw SolveError("spd_solve: matrix is not positive definite",
                       {it, norm2(r) / bnorm});
    double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rel = norm2(r) / bnorm;
    if (rel <= opts.tol) {
      if (report) *report = {it, rel};
      return x;
    }
    for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolveError("spd_solve: no convergence within " + std::to_string(cap) + " iterations",
                   {cap, rel});
}

}  // namespace ocfem
