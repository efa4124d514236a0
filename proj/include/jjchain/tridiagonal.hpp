#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "jjchain/errors.hpp"

namespace jjchain {

/// Tridiagonal matrix stored by its three diagonals. lower(i) sits at (i+1, i), upper(i) at (i, i+1).
template <typename Scalar>
struct Tridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector lower;
  Vector diag;
  Vector upper;

  Eigen::Index size() const { return diag.size(); }

  Dense to_dense() const {
    const Eigen::Index n = size();
    Dense m = Dense::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
      m.template diagonal<-1>() = lower;
      m.template diagonal<1>() = upper;
    }
    return m;
  }

  /// Returns shift * I - this.
  Tridiagonal shifted_negation(const Scalar& shift) const {
    return {-lower, Vector::Constant(size(), shift) - diag, -upper};
  }
};

/// Thomas elimination without pivoting. Throws NumericError on an exactly zero pivot.
template <typename Scalar>
typename Tridiagonal<Scalar>::Vector solve_tridiagonal(const Tridiagonal<Scalar>& m,
                                                       const typename Tridiagonal<Scalar>::Vector& rhs) {
  using Vector = typename Tridiagonal<Scalar>::Vector;
  const Eigen::Index n = m.size();
  Vector c(n), d(n);
  Scalar pivot = m.diag(0);
  if (pivot == Scalar(0)) throw NumericError("singular tridiagonal system at row 0");
  c(0) = n > 1 ? m.upper(0) / pivot : Scalar(0);
  d(0) = rhs(0) / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = m.diag(i) - m.lower(i - 1) * c(i - 1);
    if (pivot == Scalar(0)) throw NumericError("singular tridiagonal system at row " + std::to_string(i));
    c(i) = i + 1 < n ? m.upper(i) / pivot : Scalar(0);
    d(i) = (rhs(i) - m.lower(i - 1) * d(i - 1)) / pivot;
  }
  Vector x(n);
  x(n - 1) = d(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

}  // namespace jjchain
