#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ris {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Error hierarchy shared by every module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Side length m of an m x m grid holding `count` elements, or throws
/// InvalidDimension when `count` is not a perfect square.
std::size_t grid_side(std::size_t count);

bool is_perfect_square(std::size_t count);

bool all_finite(const CMatrix& a);

/// Unitary DFT matrix, D[j,k] = exp(-2*pi*i*j*k/m)/sqrt(m) with 0-based
/// indices. Symmetric.
CMatrix dft_matrix(std::size_t m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// 2-D DFT frame D (x) D for an M = m*m planar array.
CMatrix two_dft(std::size_t count);

/// Index map of the 1-D reversal k -> (m - k) mod m.
std::size_t reversal_index(std::size_t k, std::size_t m);

/// Permutation matrix of the 2-D reversal on an m x m grid (row-major
/// flattening). Equals two_dft(m*m)^2.
CMatrix reversal_permutation(std::size_t m);

/// Inverse through partial-pivot LU. Throws SingularMatrix when a pivot falls
/// below 1e-14 * max|entry|.
CMatrix invert(const CMatrix& a);

/// Partial-pivot LU of a square matrix with the same singularity rule as
/// invert().
Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& a);

struct Svd {
  CMatrix U;
  RVector S;  // non-negative, non-increasing
  CMatrix V;
};

/// Thin SVD, a = U * diag(S) * V^H.
Svd svd_economy(const CMatrix& a);

}  // namespace ris
