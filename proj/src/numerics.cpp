#include "ris/numerics.hpp"

#include <cmath>
#include <numbers>

namespace ris {

namespace {

constexpr double kSingularPivotRel = 1e-14;

}  // namespace

bool is_perfect_square(std::size_t count) {
  auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  return m * m == count;
}

std::size_t grid_side(std::size_t count) {
  if (count == 0 || !is_perfect_square(count)) {
    throw InvalidDimension("element count " + std::to_string(count) +
                           " is not a perfect square");
  }
  return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
}

bool all_finite(const CMatrix& a) {
  return a.allFinite();
}

CMatrix dft_matrix(std::size_t m) {
  if (m == 0) throw InvalidDimension("dft_matrix: size must be >= 1");
  CMatrix d(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      const double angle = -2.0 * std::numbers::pi *
                           static_cast<double>((j * k) % m) / static_cast<double>(m);
      d(j, k) = std::polar(scale, angle);
    }
  }
  return d;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      out.block(j * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(j, k) * b;
    }
  }
  return out;
}

CMatrix two_dft(std::size_t count) {
  const std::size_t m = grid_side(count);
  const CMatrix d = dft_matrix(m);
  return kron(d, d);
}

std::size_t reversal_index(std::size_t k, std::size_t m) {
  return (m - k % m) % m;
}

CMatrix reversal_permutation(std::size_t m) {
  const std::size_t count = m * m;
  CMatrix p = CMatrix::Zero(count, count);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t from = r * m + c;
      const std::size_t to = reversal_index(r, m) * m + reversal_index(c, m);
      p(to, from) = 1.0;
    }
  }
  return p;
}

Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidDimension("matrix is not square");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<CMatrix> lu(a);
  const auto& factors = lu.matrixLU();
  for (Eigen::Index i = 0; i < factors.rows(); ++i) {
    if (!(std::abs(factors(i, i)) > kSingularPivotRel * scale)) {
      throw SingularMatrix("LU pivot " + std::to_string(i) + " below singularity threshold");
    }
  }
  return lu;
}

CMatrix invert(const CMatrix& a) {
  if (a.size() == 0) return a;
  return checked_lu(a).inverse();
}

Svd svd_economy(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return Svd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace ris
