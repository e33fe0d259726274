#include "ris/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ris {

namespace {

constexpr double kRankTolRel = 1e-12;

CMatrix in_frame(const CMatrix& frame, const CVector& spectrum) {
  return frame * spectrum.asDiagonal() * frame.adjoint();
}

double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double unitarity_residual(const CMatrix& a) {
  const auto n = a.rows();
  return max_abs(a * a.adjoint() - CMatrix::Identity(n, n));
}

}  // namespace

ReflectiveScattering ReflectiveScattering::conventional(std::size_t M) {
  return from_spectra(CVector::Zero(M), CVector::Ones(M));
}

ReflectiveScattering ReflectiveScattering::from_spectra(CVector sigma_aa, CVector sigma_ab) {
  if (sigma_aa.size() != sigma_ab.size()) {
    throw InvalidDimension("reflective spectra have different lengths");
  }
  ReflectiveScattering rs;
  rs.frame = two_dft(static_cast<std::size_t>(sigma_aa.size()));
  rs.sigma_aa = std::move(sigma_aa);
  rs.sigma_ab = std::move(sigma_ab);
  return rs;
}

CMatrix ReflectiveScattering::S_aa() const { return in_frame(frame, sigma_aa); }

CMatrix ReflectiveScattering::S_ab() const { return in_frame(frame, sigma_ab); }

TransmissiveScattering TransmissiveScattering::identity(std::size_t M) {
  return {CMatrix::Identity(M, M), CMatrix::Identity(M, M)};
}

PhaseConfig PhaseConfig::ones(std::size_t M) { return {CVector::Ones(M)}; }

PhaseConfig PhaseConfig::from_angles(const RVector& theta) {
  CVector u(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) u(i) = std::polar(1.0, theta(i));
  return {u};
}

PhaseConfig PhaseConfig::random(std::size_t M, Rng& rng) {
  RVector theta(M);
  for (std::size_t i = 0; i < M; ++i) theta(i) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return from_angles(theta);
}

CMatrix effective_reflective(const ReflectiveScattering& rs, const PhaseConfig& ph) {
  if (ph.size() != rs.size()) throw InvalidDimension("phase/scattering size mismatch");
  CMatrix loads = -rs.S_aa();
  loads.diagonal() += ph.upsilon.cwiseInverse();
  const CMatrix s_ab = rs.S_ab();
  return s_ab.transpose() * invert(loads) * s_ab;
}

CMatrix neumann_partial(const ReflectiveScattering& rs, const PhaseConfig& ph, std::size_t order) {
  const CMatrix step = ph.upsilon.asDiagonal() * rs.S_aa();
  CMatrix term = ph.upsilon.asDiagonal();
  CMatrix sum = term;
  for (std::size_t l = 1; l <= order; ++l) {
    term = step * term;
    sum += term;
  }
  return sum;
}

CMatrix effective_transmissive(const TransmissiveScattering& ts, const PhaseConfig& ph) {
  if (ph.size() != ts.size()) throw InvalidDimension("phase/scattering size mismatch");
  return ts.s2 * ph.upsilon.asDiagonal() * ts.s1;
}

CMatrix effective(const ScatteringState& state, const PhaseConfig& ph) {
  return std::visit(
      [&](const auto& s) -> CMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ReflectiveScattering>) {
          return effective_reflective(s, ph);
        } else {
          return effective_transmissive(s, ph);
        }
      },
      state);
}

CMatrix end_to_end(const CMatrix& H_ru, const CMatrix& Phi, const CMatrix& H_br) {
  if (H_ru.rows() != Phi.rows() || Phi.cols() != H_br.rows()) {
    throw InvalidDimension("end_to_end: non-conformable channel/RIS dimensions");
  }
  return H_ru.adjoint() * Phi * H_br;
}

CVector symmetrize(const CVector& sigma) {
  const auto count = static_cast<std::size_t>(sigma.size());
  const std::size_t m = grid_side(count);
  CVector out = sigma;
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      const std::size_t i = p * m + q;
      const std::size_t j = reversal_index(p, m) * m + reversal_index(q, m);
      if (i < j) {
        const cdouble avg = 0.5 * (sigma(i) + sigma(j));
        out(i) = avg;
        out(j) = avg;
      }
    }
  }
  return out;
}

LosslessPair project_lossless(const CVector& sigma_aa_t, const CVector& sigma_ab_t) {
  if (sigma_aa_t.size() != sigma_ab_t.size()) {
    throw InvalidDimension("project_lossless: spectra have different lengths");
  }
  LosslessPair out{CVector(sigma_aa_t.size()), CVector(sigma_ab_t.size())};
  for (Eigen::Index i = 0; i < sigma_aa_t.size(); ++i) {
    const double norm = std::hypot(std::abs(sigma_aa_t(i)), std::abs(sigma_ab_t(i)));
    if (norm == 0.0) {
      out.sigma_aa(i) = 0.0;
      out.sigma_ab(i) = 1.0;
    } else {
      out.sigma_aa(i) = sigma_aa_t(i) / norm;
      out.sigma_ab(i) = sigma_ab_t(i) / norm;
    }
  }
  return out;
}

CMatrix project_unitary(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidDimension("project_unitary: matrix is not square");
  const Svd svd = svd_economy(a);
  if (a.size() == 0) return a;
  const double smax = svd.S(0);
  const double smin = svd.S(svd.S.size() - 1);
  if (!(smax > 0.0) || smin <= kRankTolRel * smax) {
    throw SingularMatrix("project_unitary: rank-deficient input has no unique polar factor");
  }
  return svd.U * svd.V.adjoint();
}

double ConstraintReport::max() const {
  return std::max({unit_modulus, losslessness, symmetry, unitarity});
}

ConstraintReport check_constraints(const ReflectiveScattering& rs) {
  ConstraintReport r;
  for (Eigen::Index i = 0; i < rs.sigma_aa.size(); ++i) {
    r.losslessness = std::max(
        r.losslessness, std::abs(std::norm(rs.sigma_aa(i)) + std::norm(rs.sigma_ab(i)) - 1.0));
  }
  const CMatrix s_aa = rs.S_aa();
  const CMatrix s_ab = rs.S_ab();
  r.symmetry = std::max(max_abs(s_aa - s_aa.transpose()), max_abs(s_ab - s_ab.transpose()));
  r.unitarity = unitarity_residual(rs.frame);
  return r;
}

ConstraintReport check_constraints(const TransmissiveScattering& ts) {
  ConstraintReport r;
  r.unitarity = std::max(unitarity_residual(ts.s1), unitarity_residual(ts.s2));
  return r;
}

ConstraintReport check_constraints(const PhaseConfig& ph) {
  ConstraintReport r;
  for (Eigen::Index i = 0; i < ph.upsilon.size(); ++i) {
    r.unit_modulus = std::max(r.unit_modulus, std::abs(std::abs(ph.upsilon(i)) - 1.0));
  }
  return r;
}

ConstraintReport check_constraints(const ScatteringState& state) {
  return std::visit([](const auto& s) { return check_constraints(s); }, state);
}

}  // namespace ris
