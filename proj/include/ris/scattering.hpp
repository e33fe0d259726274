#pragma once

#include <variant>

#include "ris/numerics.hpp"
#include "ris/rng.hpp"

namespace ris {

/// Reflective surface described by two diagonal spectra in the fixed 2-D DFT
/// frame T = D (x) D:
///   S_aa = T diag(sigma_aa) T^H,  S_ab = T diag(sigma_ab) T^H,  S_ba = S_ab^T.
/// Reciprocity is structural: S_ba is never stored.
struct ReflectiveScattering {
  CVector sigma_aa;
  CVector sigma_ab;
  CMatrix frame;

  /// sigma_aa = 0, sigma_ab = 1: S_aa = 0, S_ab = S_ba = I.
  static ReflectiveScattering conventional(std::size_t M);
  static ReflectiveScattering from_spectra(CVector sigma_aa, CVector sigma_ab);

  std::size_t size() const { return static_cast<std::size_t>(sigma_aa.size()); }
  CMatrix S_aa() const;
  CMatrix S_ab() const;
  CMatrix S_ba() const { return S_ab().transpose(); }
};

/// Fully transmissive surface: receive pattern s1 = S_ba^(1), transmit
/// pattern s2 = S_ab^(2), both unitary. No multiport coupling.
struct TransmissiveScattering {
  CMatrix s1;
  CMatrix s2;

  static TransmissiveScattering identity(std::size_t M);
  std::size_t size() const { return static_cast<std::size_t>(s1.rows()); }
};

using ScatteringState = std::variant<ReflectiveScattering, TransmissiveScattering>;

/// Unit-modulus port loads, the diagonal of Upsilon.
struct PhaseConfig {
  CVector upsilon;

  static PhaseConfig ones(std::size_t M);
  static PhaseConfig from_angles(const RVector& theta);
  static PhaseConfig random(std::size_t M, Rng& rng);
  std::size_t size() const { return static_cast<std::size_t>(upsilon.size()); }
};

/// Phi = S_ba (Upsilon^-1 - S_aa)^-1 S_ab. Throws SingularMatrix when the
/// load/coupling matrix is singular.
CMatrix effective_reflective(const ReflectiveScattering& rs, const PhaseConfig& ph);

/// Order-L partial sum of the multiple-reflection series,
/// sum_{l=0..L} (Upsilon S_aa)^l Upsilon.
CMatrix neumann_partial(const ReflectiveScattering& rs, const PhaseConfig& ph, std::size_t order);

/// Phi_T = S_ab^(2) Upsilon S_ba^(1).
CMatrix effective_transmissive(const TransmissiveScattering& ts, const PhaseConfig& ph);

CMatrix effective(const ScatteringState& state, const PhaseConfig& ph);

/// H^H = H_ru^H Phi H_br (K x N).
CMatrix end_to_end(const CMatrix& H_ru, const CMatrix& Phi, const CMatrix& H_br);

/// Averages each spectrum entry with its partner under the 2-D reversal
/// (p,q) <-> ((m-p) mod m, (m-q) mod m). The result makes
/// T diag(sigma) T^H equal to its transpose.
CVector symmetrize(const CVector& sigma);

struct LosslessPair {
  CVector sigma_aa;
  CVector sigma_ab;
};

/// Per-index nearest point on |sigma_aa|^2 + |sigma_ab|^2 = 1:
/// both entries are divided by their joint modulus. An index where both
/// inputs vanish maps to (0, 1).
LosslessPair project_lossless(const CVector& sigma_aa_t, const CVector& sigma_ab_t);

/// Frobenius-nearest unitary matrix U V^H from the thin SVD of `a`.
/// Throws SingularMatrix when `a` is rank deficient (relative 1e-12).
CMatrix project_unitary(const CMatrix& a);

/// Maximum absolute violation of each structural constraint. Fields that do
/// not apply to the checked object stay at zero.
struct ConstraintReport {
  double unit_modulus = 0.0;  // max_m ||upsilon_m| - 1|
  double losslessness = 0.0;  // max_i ||sigma_aa,i|^2 + |sigma_ab,i|^2 - 1|
  double symmetry = 0.0;      // max entry of |S - S^T| over S_aa, S_ab
  double unitarity = 0.0;     // max entry of |S S^H - I| over s1, s2 / frame
  double max() const;
};

ConstraintReport check_constraints(const ReflectiveScattering& rs);
ConstraintReport check_constraints(const TransmissiveScattering& ts);
ConstraintReport check_constraints(const PhaseConfig& ph);
ConstraintReport check_constraints(const ScatteringState& state);

}  // namespace ris
