#pragma once

#include <vector>

#include "ris/channel.hpp"
#include "ris/scattering.hpp"

namespace ris {

struct PrecoderSolution {
  CMatrix F;  // N x K, ||F||_F^2 = P
  double rho = 0.0;
  double mse = 0.0;
  RVector per_user_mmse;
  double sum_rate = 0.0;  // bits/s/Hz
};

struct InnerConfig {
  std::size_t max_iters = 200;
  double tol = 1e-6;         // relative MSE change that stops the loop
  double phase_step = 0.1;   // initial largest per-element move [rad]
  double backtrack = 0.5;    // step shrink factor
  void validate() const;
};

struct Precoder {
  CMatrix F;
  double rho = 0.0;
};

/// Power-constrained MMSE precoder for the K x N effective channel H:
/// G = H^H (H H^H + (K sigma_w2 / P) I)^-1, rho = ||G||_F / sqrt(P), F = G / rho.
/// Minimises ||rho H F - I||_F^2 + K rho^2 sigma_w2 subject to ||F||_F^2 = P.
Precoder optimal_precoder(const CMatrix& H, double P, double sigma_w2);

/// ||rho H F - I_K||_F^2 + K rho^2 sigma_w2.
double total_mse(const CMatrix& H, const CMatrix& F, double rho, double sigma_w2);

/// Row-wise split of total_mse: ||rho (H F)_k - e_k||^2 + rho^2 sigma_w2.
RVector per_user_mmse(const CMatrix& H, const CMatrix& F, double rho, double sigma_w2);

/// sum_k log2(1 / MMSE_k), each term floored at zero. Throws DomainError on a
/// non-positive entry.
double sum_rate(const RVector& mmse);

/// Optimal precoder plus its metrics.
PrecoderSolution solve_precoder(const CMatrix& H, double P, double sigma_w2);

/// Fixed (sample, scattering) pair with the phase-independent factors folded
/// in: H(ups) = L (Ups^-1 - S_aa)^-1 R for a reflective surface and
/// L Ups R for a transmissive one.
class Cascade {
 public:
  Cascade(const ChannelSample& sample, const ReflectiveScattering& rs);
  Cascade(const ChannelSample& sample, const TransmissiveScattering& ts);
  Cascade(const ChannelSample& sample, const ScatteringState& state);

  std::size_t elements() const { return static_cast<std::size_t>(right_.rows()); }

  /// K x N end-to-end channel for the given loads.
  CMatrix channel(const PhaseConfig& ph) const;

  /// Gradient g of total_mse over the load vector with F, rho fixed, in the
  /// convention df = 2 Re{ sum_m conj(g_m) dups_m }.
  CVector phase_gradient(const PhaseConfig& ph, const CMatrix& F, double rho) const;

 private:
  CMatrix left_;      // K x M
  CMatrix right_;     // M x N
  CMatrix coupling_;  // S_aa, empty when the surface has no coupling
};

CVector phase_gradient(const ChannelSample& sample, const ReflectiveScattering& rs,
                       const PhaseConfig& ph, const CMatrix& F, double rho);
CVector phase_gradient(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho);

struct InnerResult {
  PhaseConfig phase;
  PrecoderSolution solution;
  std::vector<double> mse_history;  // initial value then every accepted step
  std::size_t iterations = 0;
};

/// Alternates the closed-form precoder with projected-gradient steps on the
/// unit-modulus loads, backtracking until total_mse decreases. Starts from
/// `initial`.
InnerResult optimize_inner(const ChannelSample& sample, const ScatteringState& state,
                           const InnerConfig& cfg, double P, double sigma_w2,
                           const PhaseConfig& initial);

/// Same, starting from uniformly random phases drawn from `rng`.
InnerResult optimize_inner(const ChannelSample& sample, const ScatteringState& state,
                           const InnerConfig& cfg, double P, double sigma_w2, Rng& rng);

}  // namespace ris
