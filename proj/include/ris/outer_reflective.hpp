#pragma once

#include <cstdint>
#include <vector>

#include "ris/channel.hpp"
#include "ris/inner_solver.hpp"
#include "ris/scattering.hpp"

namespace ris {

struct OuterConfig {
  std::size_t Q = 4;       // channel samples per iteration
  std::size_t I_max = 50;  // outer iterations
  double mu = 1e-2;        // step size
  std::uint64_t seed = 1;
  // Draw a fresh sample set every iteration instead of reusing one set.
  bool redraw = false;
  // Reject a step that raises the mean training MSE and halve mu.
  bool adaptive_step = true;
  // Start each inner solve from the sample's previous phases.
  bool warm_start = true;
  void validate() const;
};

struct OuterTraceRow {
  std::size_t iteration = 0;  // 0 for the initial state, k >= 1 for outer iteration k
  double mean_mse = 0.0;
  double mean_sum_rate = 0.0;
  double mu = 0.0;
  bool accepted = true;
  ConstraintReport scattering;     // residuals of the state evaluated in this row
  double phase_unit_modulus = 0.0;  // max over samples
  double power_residual = 0.0;      // max over samples of | ||F||^2 - P |
};

/// The initial state plus one row per executed outer iteration describing the
/// candidate it produced (rejected candidates are flagged).
struct OuterTrace {
  OuterTraceRow initial;
  std::vector<OuterTraceRow> rows;
  std::size_t iterations() const { return rows.size(); }
  /// Row of the returned state: the last accepted candidate, or the initial
  /// row when none was accepted.
  const OuterTraceRow& final_accepted() const;
};

struct ReflectiveRun {
  ReflectiveScattering scattering;
  OuterTrace trace;
  std::vector<InnerResult> inner;  // per-sample solutions at the returned state
};

/// Per-sample derivative of the training MSE with respect to the diagonal of
/// Sigma_aa, with F, rho and the loads held fixed. Convention:
/// df = Re{ sum_i g_i dsigma_i }; steepest descent moves along -conj(g).
CVector grad_sigma_aa_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho);

/// Same for Sigma_ab; includes both occurrences of S_ab in the cascade.
CVector grad_sigma_ab_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho);

struct SpectralGradient {
  CVector sigma_aa;
  CVector sigma_ab;
};

/// Both gradients from a single factorisation.
SpectralGradient grad_spectra_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                                     const PhaseConfig& ph, const CMatrix& F, double rho);

/// Training MSE of one sample as a function of the spectra, F, rho and loads
/// fixed.
double reflective_sample_mse(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho,
                             double sigma_w2);

/// One projected update: sigma - mu conj(G), pairing symmetrisation, then the
/// per-index lossless projection.
ReflectiveScattering reflective_step(const ReflectiveScattering& rs, const SpectralGradient& grad,
                                     double mu);

/// Offline optimisation of the reflective spectra over a fixed training set
/// (`samples` must hold Q entries; `outer.redraw` is ignored here).
ReflectiveRun run_algorithm1(const std::vector<ChannelSample>& samples,
                             const ReflectiveScattering& initial, const OuterConfig& outer,
                             const InnerConfig& inner, double P, double sigma_w2);

/// Scenario-driven variant: samples come from the channel model with seeds
/// derived from outer.seed; starts from the conventional spectra.
ReflectiveRun run_algorithm1(const ScenarioConfig& scenario, ChannelModel model,
                             const OuterConfig& outer, const InnerConfig& inner);

}  // namespace ris
