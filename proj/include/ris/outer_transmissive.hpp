#pragma once

#include <vector>

#include "ris/outer_reflective.hpp"

namespace ris {

using TransOuterConfig = OuterConfig;

struct TransmissiveRun {
  TransmissiveScattering scattering;
  OuterTrace trace;
  std::vector<InnerResult> inner;
};

/// Full-matrix gradient of the training MSE over the receive pattern s1,
/// 2 (rho H_ru^H s2 Ups)^T conj(E) (H_br F)^T with E = rho H^H F - I.
/// Convention: df = Re{ sum_ij G_ij dS_ij }.
CMatrix grad_s1_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho);

/// Gradient over the transmit pattern s2, 2 (rho H_ru^H)^T conj(E) (Ups s1 H_br F)^T.
CMatrix grad_s2_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho);

struct PatternGradient {
  CMatrix s1;
  CMatrix s2;
};

PatternGradient grad_patterns_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                                     const PhaseConfig& ph, const CMatrix& F, double rho);

double transmissive_sample_mse(const ChannelSample& sample, const TransmissiveScattering& ts,
                               const PhaseConfig& ph, const CMatrix& F, double rho,
                               double sigma_w2);

/// S - mu conj(G) for both patterns, each replaced by its nearest unitary.
TransmissiveScattering transmissive_step(const TransmissiveScattering& ts,
                                         const PatternGradient& grad, double mu);

/// Offline optimisation of both patterns over a fixed training set.
TransmissiveRun run_algorithm2(const std::vector<ChannelSample>& samples,
                               const TransmissiveScattering& initial,
                               const TransOuterConfig& outer, const InnerConfig& inner, double P,
                               double sigma_w2);

/// Scenario-driven variant starting from s1 = s2 = I.
TransmissiveRun run_algorithm2(const ScenarioConfig& scenario, ChannelModel model,
                               const TransOuterConfig& outer, const InnerConfig& inner);

}  // namespace ris
