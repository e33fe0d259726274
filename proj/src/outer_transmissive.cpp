#include "ris/outer_transmissive.hpp"

#include "outer_loop.hpp"

namespace ris {

PatternGradient grad_patterns_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                                     const PhaseConfig& ph, const CMatrix& F, double rho) {
  const CMatrix hbf = sample.H_br * F;                     // M x K
  const CMatrix left = rho * sample.H_ru.adjoint();        // rho H_ru^H
  const CMatrix left_s2 = left * ts.s2;                    // rho H_ru^H s2
  const CMatrix ups_s1_hbf = ph.upsilon.asDiagonal() * (ts.s1 * hbf);
  const auto K = F.cols();
  const CMatrix err_c = (left_s2 * ups_s1_hbf - CMatrix::Identity(K, K)).conjugate();

  PatternGradient g;
  g.s1 = 2.0 * (left_s2 * ph.upsilon.asDiagonal()).transpose() * err_c * hbf.transpose();
  g.s2 = 2.0 * left.transpose() * err_c * ups_s1_hbf.transpose();
  return g;
}

CMatrix grad_s1_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho) {
  return grad_patterns_sample(sample, ts, ph, F, rho).s1;
}

CMatrix grad_s2_sample(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho) {
  return grad_patterns_sample(sample, ts, ph, F, rho).s2;
}

double transmissive_sample_mse(const ChannelSample& sample, const TransmissiveScattering& ts,
                               const PhaseConfig& ph, const CMatrix& F, double rho,
                               double sigma_w2) {
  const CMatrix H = end_to_end(sample.H_ru, effective_transmissive(ts, ph), sample.H_br);
  return total_mse(H, F, rho, sigma_w2);
}

TransmissiveScattering transmissive_step(const TransmissiveScattering& ts,
                                         const PatternGradient& grad, double mu) {
  return {project_unitary(ts.s1 - mu * grad.s1.conjugate()),
          project_unitary(ts.s2 - mu * grad.s2.conjugate())};
}

namespace {

PatternGradient mean_gradient(const std::vector<PatternGradient>& gs) {
  PatternGradient sum{CMatrix::Zero(gs.front().s1.rows(), gs.front().s1.cols()),
                      CMatrix::Zero(gs.front().s2.rows(), gs.front().s2.cols())};
  for (const auto& g : gs) {
    sum.s1 += g.s1;
    sum.s2 += g.s2;
  }
  const double q = static_cast<double>(gs.size());
  sum.s1 /= q;
  sum.s2 /= q;
  return sum;
}

TransmissiveRun run_transmissive(
    const std::function<std::vector<ChannelSample>(std::size_t)>& provider,
    const TransmissiveScattering& initial, const TransOuterConfig& outer,
    const InnerConfig& inner, double P, double sigma_w2) {
  auto outcome = detail::run_outer_loop<TransmissiveScattering, PatternGradient>(
      provider, initial, outer, inner, P, sigma_w2,
      [](const ChannelSample& s, const TransmissiveScattering& ts, const InnerResult& r) {
        return grad_patterns_sample(s, ts, r.phase, r.solution.F, r.solution.rho);
      },
      mean_gradient, transmissive_step);
  return {std::move(outcome.state), std::move(outcome.trace), std::move(outcome.inner)};
}

}  // namespace

TransmissiveRun run_algorithm2(const std::vector<ChannelSample>& samples,
                               const TransmissiveScattering& initial,
                               const TransOuterConfig& outer, const InnerConfig& inner, double P,
                               double sigma_w2) {
  if (samples.empty()) throw ConfigError("run_algorithm2: empty training set");
  if (initial.size() != static_cast<std::size_t>(samples.front().H_br.rows())) {
    throw InvalidDimension("run_algorithm2: scattering/channel size mismatch");
  }
  TransOuterConfig fixed = outer;
  fixed.redraw = false;
  return run_transmissive([&](std::size_t) { return samples; }, initial, fixed, inner, P,
                          sigma_w2);
}

TransmissiveRun run_algorithm2(const ScenarioConfig& scenario, ChannelModel model,
                               const TransOuterConfig& outer, const InnerConfig& inner) {
  scenario.validate();
  outer.validate();
  auto provider = [&](std::size_t k) {
    const std::size_t offset = outer.redraw ? k * outer.Q : 0;
    return generate_batch(model, scenario, outer.seed, Stream::kTrainChannel, outer.Q, offset);
  };
  return run_transmissive(provider, TransmissiveScattering::identity(scenario.M), outer, inner,
                          scenario.P, scenario.noise_var);
}

}  // namespace ris
