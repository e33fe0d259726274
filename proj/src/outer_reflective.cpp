#include "ris/outer_reflective.hpp"

#include "outer_loop.hpp"

namespace ris {

void OuterConfig::validate() const {
  if (Q < 1) throw ConfigError("field 'Q' must be >= 1");
  if (I_max < 1) throw ConfigError("field 'I_max' must be >= 1");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("field 'mu' must be >= 0");
}

const OuterTraceRow& OuterTrace::final_accepted() const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->accepted) return *it;
  }
  return initial;
}

namespace {

// diag(X Y) for X (M x K), Y (K x M).
CVector diag_of_product(const CMatrix& x, const CMatrix& y) {
  CVector d(x.rows());
  for (Eigen::Index m = 0; m < x.rows(); ++m) {
    d(m) = x.row(m).transpose().cwiseProduct(y.col(m)).sum();
  }
  return d;
}

}  // namespace

SpectralGradient grad_spectra_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                                     const PhaseConfig& ph, const CMatrix& F, double rho) {
  const CMatrix& T = rs.frame;
  const CMatrix s_ab = rs.S_ab();
  const CMatrix left = sample.H_ru.adjoint() * s_ab.transpose();  // L = H_ru^H S_ab^T
  const CMatrix right = s_ab * sample.H_br;                       // R = S_ab H_br

  CMatrix loads = -rs.S_aa();
  loads.diagonal() += ph.upsilon.cwiseInverse();
  const CMatrix A = checked_lu(loads).inverse();
  const CMatrix arf = A * right * F;  // A R F
  const CMatrix la = left * A;        // L A

  const auto K = left.rows();
  const CMatrix err_h = (rho * (left * arf) - CMatrix::Identity(K, F.cols())).adjoint();
  const CMatrix ela_t = err_h * la * T;  // E^H L A T

  SpectralGradient g;
  // diag(T^H A S_ab W S_ab^T A T), W = rho H_br F E^H H_ru^H.
  g.sigma_aa = 2.0 * rho * diag_of_product(T.adjoint() * arf, ela_t);
  // First occurrence (S_ab^T on the left) and second (S_ab on the right).
  const CVector first =
      diag_of_product(T.transpose() * arf, err_h * sample.H_ru.adjoint() * T.conjugate());
  const CVector second = diag_of_product(T.adjoint() * (sample.H_br * F), ela_t);
  g.sigma_ab = 2.0 * rho * (first + second);
  return g;
}

CVector grad_sigma_aa_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho) {
  return grad_spectra_sample(sample, rs, ph, F, rho).sigma_aa;
}

CVector grad_sigma_ab_sample(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho) {
  return grad_spectra_sample(sample, rs, ph, F, rho).sigma_ab;
}

double reflective_sample_mse(const ChannelSample& sample, const ReflectiveScattering& rs,
                             const PhaseConfig& ph, const CMatrix& F, double rho,
                             double sigma_w2) {
  const CMatrix H = end_to_end(sample.H_ru, effective_reflective(rs, ph), sample.H_br);
  return total_mse(H, F, rho, sigma_w2);
}

ReflectiveScattering reflective_step(const ReflectiveScattering& rs, const SpectralGradient& grad,
                                     double mu) {
  const CVector aa = symmetrize(rs.sigma_aa - mu * grad.sigma_aa.conjugate());
  const CVector ab = symmetrize(rs.sigma_ab - mu * grad.sigma_ab.conjugate());
  LosslessPair p = project_lossless(aa, ab);
  ReflectiveScattering out;
  out.sigma_aa = std::move(p.sigma_aa);
  out.sigma_ab = std::move(p.sigma_ab);
  out.frame = rs.frame;
  return out;
}

namespace {

SpectralGradient mean_gradient(const std::vector<SpectralGradient>& gs) {
  SpectralGradient sum{CVector::Zero(gs.front().sigma_aa.size()),
                       CVector::Zero(gs.front().sigma_ab.size())};
  for (const auto& g : gs) {
    sum.sigma_aa += g.sigma_aa;
    sum.sigma_ab += g.sigma_ab;
  }
  const double q = static_cast<double>(gs.size());
  sum.sigma_aa /= q;
  sum.sigma_ab /= q;
  return sum;
}

ReflectiveRun run_reflective(
    const std::function<std::vector<ChannelSample>(std::size_t)>& provider,
    const ReflectiveScattering& initial, const OuterConfig& outer, const InnerConfig& inner,
    double P, double sigma_w2) {
  auto outcome = detail::run_outer_loop<ReflectiveScattering, SpectralGradient>(
      provider, initial, outer, inner, P, sigma_w2,
      [](const ChannelSample& s, const ReflectiveScattering& rs, const InnerResult& r) {
        return grad_spectra_sample(s, rs, r.phase, r.solution.F, r.solution.rho);
      },
      mean_gradient, reflective_step);
  return {std::move(outcome.state), std::move(outcome.trace), std::move(outcome.inner)};
}

}  // namespace

ReflectiveRun run_algorithm1(const std::vector<ChannelSample>& samples,
                             const ReflectiveScattering& initial, const OuterConfig& outer,
                             const InnerConfig& inner, double P, double sigma_w2) {
  if (samples.empty()) throw ConfigError("run_algorithm1: empty training set");
  if (initial.size() != static_cast<std::size_t>(samples.front().H_br.rows())) {
    throw InvalidDimension("run_algorithm1: scattering/channel size mismatch");
  }
  OuterConfig fixed = outer;
  fixed.redraw = false;
  return run_reflective([&](std::size_t) { return samples; }, initial, fixed, inner, P,
                        sigma_w2);
}

ReflectiveRun run_algorithm1(const ScenarioConfig& scenario, ChannelModel model,
                             const OuterConfig& outer, const InnerConfig& inner) {
  scenario.validate();
  outer.validate();
  auto provider = [&](std::size_t k) {
    const std::size_t offset = outer.redraw ? k * outer.Q : 0;
    return generate_batch(model, scenario, outer.seed, Stream::kTrainChannel, outer.Q, offset);
  };
  return run_reflective(provider, ReflectiveScattering::conventional(scenario.M), outer, inner,
                        scenario.P, scenario.noise_var);
}

}  // namespace ris
