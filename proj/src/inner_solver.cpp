#include "ris/inner_solver.hpp"

#include <cmath>

namespace ris {

namespace {

// Smallest trial move [rad] before the phase search is declared stationary.
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1.0;

CVector normalize_unit(const CVector& v) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    out(i) = a > 0.0 ? v(i) / a : cdouble(1.0, 0.0);
  }
  return out;
}

// Component of g tangent to the unit circle at each ups_m.
CVector tangential(const CVector& g, const CVector& ups) {
  CVector t(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    t(i) = g(i) - std::real(std::conj(ups(i)) * g(i)) * ups(i);
  }
  return t;
}

}  // namespace

void InnerConfig::validate() const {
  if (max_iters < 1) throw ConfigError("inner max_iters must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("inner tol must be > 0");
  if (!(phase_step > 0.0)) throw ConfigError("inner phase_step must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw ConfigError("inner backtrack must lie in (0, 1)");
  }
}

Precoder optimal_precoder(const CMatrix& H, double P, double sigma_w2) {
  const auto K = H.rows();
  CMatrix gram = H * H.adjoint();
  gram.diagonal().array() += static_cast<double>(K) * sigma_w2 / P;
  const CMatrix G = H.adjoint() * invert(gram);
  const double gnorm = G.norm();
  if (!(gnorm > 0.0)) throw SingularMatrix("optimal_precoder: zero effective channel");
  const double rho = gnorm / std::sqrt(P);
  return {G / rho, rho};
}

double total_mse(const CMatrix& H, const CMatrix& F, double rho, double sigma_w2) {
  const auto K = H.rows();
  const CMatrix e = rho * (H * F) - CMatrix::Identity(K, F.cols());
  return e.squaredNorm() + static_cast<double>(K) * rho * rho * sigma_w2;
}

RVector per_user_mmse(const CMatrix& H, const CMatrix& F, double rho, double sigma_w2) {
  const auto K = H.rows();
  const CMatrix e = rho * (H * F) - CMatrix::Identity(K, F.cols());
  RVector out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    out(k) = e.row(k).squaredNorm() + rho * rho * sigma_w2;
  }
  return out;
}

double sum_rate(const RVector& mmse) {
  double c = 0.0;
  for (Eigen::Index k = 0; k < mmse.size(); ++k) {
    if (!(mmse(k) > 0.0)) throw DomainError("sum_rate: MMSE must be positive");
    c += std::max(0.0, -std::log2(mmse(k)));
  }
  return c;
}

PrecoderSolution solve_precoder(const CMatrix& H, double P, double sigma_w2) {
  Precoder p = optimal_precoder(H, P, sigma_w2);
  PrecoderSolution s;
  s.per_user_mmse = per_user_mmse(H, p.F, p.rho, sigma_w2);
  s.mse = s.per_user_mmse.sum();
  s.sum_rate = sum_rate(s.per_user_mmse);
  s.F = std::move(p.F);
  s.rho = p.rho;
  return s;
}

Cascade::Cascade(const ChannelSample& sample, const ReflectiveScattering& rs) {
  const CMatrix s_ab = rs.S_ab();
  left_ = sample.H_ru.adjoint() * s_ab.transpose();
  right_ = s_ab * sample.H_br;
  if (!rs.sigma_aa.isZero(0.0)) coupling_ = rs.S_aa();
}

Cascade::Cascade(const ChannelSample& sample, const TransmissiveScattering& ts)
    : left_(sample.H_ru.adjoint() * ts.s2), right_(ts.s1 * sample.H_br) {}

Cascade::Cascade(const ChannelSample& sample, const ScatteringState& state)
    : Cascade(std::visit([&](const auto& s) { return Cascade(sample, s); }, state)) {}

CMatrix Cascade::channel(const PhaseConfig& ph) const {
  if (ph.size() != elements()) throw InvalidDimension("phase/scattering size mismatch");
  if (coupling_.size() == 0) {
    // No coupling: (Ups^-1)^-1 = Ups exactly.
    return left_ * ph.upsilon.asDiagonal() * right_;
  }
  CMatrix loads = -coupling_;
  loads.diagonal() += ph.upsilon.cwiseInverse();
  return left_ * checked_lu(loads).solve(right_);
}

CVector Cascade::phase_gradient(const PhaseConfig& ph, const CMatrix& F, double rho) const {
  const auto K = left_.rows();
  const CMatrix H = channel(ph);
  const CMatrix err_h = (rho * (H * F) - CMatrix::Identity(K, F.cols())).adjoint();  // E^H
  CVector g(elements());
  if (coupling_.size() == 0) {
    // d(Ups) = diag(d ups): df = 2 Re sum_m d ups_m rho [R F E^H L]_mm.
    const CMatrix a = right_ * F;         // M x K
    const CMatrix b = err_h * left_;      // K x M
    for (Eigen::Index m = 0; m < g.size(); ++m) {
      g(m) = std::conj(rho * a.row(m).transpose().cwiseProduct(b.col(m)).sum());
    }
    return g;
  }
  // A = (Ups^-1 - S_aa)^-1, dA = A diag(d ups / ups^2) A.
  CMatrix loads = -coupling_;
  loads.diagonal() += ph.upsilon.cwiseInverse();
  const CMatrix A = checked_lu(loads).inverse();
  const CMatrix a = A * right_ * F;     // A R F
  const CMatrix b = err_h * left_ * A;  // E^H L A
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    const cdouble u = ph.upsilon(m);
    g(m) = std::conj(rho * a.row(m).transpose().cwiseProduct(b.col(m)).sum() / (u * u));
  }
  return g;
}

CVector phase_gradient(const ChannelSample& sample, const ReflectiveScattering& rs,
                       const PhaseConfig& ph, const CMatrix& F, double rho) {
  return Cascade(sample, rs).phase_gradient(ph, F, rho);
}

CVector phase_gradient(const ChannelSample& sample, const TransmissiveScattering& ts,
                       const PhaseConfig& ph, const CMatrix& F, double rho) {
  return Cascade(sample, ts).phase_gradient(ph, F, rho);
}

InnerResult optimize_inner(const ChannelSample& sample, const ScatteringState& state,
                           const InnerConfig& cfg, double P, double sigma_w2,
                           const PhaseConfig& initial) {
  cfg.validate();
  const Cascade cascade(sample, state);

  InnerResult r;
  r.phase = PhaseConfig{normalize_unit(initial.upsilon)};
  r.solution = solve_precoder(cascade.channel(r.phase), P, sigma_w2);
  r.mse_history.push_back(r.solution.mse);

  double step = cfg.phase_step;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const CVector g = tangential(
        cascade.phase_gradient(r.phase, r.solution.F, r.solution.rho), r.phase.upsilon);
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0)) break;
    const CVector dir = g / gmax;

    bool accepted = false;
    PhaseConfig trial_phase;
    PrecoderSolution trial;
    while (step >= kMinStep) {
      trial_phase.upsilon = normalize_unit(r.phase.upsilon - step * dir);
      trial = solve_precoder(cascade.channel(trial_phase), P, sigma_w2);
      if (trial.mse < r.solution.mse) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) break;

    const double prev = r.solution.mse;
    r.phase = std::move(trial_phase);
    r.solution = std::move(trial);
    r.mse_history.push_back(r.solution.mse);
    r.iterations = it + 1;
    if ((prev - r.solution.mse) < cfg.tol * prev) break;
    step = std::min(kMaxStep, step / cfg.backtrack);
  }
  return r;
}

InnerResult optimize_inner(const ChannelSample& sample, const ScatteringState& state,
                           const InnerConfig& cfg, double P, double sigma_w2, Rng& rng) {
  const auto M = std::visit([](const auto& s) { return s.size(); }, state);
  return optimize_inner(sample, state, cfg, P, sigma_w2, PhaseConfig::random(M, rng));
}

}  // namespace ris
