#include "ris/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ris {

namespace {

constexpr int kMaxRedraws = 100;
constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("field '") + field + "' must be strictly positive");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (N == 0) throw ConfigError("field 'N' must be >= 1");
  if (K == 0) throw ConfigError("field 'K' must be >= 1");
  if (!(K < N)) throw ConfigError("field 'K' must be smaller than N (K < N)");
  if (!(M > K)) throw ConfigError("field 'M' must exceed K (M > K)");
  if (!is_perfect_square(M)) {
    throw ConfigError("field 'M' must be a perfect square (M = m*m), got " + std::to_string(M));
  }
  require_positive(P, "P");
  require_positive(noise_var, "noise_var");
  require_positive(d_ris, "d_ris");
  require_positive(d_user_min, "d_user_min");
  require_positive(d_user_max, "d_user_max");
  require_positive(C0, "C0");
  require_positive(d0, "d0");
  require_positive(eta, "eta");
  if (d_user_max < d_user_min) {
    throw ConfigError("field 'd_user_max' must be >= d_user_min");
  }
  if (Q_br == 0) throw ConfigError("field 'Q_br' must be >= 1");
  if (Q_ru == 0) throw ConfigError("field 'Q_ru' must be >= 1");
  if (num_bs == 0) throw ConfigError("field 'num_bs' must be >= 1");
}

double path_loss(double d, double C0, double d0, double eta) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive");
  return C0 * std::pow(d / d0, -eta);
}

CVector steering_bs(double phi, std::size_t N) {
  CVector a(N);
  const double s = std::sin(phi);
  for (std::size_t n = 0; n < N; ++n) {
    a(n) = std::polar(1.0, kPi * static_cast<double>(n) * s);
  }
  return a;
}

CVector steering_ris(double phi, double psi, std::size_t M) {
  const std::size_t m = grid_side(M);
  const double u = std::sin(phi) * std::cos(psi);
  const double v = std::sin(phi) * std::sin(psi);
  CVector a(M);
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      a(p * m + q) =
          std::polar(1.0, kPi * (static_cast<double>(p) * u + static_cast<double>(q) * v));
    }
  }
  return a;
}

std::size_t numerical_rank(const CMatrix& a) {
  if (a.size() == 0) return 0;
  const RVector s = svd_economy(a).S;
  if (s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * s(0)) ++r;
  }
  return r;
}

namespace {

ChannelSample draw_parametric(const ScenarioConfig& cfg, Rng& rng) {
  ChannelSample out;
  out.H_br = CMatrix::Zero(cfg.M, cfg.N);
  for (std::size_t q = 0; q < cfg.Q_br; ++q) {
    const cdouble c = complex_normal(rng);
    const double phi = uniform(rng, 0.0, kPi);
    const double psi = uniform(rng, 0.0, 2.0 * kPi);
    const double phi_bs = uniform(rng, 0.0, kPi);
    out.H_br += c * steering_ris(phi, psi, cfg.M) * steering_bs(phi_bs, cfg.N).transpose();
  }
  out.H_br *= std::sqrt(path_loss(cfg.d_ris, cfg.C0, cfg.d0, cfg.eta));

  out.H_ru = CMatrix::Zero(cfg.M, cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) {
    const double d = uniform(rng, cfg.d_user_min, cfg.d_user_max);
    CVector h = CVector::Zero(cfg.M);
    for (std::size_t q = 0; q < cfg.Q_ru; ++q) {
      const cdouble c = complex_normal(rng);
      const double phi = uniform(rng, 0.0, kPi);
      const double psi = uniform(rng, 0.0, 2.0 * kPi);
      h += c * steering_ris(phi, psi, cfg.M);
    }
    out.H_ru.col(k) = std::sqrt(path_loss(d, cfg.C0, cfg.d0, cfg.eta)) * h;
  }
  return out;
}

}  // namespace

ChannelSample gen_parametric(const ScenarioConfig& cfg, Rng& rng) {
  grid_side(cfg.M);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    ChannelSample s = draw_parametric(cfg, rng);
    if (numerical_rank(s.H_br) >= cfg.K) return s;
  }
  throw GenerationFailure("gen_parametric: BS-RIS channel rank below K after " +
                          std::to_string(kMaxRedraws) + " draws");
}

GeometricLayout gen_geometric_layout(const ScenarioConfig& cfg, Rng& rng) {
  grid_side(cfg.M);
  if (cfg.num_bs == 0 || cfg.N % cfg.num_bs != 0) {
    throw ConfigError("field 'num_bs' must divide N (N = " + std::to_string(cfg.N) + ")");
  }
  if (cfg.num_bs < cfg.K) {
    // One path per BS bounds rank(H_br) by num_bs.
    throw ConfigError("field 'num_bs' must be >= K in geometric mode");
  }
  const std::size_t per_bs = cfg.N / cfg.num_bs;
  const double polar = kPi / 2.0 - cfg.elevation_deg * kPi / 180.0;
  const CVector a_bs = steering_bs(0.0, per_bs);  // each BS array faces the RIS

  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    GeometricLayout g;
    g.sample.H_br = CMatrix::Zero(cfg.M, cfg.N);
    const double gain_br = std::sqrt(path_loss(cfg.d_ris, cfg.C0, cfg.d0, cfg.eta));
    for (std::size_t b = 0; b < cfg.num_bs; ++b) {
      const double angle = 2.0 * kPi * static_cast<double>(b) / static_cast<double>(cfg.num_bs);
      g.bs_angles.push_back(angle);
      const cdouble c = complex_normal(rng);
      g.sample.H_br.middleCols(b * per_bs, per_bs) =
          gain_br * c * steering_ris(polar, angle, cfg.M) * a_bs.transpose();
    }
    g.sample.H_ru = CMatrix::Zero(cfg.M, cfg.K);
    const double r2_lo = cfg.d_user_min * cfg.d_user_min;
    const double r2_hi = cfg.d_user_max * cfg.d_user_max;
    for (std::size_t k = 0; k < cfg.K; ++k) {
      // Uniform over the annulus area.
      const double d = r2_hi > r2_lo ? std::sqrt(uniform(rng, r2_lo, r2_hi)) : cfg.d_user_min;
      const double angle = uniform(rng, 0.0, 2.0 * kPi);
      const cdouble c = complex_normal(rng);
      g.user_distances.push_back(d);
      g.user_angles.push_back(angle);
      g.sample.H_ru.col(k) = std::sqrt(path_loss(d, cfg.C0, cfg.d0, cfg.eta)) * c *
                             steering_ris(polar, angle, cfg.M);
    }
    if (numerical_rank(g.sample.H_br) >= cfg.K) return g;
  }
  throw GenerationFailure("gen_geometric: BS-RIS channel rank below K after " +
                          std::to_string(kMaxRedraws) + " draws");
}

ChannelSample gen_geometric(const ScenarioConfig& cfg, Rng& rng) {
  return gen_geometric_layout(cfg, rng).sample;
}

ChannelSample generate(ChannelModel model, const ScenarioConfig& cfg, Rng& rng) {
  return model == ChannelModel::kParametric ? gen_parametric(cfg, rng) : gen_geometric(cfg, rng);
}

std::vector<ChannelSample> generate_batch(ChannelModel model, const ScenarioConfig& cfg,
                                          std::uint64_t base_seed, Stream stream,
                                          std::size_t count, std::size_t offset) {
  std::vector<ChannelSample> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    Rng rng(derive_seed(base_seed, stream, offset + j));
    out.push_back(generate(model, cfg, rng));
  }
  return out;
}

}  // namespace ris
