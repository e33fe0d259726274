#pragma once

#include <cstdint>
#include <vector>

#include "ris/numerics.hpp"
#include "ris/rng.hpp"

namespace ris {

// Physical scenario. Defaults: 500 m BS-RIS link, users 10-50 m from the
// surface, -30 dB reference loss at 1 m, exponent 2.5, 8 BS-RIS paths,
// 2 RIS-user paths, -100 dBm noise.
struct ScenarioConfig {
  std::size_t N = 32;        // BS antennas
  std::size_t M = 64;        // RIS elements (perfect square)
  std::size_t K = 5;         // single-antenna users
  double P = 100.0;          // total transmit power [W]
  double noise_var = 1e-13;  // [W]
  std::size_t Q_br = 8;
  std::size_t Q_ru = 2;
  double d_ris = 500.0;  // [m]
  double d_user_min = 10.0;
  double d_user_max = 50.0;
  double C0 = 1e-3;  // linear
  double d0 = 1.0;   // [m]
  double eta = 2.5;
  // BS-user exponent; unused by the generators (no direct link).
  double eta_bu = 3.7;
  std::size_t num_bs = 4;       // geometric mode only
  double elevation_deg = 0.0;   // geometric mode: node elevation above the RIS plane
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ChannelSample {
  CMatrix H_br;  // M x N, BS -> RIS
  CMatrix H_ru;  // M x K, column k is the RIS -> user k channel
};

/// Distance-dependent gain C0 * (d/d0)^(-eta).
double path_loss(double d, double C0, double d0, double eta);

/// ULA response with half-wavelength spacing, entry n = exp(i*pi*n*sin(phi)).
CVector steering_bs(double phi, std::size_t N);

/// Square UPA response; element (p,q) flattened row-major as p*m+q carries
/// exp(i*pi*(p*sin(phi)*cos(psi) + q*sin(phi)*sin(psi))).
CVector steering_ris(double phi, double psi, std::size_t M);

/// Numerical rank with relative threshold 1e-10 on the singular values.
std::size_t numerical_rank(const CMatrix& a);

ChannelSample gen_parametric(const ScenarioConfig& cfg, Rng& rng);

struct GeometricLayout {
  std::vector<double> bs_angles;       // [rad], BS positions on the circle
  std::vector<double> user_distances;  // [m]
  std::vector<double> user_angles;     // [rad]
  ChannelSample sample;
};

/// Distributed-BS geometry: num_bs base stations evenly spaced on a circle of
/// radius d_ris around the RIS, each owning N/num_bs antennas and one path;
/// users uniform in the annulus [d_user_min, d_user_max] with one path each.
GeometricLayout gen_geometric_layout(const ScenarioConfig& cfg, Rng& rng);

ChannelSample gen_geometric(const ScenarioConfig& cfg, Rng& rng);

enum class ChannelModel { kParametric, kGeometric };

ChannelSample generate(ChannelModel model, const ScenarioConfig& cfg, Rng& rng);

/// Sample `count` channels where sample j uses its own seed derived from
/// (base_seed, stream, j); the result does not depend on evaluation order.
std::vector<ChannelSample> generate_batch(ChannelModel model, const ScenarioConfig& cfg,
                                          std::uint64_t base_seed, Stream stream,
                                          std::size_t count, std::size_t offset = 0);

}  // namespace ris
