#include <cmath>
#include <vector>

#include "../src/outer_loop.hpp"
#include "doctest.h"
#include "ris/outer_reflective.hpp"
#include "test_util.hpp"

using namespace ris;
using namespace ris::test;

namespace {

struct Instance {
  ChannelSample sample;
  ReflectiveScattering rs;
  PhaseConfig ph;
  CMatrix F;
  double rho = 0.0;
  double s2 = 0.1;
};

Instance make_instance(std::size_t M, Rng& rng, double coupling = 0.5) {
  Instance in;
  in.sample = random_sample(M, 4, 2, rng);
  in.rs = random_reflective(M, coupling, rng);
  in.ph = PhaseConfig::random(M, rng);
  const Precoder p = optimal_precoder(
      end_to_end(in.sample.H_ru, effective_reflective(in.rs, in.ph), in.sample.H_br), 1.0, in.s2);
  in.F = p.F;
  in.rho = p.rho;
  return in;
}

// Dense chain-rule form of the per-sample gradients with
// U = V = T and A = Ups^-1 - S_aa; only the diagonals are used.
CMatrix dense_grad_aa(const Instance& in) {
  const CMatrix& U = in.rs.frame;
  const CMatrix& V = in.rs.frame;
  const CMatrix s_ab = in.rs.S_ab();
  CMatrix a = -in.rs.S_aa();
  a.diagonal() += in.ph.upsilon.cwiseInverse();
  const CMatrix ai = a.inverse();
  const CMatrix K = CMatrix::Identity(in.F.cols(), in.F.cols());
  const CMatrix lead = in.rho * in.sample.H_ru.adjoint() * s_ab.transpose();
  const CMatrix err = lead * ai * s_ab * in.sample.H_br * in.F - K;
  return 2.0 * U.transpose() * ai.transpose() * lead.transpose() * err.conjugate() *
         (s_ab * in.sample.H_br * in.F).transpose() * ai.transpose() * V.conjugate();
}

CMatrix dense_grad_ab(const Instance& in) {
  const CMatrix& U = in.rs.frame;
  const CMatrix& V = in.rs.frame;
  const CMatrix s_ab = in.rs.S_ab();
  CMatrix a = -in.rs.S_aa();
  a.diagonal() += in.ph.upsilon.cwiseInverse();
  const CMatrix ai = a.inverse();
  const CMatrix K = CMatrix::Identity(in.F.cols(), in.F.cols());
  const CMatrix err =
      in.rho * in.sample.H_ru.adjoint() * s_ab.transpose() * ai * s_ab * in.sample.H_br * in.F - K;
  const CMatrix lead = in.rho * in.sample.H_ru.adjoint() * V.adjoint().transpose();
  const CMatrix tail = (V.adjoint() * in.sample.H_br * in.F).transpose();
  const CMatrix sig_t = CMatrix(in.rs.sigma_ab.asDiagonal()).transpose();
  const CMatrix uau_t = (U.transpose() * ai * U).transpose();
  return 2.0 * lead.transpose() * err.conjugate() * tail * sig_t * uau_t +
         2.0 * uau_t * sig_t * lead.transpose() * err.conjugate() * tail;
}

double fd_spectrum(const Instance& in, bool coupling, const CVector& dir, double h) {
  auto f = [&](double t) {
    ReflectiveScattering r = in.rs;
    (coupling ? r.sigma_aa : r.sigma_ab) += t * dir;
    return reflective_sample_mse(in.sample, r, in.ph, in.F, in.rho, in.s2);
  };
  return (f(h) - f(-h)) / (2.0 * h);
}

double predicted(const CVector& g, const CVector& dir) { return (g.transpose() * dir)(0).real(); }

ScenarioConfig desk() {
  ScenarioConfig c;
  c.N = 8;
  c.M = 16;
  c.K = 2;
  return c;
}

}  // namespace

TEST_CASE("spectral gradients match the dense chain-rule expressions") {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance in = make_instance(trial % 2 ? 9 : 16, rng);
    const SpectralGradient g = grad_spectra_sample(in.sample, in.rs, in.ph, in.F, in.rho);
    const CVector aa = dense_grad_aa(in).diagonal();
    const CVector ab = dense_grad_ab(in).diagonal();
    CHECK((g.sigma_aa - aa).norm() <= 1e-10 * aa.norm());
    CHECK((g.sigma_ab - ab).norm() <= 1e-10 * ab.norm());
    CHECK((grad_sigma_aa_sample(in.sample, in.rs, in.ph, in.F, in.rho) - g.sigma_aa).norm() == 0.0);
    CHECK((grad_sigma_ab_sample(in.sample, in.rs, in.ph, in.F, in.rho) - g.sigma_ab).norm() == 0.0);
  }
}

TEST_CASE("spectral gradients match finite differences") {
  Rng rng(2);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = make_instance(9, rng);
    const SpectralGradient g = grad_spectra_sample(in.sample, in.rs, in.ph, in.F, in.rho);
    for (bool coupling : {true, false}) {
      std::vector<double> fd, an;
      for (int d = 0; d < 12; ++d) {
        const CVector dir = random_vector(9, rng).normalized();
        fd.push_back(fd_spectrum(in, coupling, dir, h));
        an.push_back(predicted(coupling ? g.sigma_aa : g.sigma_ab, dir));
      }
      CHECK(cosine_similarity(fd, an) >= 0.999);
    }
  }
}

TEST_CASE("gradients vanish without a RIS-user channel") {
  Rng rng(3);
  Instance in = make_instance(9, rng);
  in.sample.H_ru.setZero();
  const SpectralGradient g = grad_spectra_sample(in.sample, in.rs, in.ph, in.F, in.rho);
  CHECK(g.sigma_aa.norm() == 0.0);
  CHECK(g.sigma_ab.norm() == 0.0);
  Instance z = make_instance(9, rng);
  z.sample.H_br.setZero();
  CHECK(grad_spectra_sample(z.sample, z.rs, z.ph, z.F, z.rho).sigma_ab.norm() == 0.0);
}

TEST_CASE("conjugating every input conjugates the gradient") {
  // On a 2x2 grid the frame is real, so conj(S) has spectrum conj(sigma).
  Rng rng(4);
  const Instance in = make_instance(4, rng);
  Instance c = in;
  c.sample.H_br = in.sample.H_br.conjugate();
  c.sample.H_ru = in.sample.H_ru.conjugate();
  c.rs = ReflectiveScattering::from_spectra(in.rs.sigma_aa.conjugate(), in.rs.sigma_ab.conjugate());
  c.ph.upsilon = in.ph.upsilon.conjugate();
  c.F = in.F.conjugate();
  const SpectralGradient g = grad_spectra_sample(in.sample, in.rs, in.ph, in.F, in.rho);
  const SpectralGradient gc = grad_spectra_sample(c.sample, c.rs, c.ph, c.F, c.rho);
  CHECK((gc.sigma_aa - g.sigma_aa.conjugate()).norm() < 1e-12 * g.sigma_aa.norm());
  CHECK((gc.sigma_ab - g.sigma_ab.conjugate()).norm() < 1e-12 * g.sigma_ab.norm());
}

TEST_CASE("uncoupled channel term is quadratic in sigma_ab") {
  Rng rng(5);
  const ChannelSample s = random_sample(9, 4, 2, rng);
  const CVector ab = random_vector(9, rng);
  const auto one = ReflectiveScattering::from_spectra(CVector::Zero(9), ab);
  const auto two = ReflectiveScattering::from_spectra(CVector::Zero(9), 2.0 * ab);
  const PhaseConfig ph = PhaseConfig::ones(9);
  const CMatrix h1 = end_to_end(s.H_ru, effective_reflective(one, ph), s.H_br);
  const CMatrix h2 = end_to_end(s.H_ru, effective_reflective(two, ph), s.H_br);
  CHECK((h2 - 4.0 * h1).norm() < 1e-12 * h1.norm());
}

TEST_CASE("reflective_step keeps the state feasible") {
  Rng rng(6);
  const ReflectiveScattering rs = random_reflective(16, 0.4, rng);
  const SpectralGradient g{random_vector(16, rng), random_vector(16, rng)};
  const ReflectiveScattering out = reflective_step(rs, g, 0.3);
  CHECK(check_constraints(out).max() < 1e-12);
  CHECK((symmetrize(out.sigma_aa) - out.sigma_aa).norm() == 0.0);

  const ReflectiveScattering same = reflective_step(rs, g, 0.0);
  CHECK((same.sigma_aa - rs.sigma_aa).norm() < 1e-15);
  CHECK((same.sigma_ab - rs.sigma_ab).norm() < 1e-15);

  // Descent: a small step along -conj(G) lowers the linearised objective.
  const Instance in = make_instance(16, rng);
  const SpectralGradient gi = grad_spectra_sample(in.sample, in.rs, in.ph, in.F, in.rho);
  const double f0 = reflective_sample_mse(in.sample, in.rs, in.ph, in.F, in.rho, in.s2);
  const ReflectiveScattering next = reflective_step(in.rs, gi, 1e-4);
  CHECK(reflective_sample_mse(in.sample, next, in.ph, in.F, in.rho, in.s2) < f0);
}

TEST_CASE("zero step leaves the conventional start unchanged") {
  OuterConfig oc;
  oc.Q = 1;
  oc.I_max = 1;
  oc.mu = 0.0;
  const ReflectiveRun run = run_algorithm1(desk(), ChannelModel::kParametric, oc, InnerConfig{});
  const ReflectiveScattering conv = ReflectiveScattering::conventional(16);
  CHECK((run.scattering.sigma_aa - conv.sigma_aa).norm() == 0.0);
  CHECK((run.scattering.sigma_ab - conv.sigma_ab).norm() == 0.0);
  CHECK(run.trace.iterations() == 1);
}

TEST_CASE("desk runs improve the training sum rate and stay feasible") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    OuterConfig oc;
    oc.seed = seed;
    const ReflectiveRun run = run_algorithm1(desk(), ChannelModel::kParametric, oc, InnerConfig{});
    REQUIRE(run.trace.iterations() == 50);
    improved += run.trace.final_accepted().mean_sum_rate >= run.trace.rows.front().mean_sum_rate;
    for (const auto& row : run.trace.rows) {
      CHECK(row.scattering.losslessness < 1e-9);
      CHECK(row.scattering.symmetry < 1e-9);
      CHECK(row.phase_unit_modulus < 1e-12);
      CHECK(row.power_residual < 1e-9);
    }
    CHECK(check_constraints(run.scattering).max() < 1e-9);
    CHECK(run.inner.size() == oc.Q);
  }
  CHECK(improved >= 8);
}

TEST_CASE("accepted training MSE never increases") {
  OuterConfig oc;
  oc.mu = 5.0;
  const ReflectiveRun run = run_algorithm1(desk(), ChannelModel::kParametric, oc, InnerConfig{});
  double last = run.trace.initial.mean_mse;
  int rejected = 0;
  for (const auto& row : run.trace.rows) {
    if (row.accepted) {
      CHECK(row.mean_mse <= last);
      last = row.mean_mse;
    } else {
      ++rejected;
    }
  }
  CHECK(last < run.trace.initial.mean_mse);
  CHECK(run.trace.final_accepted().mean_mse == last);
  MESSAGE("rejected candidates: " << rejected);
}

TEST_CASE("runs are bit-identical under a fixed seed") {
  OuterConfig oc;
  oc.I_max = 10;
  oc.seed = 77;
  for (bool redraw : {false, true}) {
    oc.redraw = redraw;
    const ReflectiveRun a = run_algorithm1(desk(), ChannelModel::kParametric, oc, InnerConfig{});
    const ReflectiveRun b = run_algorithm1(desk(), ChannelModel::kParametric, oc, InnerConfig{});
    CHECK((a.scattering.sigma_aa - b.scattering.sigma_aa).norm() == 0.0);
    CHECK((a.scattering.sigma_ab - b.scattering.sigma_ab).norm() == 0.0);
    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
      CHECK(a.trace.rows[i].mean_mse == b.trace.rows[i].mean_mse);
      CHECK(a.trace.rows[i].mu == b.trace.rows[i].mu);
    }
  }
}

TEST_CASE("sample-set overload") {
  Rng rng(8);
  std::vector<ChannelSample> samples;
  for (int q = 0; q < 3; ++q) samples.push_back(random_sample(9, 4, 2, rng));
  OuterConfig oc;
  oc.I_max = 5;
  oc.mu = 0.1;
  const ReflectiveRun run =
      run_algorithm1(samples, ReflectiveScattering::conventional(9), oc, InnerConfig{}, 1.0, 0.1);
  CHECK(run.inner.size() == 3);
  CHECK(run.trace.iterations() == 5);
  CHECK(check_constraints(run.scattering).max() < 1e-9);
  CHECK_THROWS_AS(run_algorithm1({}, ReflectiveScattering::conventional(9), oc, InnerConfig{}, 1.0,
                                 0.1),
                  ConfigError);
  CHECK_THROWS_AS(run_algorithm1(samples, ReflectiveScattering::conventional(16), oc,
                                 InnerConfig{}, 1.0, 0.1),
                  InvalidDimension);
}

TEST_CASE("outer config validation") {
  OuterConfig oc;
  oc.Q = 0;
  CHECK_THROWS_AS(oc.validate(), ConfigError);
  oc = OuterConfig{};
  oc.I_max = 0;
  CHECK_THROWS_AS(oc.validate(), ConfigError);
  oc = OuterConfig{};
  oc.mu = -1.0;
  CHECK_THROWS_AS(oc.validate(), ConfigError);
}

TEST_CASE("repeated singular updates abort the outer loop") {
  Rng rng(9);
  const std::vector<ChannelSample> samples{random_sample(4, 3, 2, rng)};
  OuterConfig oc;
  oc.I_max = 3;
  int calls = 0;
  auto run = [&] {
    return detail::run_outer_loop<ReflectiveScattering, SpectralGradient>(
        [&](std::size_t) { return samples; }, ReflectiveScattering::conventional(4), oc,
        InnerConfig{}, 1.0, 0.1,
        [](const ChannelSample& s, const ReflectiveScattering& rs, const InnerResult& r) {
          return grad_spectra_sample(s, rs, r.phase, r.solution.F, r.solution.rho);
        },
        [](const std::vector<SpectralGradient>& gs) { return gs.front(); },
        [&](const ReflectiveScattering&, const SpectralGradient&, double) -> ReflectiveScattering {
          ++calls;
          throw SingularMatrix("forced");
        });
  };
  CHECK_THROWS_AS(run(), Error);
  CHECK(calls == detail::kMaxConsecutiveFailures);

  // A few failures followed by success only halve the step.
  int failures = 0;
  auto flaky = detail::run_outer_loop<ReflectiveScattering, SpectralGradient>(
      [&](std::size_t) { return samples; }, ReflectiveScattering::conventional(4), oc,
      InnerConfig{}, 1.0, 0.1,
      [](const ChannelSample& s, const ReflectiveScattering& rs, const InnerResult& r) {
        return grad_spectra_sample(s, rs, r.phase, r.solution.F, r.solution.rho);
      },
      [](const std::vector<SpectralGradient>& gs) { return gs.front(); },
      [&](const ReflectiveScattering& rs, const SpectralGradient& g, double mu) {
        if (failures < 3) {
          ++failures;
          throw SingularMatrix("forced");
        }
        return reflective_step(rs, g, mu);
      });
  CHECK(flaky.trace.rows.front().mu == doctest::Approx(oc.mu / 8.0));
}
