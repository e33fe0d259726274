#pragma once

// Shared projected-gradient driver for the two offline scattering solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ris/outer_reflective.hpp"

namespace ris::detail {

constexpr int kMaxConsecutiveFailures = 20;

struct Evaluation {
  std::vector<InnerResult> inner;
  double mean_mse = 0.0;
  double mean_sum_rate = 0.0;
  double phase_unit_modulus = 0.0;
  double power_residual = 0.0;
};

inline Evaluation evaluate_state(const std::vector<ChannelSample>& samples,
                                 const ScatteringState& state, const std::vector<PhaseConfig>& start,
                                 const InnerConfig& inner, double P, double sigma_w2) {
  Evaluation ev;
  ev.inner.reserve(samples.size());
  for (std::size_t q = 0; q < samples.size(); ++q) {
    ev.inner.push_back(optimize_inner(samples[q], state, inner, P, sigma_w2, start[q]));
    const InnerResult& r = ev.inner.back();
    ev.mean_mse += r.solution.mse;
    ev.mean_sum_rate += r.solution.sum_rate;
    ev.phase_unit_modulus =
        std::max(ev.phase_unit_modulus, check_constraints(r.phase).unit_modulus);
    ev.power_residual =
        std::max(ev.power_residual, std::abs(r.solution.F.squaredNorm() - P));
  }
  const auto q = static_cast<double>(samples.size());
  ev.mean_mse /= q;
  ev.mean_sum_rate /= q;
  return ev;
}

template <class State>
struct LoopOutcome {
  State state;
  OuterTrace trace;
  std::vector<InnerResult> inner;
};

// provider(k) returns the training set used at iteration k (k = 0 for the
// initial evaluation). grad(sample, state, inner) gives one per-sample
// gradient, mean(grads) their average and step(state, grad, mu) the
// projected update.
template <class State, class Grad>
LoopOutcome<State> run_outer_loop(
    const std::function<std::vector<ChannelSample>(std::size_t)>& provider, const State& initial,
    const OuterConfig& outer, const InnerConfig& inner, double P, double sigma_w2,
    const std::function<Grad(const ChannelSample&, const State&, const InnerResult&)>& grad,
    const std::function<Grad(const std::vector<Grad>&)>& mean,
    const std::function<State(const State&, const Grad&, double)>& step) {
  outer.validate();
  inner.validate();

  std::vector<ChannelSample> samples = provider(0);
  const std::size_t M = initial.size();
  std::vector<PhaseConfig> phases;
  phases.reserve(samples.size());
  for (std::size_t q = 0; q < samples.size(); ++q) {
    Rng rng(derive_seed(outer.seed, Stream::kTrainPhase, q));
    phases.push_back(PhaseConfig::random(M, rng));
  }
  auto next_start = [&](const Evaluation& ev) {
    if (!outer.warm_start) return phases;
    std::vector<PhaseConfig> out;
    out.reserve(ev.inner.size());
    for (const auto& r : ev.inner) out.push_back(r.phase);
    return out;
  };
  auto make_row = [&](std::size_t k, const Evaluation& ev, const State& s, double mu) {
    OuterTraceRow row;
    row.iteration = k;
    row.mean_mse = ev.mean_mse;
    row.mean_sum_rate = ev.mean_sum_rate;
    row.mu = mu;
    row.scattering = check_constraints(s);
    row.phase_unit_modulus = ev.phase_unit_modulus;
    row.power_residual = ev.power_residual;
    return row;
  };

  LoopOutcome<State> out{initial, {}, {}};
  double mu = outer.mu;
  Evaluation current = evaluate_state(samples, ScatteringState(out.state), phases, inner, P, sigma_w2);
  out.trace.initial = make_row(0, current, out.state, mu);

  for (std::size_t k = 1; k <= outer.I_max; ++k) {
    if (outer.redraw) {
      samples = provider(k);
      current = evaluate_state(samples, ScatteringState(out.state), next_start(current), inner, P,
                               sigma_w2);
    }
    std::vector<Grad> grads;
    grads.reserve(samples.size());
    for (std::size_t q = 0; q < samples.size(); ++q) {
      grads.push_back(grad(samples[q], out.state, current.inner[q]));
    }
    const Grad g = mean(grads);

    int failures = 0;
    while (true) {
      try {
        State candidate = step(out.state, g, mu);
        Evaluation ev = evaluate_state(samples, ScatteringState(candidate), next_start(current),
                                       inner, P, sigma_w2);
        OuterTraceRow row = make_row(k, ev, candidate, mu);
        if (outer.adaptive_step && ev.mean_mse > current.mean_mse) {
          row.accepted = false;
          mu *= 0.5;
        } else {
          out.state = std::move(candidate);
          current = std::move(ev);
        }
        out.trace.rows.push_back(row);
        break;
      } catch (const SingularMatrix&) {
        if (++failures >= kMaxConsecutiveFailures) {
          throw Error("outer solver aborted: " + std::to_string(failures) +
                      " consecutive singular updates at iteration " + std::to_string(k));
        }
        mu *= 0.5;
      }
    }
  }
  out.inner = std::move(current.inner);
  return out;
}

}  // namespace ris::detail
