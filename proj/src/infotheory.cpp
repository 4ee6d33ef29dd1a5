#include "slipt/infotheory.hpp"

#include <cmath>
#include <memory>
#include <thread>
#include <vector>

#include "slipt/quadrature.hpp"
#include "slipt/rng.hpp"
#include "slipt/roots.hpp"

namespace slipt {

namespace {
constexpr double kTwoPiE = 17.079468445347132;  // 2*pi*e
}

PharvCurve::PharvCurve(EhModelKind kind, PhotocurrentState state, ReceiverSpec rx) {
  rx.validate();
  auto shared_state = std::make_shared<PhotocurrentState>(std::move(state));
  auto shared_rx = std::make_shared<ReceiverSpec>(std::move(rx));
  g_s_ = shared_state->g_s;
  p_ = [kind, shared_state, shared_rx](double js) {
    return pharv_at_js(kind, *shared_state, *shared_rx, js);
  };
  dp_ = [kind, shared_state, shared_rx](double js) {
    return dp_harv_djs_at(kind, *shared_state, *shared_rx, js);
  };
}

PharvCurve::PharvCurve(std::function<double(double)> p_of_js,
                       std::function<double(double)> dp_djs, double g_s)
    : p_(std::move(p_of_js)), dp_(std::move(dp_djs)), g_s_(g_s) {}

double PharvCurve::x_of_s(double s) const {
  const double p = p_(g_s_ * s);
  return p > 0.0 ? std::sqrt(p) : 0.0;
}

double PharvCurve::dx_ds(double s, double a_sq) const {
  const double js = g_s_ * s;
  const double p = p_(js);
  if (p > 0.0) return g_s_ * dp_(js) / (2.0 * std::sqrt(p));
  // x == 0 exactly (dark receiver at s = 0): one-sided difference on x.
  const double h = std::max(1e-9 * std::max(a_sq, 1e-30), 1e-30);
  return (x_of_s(s + h) - x_of_s(s)) / h;
}

const char* to_string(DistKind kind) {
  switch (kind) {
    case DistKind::optimal_fstar: return "optimal_fstar";
    case DistKind::uniform: return "uniform";
    case DistKind::ook: return "ook";
  }
  return "?";
}

SensitivityResult sensitivity(double a_sq, const PharvCurve& curve) {
  if (!(a_sq >= 0.0)) throw DomainError("sensitivity: A^2 must be >= 0");
  SensitivityResult r;
  r.x0 = curve.x_of_s(0.0);
  r.x_a = curve.x_of_s(a_sq);
  r.theta = std::max(r.x_a - r.x0, 0.0);
  return r;
}

SensitivityResult sensitivity(double a_sq, const PhotocurrentState& state, const ReceiverSpec& rx,
                              EhModelKind model) {
  return sensitivity(a_sq, PharvCurve(model, state, rx));
}

double optimal_cdf(double s, double a_sq, const PharvCurve& curve) {
  if (s < 0.0) return 0.0;
  if (s > a_sq) return 1.0;
  const SensitivityResult sens = sensitivity(a_sq, curve);
  if (sens.theta == 0.0) {
    throw DegenerateDistributionError("optimal_cdf: theta == 0, distribution is a point mass");
  }
  const double f = (curve.x_of_s(s) - sens.x0) / sens.theta;
  return std::min(std::max(f, 0.0), 1.0);
}

double sample_optimal(double u, double a_sq, const PharvCurve& curve) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("sample_optimal: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return a_sq;
  const SensitivityResult sens = sensitivity(a_sq, curve);
  if (sens.theta == 0.0) {
    throw DegenerateDistributionError("sample_optimal: theta == 0, distribution is a point mass");
  }
  const double target = sens.x0 + u * sens.theta;
  auto f = [&](double s) { return curve.x_of_s(s) - target; };
  const auto root = brent(f, 0.0, a_sq, sens.x0 - target, sens.x_a - target, 0.0,
                          1e-14, 1e-13 * sens.theta);
  return std::min(std::max(root.x, 0.0), a_sq);
}

double max_rate(double a_sq, const PharvCurve& curve, const NoiseModel& noise) {
  noise.validate();
  const SensitivityResult sens = sensitivity(a_sq, curve);
  return 0.5 * std::log1p(sens.theta * sens.theta / (kTwoPiE * noise.sigma_sq));
}

namespace {

double rate_from_entropy(double u_entropy, const NoiseModel& noise) {
  // 0.5 ln(1 + e^{2u} / (2 pi e sigma^2)), guarded against overflow of e^{2u}.
  const double a = 2.0 * u_entropy - std::log(kTwoPiE * noise.sigma_sq);
  if (a > 700.0) return 0.5 * a;
  return 0.5 * std::log1p(std::exp(a));
}

}  // namespace

double rate_for_cdf(const InputDistribution& dist, const NoiseModel& noise) {
  noise.validate();
  const SensitivityResult sens = sensitivity(dist.a_sq, dist.curve);
  switch (dist.kind) {
    case DistKind::optimal_fstar: {
      // f_x is uniform on [x0, xA]; its differential entropy is ln(theta).
      if (sens.theta == 0.0) return 0.0;
      return rate_from_entropy(std::log(sens.theta), noise);
    }
    case DistKind::uniform: {
      if (!(dist.a_sq > 0.0)) return 0.0;
      // u(x) = ln A^2 + (1/A^2) int_0^{A^2} ln(dx/ds) ds by change of variables.
      const double mean_log_slope =
          integrate(
              [&](double s) {
                const double slope = dist.curve.dx_ds(s, dist.a_sq);
                return std::log(std::max(slope, 1e-300));
              },
              0.0, dist.a_sq, {1e-9, 1e-15, 48}) /
          dist.a_sq;
      const double u_entropy = std::log(dist.a_sq) + mean_log_slope;
      return rate_from_entropy(u_entropy, noise);
    }
    case DistKind::ook:
      throw DomainError("rate_for_cdf: OOK has no density; use the BER path");
  }
  throw DomainError("rate_for_cdf: unknown distribution kind");
}

double avg_power_optimal(double a_sq, const PharvCurve& curve) {
  const SensitivityResult sens = sensitivity(a_sq, curve);
  return (sens.x_a * sens.x_a + sens.x0 * sens.x0 + sens.x_a * sens.x0) / 3.0;
}

double avg_power_for_cdf(const InputDistribution& dist) {
  const SensitivityResult sens = sensitivity(dist.a_sq, dist.curve);
  switch (dist.kind) {
    case DistKind::ook:
      return 0.5 * (sens.x0 * sens.x0 + sens.x_a * sens.x_a);
    case DistKind::uniform: {
      if (!(dist.a_sq > 0.0)) return sens.x0 * sens.x0;
      return integrate([&](double s) { return dist.curve.pharv_s(s); }, 0.0, dist.a_sq,
                       {1e-9, 1e-18, 48}) /
             dist.a_sq;
    }
    case DistKind::optimal_fstar: {
      if (sens.theta == 0.0) return sens.x0 * sens.x0;
      // E[P] = int P(g_s s) f*_s(s) ds with f*_s = (dx/ds)/theta; this is an
      // independent numeric route checked against the closed form.
      return integrate(
                 [&](double s) {
                   return dist.curve.pharv_s(s) * dist.curve.dx_ds(s, dist.a_sq);
                 },
                 0.0, dist.a_sq, {1e-9, 1e-18, 48}) /
             sens.theta;
    }
  }
  throw DomainError("avg_power_for_cdf: unknown distribution kind");
}

double ml_detect(double y, const SensitivityResult& sens, double a_sq) {
  return y >= 0.5 * (sens.x0 + sens.x_a) ? a_sq : 0.0;
}

double q_function(double z) {
  if (z <= 26.0) return 0.5 * std::erfc(z * 0.7071067811865476);
  // Deep tail: asymptotic expansion of the Mills ratio keeps values
  // representable down to ~1e-300 instead of underflowing in erfc.
  const double z2 = z * z;
  const double phi = std::exp(-0.5 * z2) / 2.5066282746310002;
  return phi / z * (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2));
}

double ber_analytic(double a_sq, const PharvCurve& curve, const NoiseModel& noise) {
  noise.validate();
  const SensitivityResult sens = sensitivity(a_sq, curve);
  return q_function(sens.theta / (2.0 * noise.sigma()));
}

BerEstimate ber_monte_carlo(double a_sq, const PharvCurve& curve, const NoiseModel& noise,
                            std::uint64_t trials, std::uint64_t seed, int jobs) {
  noise.validate();
  if (trials < 10000) throw DomainError("ber_monte_carlo: need at least 1e4 trials");
  const SensitivityResult sens = sensitivity(a_sq, curve);
  const double sigma = noise.sigma();
  const double threshold = 0.5 * (sens.x0 + sens.x_a);
  const CounterRng rng{seed};

  auto count_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t errors = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      const bool high = rng.uniform_co(t, 0) < 0.5;
      const double x = high ? sens.x_a : sens.x0;
      const double y = x + sigma * rng.normal(t, 1);
      const bool detected_high = y >= threshold;
      errors += (detected_high != high) ? 1 : 0;
    }
    return errors;
  };

  std::uint64_t errors = 0;
  if (jobs <= 1) {
    errors = count_range(0, trials);
  } else {
    const std::uint64_t workers = static_cast<std::uint64_t>(jobs);
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = trials * w / workers;
      const std::uint64_t end = trials * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { partial[w] = count_range(begin, end); });
    }
    for (auto& th : pool) th.join();
    for (std::uint64_t e : partial) errors += e;
  }

  BerEstimate est;
  est.errors = errors;
  est.trials = trials;
  est.ber = static_cast<double>(errors) / static_cast<double>(trials);
  est.ci_halfwidth_95 =
      1.959963984540054 * std::sqrt(est.ber * (1.0 - est.ber) / static_cast<double>(trials));
  return est;
}

}  // namespace slipt
