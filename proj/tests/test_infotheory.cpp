#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "slipt/infotheory.hpp"
#include "slipt/quadrature.hpp"
#include "slipt/rng.hpp"

using namespace slipt;

namespace {

ReceiverSpec rx_n1() {
  ReceiverSpec rx;
  rx.junctions = {JunctionSpec{{400e-9, 1000e-9}}};
  rx.info_junction = 0;
  return rx;
}

PharvCurve curve_n1(double j_a0 = 0.0) {
  PhotocurrentState st;
  st.j_a = {j_a0};
  st.g_s = 0.5529;
  return PharvCurve(EhModelKind::closed_form_single, st, rx_n1());
}

/// Linear toy receiver: P(j) = c j^2, so x(s) = sqrt(c) g_s s is linear in s.
PharvCurve toy_quadratic(double c = 1e4, double g_s = 1.0) {
  return PharvCurve([c](double j) { return j > 0.0 ? c * j * j : 0.0; },
                    [c](double j) { return j > 0.0 ? 2.0 * c * j : 0.0; }, g_s);
}

}  // namespace

TEST_SUITE("infotheory") {

TEST_CASE("sensitivity basics") {
  const PharvCurve curve = curve_n1();
  const auto flat = sensitivity(0.0, curve);
  CHECK(flat.theta == 0.0);
  CHECK(flat.x0 == flat.x_a);

  const auto sens = sensitivity(0.1, curve);
  CHECK(sens.x0 == 0.0);
  CHECK(sens.theta == sens.x_a);
  CHECK(sens.theta > 0.0);

  // With a dark receiver, x_A is sqrt(R_L) times the model's output current
  // at j^s = g_s A^2 (55.29 mA here).
  {
    PhotocurrentState st;
    st.j_a = {0.0};
    st.g_s = 0.5529;
    const ReceiverSpec rx = rx_n1();
    const auto sol = closed_form_single(st, 0.1, rx);
    CHECK(sens.x_a == doctest::Approx(std::sqrt(rx.r_l) * sol.i_eh).epsilon(1e-12));
  }

  // theta(A^2) non-decreasing and concave on a log grid (saturation).
  std::vector<double> theta;
  std::vector<double> a2;
  for (double a = 1e-4; a <= 0.1001; a *= std::pow(10.0, 0.25)) {
    a2.push_back(a);
    theta.push_back(sensitivity(a, curve).theta);
  }
  for (std::size_t k = 1; k < theta.size(); ++k) CHECK(theta[k] >= theta[k - 1]);

  // Concavity in A^2 on a uniform grid.
  std::vector<double> theta_lin;
  for (double a = 0.0; a <= 0.1001; a += 2e-3) theta_lin.push_back(sensitivity(a, curve).theta);
  for (std::size_t k = 1; k + 1 < theta_lin.size(); ++k) {
    CHECK(theta_lin[k + 1] - 2.0 * theta_lin[k] + theta_lin[k - 1] <= 1e-9);
  }
}

TEST_CASE("optimal cdf boundary values and monotonicity") {
  const PharvCurve curve = curve_n1(1e-4);
  const double a_sq = 0.1;
  CHECK(optimal_cdf(-1.0, a_sq, curve) == 0.0);
  CHECK(optimal_cdf(0.0, a_sq, curve) == 0.0);
  CHECK(optimal_cdf(a_sq, a_sq, curve) == 1.0);
  CHECK(optimal_cdf(a_sq * 1.01, a_sq, curve) == 1.0);

  double prev = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double f = optimal_cdf(a_sq * k / 1000.0, a_sq, curve);
    CHECK(f >= prev);
    prev = f;
  }

  // Degenerate distribution.
  CHECK_THROWS_AS(optimal_cdf(0.0, 0.0, curve), DegenerateDistributionError);
}

TEST_CASE("optimal cdf reduces to uniform for the linear toy receiver") {
  const PharvCurve toy = toy_quadratic();
  const double a_sq = 0.05;
  for (double s = 0.0; s <= a_sq + 1e-12; s += a_sq / 16.0) {
    CHECK(optimal_cdf(s, a_sq, toy) == doctest::Approx(s / a_sq).epsilon(1e-12));
  }
}

TEST_CASE("sample_optimal inverts the cdf") {
  const PharvCurve curve = curve_n1();
  const double a_sq = 0.1;
  CHECK(sample_optimal(0.0, a_sq, curve) == 0.0);
  CHECK(sample_optimal(1.0, a_sq, curve) == a_sq);

  const CounterRng rng{42};
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform_co(k, 0);
    const double s = sample_optimal(u, a_sq, curve);
    CHECK(std::abs(optimal_cdf(s, a_sq, curve) - u) <= 1e-10);
  }
}

TEST_CASE("sample_optimal empirical cdf passes a KS test") {
  const PharvCurve curve = curve_n1();
  const double a_sq = 0.1;
  const CounterRng rng{2024};
  const int n = 200000;
  std::vector<double> u_values(n);
  for (int k = 0; k < n; ++k) {
    u_values[k] = optimal_cdf(sample_optimal(rng.uniform_co(k, 0), a_sq, curve), a_sq, curve);
  }
  std::sort(u_values.begin(), u_values.end());
  double d_stat = 0.0;
  for (int k = 0; k < n; ++k) {
    const double f = u_values[k];
    d_stat = std::max(d_stat, std::abs((k + 1.0) / n - f));
    d_stat = std::max(d_stat, std::abs(f - static_cast<double>(k) / n));
  }
  // 1% critical value of the Kolmogorov statistic: 1.628 / sqrt(n).
  CHECK(d_stat <= 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("max_rate closed form") {
  const NoiseModel noise{1e-9};
  const PharvCurve toy = toy_quadratic();

  // theta = 0 gives rate 0.
  CHECK(max_rate(0.0, toy, noise) == 0.0);

  // theta^2 = 2 pi e sigma^2 gives ln(2)/2.
  const double two_pi_e = 17.079468445347132;
  const double theta_unit = std::sqrt(two_pi_e * noise.sigma_sq);
  const PharvCurve unit([=](double j) { return j > 0.0 ? theta_unit * theta_unit * j * j : 0.0; },
                        [=](double j) { return j > 0.0 ? 2.0 * theta_unit * theta_unit * j : 0.0; },
                        1.0);
  CHECK(max_rate(1.0, unit, noise) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

  // Direct arithmetic for theta = 3.16e-3, sigma^2 = 1e-9:
  // 0.5 ln(1 + theta^2/(2 pi e sigma^2)) = 3.18638... nats.
  const double theta = 3.16e-3;
  const double expected = 0.5 * std::log1p(theta * theta / (two_pi_e * 1e-9));
  CHECK(expected == doctest::Approx(3.186368).epsilon(3e-6));
  const PharvCurve scaled([=](double j) { return j > 0.0 ? theta * theta * j * j : 0.0; },
                          [=](double j) { return j > 0.0 ? 2.0 * theta * theta * j : 0.0; }, 1.0);
  CHECK(max_rate(1.0, scaled, noise) == doctest::Approx(expected).epsilon(1e-12));

  // Scaling sigma^2 and theta^2 together leaves the rate unchanged.
  const NoiseModel noise_scaled{4e-9};
  const PharvCurve twice([=](double j) { return j > 0.0 ? 4.0 * theta * theta * j * j : 0.0; },
                         [=](double j) { return j > 0.0 ? 8.0 * theta * theta * j : 0.0; }, 1.0);
  CHECK(max_rate(1.0, twice, noise_scaled) == doctest::Approx(max_rate(1.0, scaled, noise)));
}

TEST_CASE("rate_for_cdf: optimal equals max_rate; uniform is dominated") {
  const NoiseModel noise{1e-9};
  const PharvCurve curve = curve_n1();
  const double a_sq = 0.1;

  const InputDistribution opt{DistKind::optimal_fstar, a_sq, curve};
  CHECK(std::abs(rate_for_cdf(opt, noise) - max_rate(a_sq, curve, noise)) <= 1e-6);

  const InputDistribution uni{DistKind::uniform, a_sq, curve};
  const double r_uni = rate_for_cdf(uni, noise);
  CHECK(r_uni < max_rate(a_sq, curve, noise));
  CHECK(r_uni >= 0.0);

  // Linear toy receiver: uniform s maps to uniform x, so the two coincide.
  const PharvCurve toy = toy_quadratic();
  const InputDistribution toy_uni{DistKind::uniform, a_sq, toy};
  CHECK(std::abs(rate_for_cdf(toy_uni, noise) - max_rate(a_sq, toy, noise)) <= 1e-6);

  const InputDistribution ook{DistKind::ook, a_sq, curve};
  CHECK_THROWS_AS(rate_for_cdf(ook, noise), DomainError);
}

TEST_CASE("avg_power closed form and quadrature routes agree") {
  const PharvCurve curve = curve_n1(1e-4);
  const double a_sq = 0.1;
  const auto sens = sensitivity(a_sq, curve);

  // Corollary reductions.
  CHECK(avg_power_optimal(a_sq, curve) ==
        doctest::Approx((sens.x_a * sens.x_a + sens.x0 * sens.x0 + sens.x_a * sens.x0) / 3.0));
  const PharvCurve dark = curve_n1(0.0);
  const auto sens_dark = sensitivity(a_sq, dark);
  CHECK(sens_dark.x0 == 0.0);
  CHECK(avg_power_optimal(a_sq, dark) == doctest::Approx(sens_dark.x_a * sens_dark.x_a / 3.0));

  // Degenerate point mass: all three terms equal.
  CHECK(avg_power_optimal(0.0, curve) == doctest::Approx(sensitivity(0.0, curve).x0 *
                                                         sensitivity(0.0, curve).x0));

  // Quadrature route vs closed form.
  const InputDistribution opt{DistKind::optimal_fstar, a_sq, curve};
  CHECK(std::abs(avg_power_for_cdf(opt) - avg_power_optimal(a_sq, curve)) <=
        1e-8 * avg_power_optimal(a_sq, curve));

  // OOK two-point expectation.
  const InputDistribution ook{DistKind::ook, a_sq, curve};
  CHECK(avg_power_for_cdf(ook) ==
        doctest::Approx(0.5 * (sens.x0 * sens.x0 + sens.x_a * sens.x_a)));

  // Uniform on the linear toy: int_0^{A^2} c s^2 / A^2 ds = c (A^2)^2 / 3.
  const double c = 1e4;
  const PharvCurve toy = toy_quadratic(c, 1.0);
  const InputDistribution toy_uni{DistKind::uniform, a_sq, toy};
  CHECK(avg_power_for_cdf(toy_uni) == doctest::Approx(c * a_sq * a_sq / 3.0).epsilon(1e-9));

  // Monte Carlo expectation over the optimal sampler matches within 1%.
  const CounterRng rng{5};
  const int n = 200000;
  double mean = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = sample_optimal(rng.uniform_co(k, 0), a_sq, curve);
    mean += curve.pharv_s(s);
  }
  mean /= n;
  CHECK(std::abs(mean - avg_power_optimal(a_sq, curve)) <= 0.01 * avg_power_optimal(a_sq, curve));
}

TEST_CASE("appendix moment consistency for the sampler") {
  const PharvCurve curve = curve_n1(1e-4);
  const double a_sq = 0.1;
  const auto sens = sensitivity(a_sq, curve);
  const CounterRng rng{17};
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = sample_optimal(rng.uniform_co(k, 0), a_sq, curve);
    const double x = curve.x_of_s(s);
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  CHECK(std::abs(m1 - 0.5 * (sens.x0 + sens.x_a)) <= 0.01 * 0.5 * (sens.x0 + sens.x_a));
  const double expected_m2 = (sens.x_a * sens.x_a + sens.x0 * sens.x0 + sens.x_a * sens.x0) / 3.0;
  CHECK(std::abs(m2 - expected_m2) <= 0.01 * expected_m2);
}

TEST_CASE("model-backed curve derivative matches the model API for every kind") {
  const ReceiverSpec rx = rx_n1();
  PhotocurrentState st;
  st.j_a = {1e-4};
  st.g_s = 0.5529;  // the MPP baseline calibration depends on this gain
  for (EhModelKind kind : {EhModelKind::accurate, EhModelKind::approximate,
                           EhModelKind::closed_form_single, EhModelKind::baseline_single_diode,
                           EhModelKind::baseline_mpp}) {
    const PharvCurve curve(kind, st, rx);
    for (double s : {0.001, 0.02, 0.09}) {
      const double via_curve = curve.dpharv_djs(st.g_s * s);
      const double via_model = dp_harv_djs(kind, st, s, rx);
      CHECK(via_curve == via_model);
      CHECK(curve.pharv_s(s) == eval_eh_model(kind, st, s, rx).p_harv);
    }
  }
}

TEST_CASE("ml_detect threshold rule") {
  SensitivityResult sens;
  sens.x0 = 1.0;
  sens.x_a = 3.0;
  sens.theta = 2.0;
  const double a_sq = 0.1;
  CHECK(ml_detect(sens.x0, sens, a_sq) == 0.0);
  CHECK(ml_detect(2.0, sens, a_sq) == a_sq);   // tie resolves high
  CHECK(ml_detect(1.999999, sens, a_sq) == 0.0);
  CHECK(ml_detect(sens.x_a + 10.0, sens, a_sq) == a_sq);
}

TEST_CASE("q_function against numeric Gaussian-tail integration") {
  // Oracle: Simpson integration of the standard normal density.
  auto tail = [](double z) {
    return integrate(
        [](double t) { return std::exp(-0.5 * t * t) / 2.5066282746310002; }, z, z + 14.0,
        {1e-12, 1e-20, 48});
  };
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q_function(1.96) == doctest::Approx(tail(1.96)).epsilon(1e-9));
  CHECK(q_function(1.96) == doctest::Approx(0.0250).epsilon(2e-3));
  CHECK(q_function(5.0) == doctest::Approx(tail(5.0)).epsilon(1e-9));
  // Deep tail stays positive far beyond erfc underflow.
  CHECK(q_function(30.0) > 0.0);
  CHECK(q_function(35.0) > 0.0);
}

TEST_CASE("ber_analytic") {
  const NoiseModel noise{1e-9};
  const PharvCurve curve = curve_n1();
  CHECK(ber_analytic(0.0, curve, noise) == doctest::Approx(0.5));

  // Non-increasing in A^2.
  double prev = 0.5;
  for (double a = 1e-6; a <= 1e-3; a *= 2.0) {
    const double ber = ber_analytic(a, curve, noise);
    CHECK(ber <= prev + 1e-15);
    prev = ber;
  }
}

TEST_CASE("ber_monte_carlo matches the analytic value and is deterministic") {
  // Synthetic sensitivity with theta/(2 sigma) = 1.96 inside a linear curve.
  const NoiseModel noise{1e-9};
  const double theta = 2.0 * noise.sigma() * 1.96;
  const PharvCurve lin([=](double j) { return j > 0.0 ? theta * theta * j * j : 0.0; },
                       [=](double j) { return j > 0.0 ? 2.0 * theta * theta * j : 0.0; }, 1.0);

  const auto est = ber_monte_carlo(1.0, lin, noise, 1000000, 77);
  const double expected = q_function(1.96);
  CHECK(std::abs(est.ber - expected) <= est.ci_halfwidth_95 + 1e-12);

  const auto est2 = ber_monte_carlo(1.0, lin, noise, 1000000, 77);
  CHECK(est.ber == est2.ber);
  CHECK(est.errors == est2.errors);

  // Partitioning across workers does not change the count.
  const auto est4 = ber_monte_carlo(1.0, lin, noise, 1000000, 77, 4);
  CHECK(est4.errors == est.errors);

  // Noise-free detection never errs.
  const NoiseModel clean{1e-60};
  const auto none = ber_monte_carlo(1.0, lin, clean, 100000, 3);
  CHECK(none.errors == 0);

  CHECK_THROWS_AS(ber_monte_carlo(1.0, lin, noise, 100, 1), DomainError);
}

}  // TEST_SUITE
