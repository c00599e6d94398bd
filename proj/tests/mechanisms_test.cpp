// Copyright 2026 The lpgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "lpg/errors.hpp"
#include "lpg/mechanisms.hpp"
#include "oracles.hpp"

using namespace lpg;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

MechanismParams params_for(double eps, int m, int d, double alpha = 0.0,
                           double beta = 1.0) {
  MechanismParams p;
  p.epsilon = eps;
  p.m = m;
  p.d = d;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}
}  // namespace

TEST_SUITE_BEGIN("mechanisms");

TEST_CASE("optimal_m evaluates the closed form with clamping") {
  CHECK(optimal_m(1.0, 100) == 1);
  CHECK(optimal_m(4.36, 10) == 2);
  CHECK(optimal_m(1000.0, 5) == 5);
  CHECK(optimal_m(2.17, 50) == 1);
  CHECK(optimal_m(2.19, 50) == 1);
}

TEST_CASE("optimal_m equals the brute-force variance minimizer on the test grid") {
  // Independent route: minimize the worst-case variance formula
  // (d/m) * ((beta-alpha)/2 * (e^{eps/m}+1)/(e^{eps/m}-1))^2 over integer m.
  for (const double eps : {0.1, 0.5, 1.0, 2.17, 2.19, 5.0, 22.0}) {
    for (const int d : {1, 4, 50}) {
      int best_m = 1;
      double best_var = std::numeric_limits<double>::infinity();
      for (int m = 1; m <= d; ++m) {
        const double z = eps / m;
        const double coth = (std::exp(z) + 1.0) / (std::exp(z) - 1.0);
        const double var = static_cast<double>(d) / m * 0.25 * coth * coth;
        if (var < best_var) {
          best_var = var;
          best_m = m;
        }
      }
      CAPTURE(eps);
      CAPTURE(d);
      CHECK(optimal_m(eps, d) == best_m);
    }
  }
}

TEST_CASE("encoder output distribution matches the exact enumeration") {
  // d=2, m=1, eps=1, x=(0,1): the outcome tree gives
  // Pr[+1 in the x=1 coordinate, other 0] = 0.5 * e/(e+1).
  const auto params = params_for(1.0, 1, 2);
  const std::vector<double> x = {0.0, 1.0};
  const double p_plus_at_one =
      oracles::encoder_output_probability({0, 1}, x, params);
  CHECK(p_plus_at_one == doctest::Approx(0.5 * std::exp(1.0) / (std::exp(1.0) + 1.0))
                             .epsilon(1e-12));

  // Empirical frequencies over every output of the support.
  const int n_trials = 200000;
  Rng rng(123);
  std::map<std::pair<int, int>, long> counts;
  for (int i = 0; i < n_trials; ++i) {
    const auto row = multibit_encode(x, params, rng);
    counts[{row[0], row[1]}]++;
  }
  for (const auto& out : oracles::all_encoder_outputs(2)) {
    const double expected = oracles::encoder_output_probability(out, x, params);
    const double freq =
        static_cast<double>(counts[{out[0], out[1]}]) / n_trials;
    const double sigma = std::sqrt(std::max(expected * (1 - expected), 1e-12) / n_trials);
    CAPTURE(static_cast<int>(out[0]));
    CAPTURE(static_cast<int>(out[1]));
    CHECK(std::abs(freq - expected) <= 4 * sigma + 1e-9);
  }
}

TEST_CASE("encoder respects the range precondition") {
  const auto params = params_for(1.0, 1, 2);
  Rng rng(5);
  const std::vector<double> bad = {0.5, 1.5};
  CHECK_THROWS_AS(multibit_encode(bad, params, rng), DomainError);
}

TEST_CASE("encoder limits: x at alpha with a huge budget always outputs -1") {
  const auto params = params_for(1000.0, 1, 1);
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto row = multibit_encode(std::vector<double>{0.0}, params, rng);
    CHECK(row[0] == -1);
  }
}

TEST_CASE("encoder at the midpoint flips a fair coin for any budget") {
  for (const double eps : {0.3, 1.0, 8.0}) {
    const auto params = params_for(eps, 1, 1);
    Rng rng(31);
    long plus = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      plus += multibit_encode(std::vector<double>{0.5}, params, rng)[0] == 1;
    }
    const double freq = static_cast<double>(plus) / n;
    CHECK(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("rectifier closed-form values") {
  SUBCASE("zero entries land on the range midpoint") {
    const auto params = params_for(2.0, 1, 3);
    const std::vector<std::int8_t> star = {0, 0, 0};
    const Vector out = multibit_rectify(star, params);
    CHECK(out[0] == doctest::Approx(0.5));
  }
  SUBCASE("+1 at d=m=1, eps=2.18") {
    const auto params = params_for(2.18, 1, 1);
    const std::vector<std::int8_t> star = {1};
    const Vector out = multibit_rectify(star, params);
    const double expected =
        0.5 + 0.5 * (std::exp(2.18) + 1.0) / (std::exp(2.18) - 1.0);
    CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out[0] == doctest::Approx(1.1275).epsilon(1e-4));
  }
}

TEST_CASE("rectified encoding is unbiased (Monte-Carlo)") {
  const int d = 4;
  const auto params = params_for(1.0, optimal_m(1.0, d), d);
  const std::vector<double> x = {0.0, 0.3, 0.7, 1.0};
  const int n = 50000;
  Rng rng(77);
  Vector mean = Vector::Zero(d);
  for (int i = 0; i < n; ++i) {
    mean += multibit_rectify(multibit_encode(x, params, rng), params);
  }
  mean /= n;
  for (int i = 0; i < d; ++i) {
    const double se = std::sqrt(rectifier_variance(x[i], params) / n);
    CHECK(std::abs(mean[i] - x[i]) <= 3.5 * se);
  }
}

TEST_CASE("rectifier variance is maximized at the range midpoint") {
  const auto params = params_for(1.7, 1, 6, -1.0, 3.0);
  const double at_mid = rectifier_variance(1.0, params);
  for (const double x : {-1.0, -0.5, 0.0, 0.5, 1.5, 2.0, 3.0}) {
    CHECK(rectifier_variance(x, params) <= at_mid + 1e-12);
  }
}

TEST_CASE("worst-case variance at m* is no worse than any other m") {
  for (const double eps : {0.5, 1.0, 2.19, 5.0, 22.0}) {
    const int d = 50;
    const int star = optimal_m(eps, d);
    const double var_star = rectifier_variance(0.5, params_for(eps, star, d));
    for (int m = 1; m <= d; ++m) {
      CHECK(var_star <= rectifier_variance(0.5, params_for(eps, m, d)) + 1e-9);
    }
  }
}

TEST_CASE("laplace baseline: calibration and degenerate budget") {
  const std::vector<double> x = {0.2, 0.8, 0.5};
  SUBCASE("infinite budget returns the input") {
    Rng rng(3);
    const Vector out = laplace_perturb(x, kInf, 0.0, 1.0, rng);
    for (int i = 0; i < 3; ++i) CHECK(out[i] == x[i]);
  }
  SUBCASE("per-entry variance is 2 * (d(beta-alpha)/eps)^2") {
    const double eps = 2.0;
    const double scale = 3.0 * 1.0 / eps;
    const int n = 200000;
    Rng rng(41);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double noise = laplace_perturb(x, eps, 0.0, 1.0, rng)[0] - x[0];
      sum += noise;
      sum_sq += noise * noise;
    }
    const double var = sum_sq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(2.0 * scale * scale).epsilon(0.03));
    CHECK(std::abs(sum / n) <= 3.0 * std::sqrt(2.0 * scale * scale / n));
  }
}

TEST_CASE("analytic gaussian calibration") {
  const double delta = 1e-10;
  SUBCASE("sigma decreases with the budget") {
    double prev = std::numeric_limits<double>::infinity();
    for (const double eps : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      const double sigma = gaussian_sigma(eps, delta, 1.0);
      CHECK(sigma < prev);
      prev = sigma;
    }
  }
  SUBCASE("never worse than the classical bound for eps <= 1") {
    for (const double eps : {0.1, 0.25, 0.5, 1.0}) {
      const double classical = std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
      CHECK(gaussian_sigma(eps, delta, 1.0) <= classical + 1e-9);
    }
  }
  SUBCASE("returned sigma sits on the condition boundary") {
    for (const double eps : {0.3, 1.0, 3.0}) {
      const double sigma = gaussian_sigma(eps, delta, 2.5);
      const double residual = gaussian_dp_condition(sigma, eps, 2.5);
      CHECK(std::abs(residual - delta) <= 1e-6 * delta);
      CHECK(residual <= delta);  // the returned sigma satisfies the condition
    }
  }
}

TEST_CASE("randomized response probabilities") {
  SUBCASE("eps = ln 2, c = 3: keep 1/2, each wrong class 1/4") {
    Rng rng(11);
    const int n = 100000;
    long counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) counts[randomized_response(1, std::log(2.0), 3, rng)]++;
    CHECK(static_cast<double>(counts[1]) / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(static_cast<double>(counts[0]) / n == doctest::Approx(0.25).epsilon(0.04));
    CHECK(static_cast<double>(counts[2]) / n == doctest::Approx(0.25).epsilon(0.04));
  }
  SUBCASE("infinite budget never flips") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) CHECK(randomized_response(4, kInf, 7, rng) == 4);
  }
  SUBCASE("keep rate at eps=1, c=7 is e/(e+6)") {
    Rng rng(17);
    const int n = 100000;
    long kept = 0;
    for (int i = 0; i < n; ++i) kept += randomized_response(2, 1.0, 7, rng) == 2;
    const double expected = std::exp(1.0) / (std::exp(1.0) + 6.0);
    CHECK(expected == doctest::Approx(0.3118).epsilon(1e-3));
    CHECK(std::abs(static_cast<double>(kept) / n - expected) <= 0.005);
  }
}

TEST_CASE("transition matrix: identity and symmetry limits") {
  CHECK(rr_transition(kInf, 5).is_identity());

  const TransitionMatrix near_uniform = rr_transition(1e-6, 2);
  CHECK(near_uniform.probs(0, 0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(near_uniform.probs(0, 1) == doctest::Approx(0.5).epsilon(1e-5));

  const TransitionMatrix t = rr_transition(2.0, 10);
  t.validate();  // rows sum to 1 within 1e-12
  CHECK(t.probs(0, 0) ==
        doctest::Approx(std::exp(2.0) / (std::exp(2.0) + 9.0)).epsilon(1e-12));
}

TEST_CASE("plug-in inverse of the transition matrix recovers label frequencies") {
  const int c = 4;
  const double eps = 1.0;
  const TransitionMatrix t = rr_transition(eps, c);
  const std::vector<double> true_freq = {0.4, 0.3, 0.2, 0.1};

  Rng rng(29);
  const int n = 200000;
  Vector observed = Vector::Zero(c);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    int y = 0;
    for (int k = 0; k < c; ++k) {
      if (u < true_freq[k]) {
        y = k;
        break;
      }
      u -= true_freq[k];
    }
    observed[randomized_response(y, eps, c, rng)] += 1.0;
  }
  observed /= n;

  // frequencies transform as f' = T^T f, so invert T^T
  const Vector recovered = t.probs.transpose().fullPivLu().solve(observed);
  for (int k = 0; k < c; ++k) {
    CHECK(recovered[k] == doctest::Approx(true_freq[k]).epsilon(0.06));
  }
}

TEST_CASE("encode_once caches and protects the budget") {
  const auto params = params_for(1.0, 1, 8);
  const std::vector<double> x = {0, 0.2, 0.4, 0.6, 0.8, 1, 0.1, 0.9};
  EncodeStore store(3, 99);

  SUBCASE("second call returns the identical row") {
    const auto first = store.encode_once(0, x, params);
    const auto second = store.encode_once(0, x, params);
    CHECK(first == second);
  }
  SUBCASE("re-querying with a larger budget fails") {
    store.encode_once(0, x, params);
    CHECK_THROWS_AS(store.encode_once(0, x, params_for(2.0, 1, 8)), BudgetError);
  }
  SUBCASE("distinct nodes draw independent rows") {
    const auto a = store.encode_once(0, x, params);
    const auto b = store.encode_once(1, x, params);
    const auto c = store.encode_once(2, x, params);
    CHECK((a != b || b != c));  // independent streams; collision is negligible
  }
  SUBCASE("concurrent first calls persist exactly one row") {
    std::vector<std::vector<std::uint8_t>> rows(8);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&, i] { rows[i] = store.encode_once(2, x, params); });
    }
    for (auto& th : threads) th.join();
    for (int i = 1; i < 8; ++i) CHECK(rows[i] == rows[0]);
  }
}

TEST_CASE("privacy ledger sums budgets and counts invocations") {
  PrivacyLedger ledger(4);
  for (NodeId v = 0; v < 4; ++v) ledger.record(v, "multi-bit", 1.0);
  ledger.record(1, "randomized-response", 2.0);
  CHECK(ledger.total_epsilon() == doctest::Approx(3.0));
  CHECK(ledger.node_epsilon(1) == doctest::Approx(3.0));
  CHECK(ledger.node_epsilon(0) == doctest::Approx(1.0));
  CHECK(ledger.max_invocations("multi-bit") == 1);
  CHECK(ledger.invocations(2, "randomized-response") == 0);
  CHECK_THROWS_AS(ledger.record(0, "multi-bit", 0.5), BudgetError);
}

TEST_CASE("encoded matrix enforces the m-sparsity invariant") {
  const auto params = params_for(1.0, 2, 4);
  EncodedMatrix enc(2, params);
  const std::vector<std::int8_t> good = {1, 0, -1, 0};
  enc.set_row(0, good);
  CHECK(enc.row(0) == good);
  const std::vector<std::int8_t> bad = {1, 0, 0, 0};
  CHECK_THROWS_AS(enc.set_row(1, bad), StructuralError);
}

TEST_SUITE_END();
