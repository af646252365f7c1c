#include <doctest.h>

#include <cmath>
#include <limits>

#include <carnot/ballbox.hpp>
#include <carnot/errors.hpp>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;

namespace {

const WeightVector kHeis({1, 1, 2});

BoxFamily heis_family(double T) {
  BoxFamily f;
  f.weights = kHeis;
  f.k = 2;
  f.s = 2;
  f.T = T;
  return f;
}

}  // namespace

TEST_CASE("box membership") {
  const std::vector<double> zero{0, 0, 0};
  CHECK(in_box(zero, 0.01, kHeis));
  const std::vector<double> a{0.1, 0, 0.009}, b{0.1, 0, 0.011};
  CHECK(in_box(a, 0.1, kHeis));
  CHECK_FALSE(in_box(b, 0.1, kHeis));
  CHECK(in_box(b, 0.11, kHeis));
}

TEST_CASE("xi family") {
  const auto fam = heis_family(1.0);
  const std::vector<double> seg{0, 0, 0.7};
  CHECK(in_xi(seg, 1e-6, fam));
  const std::vector<double> z{0.05, 0, 0.5};
  CHECK(in_xi(z, 0.1, fam));
  CHECK_FALSE(in_box(z, 0.1, kHeis));
  const auto flat = heis_family(0.0);
  CHECK(in_xi(z, 0.1, flat) == in_box(z, 0.1, kHeis));
  const std::vector<double> past{0, 0, 1.0 + 0.011};
  CHECK_FALSE(in_xi(past, 0.1, fam));
  BoxFamily incomplete;
  incomplete.weights = kHeis;
  CHECK_THROWS_AS(in_xi(z, 0.1, incomplete), Error);
}

TEST_CASE("pi families") {
  const auto fam = heis_family(1.0);
  const double eta = 0.1, xi = 0.04;
  const std::vector<double> z{eta + eta * std::sqrt(xi) * 0.99, 0, xi};
  CHECK(in_pi(z, eta, fam));
  CHECK_FALSE(in_pi_hat(z, eta, fam));
  const std::vector<double> box{0.05, -0.05, -0.005};
  CHECK(in_pi(box, eta, fam));
  CHECK(in_pi_hat(box, eta, fam));
  BoxFamily bad = fam;
  bad.s = 1;
  CHECK_THROWS_AS(in_pi(z, eta, bad), Error);
}

TEST_CASE("family inclusions and monotonicity") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    const double eta = 0.05 + 0.3 * pos(rng), T = pos(rng);
    const auto fam = heis_family(T);
    std::vector<double> z{u(rng) * 0.5, u(rng) * 0.5, u(rng) * 1.2};
    const bool box = in_box(z, eta, kHeis), xi = in_xi(z, eta, fam), pi = in_pi(z, eta, fam),
               hat = in_pi_hat(z, eta, fam);
    if (box) CHECK((xi && pi && hat));
    if (hat) CHECK(pi);
    const auto bigger = heis_family(T + 0.1);
    for (FamilyKind k : {FamilyKind::kBox, FamilyKind::kXi, FamilyKind::kPi, FamilyKind::kPiHat}) {
      if (in_family(z, eta, k, fam)) {
        CHECK(in_family(z, eta * 1.1, k, fam));
        CHECK(in_family(z, eta, k, bigger));
      }
    }
  }
}

TEST_CASE("time-dependent bounds") {
  const auto fam = heis_family(0.25);
  CHECK(td_bound(0, 0.1, 0.25, fam, false) == doctest::Approx(0.1 + 0.1 * 0.5));
  CHECK(td_bound(0, 0.1, 0.25, fam, true) == doctest::Approx(0.1));
  CHECK(td_bound(2, 0.1, 0.25, fam, false) == doctest::Approx(0.01 + 0.1 * 0.25));
  BoxFamily w3;
  w3.weights = WeightVector({1, 1, 3});
  w3.k = 0;
  w3.s = 1;
  // w > s: eps (eps + T)^{w - 1}
  CHECK(td_bound(2, 0.1, 0.2, w3, false) == doctest::Approx(0.1 * 0.3 * 0.3));
}

TEST_CASE("outer constant fits") {
  const auto fam = heis_family(0.0);
  const std::vector<std::vector<double>> zero{{0, 0, 0}};
  const auto z = fit_outer_constant(zero, FamilyKind::kBox, fam, 0.1);
  CHECK(z.C <= 1e-3);
  CHECK(z.argmax == -1);

  std::vector<std::vector<double>> pts{{0.05, 0, 0}, {0, 0.02, 0.0036}};
  const auto f = fit_outer_constant(pts, FamilyKind::kBox, fam, 0.1);
  // max(0.05/0.1, sqrt(0.0036)/0.1) = 0.6
  CHECK(f.C == doctest::Approx(0.6).epsilon(2e-3));
  CHECK(f.C >= 0.6);
  CHECK(f.argmax == 1);
  pts.push_back({0.3, 0, 0});
  const auto g = fit_outer_constant(pts, FamilyKind::kBox, fam, 0.1);
  CHECK(g.C >= f.C);
  CHECK(g.C == doctest::Approx(3.0).epsilon(2e-3));
  CHECK(g.extremal_point == std::vector<double>{0.3, 0, 0});
}

TEST_CASE("outer fits on Heisenberg clouds are scale invariant") {
  const auto sys = SystemSpec::sub_riemannian({heis_f1(), heis_f2()});
  const std::vector<double> q{0, 0, 0};
  std::vector<double> Cs;
  for (double eps : {0.1, 0.2, 0.4}) {
    const auto cloud = sample_reachable(sys, q, eps, 1.0, 1000, 21);
    std::vector<std::vector<double>> pts;
    for (const auto& r : cloud.records) pts.push_back(r.endpoint);
    Cs.push_back(fit_outer_constant(pts, FamilyKind::kBox, heis_family(0.0), eps).C);
  }
  CHECK(*std::max_element(Cs.begin(), Cs.end()) / *std::min_element(Cs.begin(), Cs.end()) <= 1.5);
}

TEST_CASE("inner inclusion") {
  const auto sys = SystemSpec::affine({heis_f1(), heis_f2()}, field({"0", "0", "1"}));
  const std::vector<double> q{0, 0, 0};
  const auto identity = [](std::span<const double> z) { return std::vector<double>(z.begin(), z.end()); };
  ValueBudget b;
  // huge C shrinks the family onto the drift segment
  const auto thin = verify_inner_inclusion(sys, q, heis_family(0.5), 0.2, 1e6, 2, b, identity);
  CHECK(thin.targets.size() == 8);
  CHECK(thin.fraction == 1.0);
  for (const auto& t : thin.targets) CHECK(t.cost <= 1e-3);

  const auto cov = verify_inner_inclusion(sys, q, heis_family(0.5), 0.2, 4.0, 3, b, identity);
  CHECK(cov.fraction >= 0.95);
  for (const auto& t : cov.targets) CHECK(in_xi(t.z, 0.05, heis_family(0.5)));
}

TEST_CASE("time bound fits") {
  const std::vector<TimeRecord> drift{{0.3, 0.0, 0.3}, {0.5, 0.0, 0.5}, {0.1, 0.0, 0.1}};
  const auto d = time_bound_check(drift, 2);
  CHECK(d.C == doctest::Approx(1.0));
  CHECK(d.finite);
  const std::vector<TimeRecord> neg{{0.004, 0.1, -0.001}, {0.01, 0.2, -0.002}};
  const auto n = time_bound_check(neg, 2);
  CHECK(n.C == doctest::Approx(0.4));
  CHECK(n.argmax == 0);
  const std::vector<TimeRecord> bad{{0.1, 0.0, -0.5}};
  CHECK_FALSE(time_bound_check(bad, 2).finite);
}

TEST_CASE("holder fits") {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 10; ++i) {
    const double d = std::pow(10.0, -3.0 + 2.0 * i / 9.0);
    pairs.emplace_back(d, 2.0 * std::sqrt(d));
  }
  const auto f = holder_fit(pairs, 2);
  CHECK(f.alpha == doctest::Approx(0.5));
  CHECK(f.intercept == doctest::Approx(std::log(2.0)));
  CHECK(f.C2 == doctest::Approx(2.0));
  CHECK(f.decades == doctest::Approx(2.0));
  CHECK(f.C1 == doctest::Approx(std::sqrt(0.1) / 2.0));
  pairs.resize(7);
  CHECK_THROWS_AS(holder_fit(pairs, 2), Error);
  std::vector<std::pair<double, double>> narrow;
  for (int i = 0; i < 10; ++i) narrow.emplace_back(0.01 + 0.001 * i, 0.1);
  CHECK_THROWS_AS(holder_fit(narrow, 2), Error);
}

TEST_CASE("distance to the drift segment") {
  const std::vector<double> a{0.3, 0, 0.5}, b{0, 0, -0.2}, c{0, 0.4, 1.3};
  CHECK(distance_to_drift_segment(a, 2, 1.0) == doctest::Approx(0.3));
  CHECK(distance_to_drift_segment(b, 2, 1.0) == doctest::Approx(0.2));
  CHECK(distance_to_drift_segment(c, 2, 1.0) == doctest::Approx(0.5));
}
