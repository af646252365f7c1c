#include <doctest.h>

#include <cmath>

#include <carnot/dynamics.hpp>
#include <carnot/errors.hpp>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;

namespace {

SystemSpec heisenberg() { return SystemSpec::sub_riemannian({heis_f1(), heis_f2()}); }
SystemSpec heisenberg_drift() { return SystemSpec::affine({heis_f1(), heis_f2()}, field({"0", "0", "1"})); }
SystemSpec exp_decay() {
  return SystemSpec::time_dependent({{ProfiledField{TimeProfile::exp_decay(), field({"1"})}}});
}
SystemSpec cubic_drift() {
  return SystemSpec::affine({heis_f1(8), heis_f2(8)}, field({"-10*x2 + x2^3", "10*x1", "1"}, 8));
}

const std::vector<double> origin3{0, 0, 0};

}  // namespace

TEST_CASE("control signals") {
  const auto u = ControlSignal({0.0, 0.5, 2.0}, {{3, 4}, {0, -1}});
  CHECK(u.cost() == doctest::Approx(5 * 0.5 + 1 * 1.5));
  CHECK(u.segments() == 2);
  CHECK(u.horizon() == 2.0);
  const auto v = ControlSignal::constant(1.0, {1, 0});
  CHECK(u.concatenate(v).cost() == doctest::Approx(u.cost() + v.cost()));
  CHECK(u.concatenate(v).horizon() == 3.0);
  CHECK_THROWS_AS(ControlSignal({0.0, 1.0, 0.5}, {{1}, {1}}), Error);
  CHECK_THROWS_AS(ControlSignal({0.0}, {}), Error);
}

TEST_CASE("integration: closed forms") {
  const auto e = endpoint(heisenberg(), origin3, ControlSignal::constant(1.0, {1, 0}));
  CHECK(max_abs_diff(e, {1, 0, 0}) < 1e-12);

  const std::vector<double> x0{0};
  const auto td = endpoint(exp_decay(), x0, ControlSignal::constant(1.0, {1}));
  CHECK(td[0] == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));

  const auto drift = endpoint(heisenberg_drift(), origin3, ControlSignal::constant(0.7, {0, 0}));
  CHECK(max_abs_diff(drift, {0, 0, 0.7}) < 1e-12);

  const auto traj = integrate(heisenberg(), origin3, ControlSignal::constant(1.0, {0, 1}));
  CHECK(traj.states.size() == traj.times.size());
  CHECK(traj.times.back() == doctest::Approx(1.0));
  CHECK(max_abs_diff(traj.endpoint, {0, 1, 0}) < 1e-12);
}

TEST_CASE("integration errors") {
  const auto far = ControlSignal::constant(1.0, {50, 0});
  try {
    endpoint(heisenberg(), origin3, far);
    FAIL("expected LeftDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLeftDomain);
  }
  const auto inv = SystemSpec::time_dependent({{ProfiledField{TimeProfile::inverse_square(), field({"1"})}}});
  const std::vector<double> x0{0};
  try {
    endpoint(inv, x0, ControlSignal::constant(1.2, {0.1}));
    FAIL("expected ProfileSingularity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kProfileSingularity);
  }
  // up to 0.99 the graded steps resolve (1 - t)^{-2}: x = u (1/(1 - T) - 1)
  const auto ok = endpoint(inv, x0, ControlSignal::constant(0.99, {0.01}));
  CHECK(ok[0] == doctest::Approx(0.01 * 99).epsilon(1e-6));
}

TEST_CASE("switching end-point map") {
  const std::vector<int> word{0, 1};
  const std::vector<double> zero{0, 0};
  CHECK(max_abs_diff(switching_endpoint(heisenberg(), origin3, 0.3, word, zero), origin3) == 0.0);

  const double a = 0.3, b = -0.7;
  const std::vector<double> xi{a, b};
  CHECK(max_abs_diff(switching_endpoint(heisenberg(), origin3, 0.0, word, xi), {a, b, a * b}) < 1e-12);
  CHECK(switching_control(2, 0.5, word, xi).cost() == doctest::Approx(std::abs(a) + std::abs(b)));

  // time-dependent example: E_T(xi) = xi (1 - e^{-T}) / T -> xi with error ~ xi T / 2
  const std::vector<int> one{0};
  const std::vector<double> x0{0}, c{0.8};
  const double frozen = switching_endpoint(exp_decay(), x0, 0.0, one, c)[0];
  CHECK(frozen == doctest::Approx(0.8));
  std::vector<double> Ts, errs;
  for (double T : {0.2, 0.1, 0.05, 0.025}) {
    Ts.push_back(T);
    errs.push_back(std::abs(switching_endpoint(exp_decay(), x0, T, one, c, 1e-4)[0] - frozen));
  }
  CHECK(loglog_slope(Ts, errs) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("drift flows") {
  const auto dz = field({"0", "0", "1"});
  CHECK(max_abs_diff(drift_flow(dz, origin3, 2.0), {0, 0, 2}) < 1e-12);
  const auto f0 = field({"-10*x2 + x2^3", "10*x1", "1"}, 8);
  const std::vector<double> q{0.1, -0.2, 0.3};
  CHECK(max_abs_diff(drift_flow(f0, drift_flow(f0, q, 0.4), -0.4), q) < 1e-9);
  const std::vector<double> one{1.0};
  CHECK(drift_flow(field({"x1"}), one, 0.5)[0] == doctest::Approx(std::exp(0.5)).epsilon(1e-6));
}

TEST_CASE("variations formula split") {
  const auto u = ControlSignal::uniform(0.1, {{1.0, -0.5}, {0.3, 0.8}, {-1.2, 0.1}, {0.4, 0.4}});
  IntegrateOptions io;
  io.record = false;
  const auto h = affine_split_check(heisenberg_drift(), origin3, u, 2, io);
  CHECK(h.exact_series);
  CHECK(h.residual <= 1e-8);
  const auto z = affine_split_check(heisenberg_drift(), origin3, ControlSignal::constant(0.1, {0, 0}), 1, io);
  CHECK(z.residual <= 1e-12);

  std::vector<double> res;
  for (int L = 1; L <= 4; ++L) {
    const auto r = affine_split_check(cubic_drift(), origin3, u, L, io);
    CHECK_FALSE(r.exact_series);
    res.push_back(r.residual);
  }
  for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i] < res[i - 1]);

  // at fixed L the residual shrinks at least linearly in T
  std::vector<double> Ts, rs;
  for (double T : {0.2, 0.1, 0.05}) {
    const auto v = ControlSignal::uniform(T, {{1.0, -0.5}, {0.3, 0.8}, {-1.2, 0.1}, {0.4, 0.4}});
    Ts.push_back(T);
    rs.push_back(affine_split_check(cubic_drift(), origin3, v, 4, io).residual);
  }
  CHECK(loglog_slope(Ts, rs) >= 1.0);
}

TEST_CASE("inner direction probes") {
  // k = 0 on a constant generator moves straight along it by eps
  const auto p0 = inner_direction_probe(heisenberg(), origin3, 0, 0, 0.05, 0.2);
  CHECK(max_abs_diff(p0, {0.05, 0, 0}) < 1e-9);
  CHECK(probe_control(2, 0, 2, 0.05, 0.2).cost() == doctest::Approx(0.05));

  // commuting drift: no first-order displacement beyond the drift itself
  for (int k = 1; k <= 2; ++k) {
    const double eps = 0.01, t = 0.1;
    const auto p = inner_direction_probe(heisenberg_drift(), origin3, 0, k, eps, t);
    const std::vector<double> off{p[0], p[1], p[2] - t};
    double norm = 0;
    for (double v : off) norm = std::max(norm, std::abs(v));
    CHECK(norm <= 1e-6);
  }

  // f0 = -x1 d/dx2 gives ad(f0) f1 = d/dx2
  const auto sys = SystemSpec::affine({field({"1", "0"}), field({"0", "0"})}, field({"0", "-x1"}));
  const std::vector<double> q{0, 0};
  std::vector<double> ratio;
  for (double eps : {0.04, 0.02, 0.01}) {
    const double t = 0.1;
    const auto p = inner_direction_probe(sys, q, 0, 1, eps, t);
    ratio.push_back(p[1] / (eps * t * probe_gain(1)));
  }
  CHECK(std::abs(ratio.back() - 1.0) < 0.05);
  CHECK(std::abs(ratio.back() - 1.0) <= std::abs(ratio.front() - 1.0) + 1e-12);
}

TEST_CASE("trajectory properties") {
  // amplitude lambda over time T / lambda reaches the same endpoint
  const auto u = ControlSignal::uniform(1.0, {{0.5, 0.2}, {-0.3, 0.6}});
  const auto v = ControlSignal::uniform(0.5, {{1.0, 0.4}, {-0.6, 1.2}});
  CHECK(u.cost() == doctest::Approx(v.cost()));
  CHECK(max_abs_diff(endpoint(heisenberg(), origin3, u), endpoint(heisenberg(), origin3, v)) < 1e-10);

  // RK4 order on a nonlinear affine system
  const auto w = ControlSignal::uniform(1.0, {{0.4, -0.2}, {0.1, 0.3}});
  std::vector<std::vector<double>> e;
  for (double h : {0.04, 0.02, 0.01}) {
    IntegrateOptions io;
    io.step = h;
    io.record = false;
    e.push_back(endpoint(cubic_drift(), origin3, w, io));
  }
  const double order = std::log2(max_abs_diff(e[0], e[1]) / max_abs_diff(e[1], e[2]));
  CHECK(order >= 3.5);

  // a switching control certifies its own cost
  const std::vector<int> word{0, 1, 0, 1};
  const std::vector<double> xi{0.1, 0.2, -0.1, -0.2};
  const auto sc = switching_control(2, 0.4, word, xi);
  CHECK(sc.cost() == doctest::Approx(0.6));
  CHECK(max_abs_diff(endpoint(heisenberg(), origin3, sc), switching_endpoint(heisenberg(), origin3, 0.4, word, xi)) < 1e-12);
}
