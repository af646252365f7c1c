#include <doctest.h>

#include <carnot/errors.hpp>
#include <carnot/flag.hpp>
#include <carnot/privileged.hpp>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;

namespace {

std::vector<PolyVectorField> heisenberg() { return {heis_f1(), heis_f2()}; }
std::vector<PolyVectorField> grushin() { return {grushin_f1(), grushin_f2()}; }

bool is_identity(const PrivilegedChart& chart) {
  for (int i = 0; i < chart.dim(); ++i)
    if (!(chart.forward[static_cast<std::size_t>(i)] == TruncatedPolynomial::variable(chart.dim(), chart.cap, i))) return false;
  return true;
}

}  // namespace

TEST_CASE("order of functions") {
  CHECK(order_of_function(poly("x3", 3), heisenberg(), 6) == 2);
  CHECK(order_of_function(poly("x1", 3), std::vector<PolyVectorField>{heis_f1()}, 6) == 1);
  CHECK(order_of_function(poly("x2 - 7", 2), grushin(), rpoint({0, 7}), 6) == 2);
  CHECK(order_of_function(poly("x2", 2), grushin(), rpoint({0, 7}), 6) == 0);
  CHECK_THROWS_AS(order_of_function(poly("x3", 3), std::vector<PolyVectorField>{heis_f1()}, 4), Error);
}

TEST_CASE("order of functions: symbolic oracle") {
  const auto o = load_oracles();
  for (const auto& c : o["order"]) {
    std::vector<PolyVectorField> fields;
    for (const auto& f : c["fields"]) fields.push_back(field(f));
    const auto a = poly(c["a"], 3);
    if (c["order"].is_null()) {
      CHECK_THROWS_AS(order_of_function(a, fields, 6), Error);
    } else {
      CHECK(order_of_function(a, fields, 6) == c["order"].get<int>());
    }
  }
}

TEST_CASE("order of fields") {
  const auto chart = build_chart(heisenberg(), rpoint({0, 0, 0}));
  for (const auto& f : heisenberg()) CHECK(order_of_field(chart.push(f), chart) == -1);
  CHECK(order_of_field(field({"0", "0", "1"}), chart) == -chart.r);
  CHECK_THROWS_AS(order_of_field(PolyVectorField(3, 6), chart), Error);
}

TEST_CASE("charts of the reference systems") {
  const auto h = build_chart(heisenberg(), rpoint({0, 0, 0}));
  CHECK(is_identity(h));
  CHECK(verify_privileged(h, heisenberg()).all_pass);
  CHECK(verify_privileged(h, heisenberg()).orders == std::vector<int>{1, 1, 2});

  const auto g = build_chart(grushin(), rpoint({0, 0}));
  CHECK(is_identity(g));
  CHECK(verify_privileged(g, grushin()).all_pass);

  const auto g1 = build_chart(grushin(), rpoint({1, 0}));
  CHECK(g1.weights == WeightVector({1, 1}));
  CHECK(g1.r == 1);
  CHECK(verify_privileged(g1, grushin()).all_pass);
  const std::vector<double> center{1, 0};
  CHECK(max_abs_diff(g1.to_chart(center), {0, 0}) == 0.0);
}

TEST_CASE("charts that need polynomial corrections") {
  // [f1, f2] = d/dy + d/dz, so the adapted linear chart is not privileged by itself
  const std::vector<PolyVectorField> fields{heis_f1(), field({"0", "1 + x1", "x1 + x1^2"})};
  const auto chart = build_chart(fields, rpoint({0, 0, 0}));
  const auto report = verify_privileged(chart, fields);
  CHECK(report.all_pass);
  CHECK(chart.weights == WeightVector({1, 1, 2}));
  // forward and inverse agree up to the cap
  for (int i = 0; i < 3; ++i) {
    const auto back = compose(chart.inverse[static_cast<std::size_t>(i)], chart.forward, chart.cap);
    const auto id = TruncatedPolynomial::variable(3, chart.cap, i);
    for (const auto& [alpha, c] : (back - id).terms()) CHECK(alpha.total_degree() > chart.cap);
  }
  const std::vector<double> x{0.05, -0.03, 0.02};
  CHECK(max_abs_diff(chart.from_chart(chart.to_chart(x)), x) < 1e-9);

  // off-origin chart of the perturbed Heisenberg system
  const std::vector<PolyVectorField> perturbed{heis_f1(), field({"0", "1", "x1 + x1^2"})};
  const auto pc = build_chart(perturbed, rpoint({1, -1, 2}));
  CHECK(verify_privileged(pc, perturbed).all_pass);
}

TEST_CASE("verify_privileged detects a bad chart") {
  auto chart = build_chart(heisenberg(), rpoint({0, 0, 0}));
  // (z, x, y) ordering keeps the weights (1, 1, 2)
  chart.forward = {poly("x3", 3, chart.cap), poly("x1", 3, chart.cap), poly("x2", 3, chart.cap)};
  chart.inverse = {poly("x2", 3, chart.cap), poly("x3", 3, chart.cap), poly("x1", 3, chart.cap)};
  const auto report = verify_privileged(chart, heisenberg());
  CHECK_FALSE(report.all_pass);
  CHECK_FALSE(report.pass[0]);
  CHECK(report.orders[0] == 2);

  const std::vector<PolyVectorField> line{field({"1"})};
  CHECK(verify_privileged(build_chart(line, rpoint({0})), line).all_pass);
}

TEST_CASE("drift rectification") {
  const auto base = build_chart(heisenberg(), rpoint({0, 0, 0}));
  const auto dz = rectify_drift(base, field({"0", "0", "1"}), heisenberg());
  CHECK(is_identity(dz));
  CHECK(dz.rectified_axis == 2);
  CHECK(dz.drift_order == 2);

  const auto dx = rectify_drift(base, heis_f1(), heisenberg());
  CHECK(is_identity(dx));
  CHECK(dx.rectified_axis == 0);
  CHECK(dx.drift_order == 1);

  const auto f0 = field({"x3", "0", "1"}, 8);
  std::vector<PolyVectorField> fields8{heis_f1(8), heis_f2(8)};
  const auto bent = rectify_drift(build_chart(fields8, rpoint({0, 0, 0})), f0, fields8);
  CHECK(bent.rectified_axis == 2);
  CHECK(verify_privileged(bent, fields8).all_pass);
  // pushforward of f0 is d/dz3 up to the cap: compare numerically at small points
  const auto pushed = bent.push(f0);
  for (const std::vector<double> z : {std::vector<double>{0.01, 0.02, -0.01}, {-0.02, 0.0, 0.015}}) {
    CHECK(max_abs_diff(pushed.evaluate(z), {0, 0, 1}) < 1e-9);
  }
  CHECK_THROWS_AS(rectify_drift(base, field({"x1", "0", "0"}), heisenberg()), Error);
}

TEST_CASE("nilpotent approximation") {
  const auto h = build_chart(heisenberg(), rpoint({0, 0, 0}));
  const auto nh = nilpotent_approximation(heisenberg(), h);
  CHECK(nh[0] == heis_f1());
  CHECK(nh[1] == heis_f2());
  const auto g = build_chart(grushin(), rpoint({0, 0}));
  const auto ng = nilpotent_approximation(grushin(), g);
  CHECK(ng[1] == grushin_f2());

  const std::vector<PolyVectorField> fields{heis_f1(), field({"0", "1 + x1^2", "x1"})};
  const auto chart = build_chart(fields, rpoint({0, 0, 0}));
  const auto nil = nilpotent_approximation(fields, chart);
  for (std::size_t i = 0; i < nil.size(); ++i) {
    CHECK(weighted_degrees(nil[i], chart.weights) == std::vector<int>{-1});
    const auto rest = chart.push(fields[i]) - nil[i];
    if (!rest.is_zero()) CHECK(*min_weighted_degree(rest, chart.weights) >= 0);
  }
  CHECK(!(nil[1] == chart.push(fields[1])));
  // nilpotent of step r: brackets of length r + 1 vanish
  const auto b = lie_bracket(nil[0], lie_bracket(nil[0], nil[1]));
  CHECK(b.is_zero());
  CHECK(lie_bracket(nil[1], lie_bracket(nil[0], nil[1])).is_zero());
}

TEST_CASE("drift decomposition") {
  const auto h = build_chart(heisenberg(), rpoint({0, 0, 0}));
  const auto a = drift_decomposition(field({"0", "0", "1"}), h);
  CHECK(a.s == 2);
  CHECK(a.principal == field({"0", "0", "1"}));
  CHECK(a.remainder.is_zero());
  const auto b = drift_decomposition(heis_f1(), h);
  CHECK(b.s == 1);
  CHECK(b.principal == heis_f1());
  const auto c = drift_decomposition(field({"0", "0", "1 + x1"}), h);
  CHECK(c.principal == field({"0", "0", "1"}));
  CHECK(c.remainder == field({"0", "0", "x1"}));
  CHECK_THROWS_AS(drift_decomposition(field({"0", "0", "x1"}), h), Error);
}

TEST_CASE("homogeneous series approximation") {
  const auto dz = field({"0", "0", "1"});
  const auto hz = rectify_drift(build_chart(heisenberg(), rpoint({0, 0, 0})), dz, heisenberg());
  const auto sz = homogeneous_series_approx(heisenberg(), dz, hz);
  CHECK(sz.s == 2);
  CHECK(sz.rho == 0);
  REQUIRE(sz.terms.size() == 2);
  CHECK(sz.terms[1].size() == 1);
  CHECK(sz.terms[1][0].second == nilpotent_approximation(heisenberg(), hz)[1]);

  // drift d/dx: s = 1, r = 2, rho = 1
  const auto hx = rectify_drift(build_chart(heisenberg(), rpoint({0, 0, 0})), heis_f1(), heisenberg());
  const auto sx = homogeneous_series_approx(heisenberg(), heis_f1(), hx);
  CHECK(sx.s == 1);
  CHECK(sx.rho == 1);
  for (int j = 0; j < 2; ++j) {
    const auto f = hx.push(heisenberg()[static_cast<std::size_t>(j)]);
    const auto expected = homogeneous_part(ad_power(hx.push(heis_f1()), f, 1), hx.weights, -2);
    REQUIRE(sx.terms[static_cast<std::size_t>(j)].size() == 2);
    CHECK(sx.terms[static_cast<std::size_t>(j)][1].second == expected);
  }
  CHECK(sx.terms[1][1].second == field({"0", "0", "1"}));

  // a drift commuting with both generators
  const auto sc = homogeneous_series_approx(heisenberg(), dz, hz);
  for (const auto& terms : sc.terms)
    for (const auto& [l, f] : terms)
      if (l >= 1) CHECK(f.is_zero());
}
