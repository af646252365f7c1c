// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include <carnot/config.hpp>
#include <carnot/dynamics.hpp>
#include <carnot/errors.hpp>
#include <carnot/privileged.hpp>
#include <carnot/value.hpp>

#include "commands.hpp"
#include "common.hpp"

using namespace carnot;
using namespace carnot::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return format_double(x); }

std::string failed_checks(const Json& report) {
  std::string out;
  for (const auto& c : report["checks"])
    if (!c["pass"].get<bool>()) out += (out.empty() ? "" : ",") + c["name"].get<std::string>();
  return out.empty() ? "all checks pass" : "failed: " + out;
}

// 1: Lie algebra identities, exact.
Outcome algebra() {
  std::mt19937_64 rng(101);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const auto f = random_field(rng, n, 6, 2, 2), g = random_field(rng, n, 6, 2, 2), h = random_field(rng, n, 6, 2, 2);
    const Rational a = random_rational(rng), b = random_rational(rng);
    const auto fg = lie_bracket(f, g);
    if (!(fg + lie_bracket(g, f)).is_zero()) ++bad;
    const auto jacobi = lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f)) + lie_bracket(h, lie_bracket(f, g));
    if (!jacobi.is_zero()) ++bad;
    if (!(lie_bracket(f * a + g * b, h) == lie_bracket(f, h) * a + lie_bracket(g, h) * b)) ++bad;
  }
  return {bad == 0, "200 random fields, " + std::to_string(bad) + " identity violations"};
}

// 2: growth vectors.
Outcome flags() {
  const std::vector<PolyVectorField> heis{heis_f1(), heis_f2()}, gru{grushin_f1(), grushin_f2()};
  const bool h0 = growth_vector(heis, rpoint({0, 0, 0})).growth == std::vector<int>{2, 3};
  const bool h1 = growth_vector(heis, rpoint({1, -2, 3})).growth == std::vector<int>{2, 3};
  const bool g0 = growth_vector(gru, rpoint({0, 0})).growth == std::vector<int>{1, 2};
  const bool g1 = growth_vector(gru, rpoint({0, 3})).growth == std::vector<int>{1, 2};
  const bool g2 = growth_vector(gru, rpoint({1, 0})).growth == std::vector<int>{2};
  return {h0 && h1 && g0 && g1 && g2, "Heisenberg (2,3) at 2 points, Grushin (1,2) on axis, (2) off axis"};
}

int min_weighted(const TruncatedPolynomial& p, const WeightVector& w) {
  int best = std::numeric_limits<int>::max();
  for (const auto& [alpha, c] : p.terms()) {
    int d = 0;
    for (int i = 0; i < p.dim(); ++i) d += alpha[i] * w[i];
    best = std::min(best, d);
  }
  return best;
}

// 3: order calculus.
Outcome orders() {
  const int cap = 10;
  const std::vector<PolyVectorField> heis{heis_f1(cap), heis_f2(cap)};
  const auto chart = build_chart(heis, rpoint({0, 0, 0}));
  const WeightVector& w = chart.weights;
  std::mt19937_64 rng(202);
  int bad = 0, pairs = 0, strict = 0;
  while (pairs < 100) {
    const auto a = random_poly(rng, 3, cap, 2, 3), b = random_poly(rng, 3, cap, 2, 3);
    if (a.is_zero() || b.is_zero()) continue;
    ++pairs;
    const int oa = order_of_function(a, heis, 8), ob = order_of_function(b, heis, 8);
    if (order_of_function(a * b, heis, 8) != oa + ob) ++bad;
    const auto sum = a + b;
    if (sum.is_zero()) continue;
    const int os = order_of_function(sum, heis, 8);
    const int lo = std::min(oa, ob);
    if (os < lo) ++bad;
    // leading parts that do not cancel give equality
    if (!sum.weighted_part(w.values(), lo).is_zero()) {
      if (os != lo) ++bad;
    } else {
      ++strict;
    }
    if (os != min_weighted(sum, w)) ++bad;
  }
  int fields = 0;
  while (fields < 50) {
    const auto f = random_field(rng, 3, 6, 2, 2), g = random_field(rng, 3, 6, 2, 2);
    if (f.is_zero() || g.is_zero()) continue;
    ++fields;
    const auto fg = lie_bracket(f, g);
    if (fg.is_zero()) continue;
    if (order_of_field(fg, chart) < order_of_field(f, chart) + order_of_field(g, chart)) ++bad;
  }
  // y d/dy at (0, 3) on the Grushin plane, centred: order 0
  const std::vector<PolyVectorField> gru{grushin_f1(), grushin_f2()};
  const auto gc = build_chart(gru, rpoint({0, 3}));
  const bool grushin_zero = order_of_field(field({"0", "x2"}), gc) == 0;
  return {bad == 0 && grushin_zero,
          "100 polynomial pairs (" + std::to_string(strict) + " cancelling sums), 50 field pairs, " +
              std::to_string(bad) + " violations; Grushin centred y d/dy order " + (grushin_zero ? "0" : "!= 0")};
}

// 4: nilpotent approximation error rate.
Outcome nilpotent_rate() {
  const auto cfg = example_config("heisenberg-perturbed");
  const auto fields = generator_fields(cfg);
  const auto chart = build_chart(fields, cfg.q);
  std::vector<PolyVectorField> pushed;
  for (const auto& f : fields) pushed.push_back(chart.push(f));
  const auto nil = nilpotent_approximation(fields, chart);
  const auto sys = SystemSpec::sub_riemannian(pushed), approx = SystemSpec::sub_riemannian(nil);
  const std::vector<double> z0(3, 0.0);
  std::vector<double> ts, errs;
  for (int i = 0; i <= 8; ++i) {
    const double t = std::pow(10.0, -3.0 + 2.0 * i / 8.0);
    const auto u = ControlSignal::uniform(t, {{0.6, 0.8}, {-0.8, 0.6}, {0.3, -0.9}});
    IntegrateOptions io;
    io.step = t / 300.0;
    io.record = false;
    const double e = std::abs(endpoint(sys, z0, u, io)[2] - endpoint(approx, z0, u, io)[2]);
    ts.push_back(t);
    errs.push_back(e);
  }
  const double slope = loglog_slope(ts, errs);
  const double need = chart.weights[2] + 1 - 0.15;
  return {slope >= need, "slope " + fmt(slope) + " >= " + fmt(need)};
}

Outcome verify_outcome(const std::string& example, const std::string& theorem) {
  const auto r = cli::cmd_verify(example_config(example), theorem);
  return {r.exit_code == cli::kExitPass, example + " " + theorem + ": " + failed_checks(r.report)};
}

// 6: time-dependent value examples.
Outcome td_examples() {
  const auto inv = build_system(example_config("td-inverse-square"));
  const std::vector<double> one{1.0};
  const auto a = estimate_value(inv.spec, inv.origin, one, 0.99);
  const auto dec = build_system(example_config("td-exp-decay"));
  const std::vector<double> x0{0.5};
  const auto b = estimate_value(dec.spec, dec.origin, x0, 1.0);
  const bool pass = a.upper <= 0.05 * 1.0 && b.min_feasible_cost >= 0.5 - 1e-3 && b.upper <= 1.05 * 0.5;
  return {pass, "inverse-square best " + fmt(a.upper) + "; exp-decay min witness cost " + fmt(b.min_feasible_cost) +
                    ", best " + fmt(b.upper)};
}

// 8: horizon bound.
Outcome time_bound() {
  const auto r = cli::cmd_verify(example_config("heisenberg-drift"), "time-bound");
  const auto& fit = r.report["result"]["fit"];
  return {r.exit_code == cli::kExitPass && fit["finite"].get<bool>(),
          "fitted C " + fit["C"].dump() + " over " + r.report["result"]["records"].dump() + " records"};
}

// 9: Hoelder exponents.
Outcome holder() {
  const auto d = cli::cmd_holder(example_config("heisenberg-drift"));
  const auto g = cli::cmd_holder(example_config("grushin"));
  const double ad = d.report["fit"]["alpha"].get<double>(), ag = g.report["fit"]["alpha"].get<double>();
  const bool pass = d.exit_code == cli::kExitPass && ad >= 0.5 - 0.1 && ad <= 1.05 && std::abs(ag - 0.5) <= 0.1;
  return {pass, "heisenberg-drift alpha " + fmt(ad) + ", grushin alpha " + fmt(ag)};
}

// 10: variations formula.
Outcome split() {
  const auto h = verify_outcome("heisenberg-drift", "split");
  const auto c = verify_outcome("heisenberg-cubic-drift", "split");
  return {h.pass && c.pass, h.detail + "; " + c.detail};
}

// 11: determinism.
Outcome determinism() {
  const auto cfg = example_config("heisenberg-drift");
  bool same = true;
  for (const char* theorem : {"ballbox-affine", "time-bound", "split"}) {
    const auto a = cli::dump(cli::cmd_verify(cfg, theorem).report);
    const auto b = cli::dump(cli::cmd_verify(cfg, theorem).report);
    same = same && a == b;
  }
  const auto sr = example_config("heisenberg");
  same = same && cli::dump(cli::cmd_verify(sr, "ballbox-sr").report) == cli::dump(cli::cmd_verify(sr, "ballbox-sr").report);
  return {same, same ? "repeated reports byte-identical" : "reports differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "bracket identities", 10, algebra},
      {2, "growth vectors", 1, flags},
      {3, "order calculus", 5, orders},
      {4, "nilpotent approximation rate", 30, nilpotent_rate},
      {5, "time-dependent box constants", 120, [] { return verify_outcome("heisenberg-drift-x", "ballbox-td"); }},
      {6, "time-dependent value examples", 60, td_examples},
      {7, "affine ball-box inclusions", 300, [] { return verify_outcome("heisenberg-drift", "ballbox-affine"); }},
      {8, "horizon bound", 30, time_bound},
      {9, "Hoelder exponents", 180, holder},
      {10, "variations formula", 60, split},
      {11, "determinism", std::numeric_limits<double>::infinity(), determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s (%s; %.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
