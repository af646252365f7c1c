#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <carnot/ballbox.hpp>
#include <carnot/errors.hpp>
#include <carnot/flag.hpp>
#include <carnot/privileged.hpp>
#include <carnot/value.hpp>

namespace carnot::cli {

namespace {

class Checks {
 public:
  void add(const std::string& name, bool pass, Json detail = Json::object()) {
    detail["name"] = name;
    detail["pass"] = pass;
    list_.push_back(std::move(detail));
    all_ &= pass;
  }
  bool all() const { return all_; }
  const Json& list() const { return list_; }

 private:
  Json list_ = Json::array();
  bool all_ = true;
};

Json header(const std::string& command, const SystemConfig& c) {
  Json j;
  j["command"] = command;
  j["system"] = c.name;
  j["kind"] = to_string(c.kind);
  j["seed"] = c.seed;
  return j;
}

std::vector<int> weights_of(const WeightVector& w) { return {w.values().begin(), w.values().end()}; }

double spread(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo <= 0.0) return *hi <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

std::vector<std::vector<double>> endpoints_in_chart(const ReachCloud& cloud, const PrivilegedChart* chart) {
  std::vector<std::vector<double>> pts;
  for (const auto& r : cloud.records) {
    if (!r.ok) continue;
    pts.push_back(chart ? chart->to_chart(r.endpoint) : r.endpoint);
  }
  return pts;
}

std::function<std::vector<double>(std::span<const double>)> from_chart_fn(const PrivilegedChart& chart) {
  return [&chart](std::span<const double> z) { return chart.from_chart(z); };
}

Json coverage_json(const InnerCoverage& cov, std::size_t max_failures = 10) {
  Json j;
  j["fraction"] = cov.fraction;
  j["targets"] = cov.targets.size();
  Json fails = Json::array();
  double worst = 0.0;
  for (const auto& t : cov.targets) {
    if (t.certified) {
      worst = std::max(worst, t.cost);
      continue;
    }
    if (fails.size() < max_failures)
      fails.push_back({{"z", t.z}, {"cost", finite_or_null(t.cost)}, {"diagnostic", t.diagnostic}});
  }
  j["max_certified_cost"] = worst;
  j["failures"] = fails;
  return j;
}

ReachOptions reach_options(const SystemConfig& c, unsigned threads) {
  ReachOptions o;
  o.max_segments = c.max_segments;
  o.step = c.step;
  o.threads = threads;
  return o;
}

BoxFamily family_for(const PrivilegedChart& chart, const SystemConfig& c, double T) {
  BoxFamily fam;
  fam.weights = c.verify.weights ? WeightVector(*c.verify.weights) : chart.weights;
  fam.T = T;
  if (chart.rectified_axis) {
    fam.k = chart.rectified_axis;
    fam.s = chart.drift_order;
  } else {
    // driftless: T = 0 and any consistent (k, s) reduces the families to Box
    fam.k = fam.weights.size() - 1;
    fam.s = fam.weights[fam.weights.size() - 1];
  }
  return fam;
}

Json verify_ballbox_sr(const SystemConfig& c, const Overrides& o, Checks& checks) {
  const auto fields = generator_fields(c);
  ChartOptions copts;
  copts.r_max = c.r_max;
  copts.cap = c.chart_cap;
  const auto chart = build_chart(fields, c.q, copts);
  const auto sys = SystemSpec::sub_riemannian(fields);
  const auto q = to_doubles(c.q);
  const auto fam = family_for(chart, c, 0.0);

  Json out;
  out["weights"] = weights_of(fam.weights);
  Json fits = Json::array();
  std::vector<double> Cs;
  for (std::size_t i = 0; i < c.verify.eps.size(); ++i) {
    const double eps = c.verify.eps[i];
    const auto cloud = sample_reachable(sys, q, eps, c.horizon, c.verify.samples, derive_seed(c.seed, i), reach_options(c, o.threads));
    const auto fit = fit_outer_constant(endpoints_in_chart(cloud, &chart), FamilyKind::kBox, fam, eps);
    Cs.push_back(fit.C);
    Json f = to_json(fit);
    f["eps"] = eps;
    fits.push_back(f);
  }
  out["outer"] = fits;
  const double maxC = *std::max_element(Cs.begin(), Cs.end());
  checks.add("outer-constant", std::isfinite(maxC) && maxC <= c.verify.max_constant,
             {{"max_C", finite_or_null(maxC)}, {"threshold", c.verify.max_constant}});
  checks.add("outer-stability", spread(Cs) <= c.verify.stability,
             {{"ratio", finite_or_null(spread(Cs))}, {"threshold", c.verify.stability}});

  if (c.verify.inner_density > 0) {
    Json inner = Json::array();
    for (std::size_t i = 0; i < c.verify.inner_eps.size(); ++i) {
      const double eps = c.verify.inner_eps[i];
      ValueBudget b = c.budget;
      b.seed = derive_seed(c.seed, 1000 + i);
      const auto cov = verify_inner_inclusion(sys, q, fam, eps, c.verify.inner_divisor, c.verify.inner_density, b,
                                              from_chart_fn(chart), o.threads);
      Json j = coverage_json(cov);
      j["eps"] = eps;
      j["C"] = c.verify.inner_divisor;
      inner.push_back(j);
      checks.add("inner-coverage eps=" + format_double(eps), cov.fraction >= c.verify.coverage,
                 {{"fraction", cov.fraction}, {"threshold", c.verify.coverage}});
    }
    out["inner"] = inner;
  }
  return out;
}

Json verify_ballbox_td(const SystemConfig& c, const Overrides& o, Checks& checks) {
  if (!c.drift) throw Error(ErrorCode::kConfig, "ballbox-td needs a drift");
  const auto fields = generator_fields(c);
  const auto f0 = *drift_field(c);
  const auto chart = config_chart(c);
  if (!chart.rectified_axis) throw Error(ErrorCode::kConfig, "ballbox-td needs a drift that does not vanish at q");
  SystemSpec sys;
  const bool series = c.kind == SystemKind::kApproxTimeDependent;
  if (series) {
    sys = SystemSpec::approx_time_dependent(homogeneous_series_approx(fields, f0, chart));
  } else {
    std::vector<PolyVectorField> pushed;
    for (const auto& f : fields) pushed.push_back(chart.push(f));
    sys = SystemSpec::pullback(pushed, chart.push(f0), c.series_order);
  }
  sys.set_domain_half_width(c.half_width);
  const std::vector<double> origin(static_cast<std::size_t>(c.n), 0.0);

  Json out;
  out["system"] = series ? "series-approximation" : "pullback";
  out["s"] = *chart.drift_order;
  out["k"] = *chart.rectified_axis + 1;
  out["weights"] = weights_of(chart.weights);
  Json fits = Json::array();
  std::vector<double> C_td, C_hom;
  std::size_t idx = 0;
  for (double T : c.verify.horizons) {
    for (double eps : c.verify.eps) {
      const auto cloud = sample_reachable(sys, origin, eps, T, c.verify.samples, derive_seed(c.seed, idx++), reach_options(c, o.threads));
      const auto pts = endpoints_in_chart(cloud, nullptr);
      auto fam = family_for(chart, c, T);
      const auto a = fit_outer_constant(pts, FamilyKind::kTdEstimate, fam, eps);
      const auto b = fit_outer_constant(pts, FamilyKind::kTdEstimateHomogeneous, fam, eps);
      C_td.push_back(a.C);
      C_hom.push_back(b.C);
      fits.push_back({{"eps", eps}, {"T", T}, {"td", to_json(a)}, {"td_homogeneous", to_json(b)}});
    }
  }
  out["outer"] = fits;
  const double max_td = *std::max_element(C_td.begin(), C_td.end());
  checks.add("td-constant", std::isfinite(max_td) && max_td <= c.verify.max_constant,
             {{"max_C", finite_or_null(max_td)}, {"threshold", c.verify.max_constant}});
  checks.add("td-stability", spread(C_td) <= c.verify.stability,
             {{"ratio", finite_or_null(spread(C_td))}, {"threshold", c.verify.stability}});
  if (series) {
    const double max_hom = *std::max_element(C_hom.begin(), C_hom.end());
    checks.add("td-homogeneous-constant", std::isfinite(max_hom) && max_hom <= c.verify.max_constant,
               {{"max_C", finite_or_null(max_hom)}, {"threshold", c.verify.max_constant}});
    checks.add("td-homogeneous-stability", spread(C_hom) <= c.verify.stability,
               {{"ratio", finite_or_null(spread(C_hom))}, {"threshold", c.verify.stability}});
  }
  return out;
}

Json verify_ballbox_affine(const SystemConfig& c, const Overrides& o, Checks& checks) {
  if (c.kind != SystemKind::kAffine) throw Error(ErrorCode::kConfig, "ballbox-affine needs kind Affine");
  const auto built = build_system(c);
  const auto chart = config_chart(c);
  if (!chart.rectified_axis) throw Error(ErrorCode::kConfig, "ballbox-affine needs a drift that does not vanish at q");
  const auto fam = family_for(chart, c, c.horizon);
  const auto kind = family_kind_from_string(c.verify.family);
  const int k = *fam.k;

  Json out;
  out["family"] = c.verify.family;
  out["s"] = *fam.s;
  out["k"] = k + 1;
  out["T"] = c.horizon;
  out["weights"] = weights_of(fam.weights);
  Json fits = Json::array();
  std::vector<double> Cs;
  bool negative_ok = true;
  for (std::size_t i = 0; i < c.verify.eps.size(); ++i) {
    const double eps = c.verify.eps[i];
    const auto cloud = sample_reachable(built.spec, built.origin, eps, c.horizon, c.verify.samples, derive_seed(c.seed, i), reach_options(c, o.threads));
    const auto pts = endpoints_in_chart(cloud, &chart);
    const auto fit = fit_outer_constant(pts, kind, fam, eps);
    Cs.push_back(fit.C);
    std::size_t negatives = 0;
    Json violation = nullptr;
    for (const auto& z : pts) {
      if (z[static_cast<std::size_t>(k)] > 0.0) continue;
      ++negatives;
      if (violation.is_null() && !in_box(z, fit.C * eps, fam.weights)) violation = z;
    }
    negative_ok &= violation.is_null();
    Json f = to_json(fit);
    f["eps"] = eps;
    f["negative_points"] = negatives;
    f["negative_violation"] = violation;
    fits.push_back(f);
  }
  out["outer"] = fits;
  const double maxC = *std::max_element(Cs.begin(), Cs.end());
  checks.add("outer-constant", std::isfinite(maxC) && maxC <= c.verify.max_constant,
             {{"max_C", finite_or_null(maxC)}, {"threshold", c.verify.max_constant}});
  checks.add("outer-stability", spread(Cs) <= c.verify.stability,
             {{"ratio", finite_or_null(spread(Cs))}, {"threshold", c.verify.stability}});
  checks.add("negative-side-box", negative_ok);

  if (c.verify.inner_density > 0) {
    Json inner = Json::array();
    for (std::size_t i = 0; i < c.verify.inner_eps.size(); ++i) {
      const double eps = c.verify.inner_eps[i];
      ValueBudget b = c.budget;
      b.seed = derive_seed(c.seed, 1000 + i);
      const auto cov = verify_inner_inclusion(built.spec, built.origin, fam, eps, c.verify.inner_divisor,
                                              c.verify.inner_density, b, from_chart_fn(chart), o.threads);
      Json j = coverage_json(cov);
      j["eps"] = eps;
      j["C"] = c.verify.inner_divisor;
      inner.push_back(j);
      checks.add("inner-coverage eps=" + format_double(eps), cov.fraction >= c.verify.coverage,
                 {{"fraction", cov.fraction}, {"threshold", c.verify.coverage}});
    }
    out["inner"] = inner;
  }
  return out;
}

Json verify_time_bound(const SystemConfig& c, const Overrides& o, Checks& checks) {
  if (c.kind != SystemKind::kAffine) throw Error(ErrorCode::kConfig, "time-bound needs kind Affine");
  const auto built = build_system(c);
  const auto chart = config_chart(c);
  if (!chart.rectified_axis) throw Error(ErrorCode::kConfig, "time-bound needs a drift that does not vanish at q");
  const int k = *chart.rectified_axis;
  const int s = *chart.drift_order;
  const int n = c.n;
  const int density = std::max(2, c.verify.inner_density);
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(density);

  std::vector<TimeRecord> records;
  std::size_t uncertified = 0;
  Json per_eps = Json::array();
  for (std::size_t e = 0; e < c.verify.eps.size(); ++e) {
    const double eps = c.verify.eps[e];
    const double eta = eps / c.verify.inner_divisor;
    std::vector<std::optional<TimeRecord>> slot(count);
    parallel_for(
        count,
        [&](std::size_t idx) {
          const auto h = halton(idx + 1, n);
          std::vector<double> z(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (2.0 * h[static_cast<std::size_t>(i)] - 1.0) * std::pow(eta, chart.weights[i]);
          z[static_cast<std::size_t>(k)] = -h[static_cast<std::size_t>(k)] * std::pow(eta, s);
          ValueBudget b = c.budget;
          b.seed = derive_seed(derive_seed(c.seed, 2000 + e), idx);
          b.stop_below = eps;
          try {
            const auto est = estimate_value(built.spec, built.origin, chart.from_chart(z), c.horizon, b);
            if (est.upper <= eps) slot[idx] = TimeRecord{est.horizon_used, eps, z[static_cast<std::size_t>(k)]};
          } catch (const Error& err) {
            if (err.code() != ErrorCode::kNoFeasibleWitness) throw;
          }
        },
        o.threads);
    std::size_t ok = 0;
    double worst_ratio = 0.0;
    for (const auto& r : slot) {
      if (!r) {
        ++uncertified;
        continue;
      }
      ++ok;
      records.push_back(*r);
      worst_ratio = std::max(worst_ratio, r->T_used / (std::pow(eps, s) + std::max(r->z_k, 0.0)));
    }
    per_eps.push_back({{"eps", eps}, {"targets", count}, {"certified", ok}, {"max_ratio", worst_ratio}});
  }
  Json out;
  out["s"] = s;
  out["k"] = k + 1;
  out["per_eps"] = per_eps;
  out["records"] = records.size();
  out["uncertified"] = uncertified;
  if (records.empty()) {
    checks.add("time-bound", false, {{"reason", "no certified witnesses"}});
    return out;
  }
  const auto fit = time_bound_check(records, s);
  out["fit"] = to_json(fit);
  checks.add("time-bound", fit.finite, {{"C", finite_or_null(fit.C)}});
  return out;
}

Json verify_split(const SystemConfig& c, const Overrides&, Checks& checks) {
  if (c.kind != SystemKind::kAffine) throw Error(ErrorCode::kConfig, "split needs kind Affine");
  const auto built = build_system(c);
  std::mt19937_64 rng(derive_seed(c.seed, 3000));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> values(4, std::vector<double>(static_cast<std::size_t>(built.spec.controls())));
  for (auto& v : values)
    for (auto& x : v) x = normal(rng);
  const auto u = ControlSignal::uniform(c.verify.split_horizon, values);
  IntegrateOptions io;
  io.step = c.step;
  io.record = false;

  Json rows = Json::array();
  std::vector<double> res;
  bool exact = true;
  for (int L : c.verify.series_orders) {
    const auto r = affine_split_check(built.spec, built.origin, u, L, io);
    res.push_back(r.residual);
    exact &= r.exact_series;
    rows.push_back({{"L", L}, {"residual", r.residual}, {"exact_series", r.exact_series}});
  }
  Json out;
  out["T"] = c.verify.split_horizon;
  out["control"] = to_json(u);
  out["orders"] = rows;
  if (exact) {
    const double worst = *std::max_element(res.begin(), res.end());
    checks.add("split-exact", worst <= c.verify.split_tolerance, {{"max_residual", worst}, {"threshold", c.verify.split_tolerance}});
  } else {
    bool decreasing = true;
    for (std::size_t i = 1; i < res.size(); ++i) decreasing &= res[i] < res[i - 1];
    checks.add("split-decreasing", decreasing, {{"residuals", res}});
  }
  return out;
}

}  // namespace

SystemConfig apply(SystemConfig config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.eps) config.eps = *o.eps;
  if (o.horizon) config.horizon = *o.horizon;
  if (o.samples) config.samples = *o.samples;
  if (config.eps < 0.0 || config.horizon < 0.0 || config.samples < 1)
    throw Error(ErrorCode::kConfig, "need eps >= 0, horizon >= 0 and samples >= 1");
  return config;
}

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

CommandResult cmd_analyze(const SystemConfig& config, const Overrides& o) {
  const auto c = apply(config, o);
  const auto fields = c.kind == SystemKind::kTimeDependent ? build_system(c).spec.generators_at_zero() : generator_fields(c);
  FlagOptions fopts;
  fopts.r_max = c.r_max;
  CommandResult res;
  res.report = header("analyze", c);
  if (c.q_from_float) res.report["warning"] = "q given as floating-point literals; converted exactly";
  res.report["flag"] = to_json(growth_vector(fields, c.q, fopts));
  ChartOptions copts;
  copts.r_max = c.r_max;
  copts.cap = c.chart_cap;
  const auto chart = build_chart(fields, c.q, copts);
  res.report["chart"] = to_json(chart);
  res.report["privileged"] = to_json(verify_privileged(chart, fields));
  if (auto f0 = drift_field(c)) {
    Json d;
    try {
      d["s"] = drift_order(chart.push(*f0), chart);
      const auto rect = rectify_drift(chart, *f0, fields);
      d["rectified_chart"] = to_json(rect);
      d["rectified_privileged"] = to_json(verify_privileged(rect, fields));
    } catch (const Error& e) {
      d["error"] = e.what();
    }
    const auto reg = is_regular_drift(*f0, fields, c.q, 0.125, 8, c.seed, c.r_max);
    d["regular"] = reg.regular;
    d["order_at_q"] = reg.order_at_q;
    d["orders_seen"] = std::vector<int>(reg.orders_seen.begin(), reg.orders_seen.end());
    res.report["drift"] = d;
  }
  return res;
}

CommandResult cmd_approx(const SystemConfig& config, const Overrides& o) {
  const auto c = apply(config, o);
  const auto fields = c.kind == SystemKind::kTimeDependent ? build_system(c).spec.generators_at_zero() : generator_fields(c);
  CommandResult res;
  res.report = header("approx", c);
  ChartOptions copts;
  copts.r_max = c.r_max;
  copts.cap = c.chart_cap;
  auto chart = build_chart(fields, c.q, copts);
  const auto f0 = drift_field(c);
  if (f0) chart = config_chart(c);
  res.report["chart"] = to_json(chart);
  const auto nil = nilpotent_approximation(fields, chart);
  Json nj = Json::array();
  bool self = true;
  for (std::size_t i = 0; i < nil.size(); ++i) {
    nj.push_back(format_vector_field(nil[i]));
    self &= nil[i] == chart.push(fields[i]);
  }
  res.report["nilpotent"] = nj;
  res.report["nilpotent_equals_system"] = self;
  if (f0) {
    const auto pushed = chart.push(*f0);
    const auto dec = drift_decomposition(pushed, chart);
    res.report["drift"] = {{"s", dec.s},
                           {"principal", format_vector_field(dec.principal)},
                           {"remainder", format_vector_field(dec.remainder)}};
    const auto series = homogeneous_series_approx(fields, *f0, chart);
    res.report["series"] = to_json(series);
    bool higher_zero = true;
    for (const auto& terms : series.terms)
      for (const auto& [l, f] : terms)
        if (l >= 1 && !f.is_zero()) higher_zero = false;
    res.report["series_higher_terms_zero"] = higher_zero;
  }
  return res;
}

CommandResult cmd_reach(const SystemConfig& config, const Overrides& o) {
  const auto c = apply(config, o);
  const auto built = build_system(c);
  const auto opts = reach_options(c, o.threads);
  const auto cloud = sample_reachable(built.spec, built.origin, c.eps, c.horizon, c.samples, c.seed, opts);
  CommandResult res;
  res.report = header("reach", c);
  res.report["eps"] = c.eps;
  res.report["horizon"] = c.horizon;
  res.report["samples"] = c.samples;
  res.report["coordinates"] = built.chart ? "chart" : "original";
  std::size_t failed = 0;
  double max_cost = 0.0;
  for (const auto& r : cloud.records) {
    failed += r.ok ? 0 : 1;
    max_cost = std::max(max_cost, r.cost);
  }
  res.report["failed"] = failed;
  res.report["max_cost"] = max_cost;
  // re-integrate every 100th record from its seed
  double audit = 0.0;
  std::size_t audited = 0;
  IntegrateOptions io;
  io.step = c.step;
  io.record = false;
  for (std::size_t i = 0; i < cloud.records.size(); i += 100) {
    const auto& r = cloud.records[i];
    if (!r.ok) continue;
    const auto u = reach_control(built.spec, c.eps, c.horizon, r.seed, opts);
    const auto e = endpoint(built.spec, built.origin, u, io);
    double d = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) d = std::max(d, std::abs(e[j] - r.endpoint[j]));
    audit = std::max(audit, d);
    ++audited;
  }
  res.report["audit"] = {{"records", audited}, {"max_deviation", audit}};
  res.files["reach.csv"] = cloud_csv(cloud);
  if (audit > 1e-9) res.exit_code = kExitNumericalFailure;
  return res;
}

CommandResult cmd_verify(const SystemConfig& config, const std::string& theorem, const Overrides& o) {
  const auto c = apply(config, o);
  CommandResult res;
  res.report = header("verify", c);
  res.report["theorem"] = theorem;
  Checks checks;
  Json detail;
  if (theorem == "ballbox-sr") {
    detail = verify_ballbox_sr(c, o, checks);
  } else if (theorem == "ballbox-td") {
    detail = verify_ballbox_td(c, o, checks);
  } else if (theorem == "ballbox-affine") {
    detail = verify_ballbox_affine(c, o, checks);
  } else if (theorem == "time-bound") {
    detail = verify_time_bound(c, o, checks);
  } else if (theorem == "split") {
    detail = verify_split(c, o, checks);
  } else {
    throw Error(ErrorCode::kConfig,
                "unknown theorem '" + theorem + "' (ballbox-sr, ballbox-td, ballbox-affine, time-bound, split)");
  }
  res.report["result"] = detail;
  res.report["checks"] = checks.list();
  res.report["pass"] = checks.all();
  res.exit_code = checks.all() ? kExitPass : kExitVerificationFailure;
  return res;
}

CommandResult cmd_holder(const SystemConfig& config, const Overrides& o) {
  const auto c = apply(config, o);
  if (c.kind != SystemKind::kSubRiemannian && c.kind != SystemKind::kAffine)
    throw Error(ErrorCode::kConfig, "holder supports SR and Affine systems");
  const auto built = build_system(c);
  const auto chart = config_chart(c);
  const int n = c.n;
  const int r = chart.r;
  const int P = std::max(2, c.holder.points);

  struct Target {
    std::vector<double> z;
    double d = 0.0;
    std::string kind;
  };
  std::vector<Target> targets;
  for (int i = 0; i < P; ++i) {
    const double d = c.holder.d_min * std::pow(c.holder.d_max / c.holder.d_min, static_cast<double>(i) / (P - 1));
    Target t;
    t.z.assign(static_cast<std::size_t>(n), 0.0);
    if (!chart.rectified_axis) {
      const int axis = c.holder.axis.value_or(n - 1);
      t.z[static_cast<std::size_t>(axis)] = d;
      t.kind = "axis";
    } else {
      // cycle: beside the orbit, before its start, past its end
      const int k = *chart.rectified_axis;
      const int side = k == 0 ? 1 : 0;
      switch (i % 3) {
        case 0:
          t.z[static_cast<std::size_t>(k)] = 0.5 * c.horizon;
          t.z[static_cast<std::size_t>(side)] = d;
          t.kind = "beside";
          break;
        case 1:
          t.z[static_cast<std::size_t>(k)] = -d;
          t.kind = "before";
          break;
        default:
          t.z[static_cast<std::size_t>(k)] = c.horizon + d;
          t.kind = "after";
          break;
      }
    }
    t.d = chart.rectified_axis ? distance_to_drift_segment(t.z, *chart.rectified_axis, c.horizon) : d;
    targets.push_back(std::move(t));
  }

  std::vector<std::optional<ValueEstimate>> est(targets.size());
  std::vector<std::string> errors(targets.size());
  parallel_for(
      targets.size(),
      [&](std::size_t i) {
        ValueBudget b = c.budget;
        b.seed = derive_seed(c.seed, 4000 + i);
        b.relative_tol = 0.0;
        b.endpoint_tol = 0.05 * targets[i].d;
        try {
          est[i] = estimate_value(built.spec, built.origin, chart.from_chart(targets[i].z), c.horizon, b);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNoFeasibleWitness) throw;
          errors[i] = e.what();
        }
      },
      o.threads);

  CommandResult res;
  res.report = header("holder", c);
  res.report["r"] = r;
  std::vector<std::pair<double, double>> pairs;
  Json rows = Json::array();
  CsvWriter csv({"d", "value", "kind", "horizon_used"});
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Json row = {{"z", targets[i].z}, {"d", targets[i].d}, {"kind", targets[i].kind}};
    if (est[i]) {
      row["value"] = est[i]->upper;
      row["horizon_used"] = est[i]->horizon_used;
      pairs.emplace_back(targets[i].d, est[i]->upper);
      csv.row({format_double(targets[i].d), format_double(est[i]->upper), targets[i].kind, format_double(est[i]->horizon_used)});
    } else {
      row["error"] = errors[i];
    }
    rows.push_back(row);
  }
  res.report["targets"] = rows;
  res.files["holder.csv"] = csv.str();
  const auto fit = holder_fit(pairs, r);
  res.report["fit"] = to_json(fit);
  const double lo = 1.0 / r - 0.1;
  const double hi = 1.0 + 0.05;
  const bool pass = fit.alpha >= lo && fit.alpha <= hi;
  res.report["alpha_range"] = {lo, hi};
  res.report["pass"] = pass;
  res.exit_code = pass ? kExitPass : kExitVerificationFailure;
  return res;
}

CommandResult cmd_examples(const std::string& name) {
  const auto c = example_config(name);
  CommandResult res;
  res.report = {{"name", name}};
  res.files[name + ".json"] = config_to_json(c);
  return res;
}

}  // namespace carnot::cli
