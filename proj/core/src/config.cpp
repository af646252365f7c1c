#include "carnot/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "carnot/errors.hpp"

namespace carnot {

using nlohmann::json;

namespace {

int line_at(const std::string& text, std::size_t pos) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(pos, text.size())), '\n'));
}

// Best-effort source line for a JSON pointer: follows its object keys through the text.
int line_of(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  std::stringstream ss(pointer);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || std::all_of(seg.begin(), seg.end(), ::isdigit)) continue;
    const auto at = text.find("\"" + seg + "\"", pos);
    if (at == std::string::npos) break;
    found = pos = at;
  }
  return found == std::string::npos ? 1 : line_at(text, found);
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw Error(ErrorCode::kConfig, source_ + ":" + std::to_string(line_of(text_, pointer)) + ": " +
                                        (pointer.empty() ? "" : pointer + ": ") + message);
  }

  const json& require(const json& obj, const std::string& ptr, const std::string& key) const {
    if (!obj.contains(key)) fail(ptr, "missing required field '" + key + "'");
    return obj.at(key);
  }

  int integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned64(const json& v, const std::string& ptr) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_string()) {
      try {
        std::size_t used = 0;
        const auto s = v.get<std::string>();
        const auto x = std::stoull(s, &used);
        if (used == s.size()) return x;
      } catch (const std::exception&) {
      }
    }
    fail(ptr, "expected a nonnegative 64-bit integer");
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    return v.get<double>();
  }

  double positive(const json& v, const std::string& ptr) const {
    const double x = number(v, ptr);
    if (!(x > 0.0)) fail(ptr, "expected a positive number");
    return x;
  }

  std::string string(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& ptr) const {
    if (!v.is_array() || v.empty()) fail(ptr, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }

  std::vector<int> integers(const json& v, const std::string& ptr) const {
    if (!v.is_array() || v.empty()) fail(ptr, "expected a nonempty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }

  std::vector<std::string> field(const json& v, const std::string& ptr, int n, int cap) const {
    if (!v.is_array()) fail(ptr, "expected an array of " + std::to_string(n) + " polynomial strings");
    if (static_cast<int>(v.size()) != n)
      fail(ptr, "vector field has " + std::to_string(v.size()) + " components, expected n = " + std::to_string(n));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto p = ptr + "/" + std::to_string(i);
      out.push_back(string(v[i], p));
      try {
        (void)parse_polynomial(out.back(), n, cap);
      } catch (const Error& e) {
        fail(p, e.what());
      }
    }
    return out;
  }

  TimeProfile profile(const json& v, const std::string& ptr) const {
    if (v.is_string()) return profile(json{{"kind", v}}, ptr);
    if (!v.is_object()) fail(ptr, "expected a profile object");
    const auto kind = string(require(v, ptr, "kind"), ptr + "/kind");
    const double scale = v.contains("scale") ? number(v["scale"], ptr + "/scale") : 1.0;
    if (kind == "polynomial") {
      TimeProfile p;
      p.coefficients = v.contains("coefficients") ? numbers(v["coefficients"], ptr + "/coefficients") : std::vector<double>{1.0};
      return p;
    }
    if (kind == "inverse-square") return TimeProfile::inverse_square(scale);
    if (kind == "exp-decay") return TimeProfile::exp_decay(scale);
    fail(ptr + "/kind", "unknown profile '" + kind + "' (polynomial, inverse-square, exp-decay)");
  }

 private:
  const std::string& text_;
  std::string source_;
};

SystemKind parse_kind(const Reader& rd, const std::string& s) {
  for (auto k : {SystemKind::kSubRiemannian, SystemKind::kTimeDependent, SystemKind::kApproxTimeDependent,
                 SystemKind::kAffine})
    if (to_string(k) == s) return k;
  rd.fail("/kind", "unknown kind '" + s + "' (SR, TD, ATD, Affine)");
}

json profile_json(const TimeProfile& p) {
  switch (p.kind) {
    case TimeProfile::Kind::kPolynomial:
      return {{"kind", "polynomial"}, {"coefficients", p.coefficients}};
    case TimeProfile::Kind::kInverseSquare:
      return {{"kind", "inverse-square"}, {"scale", p.scale}};
    case TimeProfile::Kind::kExpDecay:
      return {{"kind", "exp-decay"}, {"scale", p.scale}};
  }
  return {};
}

void read_budget(const Reader& rd, const json& b, ValueBudget& out) {
  const std::string p = "/budget";
  if (!b.is_object()) rd.fail(p, "expected an object");
  if (b.contains("segments")) out.segments = rd.integer(b["segments"], p + "/segments");
  if (b.contains("population")) out.population = rd.integer(b["population"], p + "/population");
  if (b.contains("elite_fraction")) out.elite_fraction = rd.positive(b["elite_fraction"], p + "/elite_fraction");
  if (b.contains("iterations")) out.iterations = rd.integer(b["iterations"], p + "/iterations");
  if (b.contains("penalty")) out.penalty = rd.positive(b["penalty"], p + "/penalty");
  if (b.contains("penalty_doubling")) out.penalty_doubling = rd.integer(b["penalty_doubling"], p + "/penalty_doubling");
  if (b.contains("endpoint_tol")) out.endpoint_tol = rd.positive(b["endpoint_tol"], p + "/endpoint_tol");
  if (b.contains("relative_tol")) out.relative_tol = rd.number(b["relative_tol"], p + "/relative_tol");
  if (b.contains("step")) out.step = rd.positive(b["step"], p + "/step");
  if (b.contains("patience")) out.patience = rd.integer(b["patience"], p + "/patience");
  if (b.contains("refine")) {
    if (!b["refine"].is_boolean()) rd.fail(p + "/refine", "expected a boolean");
    out.refine = b["refine"].get<bool>();
  }
  if (b.contains("polish_steps")) out.polish_steps = rd.integer(b["polish_steps"], p + "/polish_steps");
  if (b.contains("stop_below") && !b["stop_below"].is_null()) out.stop_below = rd.number(b["stop_below"], p + "/stop_below");
  if (out.segments < 1 || out.population < 4 || out.iterations < 0 || out.elite_fraction > 1.0)
    rd.fail(p, "budget needs segments >= 1, population >= 4, iterations >= 0, elite_fraction <= 1");
}

json budget_json(const ValueBudget& b) {
  json j = {{"segments", b.segments},
            {"population", b.population},
            {"elite_fraction", b.elite_fraction},
            {"iterations", b.iterations},
            {"penalty", b.penalty},
            {"penalty_doubling", b.penalty_doubling},
            {"endpoint_tol", b.endpoint_tol},
            {"relative_tol", b.relative_tol},
            {"step", b.step},
            {"patience", b.patience},
            {"refine", b.refine},
            {"polish_steps", b.polish_steps}};
  j["stop_below"] = b.stop_below ? json(*b.stop_below) : json(nullptr);
  return j;
}

void read_verify(const Reader& rd, const json& v, VerifyConfig& out) {
  const std::string p = "/verify";
  if (!v.is_object()) rd.fail(p, "expected an object");
  if (v.contains("eps")) out.eps = rd.numbers(v["eps"], p + "/eps");
  if (v.contains("horizons")) out.horizons = rd.numbers(v["horizons"], p + "/horizons");
  if (v.contains("samples")) out.samples = rd.integer(v["samples"], p + "/samples");
  if (v.contains("max_constant")) out.max_constant = rd.positive(v["max_constant"], p + "/max_constant");
  if (v.contains("stability")) out.stability = rd.positive(v["stability"], p + "/stability");
  if (v.contains("inner_divisor")) out.inner_divisor = rd.positive(v["inner_divisor"], p + "/inner_divisor");
  if (v.contains("inner_density")) out.inner_density = rd.integer(v["inner_density"], p + "/inner_density");
  if (v.contains("inner_eps")) out.inner_eps = rd.numbers(v["inner_eps"], p + "/inner_eps");
  if (v.contains("coverage")) out.coverage = rd.number(v["coverage"], p + "/coverage");
  if (v.contains("family")) out.family = rd.string(v["family"], p + "/family");
  if (v.contains("series_orders")) out.series_orders = rd.integers(v["series_orders"], p + "/series_orders");
  if (v.contains("split_horizon")) out.split_horizon = rd.positive(v["split_horizon"], p + "/split_horizon");
  if (v.contains("split_tolerance")) out.split_tolerance = rd.positive(v["split_tolerance"], p + "/split_tolerance");
  if (v.contains("weights") && !v["weights"].is_null()) out.weights = rd.integers(v["weights"], p + "/weights");
  if (out.samples < 1) rd.fail(p + "/samples", "must be >= 1");
  if (out.inner_density < 0) rd.fail(p + "/inner_density", "must be >= 0");
  if (out.family != "pi-hat" && out.family != "pi" && out.family != "xi")
    rd.fail(p + "/family", "family must be pi-hat, pi or xi");
}

json verify_json(const VerifyConfig& v) {
  json j = {{"eps", v.eps},
            {"horizons", v.horizons},
            {"samples", v.samples},
            {"max_constant", v.max_constant},
            {"stability", v.stability},
            {"inner_divisor", v.inner_divisor},
            {"inner_density", v.inner_density},
            {"inner_eps", v.inner_eps},
            {"coverage", v.coverage},
            {"family", v.family},
            {"series_orders", v.series_orders},
            {"split_horizon", v.split_horizon},
            {"split_tolerance", v.split_tolerance}};
  j["weights"] = v.weights ? json(*v.weights) : json(nullptr);
  return j;
}

}  // namespace

SystemConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, source + ":" + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                                        ": invalid JSON: " + e.what());
  }
  Reader rd(text, source);
  if (!doc.is_object()) rd.fail("", "top level must be an object");
  SystemConfig c;
  c.version = rd.integer(rd.require(doc, "", "version"), "/version");
  if (c.version != kConfigVersion)
    rd.fail("/version", "unsupported version " + std::to_string(c.version) + " (expected " +
                            std::to_string(kConfigVersion) + ")");
  for (const auto& [key, _] : doc.items()) {
    static const std::vector<std::string> known = {
        "version", "name",    "n",        "kind",       "generators",   "drift",   "q",
        "literal_cap", "r_max", "chart_cap", "series_order", "step",   "half_width", "seed",
        "eps",     "horizon", "samples",  "max_segments", "budget",    "verify",  "holder"};
    if (std::find(known.begin(), known.end(), key) == known.end()) rd.fail("/" + key, "unknown field '" + key + "'");
  }
  if (doc.contains("name")) c.name = rd.string(doc["name"], "/name");
  c.n = rd.integer(rd.require(doc, "", "n"), "/n");
  if (c.n < 1 || c.n > kMaxDim) rd.fail("/n", "n must be in 1.." + std::to_string(kMaxDim));
  if (doc.contains("literal_cap")) c.literal_cap = rd.integer(doc["literal_cap"], "/literal_cap");
  if (c.literal_cap < 1) rd.fail("/literal_cap", "must be >= 1");
  c.kind = doc.contains("kind") ? parse_kind(rd, rd.string(doc["kind"], "/kind")) : SystemKind::kSubRiemannian;

  const auto& gens = rd.require(doc, "", "generators");
  if (!gens.is_array() || gens.empty()) rd.fail("/generators", "expected a nonempty array of vector fields");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string p = "/generators/" + std::to_string(i);
    std::vector<TermConfig> terms;
    if (gens[i].is_array()) {
      terms.push_back({TimeProfile::constant(), rd.field(gens[i], p, c.n, c.literal_cap)});
    } else if (gens[i].is_object()) {
      const auto& ts = rd.require(gens[i], p, "terms");
      if (!ts.is_array() || ts.empty()) rd.fail(p + "/terms", "expected a nonempty array");
      for (std::size_t t = 0; t < ts.size(); ++t) {
        const std::string pt = p + "/terms/" + std::to_string(t);
        if (!ts[t].is_object()) rd.fail(pt, "expected {\"profile\": ..., \"field\": [...]}");
        const auto prof = ts[t].contains("profile") ? rd.profile(ts[t]["profile"], pt + "/profile") : TimeProfile::constant();
        terms.push_back({prof, rd.field(rd.require(ts[t], pt, "field"), pt + "/field", c.n, c.literal_cap)});
      }
    } else {
      rd.fail(p, "expected an array of polynomial strings or an object with terms");
    }
    const bool profiled = std::any_of(terms.begin(), terms.end(), [](const TermConfig& t) { return !(t.profile == TimeProfile::constant()); });
    if (profiled && c.kind != SystemKind::kTimeDependent) rd.fail(p, "time profiles need kind TD");
    c.generators.push_back(std::move(terms));
  }
  if (doc.contains("drift") && !doc["drift"].is_null()) c.drift = rd.field(doc["drift"], "/drift", c.n, c.literal_cap);
  if ((c.kind == SystemKind::kAffine || c.kind == SystemKind::kApproxTimeDependent) && !c.drift)
    rd.fail("/kind", "kind " + to_string(c.kind) + " requires a drift");
  if ((c.kind == SystemKind::kSubRiemannian || c.kind == SystemKind::kTimeDependent) && c.drift)
    rd.fail("/drift", "kind " + to_string(c.kind) + " takes no drift");

  if (doc.contains("q")) {
    const auto& q = doc["q"];
    if (!q.is_array() || static_cast<int>(q.size()) != c.n) rd.fail("/q", "expected an array of n coordinates");
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto p = "/q/" + std::to_string(i);
      if (q[i].is_string()) {
        try {
          c.q.push_back(parse_rational(q[i].get<std::string>()));
        } catch (const Error& e) {
          rd.fail(p, e.what());
        }
      } else if (q[i].is_number_integer()) {
        c.q.emplace_back(q[i].get<long>());
      } else if (q[i].is_number()) {
        c.q.push_back(exact_rational(q[i].get<double>()));
        c.q_from_float = true;
      } else {
        rd.fail(p, "expected a rational string or a number");
      }
    }
  } else {
    c.q.assign(static_cast<std::size_t>(c.n), Rational(0));
  }

  if (doc.contains("r_max")) c.r_max = rd.integer(doc["r_max"], "/r_max");
  if (c.r_max < 1) rd.fail("/r_max", "must be >= 1");
  if (doc.contains("chart_cap") && !doc["chart_cap"].is_null()) c.chart_cap = rd.integer(doc["chart_cap"], "/chart_cap");
  if (doc.contains("series_order")) c.series_order = rd.integer(doc["series_order"], "/series_order");
  if (c.series_order < 0) rd.fail("/series_order", "must be >= 0");
  if (doc.contains("step")) c.step = rd.positive(doc["step"], "/step");
  if (doc.contains("half_width")) c.half_width = rd.positive(doc["half_width"], "/half_width");
  if (doc.contains("seed")) c.seed = rd.unsigned64(doc["seed"], "/seed");
  if (doc.contains("eps")) c.eps = rd.number(doc["eps"], "/eps");
  if (c.eps < 0.0) rd.fail("/eps", "must be >= 0");
  if (doc.contains("horizon")) c.horizon = rd.number(doc["horizon"], "/horizon");
  if (c.horizon < 0.0) rd.fail("/horizon", "must be >= 0");
  if (doc.contains("samples")) c.samples = rd.integer(doc["samples"], "/samples");
  if (c.samples < 1) rd.fail("/samples", "must be >= 1");
  if (doc.contains("max_segments")) c.max_segments = rd.integer(doc["max_segments"], "/max_segments");
  if (c.max_segments < 1) rd.fail("/max_segments", "must be >= 1");
  if (doc.contains("budget")) read_budget(rd, doc["budget"], c.budget);
  if (doc.contains("verify")) read_verify(rd, doc["verify"], c.verify);
  if (c.verify.weights && static_cast<int>(c.verify.weights->size()) != c.n)
    rd.fail("/verify/weights", "needs n entries");
  if (doc.contains("holder")) {
    const auto& h = doc["holder"];
    if (!h.is_object()) rd.fail("/holder", "expected an object");
    if (h.contains("d_min")) c.holder.d_min = rd.positive(h["d_min"], "/holder/d_min");
    if (h.contains("d_max")) c.holder.d_max = rd.positive(h["d_max"], "/holder/d_max");
    if (h.contains("points")) c.holder.points = rd.integer(h["points"], "/holder/points");
    if (h.contains("axis") && !h["axis"].is_null()) c.holder.axis = rd.integer(h["axis"], "/holder/axis");
    if (c.holder.axis && (*c.holder.axis < 0 || *c.holder.axis >= c.n)) rd.fail("/holder/axis", "axis out of range");
    if (!(c.holder.d_max > c.holder.d_min)) rd.fail("/holder", "need d_max > d_min");
  }
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_to_json(const SystemConfig& c) {
  json j;
  j["version"] = c.version;
  j["name"] = c.name;
  j["n"] = c.n;
  j["kind"] = to_string(c.kind);
  json gens = json::array();
  for (const auto& g : c.generators) {
    if (g.size() == 1 && g.front().profile == TimeProfile::constant()) {
      gens.push_back(g.front().field);
      continue;
    }
    json terms = json::array();
    for (const auto& t : g) terms.push_back({{"profile", profile_json(t.profile)}, {"field", t.field}});
    gens.push_back({{"terms", terms}});
  }
  j["generators"] = gens;
  j["drift"] = c.drift ? json(*c.drift) : json(nullptr);
  json q = json::array();
  for (const auto& x : c.q) q.push_back(to_string(x));
  j["q"] = q;
  j["literal_cap"] = c.literal_cap;
  j["r_max"] = c.r_max;
  j["chart_cap"] = c.chart_cap ? json(*c.chart_cap) : json(nullptr);
  j["series_order"] = c.series_order;
  j["step"] = c.step;
  j["half_width"] = c.half_width;
  j["seed"] = c.seed;
  j["eps"] = c.eps;
  j["horizon"] = c.horizon;
  j["samples"] = c.samples;
  j["max_segments"] = c.max_segments;
  j["budget"] = budget_json(c.budget);
  j["verify"] = verify_json(c.verify);
  j["holder"] = {{"d_min", c.holder.d_min}, {"d_max", c.holder.d_max}, {"points", c.holder.points}};
  j["holder"]["axis"] = c.holder.axis ? json(*c.holder.axis) : json(nullptr);
  return j.dump(2) + "\n";
}

bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return a.q == b.q && a.q_from_float == b.q_from_float && config_to_json(a) == config_to_json(b);
}

std::vector<PolyVectorField> generator_fields(const SystemConfig& config) {
  std::vector<PolyVectorField> out;
  for (const auto& g : config.generators) {
    PolyVectorField sum(config.n, config.literal_cap);
    for (const auto& t : g) sum += parse_vector_field(t.field, config.literal_cap);
    out.push_back(std::move(sum));
  }
  return out;
}

std::optional<PolyVectorField> drift_field(const SystemConfig& config) {
  if (!config.drift) return std::nullopt;
  return parse_vector_field(*config.drift, config.literal_cap);
}

PrivilegedChart config_chart(const SystemConfig& config) {
  const auto fields = generator_fields(config);
  ChartOptions opts;
  opts.r_max = config.r_max;
  opts.cap = config.chart_cap;
  auto chart = build_chart(fields, config.q, opts);
  if (auto f0 = drift_field(config)) {
    bool vanishes = true;
    for (const auto& v : f0->evaluate(std::span<const Rational>(config.q)))
      if (sgn(v) != 0) vanishes = false;
    if (!vanishes) chart = rectify_drift(chart, *f0, fields);
  }
  return chart;
}

BuiltSystem build_system(const SystemConfig& config) {
  BuiltSystem out;
  out.origin = to_doubles(config.q);
  switch (config.kind) {
    case SystemKind::kSubRiemannian:
      out.spec = SystemSpec::sub_riemannian(generator_fields(config));
      break;
    case SystemKind::kAffine:
      out.spec = SystemSpec::affine(generator_fields(config), *drift_field(config));
      break;
    case SystemKind::kTimeDependent: {
      std::vector<std::vector<ProfiledField>> gens;
      for (const auto& g : config.generators) {
        std::vector<ProfiledField> terms;
        for (const auto& t : g) terms.push_back({t.profile, parse_vector_field(t.field, config.literal_cap)});
        gens.push_back(std::move(terms));
      }
      out.spec = SystemSpec::time_dependent(std::move(gens));
      break;
    }
    case SystemKind::kApproxTimeDependent: {
      const auto chart = config_chart(config);
      const auto series = homogeneous_series_approx(generator_fields(config), *drift_field(config), chart);
      out.spec = SystemSpec::approx_time_dependent(series);
      out.origin.assign(static_cast<std::size_t>(config.n), 0.0);
      out.chart = chart;
      break;
    }
  }
  out.spec.set_domain_half_width(config.half_width);
  return out;
}

namespace {

SystemConfig base(const std::string& name, int n, SystemKind kind) {
  SystemConfig c;
  c.name = name;
  c.n = n;
  c.kind = kind;
  c.q.assign(static_cast<std::size_t>(n), Rational(0));
  return c;
}

void add(SystemConfig& c, std::vector<std::string> field, TimeProfile p = TimeProfile::constant()) {
  c.generators.push_back({TermConfig{std::move(p), std::move(field)}});
}

const std::map<std::string, SystemConfig (*)()>& registry() {
  static const std::map<std::string, SystemConfig (*)()> reg = {
      {"heisenberg",
       [] {
         auto c = base("heisenberg", 3, SystemKind::kSubRiemannian);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1"});
         c.verify.eps = {0.1, 0.2, 0.4};
         c.verify.inner_eps = {0.2};
         c.verify.inner_density = 3;
         c.holder.d_min = 1e-4;
         c.holder.d_max = 1e-1;
         return c;
       }},
      {"heisenberg-wrong-weights",
       [] {
         auto c = base("heisenberg-wrong-weights", 3, SystemKind::kSubRiemannian);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1"});
         c.verify.eps = {0.1, 0.2, 0.4};
         c.verify.inner_density = 3;
         c.verify.weights = std::vector<int>{1, 1, 1};
         return c;
       }},
      {"heisenberg-perturbed",
       [] {
         auto c = base("heisenberg-perturbed", 3, SystemKind::kSubRiemannian);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1 + x1^2"});
         return c;
       }},
      {"grushin",
       [] {
         auto c = base("grushin", 2, SystemKind::kSubRiemannian);
         add(c, {"1", "0"});
         add(c, {"0", "x1"});
         c.verify.eps = {0.1, 0.2, 0.4};
         c.verify.inner_density = 4;
         c.holder.d_min = 1e-4;
         c.holder.d_max = 1e-1;
         c.holder.axis = 1;
         return c;
       }},
      {"line",
       [] {
         auto c = base("line", 1, SystemKind::kSubRiemannian);
         add(c, {"1"});
         return c;
       }},
      {"td-inverse-square",
       [] {
         auto c = base("td-inverse-square", 1, SystemKind::kTimeDependent);
         add(c, {"1"}, TimeProfile::inverse_square());
         c.horizon = 0.99;
         c.eps = 0.05;
         return c;
       }},
      {"td-exp-decay",
       [] {
         auto c = base("td-exp-decay", 1, SystemKind::kTimeDependent);
         add(c, {"1"}, TimeProfile::exp_decay());
         c.horizon = 1.0;
         c.eps = 0.5;
         return c;
       }},
      {"heisenberg-drift",
       [] {
         auto c = base("heisenberg-drift", 3, SystemKind::kAffine);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1"});
         c.drift = std::vector<std::string>{"0", "0", "1"};
         c.horizon = 0.5;
         c.holder.d_min = 1e-3;
         c.holder.d_max = 2e-1;
         return c;
       }},
      {"heisenberg-drift-x",
       [] {
         auto c = base("heisenberg-drift-x", 3, SystemKind::kApproxTimeDependent);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1"});
         c.drift = std::vector<std::string>{"1", "0", "0"};
         c.horizon = 0.3;
         c.verify.eps = {0.05, 0.1, 0.2};
         c.verify.horizons = {0.1, 0.3};
         c.verify.stability = 2.0;
         return c;
       }},
      {"heisenberg-cubic-drift",
       [] {
         auto c = base("heisenberg-cubic-drift", 3, SystemKind::kAffine);
         add(c, {"1", "0", "0"});
         add(c, {"0", "1", "x1"});
         c.drift = std::vector<std::string>{"-10*x2 + x2^3", "10*x1", "1"};
         c.horizon = 0.1;
         c.literal_cap = 12;
         return c;
       }},
  };
  return reg;
}

}  // namespace

std::vector<std::string> example_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

SystemConfig example_config(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) {
    std::string list;
    for (const auto& n : example_names()) list += (list.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::kConfig, "unknown example '" + name + "'; available: " + list);
  }
  return it->second();
}

}  // namespace carnot
