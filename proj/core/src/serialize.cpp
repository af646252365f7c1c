#include "carnot/serialize.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "carnot/errors.hpp"

namespace carnot {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const BracketWord& word) {
  Json j = Json::array();
  for (int l : word.letters) j.push_back(l + 1);
  return j;
}

Json to_json(const FlagReport& report) {
  Json basis = Json::array();
  for (const auto& v : report.adapted_basis) {
    Json e;
    e["word"] = to_json(v.word);
    e["weight"] = v.weight;
    if (!v.value.empty()) {
      Json val = Json::array();
      for (const auto& x : v.value) val.push_back(to_string(x));
      e["value"] = val;
    } else {
      e["value"] = v.approx;
    }
    basis.push_back(e);
  }
  Json j;
  j["growth"] = report.growth;
  j["r"] = report.r;
  j["weights"] = std::vector<int>(report.weights.values().begin(), report.weights.values().end());
  j["adapted_basis"] = basis;
  j["approximate_rank"] = report.approximate_rank;
  return j;
}

Json to_json(const TruncatedPolynomial& p) {
  Json j = Json::array();
  for (const auto& [alpha, c] : p.terms()) {
    std::vector<int> e;
    for (int i = 0; i < p.dim(); ++i) e.push_back(alpha[i]);
    j.push_back({{"exponents", e}, {"coefficient", to_string(c)}});
  }
  return j;
}

Json to_json(const PolyVectorField& f) {
  Json j;
  j["literal"] = format_vector_field(f);
  j["cap"] = f.cap();
  j["truncated"] = f.truncated();
  return j;
}

Json to_json(const PrivilegedChart& chart) {
  Json j;
  Json center = Json::array();
  for (const auto& x : chart.center) center.push_back(to_string(x));
  j["center"] = center;
  j["weights"] = std::vector<int>(chart.weights.values().begin(), chart.weights.values().end());
  j["r"] = chart.r;
  j["cap"] = chart.cap;
  j["s"] = chart.drift_order ? Json(*chart.drift_order) : Json(nullptr);
  j["rectified_axis"] = chart.rectified_axis ? Json(*chart.rectified_axis + 1) : Json(nullptr);
  Json fwd = Json::array();
  Json inv = Json::array();
  for (const auto& p : chart.forward) fwd.push_back({{"literal", format_polynomial(p)}, {"terms", to_json(p)}});
  for (const auto& p : chart.inverse) inv.push_back({{"literal", format_polynomial(p)}, {"terms", to_json(p)}});
  j["forward"] = fwd;
  j["inverse"] = inv;
  return j;
}

Json to_json(const PrivilegedReport& report) {
  Json j;
  j["orders"] = report.orders;
  j["pass"] = std::vector<bool>(report.pass.begin(), report.pass.end());
  j["all_pass"] = report.all_pass;
  return j;
}

Json to_json(const SeriesApproxSystem& series) {
  Json j;
  j["s"] = series.s;
  j["rho"] = series.rho;
  j["weights"] = std::vector<int>(series.weights.values().begin(), series.weights.values().end());
  Json gens = Json::array();
  for (const auto& terms : series.terms) {
    Json g = Json::array();
    for (const auto& [l, f] : terms) g.push_back({{"order", l}, {"degree", -l * series.s - 1}, {"field", format_vector_field(f)}});
    gens.push_back(g);
  }
  j["generators"] = gens;
  return j;
}

Json to_json(const ControlSignal& u) {
  Json j;
  j["breakpoints"] = u.breakpoints();
  j["values"] = u.values();
  j["cost"] = u.cost();
  return j;
}

Json to_json(const ValueEstimate& e) {
  Json j;
  j["upper"] = e.upper;
  j["lower"] = e.lower ? Json(*e.lower) : Json(nullptr);
  j["endpoint"] = e.endpoint;
  j["endpoint_error"] = e.endpoint_error;
  j["tolerance"] = e.tolerance;
  j["horizon_used"] = e.horizon_used;
  j["feasible_count"] = e.feasible_count;
  j["min_feasible_cost"] = finite_or_null(e.min_feasible_cost);
  j["evaluations"] = e.evaluations;
  j["witness"] = to_json(e.witness);
  return j;
}

Json to_json(const OuterFit& fit) {
  Json j;
  j["C"] = finite_or_null(fit.C);
  j["points"] = fit.points;
  j["argmax"] = fit.argmax;
  j["extremal_point"] = fit.extremal_point;
  return j;
}

Json to_json(const TimeBoundFit& fit) {
  Json j;
  j["C"] = finite_or_null(fit.C);
  j["finite"] = fit.finite;
  j["argmax"] = fit.argmax;
  j["outliers"] = fit.outliers;
  return j;
}

Json to_json(const HolderFit& fit) {
  Json j;
  j["alpha"] = fit.alpha;
  j["intercept"] = fit.intercept;
  j["C1"] = fit.C1;
  j["C2"] = fit.C2;
  j["pairs"] = fit.pairs;
  j["decades"] = fit.decades;
  return j;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { write(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error(ErrorCode::kInvalidArgument, "csv row width differs from header");
  write(fields);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (double v : values) f.push_back(format_double(v));
  row(f);
}

void CsvWriter::write(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    const auto& s = fields[i];
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
      out_ += s;
      continue;
    }
    out_ += '"';
    for (char c : s) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }
  out_ += "\r\n";
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t n = traj.endpoint.size();
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
  CsvWriter w(header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> r{traj.times[k]};
    r.insert(r.end(), traj.states[k].begin(), traj.states[k].end());
    w.row(r);
  }
  return w.str();
}

std::string cloud_csv(const ReachCloud& cloud) {
  std::size_t n = 0;
  for (const auto& r : cloud.records) n = std::max(n, r.endpoint.size());
  std::vector<std::string> header;
  for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
  for (const char* h : {"cost", "T_used", "seed", "segments", "ok", "error"}) header.emplace_back(h);
  CsvWriter w(header);
  for (const auto& r : cloud.records) {
    std::vector<std::string> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back(i < r.endpoint.size() ? format_double(r.endpoint[i]) : "");
    f.push_back(format_double(r.cost));
    f.push_back(format_double(r.horizon));
    f.push_back(std::to_string(r.seed));
    f.push_back(std::to_string(r.segments));
    f.push_back(r.ok ? "1" : "0");
    f.push_back(r.error);
    w.row(f);
  }
  return w.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kConfig, "write failed for '" + path + "'");
}

}  // namespace carnot
