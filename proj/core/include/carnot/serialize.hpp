#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "carnot/ballbox.hpp"
#include "carnot/flag.hpp"
#include "carnot/privileged.hpp"
#include "carnot/value.hpp"

namespace carnot {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for non-finite values).
std::string format_double(double x);

Json to_json(const BracketWord& word);
Json to_json(const FlagReport& report);
/// Coefficient table: [{"exponents": [..], "coefficient": "p/q"}, ...] in monomial order.
Json to_json(const TruncatedPolynomial& p);
Json to_json(const PolyVectorField& f);
Json to_json(const PrivilegedChart& chart);
Json to_json(const PrivilegedReport& report);
Json to_json(const SeriesApproxSystem& series);
Json to_json(const ControlSignal& u);
Json to_json(const ValueEstimate& estimate);
Json to_json(const OuterFit& fit);
Json to_json(const TimeBoundFit& fit);
Json to_json(const HolderFit& fit);

/// Double that serializes as null when not finite.
Json finite_or_null(double x);

/// RFC 4180 writer: CRLF line ends, fields quoted when they contain ',', '"', CR or LF.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);
  const std::string& str() const { return out_; }

 private:
  void write(const std::vector<std::string>& fields);
  std::size_t columns_;
  std::string out_;
};

/// Columns t, x1..xn.
std::string trajectory_csv(const Trajectory& traj);
/// Columns x1..xn, cost, T_used, seed, segments, ok, error.
std::string cloud_csv(const ReachCloud& cloud);

/// Writes text to path, creating parent directories. Throws kConfig on I/O failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace carnot
