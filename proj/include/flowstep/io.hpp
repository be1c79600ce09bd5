#pragma once

// JSON and CSV exchange formats.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flowstep/multistep.hpp"
#include "flowstep/problems.hpp"

namespace flowstep {

using Json = nlohmann::json;

/// {"rho": [...], "sigma": [...], "h": ...}, coefficients in ascending powers.
Json to_json(const MultistepMethod& m);
MultistepMethod method_from_json(const Json& j);

/// {"type": "quadratic", "A": [[...]], "b": [...], "mu", "L", "seed", "tags": [...]}.
Json to_json(const QuadraticProblem& q, const std::vector<std::string>& tags = {});
QuadraticProblem quadratic_from_json(const Json& j);

/// Reads and parses a whole file. Throws ParseError on malformed JSON and
/// std::ios_base::failure when the file cannot be read.
Json read_json_file(const std::string& path);

struct CsvHeader {
  std::optional<Json> method;  // written as "# method: {...}"
  std::uint64_t seed = 0;
  bool reproducible = false;   // drops the "# generated:" timestamp line
};

/// Writes the comment block, then the column row
///   [method,]k,t_k,h_k,x_1..x_d,f_gap,dist_to_opt
/// where the leading method column appears only when `label` columns are
/// requested through write_trajectory_rows.
void write_csv_header(std::ostream& os, const CsvHeader& header, int dimension, bool labelled);

/// One row per iterate. f_gap and dist_to_opt need the problem's optimal
/// value and minimiser; they are written empty when unknown.
void write_trajectory_rows(std::ostream& os, const Trajectory& traj, const SmoothProblem& p,
                           const std::string* label = nullptr);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SmoothProblem& p, const CsvHeader& header);

/// ISO 8601, UTC.
std::string utc_timestamp();

/// %.17g, so a value survives a text round trip.
std::string format_number(double v);

Json rate_summary(const std::string& method, std::uint64_t problem_seed, double fitted_rate, double predicted_rate,
                  double r_squared);

}  // namespace flowstep
