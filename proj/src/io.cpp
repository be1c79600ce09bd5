#include "flowstep/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace flowstep {

namespace {

std::vector<double> coefficients(const PolynomialD& p) {
  std::vector<double> out(p.coefficients().data(), p.coefficients().data() + p.coefficients().size());
  return out;
}

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  const Json& a = j.at(key);
  if (!a.is_array() || a.empty()) throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorKind::ParseError, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream os;
  os << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json to_json(const MultistepMethod& m) {
  return Json{{"rho", coefficients(m.rho())}, {"sigma", coefficients(m.sigma())}, {"h", m.h()}};
}

MultistepMethod method_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "method must be a JSON object");
  const auto rho = number_array(j, "rho");
  const auto sigma = number_array(j, "sigma");
  const double h = number(j, "h");
  try {
    return MultistepMethod(PolynomialD::from_vector(rho), PolynomialD::from_vector(sigma), h);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

Json to_json(const QuadraticProblem& q, const std::vector<std::string>& tags) {
  Json A = Json::array();
  for (int i = 0; i < q.A().rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < q.A().cols(); ++j) row.push_back(q.A()(i, j));
    A.push_back(std::move(row));
  }
  return Json{{"type", "quadratic"},
              {"name", q.name()},
              {"A", std::move(A)},
              {"b", std::vector<double>(q.b().data(), q.b().data() + q.b().size())},
              {"mu", q.mu()},
              {"L", q.L()},
              {"seed", q.seed()},
              {"tags", tags}};
}

QuadraticProblem quadratic_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "problem must be a JSON object");
  if (j.contains("type") && j.at("type") != "quadratic")
    throw Error(ErrorKind::ParseError, "only quadratic problems are serialised");
  if (!j.contains("A") || !j.at("A").is_array() || j.at("A").empty())
    throw Error(ErrorKind::ParseError, "missing matrix 'A'");
  const auto b = number_array(j, "b");
  const Json& rows = j.at("A");
  const auto n = static_cast<Eigen::Index>(b.size());
  if (static_cast<Eigen::Index>(rows.size()) != n) throw Error(ErrorKind::ParseError, "A and b sizes differ");
  Matrix A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(ErrorKind::ParseError, "A must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!row.at(static_cast<std::size_t>(k)).is_number()) throw Error(ErrorKind::ParseError, "A must hold numbers");
      A(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  const std::string name = j.value("name", std::string("quadratic"));
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  return QuadraticProblem(std::move(A), Eigen::Map<const Vector>(b.data(), n), name, seed);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& os, const CsvHeader& header, int dimension, bool labelled) {
  if (header.method) os << "# method: " << header.method->dump() << '\n';
  os << "# seed: " << header.seed << '\n';
  if (!header.reproducible) os << "# generated: " << utc_timestamp() << '\n';
  if (labelled) os << "method,";
  os << "k,t_k,h_k";
  for (int i = 1; i <= dimension; ++i) os << ",x_" << i;
  os << ",f_gap,dist_to_opt\n";
}

void write_trajectory_rows(std::ostream& os, const Trajectory& traj, const SmoothProblem& p, const std::string* label) {
  double t = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k > 0) t += traj.step(k - 1);
    if (label) os << *label << ',';
    os << k << ',' << format_number(t) << ',' << format_number(traj.step(k));
    const Vector& x = traj[k];
    for (Eigen::Index i = 0; i < x.size(); ++i) os << ',' << format_number(x[i]);
    os << ',';
    if (p.optimal_value) os << format_number(p.value(x) - *p.optimal_value);
    os << ',';
    if (p.minimizer) os << format_number((x - *p.minimizer).norm());
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SmoothProblem& p, const CsvHeader& header) {
  write_csv_header(os, header, traj.empty() ? p.dimension : static_cast<int>(traj[0].size()), false);
  write_trajectory_rows(os, traj, p);
}

Json rate_summary(const std::string& method, std::uint64_t problem_seed, double fitted_rate, double predicted_rate,
                  double r_squared) {
  return Json{{"method", method},
              {"problem_seed", problem_seed},
              {"fitted_rate", fitted_rate},
              {"predicted_rate", predicted_rate},
              {"r_squared", r_squared}};
}

}  // namespace flowstep
