#include "bgeps/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bgeps {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail_at(const std::string& name, std::size_t line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& field, const std::string& name, std::size_t line) {
  const std::string t = trim(field);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    fail_at(name, line, "expected a number, got '" + field + "'");
  }
  if (pos != t.size()) fail_at(name, line, "trailing characters after number in '" + field + "'");
  return v;
}

json params_to_json(const BgepsParams& p) {
  json j;
  j["family"] = p.family.spec_string();
  j["alpha1"] = p.alpha1;
  j["alpha2"] = p.alpha2;
  j["alpha3"] = p.alpha3;
  j["lambda"] = p.lambda;
  if (p.family.has_theta_parameter())
    j["theta"] = p.theta;
  else
    j["theta"] = nullptr;
  return j;
}

BgepsParams params_from_json(const json& j) {
  const PowerSeriesFamily family = PowerSeriesFamily::parse_spec(j.at("family").get<std::string>());
  const double theta = j.at("theta").is_null() ? 1.0 : j.at("theta").get<double>();
  return {j.at("alpha1").get<double>(), j.at("alpha2").get<double>(),
          j.at("alpha3").get<double>(), j.at("lambda").get<double>(), theta, family};
}

json metadata_to_json(const std::map<std::string, std::string>& metadata) {
  json j = json::object();
  for (const auto& [k, v] : metadata) j[k] = v;
  return j;
}

std::map<std::string, std::string> metadata_from_json(const json& j) {
  std::map<std::string, std::string> m;
  if (j.is_object())
    for (const auto& [k, v] : j.items()) m[k] = v.get<std::string>();
  return m;
}

void append_param_line(std::ostream& out, const std::string& label, double value,
                       const double* se) {
  out << label << "  " << fmt17(value) << '\n';
  if (se)
    out << "  (se)  " << fmt17(*se) << '\n';
  else
    out << "  (se)  ---\n";
}

}  // namespace

BivariateSample load_csv_stream(std::istream& in, const std::string& name, double scale,
                                double tie_tol) {
  if (!(scale > 0.0)) throw std::invalid_argument("load_csv: scale must be positive");
  if (tie_tol < 0.0) throw std::invalid_argument("load_csv: tie_tol must be >= 0");

  std::vector<std::pair<double, double>> pairs;
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_data && !t.empty() &&
        (std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '"')) {
      // Optional single header line.
      std::string squeezed;
      for (char c : t)
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '"') squeezed += c;
      if (squeezed == "y1,y2") {
        saw_data = true;  // header only allowed once, before any data row
        continue;
      }
      fail_at(name, line_no, "unrecognized header '" + t + "' (expected 'y1,y2')");
    }
    saw_data = true;

    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      fail_at(name, line_no, "expected exactly two comma-separated values");
    double a = parse_double(t.substr(0, comma), name, line_no) * scale;
    double b = parse_double(t.substr(comma + 1), name, line_no) * scale;
    if (!(a > 0.0) || !(b > 0.0))
      fail_at(name, line_no, "coordinates must be strictly positive");
    if (std::fabs(a - b) <= tie_tol * std::max(a, b)) {
      const double mid = 0.5 * (a + b);
      a = mid;
      b = mid;
    }
    pairs.emplace_back(a, b);
  }
  if (pairs.empty()) throw std::runtime_error(name + ": no data rows");
  return BivariateSample::from_pairs(pairs);
}

BivariateSample load_csv(const std::string& path, double scale, double tie_tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return load_csv_stream(in, path, scale, tie_tol);
}

void write_csv(const BivariateSample& sample, std::ostream& out, const std::string& metadata) {
  if (!metadata.empty()) {
    std::istringstream lines(metadata);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "y1,y2\n";
  for (std::size_t i = 0; i < sample.size(); ++i)
    out << fmt17(sample.y1[i]) << ',' << fmt17(sample.y2[i]) << '\n';
}

std::string write_report(const FitReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j;
    j["schema_version"] = 1;
    j["type"] = "fit_report";
    j["estimates"] = params_to_json(report.estimates);
    if (report.se_ok)
      j["standard_errors"] = report.standard_errors;
    else
      j["standard_errors"] = nullptr;
    j["loglik"] = report.loglik;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["theta_boundary"] = report.theta_boundary;
    j["theta_infeasible_events"] = report.theta_infeasible_events;
    j["loglik_decreases"] = report.loglik_decreases;
    if (std::isfinite(report.max_scaled_gradient))
      j["max_scaled_gradient"] = report.max_scaled_gradient;
    else
      j["max_scaled_gradient"] = nullptr;
    json traj = json::array();
    for (const auto& it : report.trajectory) {
      json row = json::array();
      for (double v : it.params) row.push_back(v);
      row.push_back(it.loglik);
      traj.push_back(row);
    }
    j["trajectory"] = traj;
    j["metadata"] = metadata_to_json(report.metadata);
    return j.dump(2) + "\n";
  }

  // Text: one fitted model per column, in the layout of a comparison table.
  std::ostringstream out;
  const auto& p = report.estimates;
  out << "family  " << p.family.spec_string() << '\n';
  const bool se = report.se_ok;
  append_param_line(out, "alpha1", p.alpha1, se ? &report.standard_errors[0] : nullptr);
  append_param_line(out, "alpha2", p.alpha2, se ? &report.standard_errors[1] : nullptr);
  append_param_line(out, "alpha3", p.alpha3, se ? &report.standard_errors[2] : nullptr);
  append_param_line(out, "lambda", p.lambda, se ? &report.standard_errors[3] : nullptr);
  if (p.family.has_theta_parameter())
    append_param_line(out, "theta", p.theta, se ? &report.standard_errors[4] : nullptr);
  else
    out << "theta  ---\n  (se)  ---\n";
  out << "loglik  " << fmt17(report.loglik) << '\n';
  out << "iterations  " << report.iterations << '\n';
  out << "converged  " << (report.converged ? "yes" : "no") << '\n';
  for (const auto& [k, v] : report.metadata) out << "# " << k << ": " << v << '\n';
  return out.str();
}

std::string write_report(const GofReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j;
    j["schema_version"] = 1;
    j["type"] = "gof_report";
    j["loglik"] = report.loglik;
    j["n_params"] = report.n_params;
    j["n_obs"] = report.n_obs;
    j["aic"] = report.aic;
    if (report.aicc)
      j["aicc"] = *report.aicc;
    else
      j["aicc"] = nullptr;
    j["bic"] = report.bic;
    j["ks"] = {
        {"y1", {{"statistic", report.ks_y1.statistic}, {"p_value", report.ks_y1.p_value}}},
        {"y2", {{"statistic", report.ks_y2.statistic}, {"p_value", report.ks_y2.p_value}}},
        {"max", {{"statistic", report.ks_max.statistic}, {"p_value", report.ks_max.p_value}}},
    };
    if (report.lrt)
      j["lrt"] = {{"statistic", report.lrt->statistic}, {"p_value", report.lrt->p_value}};
    else
      j["lrt"] = nullptr;
    j["metadata"] = metadata_to_json(report.metadata);
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "loglik  " << fmt17(report.loglik) << '\n';
  out << "AIC  " << fmt17(report.aic) << '\n';
  out << "AICC  " << (report.aicc ? fmt17(*report.aicc) : std::string("---")) << '\n';
  out << "BIC  " << fmt17(report.bic) << '\n';
  out << "K-S (Y1)  " << fmt17(report.ks_y1.statistic) << "  (p " << fmt17(report.ks_y1.p_value)
      << ")\n";
  out << "K-S (Y2)  " << fmt17(report.ks_y2.statistic) << "  (p " << fmt17(report.ks_y2.p_value)
      << ")\n";
  out << "K-S (max)  " << fmt17(report.ks_max.statistic) << "  (p "
      << fmt17(report.ks_max.p_value) << ")\n";
  if (report.lrt)
    out << "LRT  " << fmt17(report.lrt->statistic) << "  (p " << fmt17(report.lrt->p_value)
        << ")\n";
  else
    out << "LRT  ---\n";
  for (const auto& [k, v] : report.metadata) out << "# " << k << ": " << v << '\n';
  return out.str();
}

FitReport read_fit_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.at("type").get<std::string>() != "fit_report")
    throw std::runtime_error("read_fit_report: not a fit report");
  FitReport r{.estimates = params_from_json(j.at("estimates"))};
  if (!j.at("standard_errors").is_null()) {
    r.standard_errors = j.at("standard_errors").get<std::vector<double>>();
    r.se_ok = true;
  }
  r.loglik = j.at("loglik").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.theta_boundary = j.at("theta_boundary").get<bool>();
  r.theta_infeasible_events = j.at("theta_infeasible_events").get<int>();
  r.loglik_decreases = j.at("loglik_decreases").get<int>();
  if (!j.at("max_scaled_gradient").is_null())
    r.max_scaled_gradient = j.at("max_scaled_gradient").get<double>();
  for (const auto& row : j.at("trajectory")) {
    FitIterate it{};
    for (std::size_t i = 0; i < 5; ++i) it.params[i] = row.at(i).get<double>();
    it.loglik = row.at(5).get<double>();
    r.trajectory.push_back(it);
  }
  r.metadata = metadata_from_json(j.at("metadata"));
  return r;
}

GofReport read_gof_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.at("type").get<std::string>() != "gof_report")
    throw std::runtime_error("read_gof_report: not a gof report");
  GofReport g{};
  g.loglik = j.at("loglik").get<double>();
  g.n_params = j.at("n_params").get<int>();
  g.n_obs = j.at("n_obs").get<std::size_t>();
  g.aic = j.at("aic").get<double>();
  if (!j.at("aicc").is_null()) g.aicc = j.at("aicc").get<double>();
  g.bic = j.at("bic").get<double>();
  auto read_test = [&](const json& t) {
    return TestResult{t.at("statistic").get<double>(), t.at("p_value").get<double>()};
  };
  g.ks_y1 = read_test(j.at("ks").at("y1"));
  g.ks_y2 = read_test(j.at("ks").at("y2"));
  g.ks_max = read_test(j.at("ks").at("max"));
  if (!j.at("lrt").is_null()) g.lrt = read_test(j.at("lrt"));
  g.metadata = metadata_from_json(j.at("metadata"));
  return g;
}

}  // namespace bgeps
