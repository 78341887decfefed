#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bgeps/density_grid.hpp"
#include "bgeps/em.hpp"
#include "bgeps/io.hpp"
#include "bgeps/model_select.hpp"
#include "bgeps/sampler.hpp"
#include "bgeps/version.hpp"

namespace {

using namespace bgeps;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string field;
  while (std::getline(in, field, sep)) parts.push_back(field);
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw std::runtime_error(what + ": bad number '" + s + "'");
  return v;
}

BgepsParams parse_init(const std::string& init, const PowerSeriesFamily& family) {
  const auto parts = split(init, ',');
  const bool with_theta = family.has_theta_parameter();
  if (parts.size() != 5 && !(parts.size() == 4 && !with_theta))
    throw std::runtime_error("--init expects 'a1,a2,a3,lambda,theta' or 'auto'");
  const double theta = parts.size() == 5 && with_theta ? parse_number(parts[4], "--init theta") : 1.0;
  return {parse_number(parts[0], "--init alpha1"), parse_number(parts[1], "--init alpha2"),
          parse_number(parts[2], "--init alpha3"), parse_number(parts[3], "--init lambda"),
          theta, family};
}

BgepsParams params_from_flags(const std::string& family_spec, double a1, double a2, double a3,
                              double lambda, double theta) {
  const PowerSeriesFamily family = PowerSeriesFamily::parse_spec(family_spec);
  if (family.has_theta_parameter() && std::isnan(theta))
    throw std::runtime_error("--theta is required for family '" + family_spec + "'");
  return {a1, a2, a3, lambda, family.has_theta_parameter() ? theta : 1.0, family};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::F1:
      return "f1";
    case Branch::F2:
      return "f2";
    case Branch::F0:
      return "f0";
  }
  return "";
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
  std::string family;
  std::string input;
  double scale = 1.0;
  double tie_tol = 0.0;
  std::string init = "auto";
  double tol = 1e-8;
  int max_iter = 2000;
  std::string output;
  std::string format = "json";
};

int run_fit(const FitArgs& a) {
  if (a.format != "json" && a.format != "text")
    throw std::runtime_error("--format must be json or text");
  const PowerSeriesFamily family = PowerSeriesFamily::parse_spec(a.family);
  const BivariateSample data = load_csv(a.input, a.scale, a.tie_tol);

  FitOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  if (a.init != "auto") opts.init = parse_init(a.init, family);

  FitReport report = fit(data, family, opts);
  report.metadata["library_version"] = kLibraryVersion;
  report.metadata["flags"] = "fit --family " + a.family + " --input " + a.input +
                             " --scale " + fmt17(a.scale) + " --tie-tol " + fmt17(a.tie_tol) +
                             " --init " + a.init + " --tol " + fmt17(a.tol) + " --max-iter " +
                             std::to_string(a.max_iter) + " --format " + a.format;
  write_output(a.output,
               write_report(report, a.format == "json" ? ReportFormat::Json : ReportFormat::Text));
  return report.converged ? 0 : 2;
}

// ----------------------------------------------------------- simulate ----

struct SimulateArgs {
  std::string family;
  double alpha1 = 0, alpha2 = 0, alpha3 = 0;
  double lambda = 0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string output;
};

int run_simulate(const SimulateArgs& a) {
  const BgepsParams params =
      params_from_flags(a.family, a.alpha1, a.alpha2, a.alpha3, a.lambda, a.theta);
  const BivariateSample sample_out = sample({params, a.n, a.seed});

  std::ostringstream meta;
  meta << "rng: " << kRngAlgorithm << '\n';
  meta << "seed: " << a.seed << '\n';
  meta << "library_version: " << kLibraryVersion << '\n';
  meta << "flags: simulate --family " << a.family << " --alpha1 " << fmt17(a.alpha1)
       << " --alpha2 " << fmt17(a.alpha2) << " --alpha3 " << fmt17(a.alpha3) << " --lambda "
       << fmt17(a.lambda);
  if (params.family.has_theta_parameter()) meta << " --theta " << fmt17(a.theta);
  meta << " --n " << a.n << " --seed " << a.seed;

  std::ostringstream out;
  write_csv(sample_out, out, meta.str());
  write_output(a.output, out.str());
  return 0;
}

// ---------------------------------------------------------------- gof ----

struct GofArgs {
  std::string input;
  std::string fit_path;
  std::string bge_fit_path;
  std::string family;
  double alpha1 = 0, alpha2 = 0, alpha3 = 0;
  double lambda = 0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::string output;
};

int run_gof(const GofArgs& a) {
  const BivariateSample data = load_csv(a.input);

  BgepsParams params = [&] {
    if (!a.fit_path.empty()) return read_fit_report(read_file(a.fit_path)).estimates;
    if (a.family.empty())
      throw std::runtime_error("gof needs --fit or inline --family/--alpha*/--lambda parameters");
    return params_from_flags(a.family, a.alpha1, a.alpha2, a.alpha3, a.lambda, a.theta);
  }();

  std::optional<double> bge_loglik;
  if (!a.bge_fit_path.empty()) {
    const FitReport bge = read_fit_report(read_file(a.bge_fit_path));
    if (bge.estimates.family.has_theta_parameter())
      throw std::runtime_error("--bge-fit must reference a degenerate-family fit");
    bge_loglik = log_likelihood(bge.estimates, data);
  }

  GofReport report = gof_report(data, params, bge_loglik);
  report.metadata["library_version"] = kLibraryVersion;
  report.metadata["family"] = params.family.spec_string();
  report.metadata["flags"] = "gof --input " + a.input +
                             (a.fit_path.empty() ? "" : " --fit " + a.fit_path) +
                             (a.bge_fit_path.empty() ? "" : " --bge-fit " + a.bge_fit_path);
  write_output(a.output, write_report(report, ReportFormat::Json));
  return 0;
}

// ------------------------------------------------------------- compare ----

struct CompareArgs {
  std::string input;
  std::string families;
  std::string k_range;
  std::string output;
};

struct CompareRow {
  std::string label;
  FitReport report;
  GofReport gof;
};

std::vector<int> parse_k_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw std::runtime_error("--k-range expects 'lo:hi'");
  const int lo = static_cast<int>(parse_number(parts[0], "--k-range lo"));
  const int hi = static_cast<int>(parse_number(parts[1], "--k-range hi"));
  if (lo < 1 || hi < lo) throw std::runtime_error("--k-range expects 1 <= lo <= hi");
  std::vector<int> ks;
  for (int k = lo; k <= hi; ++k) ks.push_back(k);
  return ks;
}

void append_row(std::ostringstream& out, const CompareRow& row) {
  const auto& p = row.report.estimates;
  const bool se = row.report.se_ok;
  const bool with_theta = p.family.has_theta_parameter();
  auto cell = [&](double v) { return fmt6(v); };
  out << row.label << ',';
  out << (with_theta && p.family.replicas() > 0 ? std::to_string(p.family.replicas()) : "") << ',';
  out << cell(p.alpha1) << ',' << (se ? cell(row.report.standard_errors[0]) : "") << ',';
  out << cell(p.alpha2) << ',' << (se ? cell(row.report.standard_errors[1]) : "") << ',';
  out << cell(p.alpha3) << ',' << (se ? cell(row.report.standard_errors[2]) : "") << ',';
  out << cell(p.lambda) << ',' << (se ? cell(row.report.standard_errors[3]) : "") << ',';
  out << (with_theta ? cell(p.theta) : "") << ','
      << (with_theta && se ? cell(row.report.standard_errors[4]) : "") << ',';
  out << cell(row.gof.loglik) << ',' << cell(row.gof.aic) << ','
      << (row.gof.aicc ? cell(*row.gof.aicc) : "") << ',' << cell(row.gof.bic) << ',';
  out << cell(row.gof.ks_y1.statistic) << ',' << cell(row.gof.ks_y1.p_value) << ',';
  out << cell(row.gof.ks_y2.statistic) << ',' << cell(row.gof.ks_y2.p_value) << ',';
  out << cell(row.gof.ks_max.statistic) << ',' << cell(row.gof.ks_max.p_value) << ',';
  if (row.gof.lrt)
    out << cell(row.gof.lrt->statistic) << ',' << cell(row.gof.lrt->p_value) << ',';
  else
    out << ",,";
  out << (row.report.converged ? "yes" : "no") << '\n';
}

int run_compare(const CompareArgs& a) {
  const BivariateSample data = load_csv(a.input);
  const auto family_specs = split(a.families, ',');
  if (family_specs.empty()) throw std::runtime_error("--families must list at least one family");

  const FitReport bge_fit = fit(data, PowerSeriesFamily::degenerate());
  const double bge_loglik = bge_fit.loglik;

  std::vector<CompareRow> rows;
  rows.push_back({"degenerate", bge_fit, gof_report(data, bge_fit.estimates)});

  // Fig-2 style (k, loglik) tables for swept families.
  std::vector<std::pair<std::string, std::string>> sweep_tables;

  for (const std::string& spec : family_specs) {
    if (spec == "degenerate") continue;  // baseline row already present
    if (spec == "binomial" || spec == "negbinomial") {
      if (a.k_range.empty())
        throw std::runtime_error("family '" + spec + "' without :k needs --k-range");
      const FamilyKind kind =
          spec == "binomial" ? FamilyKind::Binomial : FamilyKind::NegativeBinomial;
      const KSweepResult sweep = k_sweep(data, kind, parse_k_range(a.k_range));

      std::ostringstream table;
      table << "k,loglik,converged\n";
      for (const auto& entry : sweep.entries) {
        if (entry.failed)
          table << entry.k << ",,failed: " << entry.error << '\n';
        else
          table << entry.k << ',' << fmt17(entry.report->loglik) << ','
                << (entry.report->converged ? "yes" : "no") << '\n';
      }
      sweep_tables.emplace_back(spec, table.str());

      if (sweep.best_index < 0) throw std::runtime_error("k sweep for '" + spec + "' failed at every k");
      const auto& best = sweep.entries[static_cast<std::size_t>(sweep.best_index)];
      rows.push_back({spec + ":" + std::to_string(best.k), *best.report,
                      gof_report(data, best.report->estimates, bge_loglik)});
      continue;
    }
    const PowerSeriesFamily family = PowerSeriesFamily::parse_spec(spec);
    const FitReport report = fit(data, family);
    rows.push_back({spec, report, gof_report(data, report.estimates, bge_loglik)});
  }

  std::ostringstream out;
  out << "family,k,alpha1,se_alpha1,alpha2,se_alpha2,alpha3,se_alpha3,lambda,se_lambda,"
         "theta,se_theta,loglik,aic,aicc,bic,ks_y1,ks_y1_p,ks_y2,ks_y2_p,ks_max,ks_max_p,"
         "lrt,lrt_p,converged\n";
  for (const auto& row : rows) append_row(out, row);

  if (a.output.empty()) {
    std::cout << out.str();
    for (const auto& [name, table] : sweep_tables) {
      std::cout << "# sweep " << name << '\n' << table;
    }
  } else {
    write_output(a.output, out.str());
    for (const auto& [name, table] : sweep_tables)
      write_output(a.output + ".sweep." + name + ".csv", table);
  }
  return 0;
}

// -------------------------------------------------------- density grid ----

struct GridArgs {
  std::string family;
  double alpha1 = 0, alpha2 = 0, alpha3 = 0;
  double lambda = 1.0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::string grid = "40";
  double range = 3.0;
  std::string output;
};

int run_density_grid(const GridArgs& a) {
  const BgepsParams params =
      params_from_flags(a.family, a.alpha1, a.alpha2, a.alpha3, a.lambda, a.theta);
  // accept "n" or "nxn"
  std::string g = a.grid;
  const auto x = g.find('x');
  if (x != std::string::npos) {
    const std::string lhs = g.substr(0, x), rhs = g.substr(x + 1);
    if (lhs != rhs) throw std::runtime_error("--grid must be square, got '" + g + "'");
    g = lhs;
  }
  const int n = static_cast<int>(parse_number(g, "--grid"));
  if (n < 1) throw std::runtime_error("--grid must be >= 1");

  const auto rows = density_grid(params, n, a.range);
  std::ostringstream out;
  out << "y1,y2,branch,density\n";
  for (const auto& row : rows)
    out << fmt17(row.y1) << ',' << fmt17(row.y2) << ',' << branch_name(row.branch) << ','
        << fmt17(row.density) << '\n';
  write_output(a.output, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bivariate generalized exponential power-series toolkit"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model to a CSV dataset by EM");
  fit_cmd->add_option("--family", fit_args.family, "family spec (geometric, poisson, logarithmic, binomial:k, negbinomial:k, poly:a1,a2,..., degenerate)")->required();
  fit_cmd->add_option("--input", fit_args.input, "input CSV of y1,y2 rows")->required();
  fit_cmd->add_option("--scale", fit_args.scale, "multiply all loaded values by this factor");
  fit_cmd->add_option("--tie-tol", fit_args.tie_tol, "relative tolerance for merging near-ties");
  fit_cmd->add_option("--init", fit_args.init, "'auto' or a1,a2,a3,lambda,theta");
  fit_cmd->add_option("--tol", fit_args.tol, "convergence tolerance");
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "iteration cap");
  fit_cmd->add_option("--output", fit_args.output, "report path (stdout when omitted)");
  fit_cmd->add_option("--format", fit_args.format, "json or text");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "draw from the model and emit CSV");
  sim_cmd->add_option("--family", sim_args.family, "family spec")->required();
  sim_cmd->add_option("--alpha1", sim_args.alpha1, "first shape")->required();
  sim_cmd->add_option("--alpha2", sim_args.alpha2, "second shape")->required();
  sim_cmd->add_option("--alpha3", sim_args.alpha3, "shared shape")->required();
  sim_cmd->add_option("--lambda", sim_args.lambda, "rate")->required();
  sim_cmd->add_option("--theta", sim_args.theta, "power-series parameter");
  sim_cmd->add_option("--n", sim_args.n, "number of draws")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "rng seed");
  sim_cmd->add_option("--output", sim_args.output, "CSV path (stdout when omitted)");

  GofArgs gof_args;
  CLI::App* gof_cmd = app.add_subcommand("gof", "goodness-of-fit panel for fitted parameters");
  gof_cmd->add_option("--input", gof_args.input, "input CSV")->required();
  gof_cmd->add_option("--fit", gof_args.fit_path, "fit report JSON holding the parameters");
  gof_cmd->add_option("--bge-fit", gof_args.bge_fit_path, "degenerate-family fit report for the LRT");
  gof_cmd->add_option("--family", gof_args.family, "family spec (inline parameters)");
  gof_cmd->add_option("--alpha1", gof_args.alpha1, "first shape (inline)");
  gof_cmd->add_option("--alpha2", gof_args.alpha2, "second shape (inline)");
  gof_cmd->add_option("--alpha3", gof_args.alpha3, "shared shape (inline)");
  gof_cmd->add_option("--lambda", gof_args.lambda, "rate (inline)");
  gof_cmd->add_option("--theta", gof_args.theta, "power-series parameter (inline)");
  gof_cmd->add_option("--output", gof_args.output, "report path (stdout when omitted)");

  CompareArgs cmp_args;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "fit several families and tabulate the comparison");
  cmp_cmd->add_option("--input", cmp_args.input, "input CSV")->required();
  cmp_cmd->add_option("--families", cmp_args.families, "comma-separated family specs")->required();
  cmp_cmd->add_option("--k-range", cmp_args.k_range, "lo:hi sweep for bare binomial/negbinomial");
  cmp_cmd->add_option("--output", cmp_args.output, "table path (stdout when omitted)");

  GridArgs grid_args;
  CLI::App* grid_cmd = app.add_subcommand("density-grid", "emit the joint density on a grid");
  grid_cmd->add_option("--family", grid_args.family, "family spec")->required();
  grid_cmd->add_option("--alpha1", grid_args.alpha1, "first shape")->required();
  grid_cmd->add_option("--alpha2", grid_args.alpha2, "second shape")->required();
  grid_cmd->add_option("--alpha3", grid_args.alpha3, "shared shape")->required();
  grid_cmd->add_option("--lambda", grid_args.lambda, "rate");
  grid_cmd->add_option("--theta", grid_args.theta, "power-series parameter");
  grid_cmd->add_option("--grid", grid_args.grid, "grid size n or nxn");
  grid_cmd->add_option("--range", grid_args.range, "upper end of both axes");
  grid_cmd->add_option("--output", grid_args.output, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(fit_args);
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim_args);
    if (app.got_subcommand(gof_cmd)) return run_gof(gof_args);
    if (app.got_subcommand(cmp_cmd)) return run_compare(cmp_args);
    if (app.got_subcommand(grid_cmd)) return run_density_grid(grid_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
