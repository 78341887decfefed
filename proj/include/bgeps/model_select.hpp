#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgeps/em.hpp"

namespace bgeps {

struct InfoCriteria {
  double aic;
  std::optional<double> aicc;  // absent when m <= p + 1
  double bic;
};

InfoCriteria info_criteria(double loglik, int p, int m);

struct TestResult {
  double statistic;
  double p_value;
};

// One-sample Kolmogorov-Smirnov against a fitted cdf. The p-value uses the
// asymptotic Kolmogorov series at the Stephens small-sample-corrected
// argument (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

// P(K > t) for the asymptotic Kolmogorov distribution.
double kolmogorov_sf(double t);

// 2 (l_full - l_bge) against the chi-square with one degree of freedom.
TestResult lrt_vs_bge(double loglik_full, double loglik_bge);

struct GofReport {
  double loglik;
  int n_params;
  std::size_t n_obs;
  double aic;
  std::optional<double> aicc;
  double bic;
  TestResult ks_y1, ks_y2, ks_max;
  std::optional<TestResult> lrt;
  std::map<std::string, std::string> metadata;
};

// Assembles the full goodness-of-fit panel for fitted parameters:
// information criteria plus K-S tests of Y1, Y2, and max(Y1, Y2) against
// their compound marginals, and the LRT when a baseline log-likelihood is
// supplied.
GofReport gof_report(const BivariateSample& data, const BgepsParams& params,
                     std::optional<double> bge_loglik = std::nullopt);

struct KSweepEntry {
  int k;
  bool failed = false;
  std::string error;
  std::optional<FitReport> report;
};

struct KSweepResult {
  std::vector<KSweepEntry> entries;
  int best_index = -1;  // argmax log-likelihood; -1 when every fit failed
};

// Independent fits across the replica count k for the binomial or negative
// binomial family. Per-k failures are recorded and the sweep continues.
KSweepResult k_sweep(const BivariateSample& data, FamilyKind kind,
                     const std::vector<int>& k_range, const FitOptions& options = {});

}  // namespace bgeps
