#pragma once

#include <map>
#include <string>
#include <vector>

namespace commutekit {

// upper-tail probabilities, ~1e-14 relative accuracy
double chi2_sf(double x, double df);
double normal_sf(double z);
// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x);

struct KWResult {
  double H = 0.0;  // tie-corrected
  double p = 1.0;  // chi-squared, k-1 df
};

// Midrank-based Kruskal-Wallis across >= 2 non-empty groups.
KWResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct DunnEntry {
  int a = 0, b = 0;  // group indices, a < b
  double z = 0.0;
  double p_raw = 1.0;  // two-sided normal
  double p_adj = 1.0;  // Holm-Sidak
};

std::vector<DunnEntry> dunn_posthoc(const std::vector<std::vector<double>>& groups);

// Step-down Sidak: sort ascending, adj_(i) = 1 - (1 - p_(i))^(m-i+1), then a
// running maximum keeps the sorted sequence non-decreasing.
std::vector<double> holm_sidak(const std::vector<double>& p_raw);

struct MnlFit {
  std::vector<std::string> classes;  // reference first
  std::vector<std::string> features;
  // coefficients[c][j]: class c (0 = reference, pinned to zero), j = 0 is the
  // intercept followed by the features in order
  std::vector<std::vector<double>> coefficients;
  std::vector<std::vector<double>> odds_ratios;  // exp(coef) for feature terms
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  double mcfadden_r2 = 0.0;
  double accuracy = 0.0;
  int iterations = 0;
};

// Maximum-likelihood softmax regression with intercepts and an L2 penalty on
// the non-intercept coefficients; features are z-standardized internally so
// odds ratios are per one-standard-deviation increase. Damped Newton steps;
// throws when the gradient max-norm has not reached tol after max_iter.
MnlFit fit_multinomial(const std::vector<std::vector<double>>& rows,
                       const std::vector<std::string>& labels,
                       const std::vector<std::string>& feature_names,
                       const std::string& reference, double l2 = 1e-4, double tol = 1e-8,
                       int max_iter = 200);

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct DunnNamed {
  std::string a, b;
  double z = 0.0, p_raw = 1.0, p_adj = 1.0;
};

// The full cluster-composition bundle: box-plot summaries per class, a
// Kruskal-Wallis table, Dunn's pairwise comparisons, and the multinomial fit.
// Classes with fewer than two members are excluded from the tests with a
// warning; everything is skipped (with warnings) when fewer than two testable
// classes remain.
struct CompositionReport {
  std::vector<std::string> variables;
  std::vector<std::string> classes_present;  // sorted
  std::vector<std::string> classes_tested;
  std::map<std::string, std::map<std::string, FiveNumber>> five_number;  // var -> class
  std::map<std::string, KWResult> kw;                                    // var -> result
  std::map<std::string, std::vector<DunnNamed>> dunn;
  bool mnl_fitted = false;
  MnlFit mnl;
  std::vector<std::string> warnings;
};

CompositionReport cluster_composition_report(const std::vector<std::string>& class_per_unit,
                                             const std::vector<std::vector<double>>& values,
                                             const std::vector<std::string>& variable_names,
                                             const std::string& reference, double l2 = 1e-4,
                                             double tol = 1e-8, int max_iter = 200);

// linear-interpolation percentiles (type 7)
FiveNumber five_number_summary(std::vector<double> values);
double percentile_type7(const std::vector<double>& sorted_values, double p);

}  // namespace commutekit
