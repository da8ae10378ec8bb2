#pragma once

#include <span>
#include <string>
#include <vector>

namespace morphevo {

struct SampleGroup {
  std::string label;
  std::vector<double> samples;
};

// Validated: >= 2 groups, each >= 2 finite samples.
void validate_groups(std::span<const SampleGroup> groups);

struct KruskalResult {
  double h = 0.0;
  int df = 0;
  double p = 1.0;
};

// Kruskal-Wallis H on midranks with tie correction; p from the chi-square
// upper tail with df = k - 1. All-identical samples give H = 0, p = 1.
KruskalResult kruskal_wallis(std::span<const SampleGroup> groups);

enum class PAdjust { kNone, kBonferroni, kHolm };
PAdjust p_adjust_from_string(const std::string& s);
std::string p_adjust_to_string(PAdjust a);

struct DunnPair {
  int group_a = 0;
  int group_b = 0;
  double z = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
};

// Dunn's post hoc z on midranks with tie correction, two-sided p, optional
// multiple-comparison adjustment, significance at alpha.
std::vector<DunnPair> dunn_posthoc(std::span<const SampleGroup> groups,
                                   double alpha, PAdjust adjust = PAdjust::kNone);

// Exact midpoint median (mean of the central pair for even counts).
double median(std::vector<double> values);
std::vector<std::pair<std::string, double>> group_medians(
    std::span<const SampleGroup> groups);

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function Q(df/2, x/2); relative accuracy well below 1e-10.
double chi_squared_upper_tail(double x, int df);

// Two-sided normal tail 2*(1 - Phi(|z|)).
double normal_two_sided_p(double z);

}  // namespace morphevo
