#include "morphevo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace morphevo {

void validate_groups(std::span<const SampleGroup> groups) {
  if (groups.size() < 2) throw std::invalid_argument("need at least 2 groups");
  for (const auto& g : groups) {
    if (g.samples.size() < 2) {
      throw std::invalid_argument("group '" + g.label + "' needs at least 2 samples");
    }
    for (double v : g.samples) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("group '" + g.label + "' contains a non-finite value");
      }
    }
  }
}

// Midranks of the pooled samples plus the tie term sum(t^3 - t).
struct RankedPool {
  std::vector<double> ranks;  // pooled order = group order, concatenated
  double tie_term = 0.0;
  int n_total = 0;
};

static RankedPool midranks(std::span<const SampleGroup> groups) {
  RankedPool pool;
  std::vector<double> values;
  for (const auto& g : groups) {
    values.insert(values.end(), g.samples.begin(), g.samples.end());
  }
  pool.n_total = static_cast<int>(values.size());
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[static_cast<std::size_t>(a)] <
                                        values[static_cast<std::size_t>(b)]; });
  pool.ranks.resize(values.size());
  for (std::size_t start = 0; start < values.size();) {
    std::size_t end = start + 1;
    while (end < values.size() &&
           values[static_cast<std::size_t>(order[end])] ==
               values[static_cast<std::size_t>(order[start])]) {
      ++end;
    }
    const double r = 0.5 * static_cast<double>(start + 1 + end);  // midrank
    for (std::size_t k = start; k < end; ++k) {
      pool.ranks[static_cast<std::size_t>(order[k])] = r;
    }
    const double t = static_cast<double>(end - start);
    pool.tie_term += t * t * t - t;
    start = end;
  }
  return pool;
}

// Regularized incomplete gamma: series for P(s,x) when x < s+1, continued
// fraction for Q(s,x) otherwise.
static double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double a = s;
  for (int i = 0; i < 1000; ++i) {
    a += 1.0;
    term *= x / a;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

static double gamma_q_continued_fraction(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double chi_squared_upper_tail(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi-square df must be >= 1");
  if (x <= 0.0) return 1.0;
  const double s = 0.5 * df;
  const double hx = 0.5 * x;
  if (hx < s + 1.0) return 1.0 - gamma_p_series(s, hx);
  return gamma_q_continued_fraction(s, hx);
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

KruskalResult kruskal_wallis(std::span<const SampleGroup> groups) {
  validate_groups(groups);
  const RankedPool pool = midranks(groups);
  const double n = static_cast<double>(pool.n_total);

  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < g.samples.size(); ++k) rank_sum += pool.ranks[offset + k];
    offset += g.samples.size();
    h += rank_sum * rank_sum / static_cast<double>(g.samples.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  KruskalResult result;
  result.df = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - pool.tie_term / (n * n * n - n);
  if (correction <= 0.0) {
    // Every pooled value identical.
    result.h = 0.0;
    result.p = 1.0;
    return result;
  }
  result.h = std::max(0.0, h / correction);
  result.p = result.h == 0.0 ? 1.0 : chi_squared_upper_tail(result.h, result.df);
  return result;
}

PAdjust p_adjust_from_string(const std::string& s) {
  if (s == "none") return PAdjust::kNone;
  if (s == "bonferroni") return PAdjust::kBonferroni;
  if (s == "holm") return PAdjust::kHolm;
  throw std::invalid_argument("unknown p adjustment: " + s);
}

std::string p_adjust_to_string(PAdjust a) {
  switch (a) {
    case PAdjust::kNone: return "none";
    case PAdjust::kBonferroni: return "bonferroni";
    case PAdjust::kHolm: return "holm";
  }
  return "?";
}

std::vector<DunnPair> dunn_posthoc(std::span<const SampleGroup> groups,
                                   double alpha, PAdjust adjust) {
  validate_groups(groups);
  const RankedPool pool = midranks(groups);
  const double n = static_cast<double>(pool.n_total);

  std::vector<double> mean_rank(groups.size());
  std::vector<double> sizes(groups.size());
  std::size_t offset = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < groups[g].samples.size(); ++k) {
      rank_sum += pool.ranks[offset + k];
    }
    offset += groups[g].samples.size();
    sizes[g] = static_cast<double>(groups[g].samples.size());
    mean_rank[g] = rank_sum / sizes[g];
  }

  // Pooled rank variance with tie correction.
  const double variance = n * (n + 1.0) / 12.0 - pool.tie_term / (12.0 * (n - 1.0));

  std::vector<DunnPair> pairs;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      DunnPair pair;
      pair.group_a = static_cast<int>(a);
      pair.group_b = static_cast<int>(b);
      if (variance <= 0.0) {
        pair.z = 0.0;
        pair.p_raw = 1.0;
      } else {
        pair.z = (mean_rank[a] - mean_rank[b]) /
                 std::sqrt(variance * (1.0 / sizes[a] + 1.0 / sizes[b]));
        pair.p_raw = normal_two_sided_p(pair.z);
      }
      pairs.push_back(pair);
    }
  }

  const std::size_t m = pairs.size();
  switch (adjust) {
    case PAdjust::kNone:
      for (auto& p : pairs) p.p_adjusted = p.p_raw;
      break;
    case PAdjust::kBonferroni:
      for (auto& p : pairs) p.p_adjusted = std::min(1.0, p.p_raw * static_cast<double>(m));
      break;
    case PAdjust::kHolm: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pairs[a].p_raw < pairs[b].p_raw;
      });
      double running = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        const double adj = std::min(
            1.0, static_cast<double>(m - r) * pairs[order[r]].p_raw);
        running = std::max(running, adj);
        pairs[order[r]].p_adjusted = running;
      }
      break;
    }
  }
  for (auto& p : pairs) p.significant = p.p_adjusted < alpha;
  return pairs;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<std::pair<std::string, double>> group_medians(
    std::span<const SampleGroup> groups) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.emplace_back(g.label, median(g.samples));
  return out;
}

}  // namespace morphevo
