#include "commutekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace commutekit {

// ---------------------------------------------------------------------------
// distributions

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // lower series: P(a,x), return 1 - P
    double term = 1.0 / a, sum = term, ap = a;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - lg);
    return 1.0 - p;
  }
  // continued fraction for Q(a,x), modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
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
  return h * std::exp(-x + a * std::log(x) - lg);
}

double chi2_sf(double x, double df) {
  if (x <= 0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / 1.4142135623730950488); }

// ---------------------------------------------------------------------------
// rank tests

namespace {

struct Pooled {
  std::vector<double> ranks;      // midranks aligned with the pooled values
  std::vector<int> group_of;
  double tie_sum = 0.0;           // sum of t^3 - t over tie groups
  std::size_t n = 0;
};

Pooled pool_and_rank(const std::vector<std::vector<double>>& groups) {
  Pooled p;
  std::vector<std::pair<double, int>> all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw std::runtime_error("rank test: empty group");
    for (double v : groups[g]) all.emplace_back(v, static_cast<int>(g));
  }
  p.n = all.size();
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  p.ranks.resize(p.n);
  p.group_of.resize(p.n);
  std::size_t i = 0;
  while (i < p.n) {
    std::size_t j = i;
    while (j < p.n && all[j].first == all[i].first) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    const double t = static_cast<double>(j - i);
    if (t > 1) p.tie_sum += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      p.ranks[k] = midrank;
      p.group_of[k] = all[k].second;
    }
    i = j;
  }
  return p;
}

}  // namespace

KWResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw std::runtime_error("kruskal_wallis: need >= 2 groups");
  const Pooled pooled = pool_and_rank(groups);
  const double N = static_cast<double>(pooled.n);
  if (pooled.n < 3) throw std::runtime_error("kruskal_wallis: need >= 3 observations");

  std::vector<double> rank_sum(k, 0.0);
  std::vector<double> count(k, 0.0);
  for (std::size_t i = 0; i < pooled.n; ++i) {
    rank_sum[pooled.group_of[i]] += pooled.ranks[i];
    count[pooled.group_of[i]] += 1.0;
  }
  double h = 0.0;
  const double mean_rank = (N + 1.0) / 2.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double d = rank_sum[g] / count[g] - mean_rank;
    h += count[g] * d * d;
  }
  h *= 12.0 / (N * (N + 1.0));

  const double denom = 1.0 - pooled.tie_sum / (N * N * N - N);
  KWResult res;
  if (denom <= 0.0) {  // every value tied: no dispersion at all
    res.H = 0.0;
    res.p = 1.0;
    return res;
  }
  res.H = h / denom;
  res.p = res.H > 0 ? chi2_sf(res.H, static_cast<double>(k - 1)) : 1.0;
  return res;
}

std::vector<double> holm_sidak(const std::vector<double>& p_raw) {
  const std::size_t m = p_raw.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_raw[a] < p_raw[b]; });
  std::vector<double> adj(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = p_raw[order[i]];
    const double a = 1.0 - std::pow(1.0 - p, static_cast<double>(m - i));
    running = std::max(running, a);
    adj[order[i]] = std::min(1.0, running);
  }
  return adj;
}

std::vector<DunnEntry> dunn_posthoc(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw std::runtime_error("dunn_posthoc: need >= 2 groups");
  const Pooled pooled = pool_and_rank(groups);
  const double N = static_cast<double>(pooled.n);

  std::vector<double> rank_sum(k, 0.0), count(k, 0.0);
  for (std::size_t i = 0; i < pooled.n; ++i) {
    rank_sum[pooled.group_of[i]] += pooled.ranks[i];
    count[pooled.group_of[i]] += 1.0;
  }

  const double var_base = N * (N + 1.0) / 12.0 - pooled.tie_sum / (12.0 * (N - 1.0));
  std::vector<DunnEntry> entries;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      DunnEntry e;
      e.a = static_cast<int>(a);
      e.b = static_cast<int>(b);
      const double se = std::sqrt(var_base * (1.0 / count[a] + 1.0 / count[b]));
      const double diff = rank_sum[a] / count[a] - rank_sum[b] / count[b];
      e.z = se > 0 ? diff / se : 0.0;
      e.p_raw = 2.0 * normal_sf(std::abs(e.z));
      entries.push_back(e);
    }
  std::vector<double> raw;
  raw.reserve(entries.size());
  for (const auto& e : entries) raw.push_back(e.p_raw);
  const auto adj = holm_sidak(raw);
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].p_adj = adj[i];
  return entries;
}

// ---------------------------------------------------------------------------
// multinomial logistic regression

namespace {

// Cholesky solve of A x = b for symmetric positive-definite A (in place);
// returns false when A is not positive definite.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[j * n + i] = s / a[i * n + i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return true;
}

struct MnlProblem {
  std::size_t n_rows, n_cols, n_free;  // n_cols = 1 + features, n_free = (K-1)*n_cols
  std::vector<double> design;          // row-major with leading 1
  std::vector<int> label;              // 0..K-1, 0 = reference
  double l2;
  std::size_t K;

  // penalized negative log-likelihood plus gradient
  double eval(const std::vector<double>& beta, std::vector<double>* grad,
              std::vector<double>* hess, std::vector<double>& probs) const {
    const std::size_t C = K - 1;
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    if (hess) std::fill(hess->begin(), hess->end(), 0.0);
    double nll = 0.0;
    std::vector<double> eta(C);
    for (std::size_t i = 0; i < n_rows; ++i) {
      const double* xi = &design[i * n_cols];
      double max_eta = 0.0;  // reference class has eta = 0
      for (std::size_t c = 0; c < C; ++c) {
        double e = 0.0;
        for (std::size_t j = 0; j < n_cols; ++j) e += beta[c * n_cols + j] * xi[j];
        eta[c] = e;
        max_eta = std::max(max_eta, e);
      }
      double denom = std::exp(-max_eta);
      for (std::size_t c = 0; c < C; ++c) denom += std::exp(eta[c] - max_eta);
      const double log_denom = max_eta + std::log(denom);
      const int y = label[i];
      nll -= (y == 0 ? 0.0 : eta[y - 1]) - log_denom;
      double* pi = &probs[i * K];
      pi[0] = std::exp(-log_denom);
      for (std::size_t c = 0; c < C; ++c) pi[c + 1] = std::exp(eta[c] - log_denom);
      if (grad) {
        for (std::size_t c = 0; c < C; ++c) {
          const double resid = pi[c + 1] - (y == static_cast<int>(c + 1) ? 1.0 : 0.0);
          for (std::size_t j = 0; j < n_cols; ++j) (*grad)[c * n_cols + j] += resid * xi[j];
        }
      }
      if (hess) {
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t d = c; d < C; ++d) {
            const double wcd = pi[c + 1] * ((c == d ? 1.0 : 0.0) - pi[d + 1]);
            for (std::size_t j = 0; j < n_cols; ++j)
              for (std::size_t kcol = 0; kcol < n_cols; ++kcol) {
                const double v = wcd * xi[j] * xi[kcol];
                (*hess)[(c * n_cols + j) * n_free + (d * n_cols + kcol)] += v;
                if (c != d) (*hess)[(d * n_cols + kcol) * n_free + (c * n_cols + j)] += v;
              }
          }
      }
    }
    // L2 on non-intercept terms
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t j = 1; j < n_cols; ++j) {
        const double b = beta[c * n_cols + j];
        nll += 0.5 * l2 * b * b;
        if (grad) (*grad)[c * n_cols + j] += l2 * b;
        if (hess) (*hess)[(c * n_cols + j) * n_free + (c * n_cols + j)] += l2;
      }
    return nll;
  }
};

}  // namespace

MnlFit fit_multinomial(const std::vector<std::vector<double>>& rows,
                       const std::vector<std::string>& labels,
                       const std::vector<std::string>& feature_names,
                       const std::string& reference, double l2, double tol, int max_iter) {
  if (rows.size() != labels.size()) throw std::logic_error("mnl: row/label size mismatch");
  if (rows.empty()) throw std::runtime_error("mnl: no data");
  const std::size_t p = feature_names.size();
  for (const auto& r : rows)
    if (r.size() != p) throw std::logic_error("mnl: feature width mismatch");

  // classes: reference first, then the rest sorted
  std::vector<std::string> classes{reference};
  {
    std::vector<std::string> seen(labels);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    bool has_ref = false;
    for (const auto& c : seen) {
      if (c == reference) {
        has_ref = true;
        continue;
      }
      classes.push_back(c);
    }
    if (!has_ref) throw std::runtime_error("mnl: reference class '" + reference + "' not present");
    if (classes.size() < 2) throw std::runtime_error("mnl: need >= 2 classes");
  }

  MnlProblem prob;
  prob.n_rows = rows.size();
  prob.n_cols = 1 + p;
  prob.K = classes.size();
  prob.n_free = (prob.K - 1) * prob.n_cols;
  prob.l2 = l2;

  // z-standardize features (population sd)
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < p; ++j) mean[j] += r[j];
  for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(prob.n_rows);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < p; ++j) sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (std::size_t j = 0; j < p; ++j) {
    sd[j] = std::sqrt(sd[j] / static_cast<double>(prob.n_rows));
    if (!(sd[j] > 0))
      throw std::runtime_error("mnl: feature '" + feature_names[j] + "' has zero variance");
  }
  prob.design.resize(prob.n_rows * prob.n_cols);
  for (std::size_t i = 0; i < prob.n_rows; ++i) {
    prob.design[i * prob.n_cols] = 1.0;
    for (std::size_t j = 0; j < p; ++j)
      prob.design[i * prob.n_cols + 1 + j] = (rows[i][j] - mean[j]) / sd[j];
  }
  prob.label.resize(prob.n_rows);
  for (std::size_t i = 0; i < prob.n_rows; ++i) {
    const auto it = std::find(classes.begin(), classes.end(), labels[i]);
    prob.label[i] = static_cast<int>(it - classes.begin());
  }

  // damped Newton
  std::vector<double> beta(prob.n_free, 0.0), grad(prob.n_free), hess(prob.n_free * prob.n_free);
  std::vector<double> probs(prob.n_rows * prob.K);
  double nll = prob.eval(beta, &grad, &hess, probs);
  int iter = 0;
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::abs(g));
  while (gmax > tol) {
    if (++iter > max_iter) {
      char msg[64];
      std::snprintf(msg, sizeof msg, "%.3e", gmax);
      throw std::runtime_error("mnl: no convergence after " + std::to_string(max_iter) +
                               " iterations (|grad| = " + msg + ")");
    }
    std::vector<double> step(grad);
    std::vector<double> h(hess);
    double ridge = 0.0;
    while (!cholesky_solve(h, step, prob.n_free)) {
      ridge = ridge == 0.0 ? 1e-8 : ridge * 10.0;
      if (ridge > 1e6) throw std::runtime_error("mnl: singular Hessian");
      h = hess;
      step = grad;
      for (std::size_t i = 0; i < prob.n_free; ++i) h[i * prob.n_free + i] += ridge;
    }
    // Newton decrement g'H^-1 g; once it drops below the objective's rounding
    // noise, backtracking would be comparing noise against noise, so the pure
    // Newton step is taken (quadratic-convergence basin of a convex problem)
    double decrement = 0.0;
    for (std::size_t i = 0; i < prob.n_free; ++i) decrement += grad[i] * step[i];
    std::vector<double> cand(prob.n_free);
    if (decrement <= 1e-9 * (1.0 + std::abs(nll))) {
      for (std::size_t i = 0; i < prob.n_free; ++i) cand[i] = beta[i] - step[i];
    } else {
      double scale = 1.0;
      bool accepted = false;
      for (int half = 0; half < 60 && !accepted; ++half) {
        for (std::size_t i = 0; i < prob.n_free; ++i) cand[i] = beta[i] - scale * step[i];
        accepted = prob.eval(cand, nullptr, nullptr, probs) <= nll + 1e-12;
        if (!accepted) scale *= 0.5;
      }
      if (!accepted)
        for (std::size_t i = 0; i < prob.n_free; ++i) cand[i] = beta[i] - step[i];
    }
    beta = cand;
    nll = prob.eval(beta, &grad, &hess, probs);
    gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
  }

  MnlFit fit;
  fit.classes = classes;
  fit.features = feature_names;
  fit.iterations = iter;
  fit.log_likelihood = -(nll - [&] {
    double pen = 0.0;
    for (std::size_t c = 0; c + 1 < prob.K; ++c)
      for (std::size_t j = 1; j < prob.n_cols; ++j) {
        const double b = beta[c * prob.n_cols + j];
        pen += 0.5 * l2 * b * b;
      }
    return pen;
  }());

  fit.coefficients.assign(prob.K, std::vector<double>(prob.n_cols, 0.0));
  fit.odds_ratios.assign(prob.K, std::vector<double>(p, 1.0));
  for (std::size_t c = 1; c < prob.K; ++c)
    for (std::size_t j = 0; j < prob.n_cols; ++j) {
      fit.coefficients[c][j] = beta[(c - 1) * prob.n_cols + j];
      if (j >= 1) fit.odds_ratios[c][j - 1] = std::exp(fit.coefficients[c][j]);
    }

  // accuracy: argmax class per row, smallest class index on exact ties
  std::size_t correct = 0;
  for (std::size_t i = 0; i < prob.n_rows; ++i) {
    const double* pi = &probs[i * prob.K];
    std::size_t best = 0;
    for (std::size_t c = 1; c < prob.K; ++c)
      if (pi[c] > pi[best]) best = c;
    if (static_cast<int>(best) == prob.label[i]) ++correct;
  }
  fit.accuracy = static_cast<double>(correct) / static_cast<double>(prob.n_rows);

  // null model: the same optimizer on an intercept-only design, so an
  // intercept-only fit reproduces lnL0 bit for bit and McFadden is exactly 0
  if (p == 0) {
    fit.null_log_likelihood = fit.log_likelihood;
  } else {
    std::vector<std::vector<double>> empty_rows(rows.size());
    MnlFit null_fit = fit_multinomial(empty_rows, labels, {}, reference, l2, tol, max_iter);
    fit.null_log_likelihood = null_fit.log_likelihood;
  }
  fit.mcfadden_r2 = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
  return fit;
}

CompositionReport cluster_composition_report(const std::vector<std::string>& class_per_unit,
                                             const std::vector<std::vector<double>>& values,
                                             const std::vector<std::string>& variable_names,
                                             const std::string& reference, double l2, double tol,
                                             int max_iter) {
  const std::size_t n = class_per_unit.size();
  if (values.size() != n) throw std::logic_error("composition: size mismatch");
  CompositionReport rep;
  rep.variables = variable_names;

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i].size() != variable_names.size())
      throw std::logic_error("composition: variable width mismatch");
    members[class_per_unit[i]].push_back(i);
  }
  for (const auto& [cls, idx] : members) {
    rep.classes_present.push_back(cls);
    if (idx.size() >= 2)
      rep.classes_tested.push_back(cls);
    else
      rep.warnings.push_back("class '" + cls + "' has fewer than 2 members; excluded from tests");
  }

  for (std::size_t v = 0; v < variable_names.size(); ++v)
    for (const auto& [cls, idx] : members) {
      std::vector<double> vals;
      vals.reserve(idx.size());
      for (std::size_t i : idx) vals.push_back(values[i][v]);
      rep.five_number[variable_names[v]][cls] = five_number_summary(std::move(vals));
    }

  if (rep.classes_tested.size() < 2) {
    rep.warnings.push_back("fewer than 2 testable classes; rank tests and regression skipped");
    return rep;
  }

  for (std::size_t v = 0; v < variable_names.size(); ++v) {
    std::vector<std::vector<double>> groups;
    for (const auto& cls : rep.classes_tested) {
      std::vector<double> vals;
      for (std::size_t i : members[cls]) vals.push_back(values[i][v]);
      groups.push_back(std::move(vals));
    }
    rep.kw[variable_names[v]] = kruskal_wallis(groups);
    for (const auto& e : dunn_posthoc(groups))
      rep.dunn[variable_names[v]].push_back(
          {rep.classes_tested[e.a], rep.classes_tested[e.b], e.z, e.p_raw, e.p_adj});
  }

  const bool has_ref = std::find(rep.classes_tested.begin(), rep.classes_tested.end(),
                                 reference) != rep.classes_tested.end();
  if (!has_ref) {
    rep.warnings.push_back("reference class '" + reference +
                           "' not testable; regression skipped");
    return rep;
  }
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (const auto& cls : rep.classes_tested)
    for (std::size_t i : members[cls]) {
      rows.push_back(values[i]);
      labels.push_back(cls);
    }
  rep.mnl = fit_multinomial(rows, labels, variable_names, reference, l2, tol, max_iter);
  rep.mnl_fitted = true;
  return rep;
}

FiveNumber five_number_summary(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("five_number_summary: empty");
  std::sort(values.begin(), values.end());
  FiveNumber f;
  f.min = values.front();
  f.max = values.back();
  f.q1 = percentile_type7(values, 0.25);
  f.median = percentile_type7(values, 0.50);
  f.q3 = percentile_type7(values, 0.75);
  return f;
}

double percentile_type7(const std::vector<double>& sorted_values, double p) {
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double h = p * (static_cast<double>(n) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

}  // namespace commutekit
