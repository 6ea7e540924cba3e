#include "commutekit/access.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace commutekit {

CommuteStats commute_stats(const std::vector<AnchorPair>& anchors,
                           const std::vector<HexCell>& hexes, const TravelTimeMatrix& matrix) {
  // tower -> hexes (by matrix index where present)
  std::map<std::string, std::vector<std::string>> tower_hexes;
  for (const auto& h : hexes) tower_hexes[h.assigned_bts].push_back(hex_id(h.q, h.r));

  std::map<std::string, std::size_t> oidx, didx;
  for (std::size_t i = 0; i < matrix.origin_ids.size(); ++i) oidx[matrix.origin_ids[i]] = i;
  for (std::size_t j = 0; j < matrix.dest_ids.size(); ++j) didx[matrix.dest_ids[j]] = j;

  // aggregate commuters by tower pair
  std::map<std::pair<std::string, std::string>, double> flows;
  for (const auto& a : anchors) flows[{a.home_bts, a.work_bts}] += 1.0;

  std::map<std::string, double> acc, wsum;
  double city_acc = 0.0, city_w = 0.0, unreachable = 0.0, total = 0.0;
  for (const auto& [pair, n] : flows) {
    const auto ho = tower_hexes.find(pair.first);
    const auto wo = tower_hexes.find(pair.second);
    if (ho == tower_hexes.end() || wo == tower_hexes.end())
      throw std::runtime_error("anchored tower without hexes: " +
                               (ho == tower_hexes.end() ? pair.first : pair.second));
    const double w = n / (double(ho->second.size()) * double(wo->second.size()));
    for (const auto& hh : ho->second) {
      const auto oi = oidx.find(hh);
      for (const auto& wh : wo->second) {
        const auto dj = didx.find(wh);
        total += w;
        double t = kUnreachable;
        if (oi != oidx.end() && dj != didx.end()) t = matrix.at(oi->second, dj->second);
        if (std::isinf(t)) {
          unreachable += w;
          continue;
        }
        acc[hh] += w * t;
        wsum[hh] += w;
        city_acc += w * t;
        city_w += w;
      }
    }
  }

  CommuteStats out;
  for (const auto& [hex, w] : wsum) {
    out.mean_minutes[hex] = acc[hex] / w;
    out.weight[hex] = w;
  }
  out.citywide_mean = city_w > 0 ? city_acc / city_w : 0.0;
  out.unreachable_weight = unreachable;
  out.total_weight = total;
  return out;
}

std::vector<double> cumulative_access(const TravelTimeMatrix& matrix,
                                      const std::map<std::string, double>& opportunity_share,
                                      double threshold_min) {
  std::vector<double> opp(matrix.dest_ids.size(), 0.0);
  for (std::size_t j = 0; j < matrix.dest_ids.size(); ++j) {
    const auto it = opportunity_share.find(matrix.dest_ids[j]);
    if (it != opportunity_share.end()) opp[j] = it->second;
  }
  std::vector<double> coa(matrix.origin_ids.size(), 0.0);
  for (std::size_t i = 0; i < matrix.origin_ids.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < matrix.dest_ids.size(); ++j) {
      const double t = matrix.at(i, j);
      if (t <= threshold_min) s += opp[j];  // inf never satisfies
    }
    coa[i] = s;
  }
  return coa;
}

namespace {

// weight-based slice mean after ranking; `take` is the weight quota
double slice_mean(const std::vector<std::size_t>& order, const std::vector<PalmaItem>& items,
                  double take) {
  double acc = 0.0, w = 0.0;
  for (std::size_t idx : order) {
    if (take <= 0) break;
    const double part = std::min(items[idx].weight, take);
    acc += part * items[idx].value;
    w += part;
    take -= part;
  }
  if (w <= 0) throw std::runtime_error("degenerate_distribution");
  return acc / w;
}

}  // namespace

double palma_ratio(std::vector<PalmaItem> items, const std::vector<std::string>& tie_key) {
  if (items.size() != tie_key.size()) throw std::logic_error("palma: key size mismatch");
  double total = 0.0;
  for (const auto& it : items) total += it.weight;
  if (total <= 0) throw std::runtime_error("degenerate_distribution");

  std::vector<std::size_t> by_desc(items.size());
  std::iota(by_desc.begin(), by_desc.end(), 0);
  std::sort(by_desc.begin(), by_desc.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].smi != items[b].smi) return items[a].smi > items[b].smi;
    return tie_key[a] < tie_key[b];
  });
  std::vector<std::size_t> by_asc(by_desc.rbegin(), by_desc.rend());

  const double top = slice_mean(by_desc, items, 0.10 * total);
  const double bottom = slice_mean(by_asc, items, 0.40 * total);
  if (bottom == 0) throw std::runtime_error("degenerate_distribution");
  return top / bottom;
}

double gini(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw std::logic_error("gini: size mismatch");
  double W = 0.0, mean_acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw std::runtime_error("gini: negative value");
    W += weights[i];
    mean_acc += weights[i] * values[i];
  }
  if (W <= 0) throw std::runtime_error("gini: zero total weight");
  const double mean = mean_acc / W;
  if (mean == 0) return 0.0;  // all-zero values by convention

  // sorted form of the pairwise-difference definition, O(n log n)
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  // sum_i sum_j w_i w_j |x_i - x_j| = 2 * sum_i w_i x_i C_i - 2 * sum_i w_i S_i
  // with C_i = cumulative weight before i, S_i = cumulative w*x before i
  double cw = 0.0, cwx = 0.0, num = 0.0;
  for (std::size_t idx : order) {
    num += weights[idx] * (values[idx] * cw - cwx);
    cw += weights[idx];
    cwx += weights[idx] * values[idx];
  }
  return num / (W * W * mean);
}

QuartileResult quartiles(const std::vector<double>& values, const std::vector<double>& weights) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double W = 0.0;
  for (double w : weights) W += w;

  // inverted CDF: smallest value whose cumulative weight reaches p*W
  auto quantile = [&](double p) {
    const double target = p * W;
    double cum = 0.0;
    for (std::size_t idx : order) {
      cum += weights[idx];
      if (cum >= target - 1e-12) return values[idx];
    }
    return values[order.back()];
  };

  QuartileResult res;
  res.breaks[0] = quantile(0.25);
  res.breaks[1] = quantile(0.50);
  res.breaks[2] = quantile(0.75);
  res.quartile.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int q = 4;
    if (values[i] <= res.breaks[0])
      q = 1;
    else if (values[i] <= res.breaks[1])
      q = 2;
    else if (values[i] <= res.breaks[2])
      q = 3;
    res.quartile[i] = q;
  }
  std::vector<double> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  res.degenerate = distinct.size() < 4;
  return res;
}

}  // namespace commutekit
