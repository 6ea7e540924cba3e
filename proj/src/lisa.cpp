#include "commutekit/lisa.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "commutekit/util.hpp"

namespace commutekit {

SpatialWeights build_weights(const std::vector<HexCell>& hexes) {
  SpatialWeights w;
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> axial;
  for (const auto& h : hexes) axial.emplace_back(h.q, h.r);
  std::sort(axial.begin(), axial.end());
  for (const auto& qr : axial) {
    index.emplace(qr, static_cast<int>(w.ids.size()));
    w.ids.push_back(hex_id(qr.first, qr.second));
  }
  w.neighbors.resize(w.ids.size());
  for (std::size_t i = 0; i < axial.size(); ++i) {
    for (const auto& off : kHexNeighborOffsets) {
      const auto it = index.find({axial[i].first + off[0], axial[i].second + off[1]});
      if (it != index.end()) w.neighbors[i].push_back(it->second);
    }
    std::sort(w.neighbors[i].begin(), w.neighbors[i].end());
  }
  return w;
}

const char* lisa_class_name(LisaClass c) {
  switch (c) {
    case LisaClass::HH: return "HH";
    case LisaClass::HL: return "HL";
    case LisaClass::LH: return "LH";
    case LisaClass::LL: return "LL";
    default: return "NS";
  }
}

std::vector<LisaResult> bivariate_lisa(const std::vector<double>& x,
                                       const std::vector<double>& y, const SpatialWeights& w,
                                       int permutations, double alpha, std::uint64_t seed,
                                       int threads) {
  const std::size_t n = w.ids.size();
  if (x.size() != n || y.size() != n) throw std::logic_error("lisa: field size mismatch");
  if (permutations < 1) throw std::logic_error("lisa: permutations must be >= 1");

  // standardize over non-island hexes with the population sd
  std::vector<std::size_t> included;
  for (std::size_t i = 0; i < n; ++i)
    if (!w.is_island(i)) included.push_back(i);
  const double m = static_cast<double>(included.size());
  if (m < 2) throw std::runtime_error("degenerate_field");
  double mx = 0, my = 0;
  for (std::size_t i : included) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double vx = 0, vy = 0;
  for (std::size_t i : included) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  vx /= m;
  vy /= m;
  if (vx <= 0 || vy <= 0) throw std::runtime_error("degenerate_field");
  const double sx = std::sqrt(vx), sy = std::sqrt(vy);

  std::vector<double> zx(n, 0.0), zy(n, 0.0);
  for (std::size_t i : included) {
    zx[i] = (x[i] - mx) / sx;
    zy[i] = (y[i] - my) / sy;
  }

  // zy values of the other included hexes, per hex: shared pool with the own
  // value swapped out on use
  std::vector<double> pool(included.size());
  for (std::size_t k = 0; k < included.size(); ++k) pool[k] = zy[included[k]];
  std::vector<std::size_t> pos_in_pool(n, SIZE_MAX);
  for (std::size_t k = 0; k < included.size(); ++k) pos_in_pool[included[k]] = k;

  std::vector<LisaResult> results(n);
  for (std::size_t i = 0; i < n; ++i) {
    results[i].hex_id = w.ids[i];
    results[i].island = w.is_island(i);
  }

  auto work = [&](std::size_t i) {
    LisaResult& res = results[i];
    if (res.island) return;  // NS, I = 0 by convention
    const auto& nbrs = w.neighbors[i];
    const std::size_t k = nbrs.size();
    double lag = 0.0;
    for (int j : nbrs) lag += zy[j];
    lag /= static_cast<double>(k);
    res.moran_i = zx[i] * lag;

    // conditional permutation: draw k values from the pool minus this hex
    std::vector<double> others(pool);
    const std::size_t self = pos_in_pool[i];
    others[self] = others.back();
    others.pop_back();
    const std::size_t mm = others.size();
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    int extreme = 0;
    const bool positive = res.moran_i >= 0;
    for (int p = 0; p < permutations; ++p) {
      double lag_p = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + rng.below(mm - j);
        std::swap(others[j], others[pick]);
        lag_p += others[j];
      }
      const double i_p = zx[i] * lag_p / static_cast<double>(k);
      if (positive ? i_p >= res.moran_i : i_p <= res.moran_i) ++extreme;
    }
    res.pseudo_p = (extreme + 1.0) / (permutations + 1.0);
    if (res.pseudo_p <= alpha) {
      if (zx[i] > 0)
        res.cls = lag > 0 ? LisaClass::HH : LisaClass::HL;
      else
        res.cls = lag > 0 ? LisaClass::LH : LisaClass::LL;
    } else {
      res.cls = LisaClass::NS;
    }
  };

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool_threads;
    for (int t = 0; t < threads; ++t)
      pool_threads.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool_threads) th.join();
  }
  return results;
}

}  // namespace commutekit
