#pragma once

#include <map>
#include <string>
#include <vector>

#include "commutekit/anchors.hpp"
#include "commutekit/geo.hpp"
#include "commutekit/router.hpp"

namespace commutekit {

struct CommuteStats {
  // per origin hex, over commuters with a reachable workplace
  std::map<std::string, double> mean_minutes;
  std::map<std::string, double> weight;        // reachable commuter mass homed in the hex
  double citywide_mean = 0.0;                  // weight-averaged over all reachable commuters
  double unreachable_weight = 0.0;             // commuter mass excluded from the means
  double total_weight = 0.0;
};

// Commuters flow from their home tower's hexes to their work tower's hexes;
// a user's mass splits evenly over the |home hexes| x |work hexes| pairs.
CommuteStats commute_stats(const std::vector<AnchorPair>& anchors,
                           const std::vector<HexCell>& hexes, const TravelTimeMatrix& matrix);

// Opportunity mass reachable within T minutes; the boundary t == T counts.
// Returns coa per origin hex (matrix row order).
std::vector<double> cumulative_access(const TravelTimeMatrix& matrix,
                                      const std::map<std::string, double>& opportunity_share,
                                      double threshold_min);

struct PalmaItem {
  double smi = 0.0;
  double weight = 0.0;  // commuter mass
  double value = 0.0;   // mean commute minutes
};

// Mean commute of the most-privileged weight decile over that of the bottom
// four deciles. Units straddling a decile boundary contribute fractionally.
// Ranking is by smi descending with ties broken by `tie_key` ascending.
double palma_ratio(std::vector<PalmaItem> items, const std::vector<std::string>& tie_key);

// Weighted Gini via mean absolute pairwise difference / (2 * mean); 0 for an
// all-zero or single-point distribution.
double gini(const std::vector<double>& values, const std::vector<double>& weights);

struct QuartileResult {
  std::vector<int> quartile;  // 1..4 per input value
  double breaks[3] = {0, 0, 0};
  bool degenerate = false;  // fewer than 4 distinct values
};

// Quartile index by value rank; breakpoints at the 25/50/75 weighted
// percentiles (inverted CDF), lower-inclusive, so equal values always land in
// the same quartile.
QuartileResult quartiles(const std::vector<double>& values, const std::vector<double>& weights);

}  // namespace commutekit
