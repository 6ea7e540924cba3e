#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commutekit/geo.hpp"

namespace commutekit {

// Queen-contiguity weights on the hex lattice. On hexagons queen equals rook:
// the <= 6 edge-adjacent cells present in the study set. Row-standardized.
struct SpatialWeights {
  std::vector<std::string> ids;            // canonical (q, r) order
  std::vector<std::vector<int>> neighbors;  // indices into ids
  bool is_island(std::size_t i) const { return neighbors[i].empty(); }
};

SpatialWeights build_weights(const std::vector<HexCell>& hexes);

enum class LisaClass { HH, HL, LH, LL, NS };
const char* lisa_class_name(LisaClass c);

struct LisaResult {
  std::string hex_id;
  double moran_i = 0.0;   // z_x(i) * row-standardized lag of z_y
  double pseudo_p = 1.0;  // (extreme-count + 1) / (permutations + 1)
  LisaClass cls = LisaClass::NS;
  bool island = false;
};

// Bivariate local Moran with conditional-permutation inference: z_x(i) and the
// weights stay fixed while z_y is permuted over the other hexes; the pseudo
// p-value is one-sided by the sign of the observed statistic. Classes follow
// the quadrant of (z_x, lag z_y) when pseudo_p <= alpha, else NS. Islands are
// excluded from standardization and always NS. Permutations draw from per-hex
// counter-based streams, so results are identical for any thread count.
// Throws "degenerate_field" when x or y has zero variance.
std::vector<LisaResult> bivariate_lisa(const std::vector<double>& x,
                                       const std::vector<double>& y, const SpatialWeights& w,
                                       int permutations, double alpha, std::uint64_t seed,
                                       int threads = 1);

}  // namespace commutekit
