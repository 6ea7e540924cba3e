#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "commutekit/calendar.hpp"
#include "commutekit/ingest.hpp"

namespace commutekit {

// Hour-of-day weight for home detection. Nonzero only on the night window
// {23, 0..6}; peaks at 02:00-03:59.
int home_weight(int hour);

// Hour-of-day weight for work detection. Nonzero only on 09:00-17:59 with a
// lunchtime dip at 12:00-13:59.
int work_weight(int hour);

struct AnchorPair {
  std::string user_id;
  std::string home_bts;
  std::string work_bts;  // always != home_bts
  std::int64_t home_score = 0;
  std::int64_t work_score = 0;
};

struct Rejection {
  std::string user_id;
  std::string reason;  // no_night_signal | no_distinct_work
};

struct AnchorResult {
  std::vector<AnchorPair> pairs;      // sorted by user_id
  std::vector<Rejection> rejected;    // sorted by user_id
};

// home = argmax over towers of the night-weighted counts (all days);
// work = argmax over towers != home of the work-weighted counts restricted to
// weekday (Mon-Fri) hours. Argmax ties break to the smallest bts_id. Users
// with an all-zero score field are rejected rather than guessed.
AnchorResult detect_anchors(const HourlyCounts& counts, const std::set<std::string>& active,
                            YearMonth month);

void save_anchors_csv(const std::string& path, const std::vector<AnchorPair>& pairs);
void save_rejected_csv(const std::string& path, const std::vector<Rejection>& rejected);
std::vector<AnchorPair> load_anchors_csv(const std::string& path);

}  // namespace commutekit
