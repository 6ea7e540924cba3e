#include "commutekit/anchors.hpp"

#include <array>
#include <stdexcept>

#include "commutekit/csv.hpp"

namespace commutekit {

int home_weight(int hour) {
  if (hour < 0 || hour > 23) throw std::out_of_range("hour out of range: " + std::to_string(hour));
  switch (hour) {
    case 2:
    case 3:
      return 3;
    case 0:
    case 1:
    case 4:
    case 5:
      return 2;
    case 6:
    case 23:
      return 1;
    default:
      return 0;
  }
}

int work_weight(int hour) {
  if (hour < 0 || hour > 23) throw std::out_of_range("hour out of range: " + std::to_string(hour));
  switch (hour) {
    case 9:
    case 10:
    case 11:
    case 14:
    case 15:
    case 16:
    case 17:
      return 2;
    case 12:
    case 13:
      return 1;
    default:
      return 0;
  }
}

AnchorResult detect_anchors(const HourlyCounts& counts, const std::set<std::string>& active,
                            YearMonth month) {
  // precompute weekday flags for the month's days (1-based)
  std::array<bool, 32> is_weekday{};
  for (int d = 1; d <= month.days_in_month(); ++d)
    is_weekday[d] = weekday(month.year, month.month, d) < 5;

  AnchorResult res;
  for (const auto& user : active) {
    const auto it = counts.by_user.find(user);
    if (it == counts.by_user.end()) continue;

    // home: best night score over all towers, smallest bts_id on ties
    std::string home;
    std::int64_t home_score = 0;
    for (const auto& [bts, cells] : it->second) {
      std::int64_t s = 0;
      for (const auto& [key, n] : cells) s += std::int64_t(home_weight(key % 24)) * n;
      if (s > home_score) {  // map iteration is id-sorted, so first max wins ties
        home_score = s;
        home = bts;
      }
    }
    if (home_score == 0) {
      res.rejected.push_back({user, "no_night_signal"});
      continue;
    }

    // work: best weekday-daytime score over towers != home
    std::string work;
    std::int64_t work_score = 0;
    for (const auto& [bts, cells] : it->second) {
      if (bts == home) continue;
      std::int64_t s = 0;
      for (const auto& [key, n] : cells) {
        const int day = key / 24;
        if (!is_weekday[day]) continue;
        s += std::int64_t(work_weight(key % 24)) * n;
      }
      if (s > work_score) {
        work_score = s;
        work = bts;
      }
    }
    if (work_score == 0) {
      res.rejected.push_back({user, "no_distinct_work"});
      continue;
    }
    res.pairs.push_back({user, home, work, home_score, work_score});
  }
  return res;  // active is a sorted set, so outputs are already user_id-ordered
}

void save_anchors_csv(const std::string& path, const std::vector<AnchorPair>& pairs) {
  CsvWriter out(path, {"user_id", "home_bts", "work_bts", "home_score", "work_score"});
  for (const auto& p : pairs)
    out.row({p.user_id, p.home_bts, p.work_bts, std::to_string(p.home_score),
             std::to_string(p.work_score)});
  out.close();
}

void save_rejected_csv(const std::string& path, const std::vector<Rejection>& rejected) {
  CsvWriter out(path, {"user_id", "reason"});
  for (const auto& r : rejected) out.row({r.user_id, r.reason});
  out.close();
}

std::vector<AnchorPair> load_anchors_csv(const std::string& path) {
  std::vector<AnchorPair> pairs;
  CsvReader in(path);
  in.require({"user_id", "home_bts", "work_bts", "home_score", "work_score"});
  std::vector<std::string> row;
  while (in.next(row))
    pairs.push_back({row[0], row[1], row[2], std::stoll(row[3]), std::stoll(row[4])});
  return pairs;
}

}  // namespace commutekit
