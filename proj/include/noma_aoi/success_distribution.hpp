#pragma once

#include <map>
#include <span>
#include <vector>

namespace noma_aoi {

/// Largest number of simultaneous successes among `active` users on
/// `num_levels` levels: `active` if every user can hold its own level,
/// otherwise K-1 (at least one level is in collision).
int gamma_max(int active, int num_levels);

/// True iff `active` users fit on distinct levels (active <= K). This is the
/// indicator that selects the branch of gamma_max.
bool fits_within_levels(int active, int num_levels);

/// True iff `successes` uses every level (successes == K). When it does, the
/// number of active users must equal K exactly.
bool saturates_levels(int successes, int num_levels);

/// Probability that user 1 succeeds AND exactly `successes` users succeed,
/// given `active` actually active users (user 1 among them) drawing levels
/// i.i.d. from `bar_q`. Requires 1 <= successes <= gamma_max(active, K).
double beta_u1(int active, int successes, std::span<const double> bar_q);

/// Probability that exactly `successes` of `active` anonymous active users
/// succeed. Requires active >= 1 and 0 <= successes <= gamma_max(active, K).
double beta_any(int active, int successes, std::span<const double> bar_q);

/// Exact success-count distribution from enumerating every level assignment.
struct SuccessDistribution {
  int active = 0;
  std::map<int, double> values;

  double at(int successes) const;
  double total() const;
};

/// Enumerates all K^active level assignments (bounded by 10^7), weighting each
/// by the product of bar_q and applying the SIC rule directly: a user on
/// level k succeeds iff it is alone on k and no level above k holds two or
/// more users. With `track_user1`, only outcomes where user 1 succeeds count.
SuccessDistribution brute_force_success_dist(int active, std::span<const double> bar_q,
                                             bool track_user1);

/// beta_u1 / beta_any tabulated for active = 0..max_active and
/// successes = 0..K. Entries outside the feasible range are 0, and
/// any(0, 0) = 1 (nobody transmits, nobody succeeds).
class SuccessTable {
 public:
  SuccessTable(std::span<const double> bar_q, int max_active);

  double u1(int active, int successes) const { return u1_[index(active, successes)]; }
  double any(int active, int successes) const { return any_[index(active, successes)]; }
  int num_levels() const { return num_levels_; }
  int max_active() const { return max_active_; }

 private:
  std::size_t index(int active, int successes) const {
    return static_cast<std::size_t>(active) * static_cast<std::size_t>(num_levels_ + 1) +
           static_cast<std::size_t>(successes);
  }

  int num_levels_;
  int max_active_;
  std::vector<double> u1_;
  std::vector<double> any_;
};

}  // namespace noma_aoi
