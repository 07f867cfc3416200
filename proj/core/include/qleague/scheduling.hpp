#pragma once

// Single round-robin calendars on teams 0..2n-1.

#include <ostream>
#include <vector>

namespace qleague {

struct Match {
  int first;
  int second;

  friend bool operator==(const Match&, const Match&) = default;
};

class Calendar {
 public:
  Calendar(int n_teams, std::vector<std::vector<Match>> rounds);

  int n_teams() const noexcept { return n_teams_; }
  std::size_t n_rounds() const noexcept { return rounds_.size(); }
  /// Round index is 0-based here; round r is played on day r + 1.
  const std::vector<Match>& round(std::size_t r) const { return rounds_.at(r); }
  const std::vector<std::vector<Match>>& rounds() const noexcept { return rounds_; }

  /// Every round a perfect matching, every unordered pair exactly once.
  bool is_valid() const;
  /// The day-j round contains (0, j) for every j.
  bool has_focal_alignment() const;

  /// CSV with header round,team_i,team_j (1-based rounds).
  void write_csv(std::ostream& os) const;

 private:
  int n_teams_;
  std::vector<std::vector<Match>> rounds_;
};

/// Berger-table circle method: team 0 fixed, the others rotate one seat per
/// round.
Calendar circle_calendar(int two_n);

/// Circle calendar relabeled so that team 0 meets team j on day j.
Calendar canonical_focal_calendar(int two_n);

}  // namespace qleague
