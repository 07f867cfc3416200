#include "qleague/scheduling.hpp"

#include <algorithm>
#include <string>

#include "qleague/error.hpp"

namespace qleague {
namespace {

void check_team_count(int two_n) {
  if (two_n < 2 || two_n % 2 != 0)
    throw InvalidArgument("round-robin needs an even number of teams >= 2, got " +
                          std::to_string(two_n));
}

}  // namespace

Calendar::Calendar(int n_teams, std::vector<std::vector<Match>> rounds)
    : n_teams_(n_teams), rounds_(std::move(rounds)) {}

bool Calendar::is_valid() const {
  if (n_teams_ < 2 || n_teams_ % 2 != 0) return false;
  const auto n = static_cast<std::size_t>(n_teams_);
  if (rounds_.size() != n - 1) return false;
  std::vector<char> seen_pair(n * n, 0);
  for (const auto& round : rounds_) {
    if (round.size() != n / 2) return false;
    std::vector<char> seen_team(n, 0);
    for (const Match& m : round) {
      if (m.first < 0 || m.second < 0 || m.first >= n_teams_ || m.second >= n_teams_ ||
          m.first == m.second)
        return false;
      const auto a = static_cast<std::size_t>(std::min(m.first, m.second));
      const auto b = static_cast<std::size_t>(std::max(m.first, m.second));
      if (seen_team[a]++ || seen_team[b]++) return false;
      if (seen_pair[a * n + b]++) return false;
    }
  }
  return true;  // n(n-1)/2 distinct pairs seen, hence all of them
}

bool Calendar::has_focal_alignment() const {
  for (std::size_t r = 0; r < rounds_.size(); ++r) {
    const int day = static_cast<int>(r) + 1;
    const bool found = std::any_of(rounds_[r].begin(), rounds_[r].end(), [&](const Match& m) {
      return (m.first == 0 && m.second == day) || (m.second == 0 && m.first == day);
    });
    if (!found) return false;
  }
  return true;
}

void Calendar::write_csv(std::ostream& os) const {
  os << "round,team_i,team_j\n";
  for (std::size_t r = 0; r < rounds_.size(); ++r)
    for (const Match& m : rounds_[r]) os << r + 1 << ',' << m.first << ',' << m.second << '\n';
}

Calendar circle_calendar(int two_n) {
  check_team_count(two_n);
  const int rotating = two_n - 1;
  const int half = two_n / 2;
  // seat[k] holds the team sitting in seat k; seat 0 always holds team 0.
  // Seats 0..half-1 face seats two_n-1..half.
  std::vector<int> seat(static_cast<std::size_t>(two_n));
  for (int k = 0; k < two_n; ++k) seat[static_cast<std::size_t>(k)] = k;
  std::vector<std::vector<Match>> rounds;
  rounds.reserve(static_cast<std::size_t>(rotating));
  for (int r = 0; r < rotating; ++r) {
    std::vector<Match> round;
    round.reserve(static_cast<std::size_t>(half));
    for (int k = 0; k < half; ++k) {
      const int a = seat[static_cast<std::size_t>(k)];
      const int b = seat[static_cast<std::size_t>(two_n - 1 - k)];
      round.push_back({std::min(a, b), std::max(a, b)});
    }
    rounds.push_back(std::move(round));
    // Rotate seats 1..two_n-1 one step clockwise.
    std::rotate(seat.begin() + 1, seat.end() - 1, seat.end());
  }
  return Calendar(two_n, std::move(rounds));
}

Calendar canonical_focal_calendar(int two_n) {
  const Calendar base = circle_calendar(two_n);
  // label[t] = new name of team t; team 0 keeps its name.
  std::vector<int> label(static_cast<std::size_t>(two_n), -1);
  label[0] = 0;
  for (std::size_t r = 0; r < base.n_rounds(); ++r) {
    for (const Match& m : base.round(r)) {
      if (m.first == 0) label[static_cast<std::size_t>(m.second)] = static_cast<int>(r) + 1;
    }
  }
  if (std::find(label.begin(), label.end(), -1) != label.end())
    throw ConsistencyError("circle calendar did not pair team 0 with every opponent");
  std::vector<std::vector<Match>> rounds;
  for (const auto& round : base.rounds()) {
    std::vector<Match> relabeled;
    for (const Match& m : round) {
      const int a = label[static_cast<std::size_t>(m.first)];
      const int b = label[static_cast<std::size_t>(m.second)];
      relabeled.push_back({std::min(a, b), std::max(a, b)});
    }
    rounds.push_back(std::move(relabeled));
  }
  Calendar out(two_n, std::move(rounds));
  if (!out.is_valid() || !out.has_focal_alignment())
    throw ConsistencyError("canonical calendar construction failed");
  return out;
}

}  // namespace qleague
