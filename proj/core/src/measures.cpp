#include "qleague/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qleague {
namespace {

constexpr double kWeightSlack = 1e-6;

std::vector<Atom> merge_sorted(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.value < r.value; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

void check_atoms(const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw InvalidArgument("discrete measure needs at least one atom");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || a.value < 0.0)
      throw InvalidArgument("discrete measure atom value must be finite and >= 0");
    if (!std::isfinite(a.weight) || a.weight < 0.0)
      throw InvalidArgument("discrete measure weight must be finite and >= 0");
  }
}

double total_weight(const std::vector<Atom>& atoms) {
  return std::accumulate(atoms.begin(), atoms.end(), 0.0,
                         [](double acc, const Atom& a) { return acc + a.weight; });
}

}  // namespace

Measure Measure::discrete(std::vector<Atom> atoms) {
  check_atoms(atoms);
  const double total = total_weight(atoms);
  if (std::abs(total - 1.0) > kWeightSlack) {
    std::ostringstream os;
    os << "discrete measure weights sum to " << total << ", not 1";
    throw InvalidArgument(os.str());
  }
  return discrete_normalized(std::move(atoms));
}

Measure Measure::discrete_normalized(std::vector<Atom> atoms, bool* rescaled) {
  check_atoms(atoms);
  const double total = total_weight(atoms);
  if (!(total > 0.0)) throw InvalidArgument("discrete measure has zero total weight");
  if (rescaled) *rescaled = std::abs(total - 1.0) > kWeightSlack;
  if (std::abs(total - 1.0) > 1e-12)
    for (Atom& a : atoms) a.weight /= total;

  Measure m;
  m.kind_ = Kind::discrete;
  m.atoms_ = atoms;
  m.sorted_ = merge_sorted(std::move(atoms));
  double acc = 0.0;
  for (const Atom& a : m.sorted_) {
    acc += a.weight;
    m.cumulative_.push_back(acc);
  }
  // Guard the top of the CDF against round-off below 1.
  m.cumulative_.back() = 1.0;
  return m;
}

Measure Measure::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(hi > lo))
    throw InvalidArgument("uniform measure requires 0 <= lo < hi");
  Measure m;
  m.kind_ = Kind::uniform;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

Measure Measure::empirical(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("empirical measure needs at least one sample");
  for (double x : samples)
    if (!std::isfinite(x) || x < 0.0)
      throw InvalidArgument("empirical sample must be finite and >= 0");
  Measure m;
  m.kind_ = Kind::empirical;
  m.samples_ = samples;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) m.atoms_.push_back({x, w});
  m.sorted_ = merge_sorted(m.atoms_);
  // Counts rather than summed weights keep the empirical CDF exact.
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  for (const Atom& a : m.sorted_) {
    while (i < sorted.size() && sorted[i] <= a.value) ++i;
    m.cumulative_.push_back(static_cast<double>(i) / n);
  }
  return m;
}

double Measure::sample(Stream& rng) const {
  switch (kind_) {
    case Kind::uniform:
      return lo_ + (hi_ - lo_) * rng.uniform();
    case Kind::empirical:
      return samples_[rng.below(samples_.size())];
    case Kind::discrete: {
      if (sorted_.size() == 1) return sorted_.front().value;
      const double u = rng.uniform();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      return sorted_[static_cast<std::size_t>(it - cumulative_.begin())].value;
    }
  }
  return 0.0;
}

double Measure::cdf(double y) const {
  if (kind_ == Kind::uniform) {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return 1.0;
    return (y - lo_) / (hi_ - lo_);
  }
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), y,
                             [](double v, const Atom& a) { return v < a.value; });
  if (it == sorted_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - sorted_.begin()) - 1];
}

double Measure::inverse_cdf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("inverse_cdf argument must lie in [0, 1]");
  // H(y) >= 0 everywhere, so the infimum over y >= 0 is 0.
  if (x == 0.0) return 0.0;
  if (kind_ == Kind::uniform) return lo_ + x * (hi_ - lo_);
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;
  return sorted_[static_cast<std::size_t>(it - cumulative_.begin())].value;
}

double Measure::mean() const {
  return expect([](double x) { return x; }, 1e-12);
}

std::pair<double, double> Measure::support() const {
  if (kind_ == Kind::uniform) return {lo_, hi_};
  return {sorted_.front().value, sorted_.back().value};
}

std::string Measure::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::uniform:
      os << "uniform[" << lo_ << ", " << hi_ << "]";
      break;
    case Kind::empirical:
      os << "empirical(" << samples_.size() << " samples)";
      break;
    case Kind::discrete:
      os << "discrete{";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) os << ", ";
        os << atoms_[i].weight << "@" << atoms_[i].value;
      }
      os << "}";
      break;
  }
  return os.str();
}

}  // namespace qleague
