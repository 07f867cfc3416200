#include "qleague/processes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qleague/error.hpp"

namespace qleague {
namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix pattern(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  BoolMatrix b(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b[i][j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0;
  return b;
}

BoolMatrix multiply(const BoolMatrix& l, const BoolMatrix& r) {
  const std::size_t n = l.size();
  BoolMatrix out(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (l[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) out[i][j] = true;
  return out;
}

BoolMatrix power(BoolMatrix base, std::size_t e) {
  const std::size_t n = base.size();
  BoolMatrix acc(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) acc[i][i] = true;
  while (e) {
    if (e & 1U) acc = multiply(acc, base);
    base = multiply(base, base);
    e >>= 1U;
  }
  return acc;
}

bool all_true(const BoolMatrix& m) {
  return std::all_of(m.begin(), m.end(), [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](bool b) { return b; });
  });
}

std::vector<double> running_sum(const Eigen::VectorXd& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc += v(i);
    out[static_cast<std::size_t>(i)] = acc;
  }
  out.back() = 1.0;
  return out;
}

std::size_t draw_index(const std::vector<double>& cdf, Stream& rng) {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

// sup over B of |sum_{j in B} r_j| is attained by B = {r_j > 0} or {r_j < 0}.
double best_column_set(const Eigen::VectorXd& r) {
  double pos = 0.0;
  double neg = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (r(j) > 0.0) pos += r(j);
    else neg -= r(j);
  }
  return std::max(pos, neg);
}

}  // namespace

MarkovTilting::MarkovTilting(std::vector<double> states, Eigen::MatrixXd transition)
    : states_(std::move(states)), transition_(std::move(transition)) {
  const auto n = static_cast<Eigen::Index>(states_.size());
  if (states_.empty()) throw InvalidArgument("Markov tilting needs at least one state");
  if (states_.size() > kMaxStates) {
    throw InvalidArgument("Markov tilting supports at most " + std::to_string(kMaxStates) +
                          " states");
  }
  for (double s : states_)
    if (!std::isfinite(s) || !(s > 0.0))
      throw InvalidArgument("Markov tilting state values must be positive");
  if (transition_.rows() != n || transition_.cols() != n)
    throw InvalidArgument("transition matrix must be square with one row per state");
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = transition_(i, j);
      if (!std::isfinite(p) || p < 0.0)
        throw InvalidArgument("transition entries must be finite and >= 0");
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "transition row " << i << " sums to " << row << ", not 1";
      throw InvalidArgument(os.str());
    }
  }

  const auto ns = static_cast<std::size_t>(n);
  const Eigen::MatrixXd lazy = Eigen::MatrixXd::Identity(n, n) + transition_;
  if (!all_true(power(pattern(lazy), ns)))
    throw InvalidArgument("transition matrix is reducible");
  // Wielandt: a primitive matrix has P^((n-1)^2 + 1) > 0.
  if (!all_true(power(pattern(transition_), (ns - 1) * (ns - 1) + 1)))
    throw InvalidArgument("transition matrix is periodic");

  // (P^T - I) pi = 0 with the normalization row appended.
  Eigen::MatrixXd system(n + 1, n);
  system.topRows(n) = transition_.transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  if (n == 2) {
    const double up = transition_(0, 1), down = transition_(1, 0);
    stationary_ = Eigen::Vector2d(down / (up + down), up / (up + down));
  } else {
    stationary_ = system.colPivHouseholderQr().solve(rhs);
  }
  for (Eigen::Index i = 0; i < n; ++i) stationary_(i) = std::max(0.0, stationary_(i));
  stationary_ /= stationary_.sum();
  const double residual = (stationary_.transpose() * transition_ - stationary_.transpose())
                              .cwiseAbs()
                              .maxCoeff();
  if (residual > 1e-10)
    throw ConsistencyError("stationary vector residual " + std::to_string(residual));

  stationary_cdf_ = running_sum(stationary_);
  for (Eigen::Index i = 0; i < n; ++i) row_cdf_.push_back(running_sum(transition_.row(i)));

  if (n > 1) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(transition_, false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < n; ++i) moduli.push_back(std::abs(solver.eigenvalues()(i)));
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    slem_ = moduli[1];
    // Row-equal chains have lambda_2 = 0 up to round-off.
    if (slem_ < 1e-14) slem_ = 0.0;
  }
}

MarkovTilting MarkovTilting::two_state(double a, double b, double pa, double pb) {
  Eigen::MatrixXd p(2, 2);
  p << pa, 1.0 - pa, 1.0 - pb, pb;
  return MarkovTilting({a, b}, p);
}

Measure MarkovTilting::marginal() const {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < states_.size(); ++i)
    atoms.push_back({states_[i], stationary_(static_cast<Eigen::Index>(i))});
  return Measure::discrete(std::move(atoms));
}

Eigen::MatrixXd MarkovTilting::transition_power(unsigned k) const {
  const auto n = transition_.rows();
  LongMatrix base = transition_.cast<long double>();
  LongMatrix acc = LongMatrix::Identity(n, n);
  while (k) {
    if (k & 1U) acc = acc * base;
    k >>= 1U;
    if (k) base = base * base;
  }
  return acc.cast<double>();
}

Eigen::MatrixXd MarkovTilting::joint_law(unsigned k) const {
  if (k == 0) throw InvalidArgument("joint_law requires k >= 1");
  return stationary_.asDiagonal() * transition_power(k);
}

double alpha_bruteforce(const Eigen::MatrixXd& joint, const Eigen::VectorXd& marginal) {
  const auto n = static_cast<unsigned>(joint.rows());
  const unsigned subsets = 1U << n;
  double best = 0.0;
  for (unsigned a = 0; a < subsets; ++a) {
    double pa = 0.0;
    for (unsigned i = 0; i < n; ++i)
      if (a & (1U << i)) pa += marginal(i);
    for (unsigned b = 0; b < subsets; ++b) {
      double pb = 0.0;
      double pab = 0.0;
      for (unsigned j = 0; j < n; ++j) {
        if (!(b & (1U << j))) continue;
        pb += marginal(j);
        for (unsigned i = 0; i < n; ++i)
          if (a & (1U << i)) pab += joint(i, j);
      }
      best = std::max(best, std::abs(pab - pa * pb));
    }
  }
  return best;
}

double MarkovTilting::alpha(unsigned n) const {
  if (n == 0) throw InvalidArgument("alpha requires n >= 1");
  const Eigen::MatrixXd deviation =
      joint_law(n) - stationary_ * stationary_.transpose();
  const auto s = static_cast<unsigned>(size());
  // Walk all row subsets A in Gray-code order, keeping r = sum_{i in A} D_i.
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s));
  double best = 0.0;
  unsigned previous = 0;
  for (unsigned step = 1; step < (1U << s); ++step) {
    const unsigned gray = step ^ (step >> 1U);
    const unsigned flipped = gray ^ previous;
    const auto bit = static_cast<Eigen::Index>(__builtin_ctz(flipped));
    if (gray & flipped) r += deviation.row(bit).transpose();
    else r -= deviation.row(bit).transpose();
    previous = gray;
    best = std::max(best, best_column_set(r));
  }
  return best;
}

double MarkovTilting::envelope_constant() const {
  if (slem_ == 0.0) return 0.0;
  if (slem_ >= 1.0 - 1e-12)
    throw InvalidArgument("alpha envelope needs second eigenvalue modulus < 1");
  double c = alpha(1) / slem_;
  // Non-normal chains can have alpha_m / lambda^m rising over a transient;
  // scan it while lambda^m is far from underflow-dominated round-off.
  double lambda_m = slem_;
  for (unsigned m = 2; m <= 256; ++m) {
    lambda_m *= slem_;
    if (lambda_m < 1e-6) break;
    c = std::max(c, alpha(m) / lambda_m);
  }
  return c;
}

double MarkovTilting::alpha_tail_bound(unsigned n) const {
  if (n == 0) throw InvalidArgument("alpha_tail_bound requires n >= 1");
  const double c = envelope_constant();
  if (c == 0.0) return 0.0;
  return c * std::pow(slem_, static_cast<double>(n));
}

std::size_t MarkovTilting::sample_stationary_index(Stream& rng) const {
  return draw_index(stationary_cdf_, rng);
}

std::vector<std::size_t> MarkovTilting::sample_indices(std::size_t length, Stream& rng) const {
  std::vector<std::size_t> path;
  path.reserve(length);
  if (length == 0) return path;
  path.push_back(sample_stationary_index(rng));
  for (std::size_t t = 1; t < length; ++t) path.push_back(draw_index(row_cdf_[path.back()], rng));
  return path;
}

Measure TiltingProcess::marginal() const {
  if (const auto* chain = markov()) return chain->marginal();
  return iid()->marginal;
}

std::vector<double> TiltingProcess::sample_path(std::size_t length, Stream& rng) const {
  if (length == 0) throw InvalidArgument("sample_path requires length >= 1");
  std::vector<double> path;
  path.reserve(length);
  if (const auto* chain = markov()) {
    for (std::size_t idx : chain->sample_indices(length, rng)) path.push_back(chain->states()[idx]);
  } else {
    for (std::size_t t = 0; t < length; ++t) path.push_back(iid()->marginal.sample(rng));
  }
  return path;
}

double TiltingProcess::sample_marginal(Stream& rng) const {
  if (const auto* chain = markov()) return chain->states()[chain->sample_stationary_index(rng)];
  return iid()->marginal.sample(rng);
}

double TiltingProcess::alpha(unsigned n) const {
  if (n == 0) throw InvalidArgument("alpha requires n >= 1");
  if (const auto* chain = markov()) return chain->alpha(n);
  return 0.0;
}

}  // namespace qleague
