#include "qleague/match_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qleague/error.hpp"

namespace qleague {
namespace {

std::size_t bracket(const std::vector<double>& grid, double v) {
  auto it = std::upper_bound(grid.begin(), grid.end(), v);
  if (it == grid.begin()) return 0;
  auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

}  // namespace

WinFunction WinFunction::ratio() {
  WinFunction w;
  w.kind_ = Kind::ratio;
  return w;
}

WinFunction WinFunction::transformed_ratio(double c1, double c2) {
  if (!(c1 > 0.0) || !std::isfinite(c1)) throw InvalidArgument("transformed_ratio needs c1 > 0");
  if (!(c2 > 0.0 && c2 < 1.0)) throw InvalidArgument("transformed_ratio needs c2 in (0, 1)");
  WinFunction w;
  w.kind_ = Kind::transformed_ratio;
  w.c1_ = c1;
  w.c2_ = c2;
  return w;
}

WinFunction WinFunction::const_half() { return WinFunction(); }

WinFunction WinFunction::table(std::vector<double> xs, std::vector<double> ys,
                               std::vector<std::vector<double>> values) {
  if (xs.size() < 2 || ys.size() < 2) throw InvalidArgument("table needs at least a 2x2 grid");
  if (!std::is_sorted(xs.begin(), xs.end()) || !std::is_sorted(ys.begin(), ys.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end() ||
      std::adjacent_find(ys.begin(), ys.end()) != ys.end())
    throw InvalidArgument("table grid coordinates must be strictly increasing");
  if (values.size() != xs.size()) throw InvalidArgument("table needs one row per x value");
  for (const auto& row : values) {
    if (row.size() != ys.size()) throw InvalidArgument("table needs one column per y value");
    for (double v : row)
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("table values must lie in [0, 1]");
  }
  WinFunction w;
  w.kind_ = Kind::table;
  w.xs_ = std::move(xs);
  w.ys_ = std::move(ys);
  w.values_ = std::move(values);
  return w;
}

double WinFunction::interpolate(double x, double y) const {
  x = std::clamp(x, xs_.front(), xs_.back());
  y = std::clamp(y, ys_.front(), ys_.back());
  const std::size_t i = bracket(xs_, x);
  const std::size_t j = bracket(ys_, y);
  const double tx = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  const double ty = (y - ys_[j]) / (ys_[j + 1] - ys_[j]);
  const double v = (1 - tx) * (1 - ty) * values_[i][j] + tx * (1 - ty) * values_[i + 1][j] +
                   (1 - tx) * ty * values_[i][j + 1] + tx * ty * values_[i + 1][j + 1];
  return std::clamp(v, 0.0, 1.0);
}

double WinFunction::operator()(double x, double y) const {
  switch (kind_) {
    case Kind::const_half:
      return 0.5;
    case Kind::ratio: {
      const double sum = x + y;
      if (!(sum > 0.0)) throw DomainError("ratio win function undefined at (0, 0)");
      return x / sum;
    }
    case Kind::transformed_ratio: {
      // g <= 0; g(0) = 0 and g saturates at log(1 - c2) once x >= c1 * c2.
      const double gx = std::log1p(-std::min(x / c1_, c2_));
      const double gy = std::log1p(-std::min(y / c1_, c2_));
      const double sum = gx + gy;
      if (!(sum < 0.0)) throw DomainError("transformed_ratio win function undefined at (0, 0)");
      return gx / sum;
    }
    case Kind::table:
      return interpolate(x, y);
  }
  return 0.5;
}

bool WinFunction::is_monotone() const {
  if (kind_ != Kind::table) return true;
  for (std::size_t i = 0; i < xs_.size(); ++i)
    for (std::size_t j = 0; j < ys_.size(); ++j) {
      if (i + 1 < xs_.size() && values_[i + 1][j] < values_[i][j]) return false;
      if (j + 1 < ys_.size() && values_[i][j + 1] > values_[i][j]) return false;
    }
  return true;
}

std::string WinFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::const_half: os << "const_half"; break;
    case Kind::ratio: os << "ratio"; break;
    case Kind::transformed_ratio:
      os << "transformed_ratio(c1=" << c1_ << ", c2=" << c2_ << ")";
      break;
    case Kind::table: os << "table(" << xs_.size() << "x" << ys_.size() << ")"; break;
  }
  return os.str();
}

double Kernel::F(double s, double x, double y, double tol) const {
  const double sx = s * x;
  return nu_.expect([&](double v) { return win_(sx, y * v); }, tol);
}

double Kernel::G(double s, double y, double tol) const {
  return nu_.expect([&](double v) { return F(s, v, y, 0.5 * tol); }, 0.5 * tol);
}

double Kernel::F_tilde(double s, double x, double y, double tol) const {
  return F(s, x, y, 0.5 * tol) - G(s, y, 0.5 * tol);
}

}  // namespace qleague
