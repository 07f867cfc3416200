#include "qleague/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

#include "qleague/error.hpp"
#include "qleague/parallel.hpp"

namespace qleague {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

RealBuffer real_buffer(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer complex_buffer(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

void fill_moments(NormalityReport& r, std::span<const double> samples) {
  r.sample_size = samples.size();
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  r.sample_mean = mean;
  r.sample_var = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::span<const double> samples, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgument("KS target variance must be positive and finite");
  if (samples.empty()) throw InvalidArgument("KS needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i] / sd);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

NormalityReport ks_against_normal(std::span<const double> samples, double variance,
                                  double var_tol, std::optional<double> threshold) {
  if (samples.size() < 100) throw InvalidArgument("normality check needs >= 100 samples");
  NormalityReport r;
  r.target_var = variance;
  r.var_tol = var_tol;
  r.ks_statistic = ks_statistic_normal(samples, variance);
  fill_moments(r, samples);
  r.ks_threshold = threshold.value_or(1.36 / std::sqrt(static_cast<double>(samples.size())));
  r.ks_pass = r.ks_statistic <= r.ks_threshold;
  r.var_pass = std::abs(r.sample_var / variance - 1.0) <= var_tol;
  r.pass = r.ks_pass && r.var_pass;
  return r;
}

std::vector<double> standardized_wins(const QuenchedEnvironment& env, const TiltingProcess& proc,
                                      const WinFunction& w, std::size_t replicas,
                                      const CltOptions& options) {
  const double mean = expected_wins_quenched(env, proc.marginal(), w, options.tol);
  const std::vector<ReplicaResult> results =
      run_replicas(env, proc, w, replicas, SimMode::focal, options.threads);
  const double scale = std::sqrt(static_cast<double>(env.two_n));
  std::vector<double> z;
  z.reserve(results.size());
  for (std::size_t r = 0; r < results.size(); ++r) {
    double wins = results[r].wins_focal;
    if (options.continuity_jitter) {
      Stream jitter = Stream::derive(options.seed, "jitter", r);
      wins += jitter.uniform() - 0.5;
    }
    z.push_back((wins - mean) / scale);
  }
  return z;
}

NormalityReport clt_check_wins(const QuenchedEnvironment& env, const TiltingProcess& proc,
                               const WinFunction& w, std::size_t replicas,
                               const LimitReport& report, const CltOptions& options) {
  if (replicas < 1000) throw InvalidArgument("clt_check_wins needs >= 1000 replicas");
  const std::vector<double> z = standardized_wins(env, proc, w, replicas, options);
  return ks_against_normal(z, report.total_var(), options.var_tol);
}

std::vector<double> gsum_samples(const BoundedKernel& g, const TiltingProcess& proc,
                                 std::span<const double> strengths, std::size_t replicas,
                                 std::uint64_t seed, double tol, unsigned threads) {
  const std::size_t length = strengths.size();
  if (length == 0) throw InvalidArgument("g-sum needs at least one strength");
  const double scale = std::sqrt(static_cast<double>(length + 1));
  const Measure nu = proc.marginal();
  std::vector<double> centers(length);
  for (std::size_t j = 0; j < length; ++j)
    centers[j] = nu.expect([&](double v) { return g.g(v, strengths[j]); }, tol);

  std::vector<double> out(replicas);
  if (const auto* chain = proc.markov()) {
    // Precompute g~(state_i, s_j) so each replica is a table walk.
    const std::size_t n_states = chain->size();
    std::vector<double> table(n_states * length);
    for (std::size_t i = 0; i < n_states; ++i)
      for (std::size_t j = 0; j < length; ++j)
        table[i * length + j] = g.g(chain->states()[i], strengths[j]) - centers[j];
    parallel_for(replicas, threads, [&](std::size_t r) {
      Stream rng = Stream::derive(seed, "gsum", r);
      const std::vector<std::size_t> path = chain->sample_indices(length, rng);
      double acc = 0.0;
      for (std::size_t j = 0; j < length; ++j) acc += table[path[j] * length + j];
      out[r] = acc / scale;
    });
  } else {
    parallel_for(replicas, threads, [&](std::size_t r) {
      Stream rng = Stream::derive(seed, "gsum", r);
      const std::vector<double> path = proc.sample_path(length, rng);
      double acc = 0.0;
      for (std::size_t j = 0; j < length; ++j) acc += g.g(path[j], strengths[j]) - centers[j];
      out[r] = acc / scale;
    });
  }
  return out;
}

GsumCheck clt_check_gsum(const BoundedKernel& g, const TiltingProcess& proc, const Measure& mu,
                         std::span<const double> strengths, std::size_t replicas,
                         const CltOptions& options) {
  if (replicas < 1000) throw InvalidArgument("clt_check_gsum needs >= 1000 replicas");
  GsumCheck check;
  if (const auto* chain = proc.markov()) {
    check.rho2 = rho2_markov(g, *chain, mu, 1e-10).rho2;
  } else {
    check.rho2 = rho2_iid(g, proc.marginal(), mu, 1e-10);
  }
  const std::vector<double> samples =
      gsum_samples(g, proc, strengths, replicas, options.seed, options.tol, options.threads);
  constexpr double kZero = 1e-14;
  if (check.rho2 <= kZero) {
    NormalityReport& r = check.normality;
    fill_moments(r, samples);
    r.target_var = check.rho2;
    r.var_tol = options.var_tol;
    r.ks_threshold = 1.36 / std::sqrt(static_cast<double>(samples.size()));
    const bool all_zero =
        std::all_of(samples.begin(), samples.end(), [](double x) { return std::abs(x) <= 1e-12; });
    r.degenerate = all_zero;
    r.ks_pass = r.var_pass = r.pass = all_zero;
    return check;
  }
  check.normality = ks_against_normal(samples, check.rho2, options.var_tol);
  return check;
}

ShiftKernel ShiftKernel::general(std::function<double(double, double)> h) {
  ShiftKernel k;
  k.h = std::move(h);
  return k;
}

ShiftKernel ShiftKernel::product(std::function<double(double)> phi,
                                 std::function<double(double)> psi) {
  ShiftKernel k;
  k.separable.emplace_back(std::move(phi), std::move(psi));
  return k;
}

double ShiftKernel::operator()(double x, double y) const {
  if (h) return h(x, y);
  double acc = 0.0;
  for (const auto& [phi, psi] : separable) acc += phi(x) * psi(y);
  return acc;
}

std::vector<double> shift_sums_direct(std::span<const double> samples, const ShiftKernel& h) {
  const std::size_t n = samples.size() / 2;
  std::vector<double> sums(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += h(samples[i], samples[i + k]);
    sums[k - 1] = acc;
  }
  return sums;
}

std::vector<double> shift_sums_fft(std::span<const double> samples, const ShiftKernel& h) {
  if (h.h) throw InvalidArgument("FFT shift sums need a separable kernel");
  const std::size_t n = samples.size() / 2;
  const std::size_t len = 2 * n;  // i + k <= 2n - 1, so no circular wrap
  const std::size_t spectrum = len / 2 + 1;
  std::vector<double> sums(n, 0.0);
  auto a = real_buffer(len);
  auto b = real_buffer(len);
  auto out = real_buffer(len);
  auto fa = complex_buffer(spectrum);
  auto fb = complex_buffer(spectrum);
  const auto ilen = static_cast<int>(len);
  Plan forward_a(fftw_plan_dft_r2c_1d(ilen, a.get(), fa.get(), FFTW_ESTIMATE));
  Plan forward_b(fftw_plan_dft_r2c_1d(ilen, b.get(), fb.get(), FFTW_ESTIMATE));
  Plan backward(fftw_plan_dft_c2r_1d(ilen, fa.get(), out.get(), FFTW_ESTIMATE));
  for (const auto& [phi, psi] : h.separable) {
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = i < n ? phi(samples[i]) : 0.0;
      b[i] = psi(samples[i]);
    }
    fftw_execute(forward_a.get());
    fftw_execute(forward_b.get());
    // Cross-correlation: conj(A) * B.
    for (std::size_t f = 0; f < spectrum; ++f) {
      const std::complex<double> ca(fa[f][0], -fa[f][1]);
      const std::complex<double> cb(fb[f][0], fb[f][1]);
      const std::complex<double> c = ca * cb;
      fa[f][0] = c.real();
      fa[f][1] = c.imag();
    }
    fftw_execute(backward.get());
    for (std::size_t k = 1; k <= n; ++k) sums[k - 1] += out[k] / static_cast<double>(len);
  }
  return sums;
}

ShiftDeviation uniform_shift_deviation(std::span<const double> samples, const ShiftKernel& h,
                                       double bound, double delta) {
  if (samples.size() < 4 || samples.size() % 2 != 0)
    throw InvalidArgument("uniform_shift_deviation needs an even number (>= 4) of samples");
  if (!(bound > 0.0)) throw InvalidArgument("bound A must be positive");
  const std::size_t n = samples.size() / 2;

  // Bound check: for a separable kernel, max|phi| max|psi| dominates every pair.
  if (h.h) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 1; k <= n; ++k)
        if (std::abs(h(samples[i], samples[i + k])) > bound)
          throw InvalidArgument("|h| exceeds the declared bound");
  } else {
    double envelope = 0.0;
    for (const auto& [phi, psi] : h.separable) {
      double mphi = 0.0;
      double mpsi = 0.0;
      for (double x : samples) {
        mphi = std::max(mphi, std::abs(phi(x)));
        mpsi = std::max(mpsi, std::abs(psi(x)));
      }
      envelope += mphi * mpsi;
    }
    if (envelope > bound) throw InvalidArgument("|h| exceeds the declared bound");
  }

  ShiftDeviation out;
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) pair_sum += h(samples[2 * i], samples[2 * i + 1]);
  out.mean_estimate = pair_sum / static_cast<double>(n);

  const std::vector<double> sums = h.h ? shift_sums_direct(samples, h) : shift_sums_fft(samples, h);
  for (double s : sums)
    out.sup_dev = std::max(out.sup_dev, std::abs(s / static_cast<double>(n) - out.mean_estimate));
  const double nd = static_cast<double>(n);
  out.eps_star = std::sqrt(18.0 * bound * bound * std::log(2.0 * nd / delta) / nd);
  out.concentration_ok = out.sup_dev <= out.eps_star;
  return out;
}

double sup_distance(std::span<const double> curve, std::span<const double> predicted) {
  if (curve.size() != predicted.size()) throw InvalidArgument("curve lengths differ");
  double d = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) d = std::max(d, std::abs(curve[i] - predicted[i]));
  return d;
}

}  // namespace qleague
