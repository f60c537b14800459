#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "flowercell/limit_laws.hpp"

namespace flowercell {

class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_{0};
  double mean_{0.0};
  double m2_{0.0};
};

struct EstimatorReport {
  std::string name;
  double lambda{0.0};
  std::size_t n{0};
  double mean{0.0};
  double variance{0.0};
  double std_error{0.0};
  double ci_lo{0.0};
  double ci_hi{0.0};
  double theory_value{std::nan("")};
  Rate rescale_rate{Rate::None};
  std::uint64_t seed{0};
};

inline EstimatorReport make_report(std::string name, double lambda, const Welford& w, double theory, Rate rate,
                                   std::uint64_t seed) {
  EstimatorReport r;
  r.name = std::move(name);
  r.lambda = lambda;
  r.n = w.count();
  r.mean = w.mean();
  r.variance = w.variance();
  r.std_error = w.std_error();
  r.ci_lo = r.mean - 1.96 * r.std_error;
  r.ci_hi = r.mean + 1.96 * r.std_error;
  r.theory_value = theory;
  r.rescale_rate = rate;
  r.seed = seed;
  return r;
}

inline EstimatorReport make_report(std::string name, double lambda, const std::vector<double>& xs, double theory,
                                   Rate rate, std::uint64_t seed) {
  Welford w;
  for (double x : xs) w.add(x);
  return make_report(std::move(name), lambda, w, theory, rate, seed);
}

struct KsResult {
  double statistic;
  double p_value;
};

// Asymptotic Kolmogorov tail Q(t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
inline double kolmogorov_tail(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// One-sample KS test; `cdf_sorted` gives the model CDF at each sorted sample.
inline KsResult ks_test_sorted(const std::vector<double>& cdf_sorted) {
  const double n = static_cast<double>(cdf_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_sorted.size(); ++i) {
    const double f = cdf_sorted[i];
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)};
}

template <class Cdf>
KsResult ks_test(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> f(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) f[i] = cdf(samples[i]);
  return ks_test_sorted(f);
}

// Least-squares slope of y on x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Worker count: FLOWERCELL_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FLOWERCELL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

// out[i] = f(i) for i < n, computed on `workers` threads with a static interleaved
// partition; results do not depend on the worker count.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, const F& f, unsigned workers = 0) {
  if (workers == 0) workers = worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<T> out(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace flowercell
