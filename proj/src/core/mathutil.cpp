#include "core/mathutil.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

namespace ncx {

double gamma_pos(double x) {
  if (!(x > 0.0)) throw Error(errc::invalid_argument, "gamma_pos: argument must be positive");
  return std::exp(std::lgamma(x));
}

double double_factorial_odd(int n) {
  if (n < -1) throw Error(errc::invalid_argument, "double_factorial_odd: n < -1");
  double r = 1.0;
  for (int k = n; k >= 2; k -= 2) r *= k;
  return r;
}

double factorial(int n) {
  if (n < 0) throw Error(errc::invalid_argument, "factorial: negative argument");
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    gl.x[i] = -z;
    gl.x[n - 1 - i] = z;
    gl.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    gl.w[n - 1 - i] = gl.w[i];
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw Error(errc::invalid_argument, "gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

namespace {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = splitmix64(a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0xd6e8feb86659fd93ULL));
  return h;
}

double normal_draw(uint64_t seed, uint64_t stream, uint64_t counter) {
  const uint64_t u = mix64(seed, stream, 2 * counter);
  const uint64_t v = mix64(seed, stream, 2 * counter + 1);
  // u1 in (0, 1]: avoids log(0).
  const double u1 = (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t nthreads = workers > 0 ? static_cast<std::size_t>(workers) : hw;
  nthreads = std::min<std::size_t>(nthreads, n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += nthreads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::string format_double(double v) {
  char buf[64];
  // %.17g always round-trips; trim to the shortest form that still does.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (std::isnan(back) && std::isnan(v))) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ncx
