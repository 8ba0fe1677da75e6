// Shared numeric utilities: error type, gamma helpers, Gauss-Legendre rules,
// deterministic summation and the counter-based normal generator.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncx {

enum class errc {
  invalid_argument = 1,
  domain = 2,
  parse = 3,
  io = 4,
  check_failed = 5,
  internal = 6,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

private:
  errc code_;
};

constexpr double kPi = 3.14159265358979323846264338327950288;

// Gamma(x) for x > 0, evaluated through lgamma so that half-integer
// arguments up to a few hundred stay finite.
double gamma_pos(double x);

// (n-1)!! with (-1)!! = 1.
double double_factorial_odd(int n);

double factorial(int n);

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
const GaussLegendre& gauss_legendre(int n);

// Order-independent pairwise summation; the reduction tree depends only on
// the slot order, never on the worker count.
double pairwise_sum(std::span<const double> v);

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel sampling is reproducible.
uint64_t mix64(uint64_t a, uint64_t b, uint64_t c);
double normal_draw(uint64_t seed, uint64_t stream, uint64_t counter);

// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must only touch
// slot i of any shared output.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Shortest decimal representation that round-trips a double (for CSV/JSON).
std::string format_double(double v);

// FNV-1a, used for content hashes in reports.
uint64_t fnv1a(std::string_view s);

}  // namespace ncx
