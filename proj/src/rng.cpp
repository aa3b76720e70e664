#include "countac/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace countac {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t child_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x632be59bd9b4e019ULL;
  h ^= splitmix64(s);
  s ^= b + 0x9e6c63d0876a9a35ULL;
  h ^= splitmix64(s);
  s ^= c + 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  return h;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  eng_.seed(splitmix64(s));
}

double Rng::u01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n <= 0) return 0;
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;

  const double u = u01();
  const double nd = static_cast<double>(n);
  std::int64_t mode =
      static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  if (mode > n) mode = n;
  if (mode < 0) mode = 0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double md = static_cast<double>(mode);
  double pmf_mode = std::exp(std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                             std::lgamma(nd - md + 1.0) + md * log_p +
                             (nd - md) * log_q);

  // Inverse transform over the reordering mode, mode+1, mode-1, mode+2, ...
  // Mass concentrates at the mode, so the walk terminates quickly and never
  // starts from an underflowed tail probability.
  double acc = pmf_mode;
  if (u < acc) return mode;

  const double ratio = p / (1.0 - p);
  double up_pmf = pmf_mode, down_pmf = pmf_mode;
  std::int64_t up_k = mode, down_k = mode;
  while (up_k < n || down_k > 0) {
    if (up_k < n) {
      up_pmf *= ratio * static_cast<double>(n - up_k) /
                static_cast<double>(up_k + 1);
      ++up_k;
      acc += up_pmf;
      if (u < acc) return up_k;
    }
    if (down_k > 0) {
      down_pmf *= static_cast<double>(down_k) /
                  (ratio * static_cast<double>(n - down_k + 1));
      --down_k;
      acc += down_pmf;
      if (u < acc) return down_k;
    }
  }
  // u fell into the sliver lost to rounding; the mode is the safe answer.
  return mode;
}

void Rng::multinomial(std::int64_t n, std::span<const double> p,
                      std::span<std::int64_t> out) {
  if (p.empty() || out.size() != p.size())
    throw std::invalid_argument("multinomial: size mismatch");

  double tail = 0.0;
  for (double x : p) tail += x;

  std::int64_t rem = n;
  const std::size_t k_last = p.size() - 1;
  for (std::size_t k = 0; k < k_last; ++k) {
    if (rem == 0 || p[k] <= 0.0) {
      out[k] = 0;
      tail -= p[k];
      continue;
    }
    double q = (tail > 0.0) ? p[k] / tail : 1.0;
    if (q > 1.0) q = 1.0;
    const std::int64_t c = binomial(rem, q);
    out[k] = c;
    rem -= c;
    tail -= p[k];
  }
  if (rem > 0 && p[k_last] <= 0.0) {
    // Remainder cannot sit on a zero-probability cell; move it to the most
    // likely one. Only reachable through pathological rounding of `tail`.
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
      if (p[k] > p[best]) best = k;
    out[k_last] = 0;
    out[best] += rem;
    return;
  }
  out[k_last] = rem;
}

int Rng::categorical(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("categorical: empty support");
  double total = 0.0;
  for (double x : p) total += x;
  if (total <= 0.0)
    throw std::invalid_argument("categorical: no positive mass");
  const double u = u01() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    acc += p[k];
    last_positive = static_cast<int>(k);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

}  // namespace countac
