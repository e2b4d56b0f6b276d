#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace srlx {

// All stochastic draws in the toolkit go through this wrapper. Raw engine
// output is converted explicitly (never via std distributions, whose
// algorithms are implementation-defined), so runs are reproducible and
// checkpoint-resumable bit for bit. Substreams are derived functionally from
// (seed, tags...), which keeps per-instance noise independent of iteration
// order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // splitmix64 finalizer
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static Rng derive(uint64_t seed, std::initializer_list<uint64_t> tags) {
    uint64_t h = mix(seed);
    for (uint64_t t : tags) h = mix(h ^ t);
    return Rng(h);
  }

  uint64_t next() { return engine_(); }

  // strictly inside (0,1); safe under log()
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller without cached spare: stateless beyond the engine
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double gumbel() { return -std::log(-std::log(uniform01())); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform on [0, n); rejection sampling, no modulo bias
  uint64_t below(uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // first k of a Fisher-Yates pass over [0, n)
  std::vector<size_t> sample_without_replacement(size_t n, size_t k);

  std::string serialize() const;
  void restore(const std::string& s);

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
};

uint64_t fnv1a(const std::string& s);

}  // namespace srlx
