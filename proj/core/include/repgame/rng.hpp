#pragma once

#include <cstdint>
#include <span>

namespace repgame {

// Small deterministic generator (splitmix64). Sampling helpers are written
// out by hand so that streams are identical across standard libraries and
// across thread counts: replication r always draws from derive(seed, r).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
    // warm up so that small seeds do not produce correlated first draws
    next_u64();
    next_u64();
  }

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    Rng base(seed);
    base.state_ += 0xbf58476d1ce4e5b9ull * (stream + 1);
    base.next_u64();
    return base;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // index sampled proportionally to w (w need not be exactly normalized)
  int categorical(std::span<const double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform() * total;
    double cum = 0.0;
    int last = 0;
    for (int i = 0; i < static_cast<int>(w.size()); ++i) {
      if (w[i] <= 0.0) continue;
      cum += w[i];
      last = i;
      if (u < cum) return i;
    }
    return last;
  }

 private:
  std::uint64_t state_;
};

}  // namespace repgame
