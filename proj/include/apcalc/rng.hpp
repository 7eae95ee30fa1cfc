#pragma once
// Deterministic, schedule-independent random streams.
//
// Every stochastic operation derives its draws from a key built out of the
// master seed, an operation tag, and the indices that identify the draw
// (row, sample, node, coordinate). Draws therefore depend only on those
// values, never on evaluation order, so results are bit-identical under any
// parallel schedule.

#include <cmath>
#include <cstdint>

namespace apcalc {

// Operation tags used to keep streams from distinct purposes disjoint.
enum class StreamTag : std::uint64_t {
  mediator_noise = 0x6d65646e,  // estimator-side mediator noise
  source_sample = 0x73726373,   // sample_joint source draws
  mediator_sample = 0x6d656473, // sample_joint mediator draws
  label_sample = 0x6c616273,    // sample_joint label draws
  dominance_outer = 0x646f6d6f, // dominance outer mediator draws
  candidate_sweep = 0x73777065, // separation candidate directions
  scenario = 0x7363656e,        // synth-bench scenario construction
  generic = 0x67656e72,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Key derivation: fold each tuple element through one splitmix round.
inline std::uint64_t derive_key(std::uint64_t seed, StreamTag tag,
                                std::uint64_t a = 0, std::uint64_t b = 0,
                                std::uint64_t c = 0, std::uint64_t d = 0) {
  std::uint64_t h = splitmix64(seed ^ static_cast<std::uint64_t>(tag));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  h = splitmix64(h ^ d);
  return h;
}

// Stateless indexed uniform in (0, 1]. Never returns 0, so log() is safe.
inline double uniform_at(std::uint64_t key, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(key ^ (index * 0xd1342543de82ef95ULL + 1));
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Stateless indexed standard normal (Box-Muller, cosine branch).
inline double gaussian_at(std::uint64_t key, std::uint64_t index) {
  const double u1 = uniform_at(key, 2 * index);
  const double u2 = uniform_at(key, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Small sequential view over a derived key, for code that wants a cursor.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}
  double uniform() { return uniform_at(key_, cursor_++); }
  double gaussian() {
    const double u1 = uniform_at(key_, cursor_++);
    const double u2 = uniform_at(key_, cursor_++);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }
  // Index into cumulative weights; weights need not be normalized.
  int categorical(const double* w, int count) {
    double total = 0.0;
    for (int i = 0; i < count; ++i) total += w[i];
    const double x = uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
      acc += w[i];
      if (x <= acc) return i;
    }
    return count - 1;
  }

 private:
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

// Inverse normal CDF (Acklam's rational approximation, |err| < 1.2e-9).
// Used for deterministic stratified grids over gaussian mediators.
double probit(double p);

}  // namespace apcalc
