#pragma once

#include <cstdint>
#include <random>

#include "gconvex/box.hpp"

namespace gcx {

/// The single generator used for all randomness: std::mt19937_64 seeded
/// with the run seed. Doubles are formed from the top 53 bits so streams are
/// identical across standard libraries (std::uniform_real_distribution is
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  Point point_in(const Box& box) {
    Point p(box.lower().size());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = uniform(box.lower()[i], box.upper()[i]);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gcx
