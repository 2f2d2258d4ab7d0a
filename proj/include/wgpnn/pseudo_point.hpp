#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wgpnn {

/// A decoder-generated GP training example: log-scaled time offset, logit
/// value and importance weight.
struct PseudoPoint {
  double tau = 0.0;
  double logit = 0.0;
  double weight = 1.0;
};

/// N pseudo-points for each of C candidate objects, candidate-major.
class PseudoPointSet {
 public:
  PseudoPointSet() = default;
  PseudoPointSet(std::size_t candidates, std::size_t points_per_candidate)
      : candidates_(candidates), per_candidate_(points_per_candidate),
        points_(candidates * points_per_candidate) {}

  std::size_t candidates() const noexcept { return candidates_; }
  std::size_t points_per_candidate() const noexcept { return per_candidate_; }

  std::span<PseudoPoint> candidate(std::size_t c) {
    return std::span(points_).subspan(c * per_candidate_, per_candidate_);
  }
  std::span<const PseudoPoint> candidate(std::size_t c) const {
    return std::span(points_).subspan(c * per_candidate_, per_candidate_);
  }
  std::span<PseudoPoint> all() noexcept { return points_; }
  std::span<const PseudoPoint> all() const noexcept { return points_; }

 private:
  std::size_t candidates_ = 0;
  std::size_t per_candidate_ = 0;
  std::vector<PseudoPoint> points_;
};

}  // namespace wgpnn
