#pragma once

#include <cstddef>
#include <numbers>

namespace fluxsense {

// Cell-centred polar discretization of the closed unit disc.
//
// Radial nodes sit at r_j = (j + 1/2) h_r for j = 0 .. n_r-1 with
// h_r = 1 / (n_r - 1/2), so the last ring lies on r = 1 and carries the
// Dirichlet condition. There is no node at the pole. Angular nodes are
// theta_k = k h_theta with h_theta = 2 pi / n_theta, periodic in k.
class PolarGrid {
public:
  PolarGrid(int n_r, int n_theta);

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double h_r() const { return h_r_; }
  double h_theta() const { return h_theta_; }

  double r(int j) const { return (j + 0.5) * h_r_; }
  double theta(int k) const { return k * h_theta_; }

  // Row-major over (radial, angular).
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * n_theta_ + k;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(n_r_) * n_theta_;
  }
  // Unknowns exclude the Dirichlet ring.
  std::size_t interior_size() const {
    return static_cast<std::size_t>(n_r_ - 1) * n_theta_;
  }

  bool operator==(const PolarGrid &other) const {
    return n_r_ == other.n_r_ && n_theta_ == other.n_theta_;
  }

private:
  int n_r_;
  int n_theta_;
  double h_r_;
  double h_theta_;
};

} // namespace fluxsense
