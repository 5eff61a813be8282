#pragma once

// Reference computations for tests, independent of the sampler code paths.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Posterior of xi ~ N(0, diag(prior_var)), d = A xi + N(0, sigma^2 I).
inline Gaussian conjugate_posterior(const Eigen::MatrixXd &a,
                                    const Eigen::VectorXd &d, double sigma,
                                    const Eigen::VectorXd &prior_var) {
  const Eigen::MatrixXd precision =
      Eigen::MatrixXd(prior_var.cwiseInverse().asDiagonal()) +
      a.transpose() * a / (sigma * sigma);
  Gaussian g;
  g.cov = precision.inverse();
  g.mean = g.cov * a.transpose() * d / (sigma * sigma);
  return g;
}

// Batch-means Monte Carlo standard error of the mean of a correlated series.
inline double batch_means_se(const std::vector<double> &x, int batches = 40) {
  const auto n = x.size();
  const auto len = n / batches;
  double grand = 0.0;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < len; ++i)
      means[b] += x[b * len + i];
    means[b] /= static_cast<double>(len);
    grand += means[b];
  }
  grand /= batches;
  double var = 0.0;
  for (double m : means)
    var += (m - grand) * (m - grand);
  var /= (batches - 1);
  return std::sqrt(var / batches);
}

struct MomentCheck {
  double max_mean_z = 0.0; // |estimate - truth| / MCSE, worst entry
  double max_cov_z = 0.0;
};

// Compares chain moments against a Gaussian, in units of batch-means
// standard errors. Covariance entries use the series (x_i - m_i)(x_j - m_j)
// around the true mean.
inline MomentCheck compare_moments(const std::vector<Eigen::VectorXd> &samples,
                                   const Gaussian &truth) {
  MomentCheck out;
  const auto p = truth.mean.size();
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> xi;
    for (const auto &s : samples)
      xi.push_back(s(i));
    double m = 0.0;
    for (double v : xi)
      m += v;
    m /= static_cast<double>(xi.size());
    out.max_mean_z = std::max(out.max_mean_z,
                              std::abs(m - truth.mean(i)) / batch_means_se(xi));
    for (Eigen::Index j = 0; j <= i; ++j) {
      std::vector<double> prod;
      for (const auto &s : samples)
        prod.push_back((s(i) - truth.mean(i)) * (s(j) - truth.mean(j)));
      double c = 0.0;
      for (double v : prod)
        c += v;
      c /= static_cast<double>(prod.size());
      out.max_cov_z = std::max(out.max_cov_z,
                               std::abs(c - truth.cov(i, j)) / batch_means_se(prod));
    }
  }
  return out;
}

} // namespace oracle
