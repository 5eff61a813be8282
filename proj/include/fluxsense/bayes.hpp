#pragma once

#include "fluxsense/geometry.hpp"
#include "fluxsense/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace fluxsense {

// Potential assigned to parameters outside the admissible set.
inline constexpr double kRejectedPotential =
    std::numeric_limits<double>::infinity();

// Diagonal Gaussian prior N(0, diag(variances)).
struct PriorSpec {
  Eigen::VectorXd variances;

  static PriorSpec identity(int dimension);
  // B_11 = 1, B_{i+1,i+1} = B_{i+M+1,i+M+1} = 1/i^2.
  static PriorSpec star(int harmonics);

  int dimension() const { return static_cast<int>(variances.size()); }
  Eigen::MatrixXd covariance() const;
  void validate() const;
};

struct Observation {
  double time = 0.0;
  int sensor_index = 0;
  double value = 0.0;
};

struct ObservationSet {
  std::vector<Observation> entries;
  double sigma = 1.0;

  Eigen::VectorXd values() const;
  // Throws InvalidParameter on sigma <= 0, decreasing times, or a sensor
  // index outside [0, n_theta).
  void validate(int n_theta) const;
};

struct ProposalConfig {
  double beta = 0.5;    // initial step; fixed if auto_tune is off
  bool auto_tune = true;
  int n_warm = 0;       // pure pCN iterations before switching to adaptive pCN
  int n_total = 1000;
  int k0 = 2500;        // covariance refresh period
  double accept_low = 0.30;
  double accept_high = 0.40;
  double tune_fraction = 0.2;
  double jitter_scale = 1e-8; // jitter = jitter_scale * trace(B) / p
  int field_thinning = 10;

  void validate() const;
};

// Everything one forward solve produces for a parameter vector.
struct ForwardResult {
  Eigen::VectorXd predictions;  // aligned with ObservationSet::entries
  std::vector<double> ring;     // boundary flux ring at the end of the window
  std::vector<double> field;    // end-of-window field
};

class ForwardModel {
public:
  virtual ~ForwardModel() = default;
  // nullopt marks an inadmissible parameter (zero prior mass).
  virtual std::optional<ForwardResult>
  evaluate(const UnconstrainedParams &xi) const = 0;
};

// ||d - g||^2 / (2 sigma^2).
double potential(const Eigen::VectorXd &predictions, const ObservationSet &obs);

double misfit(const UnconstrainedParams &xi, const ObservationSet &obs,
              const ForwardModel &forward);

// Step scalar of the pCN proposal obtained from the Crank-Nicolson step
// size delta: 2 sqrt(2 delta) / (2 + delta).
double beta_from_delta(double delta);

UnconstrainedParams pcn_propose(const UnconstrainedParams &xi, double beta,
                                const PriorSpec &prior, Rng &rng);

struct EmpiricalCovariance {
  Eigen::MatrixXd C;
};

// Unbiased sample covariance plus jitter * I. Falls back to the prior
// covariance when fewer than two samples are available.
EmpiricalCovariance empirical_cov(const std::vector<Eigen::VectorXd> &samples,
                                  double jitter, const PriorSpec &prior);

// Adaptive pCN proposal
//   xi* = B^{1/2} sqrt(I - beta^2 S) B^{-1/2} xi + beta w,  w ~ N(0, C),
// with S = B^{-1/2} C B^{-1/2}. The eigen-decomposition of S is computed
// once per covariance; negative eigenvalues of I - beta^2 S are clipped to 0.
class AdaptivePcnKernel {
public:
  AdaptivePcnKernel(const PriorSpec &prior, const EmpiricalCovariance &emp);

  UnconstrainedParams propose(const UnconstrainedParams &xi, double beta,
                              Rng &rng) const;

  // Deterministic part B^{1/2} sqrt(I - beta^2 S) B^{-1/2}.
  Eigen::MatrixXd mean_operator(double beta) const;

  // Largest beta with beta^2 S <= I, the range on which the kernel is
  // reversible with respect to the prior. At least 1 when C <= B.
  double max_beta() const;

private:
  Eigen::VectorXd sqrt_b_;
  Eigen::MatrixXd s_vectors_;
  Eigen::VectorXd s_values_;
  Eigen::MatrixXd noise_factor_; // lower Cholesky factor of C
};

UnconstrainedParams apcn_propose(const UnconstrainedParams &xi, double beta,
                                 const PriorSpec &prior,
                                 const EmpiricalCovariance &emp, Rng &rng);

double acceptance_probability(double phi_current, double phi_proposed);

// Metropolis test with probability min(1, exp(phi_current - phi_proposed)).
// Always consumes exactly one uniform draw.
bool accept(double phi_current, double phi_proposed, Rng &rng);

struct PosteriorEnsemble {
  std::vector<Eigen::VectorXd> samples;   // chain state after each iteration
  std::vector<double> potentials;
  std::vector<std::uint8_t> accepted;
  std::vector<std::vector<double>> flux_rings;
  std::vector<std::vector<double>> fields;     // thinned
  std::vector<std::size_t> field_sample_index; // sample index per stored field
  std::size_t accept_count = 0;
  double final_beta = 0.0;

  std::size_t size() const { return samples.size(); }
  double acceptance_rate() const;
  // First retained index after discarding a leading fraction.
  std::size_t burn_in_index(double fraction) const;
};

struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double acceptance_rate = 0.0;
  std::size_t retained = 0;
};

PosteriorSummary summarize(const PosteriorEnsemble &ensemble,
                           double burn_fraction);

// Algorithm: N1 pCN iterations, then adaptive pCN with the empirical
// covariance of all samples so far refreshed every k0 iterations. Each
// proposal phase (start, switch to adaptive pCN, every refresh) adapts beta
// by Robbins-Monro during its first tune_fraction of iterations toward the
// middle of the acceptance band and then freezes it.
PosteriorEnsemble run_chain(const UnconstrainedParams &initial_xi,
                            const ObservationSet &obs, const PriorSpec &prior,
                            const ProposalConfig &cfg,
                            const ForwardModel &forward, Rng &rng);

} // namespace fluxsense
