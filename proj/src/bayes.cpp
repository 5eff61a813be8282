#include "fluxsense/bayes.hpp"

#include "fluxsense/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace fluxsense {

PriorSpec PriorSpec::identity(int dimension) {
  if (dimension < 1)
    throw InvalidParameter("PriorSpec: dimension must be positive");
  return PriorSpec{Eigen::VectorXd::Ones(dimension)};
}

PriorSpec PriorSpec::star(int harmonics) {
  if (harmonics < 1)
    throw InvalidParameter("PriorSpec: star prior needs harmonics >= 1");
  Eigen::VectorXd v(2 * harmonics + 1);
  v(0) = 1.0;
  for (int i = 1; i <= harmonics; ++i) {
    v(i) = 1.0 / (i * i);
    v(i + harmonics) = 1.0 / (i * i);
  }
  return PriorSpec{v};
}

Eigen::MatrixXd PriorSpec::covariance() const {
  return variances.asDiagonal();
}

void PriorSpec::validate() const {
  if (variances.size() == 0 || !variances.allFinite() ||
      (variances.array() <= 0.0).any())
    throw InvalidParameter("PriorSpec: variances must be positive and finite");
}

Eigen::VectorXd ObservationSet::values() const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i)
    d(static_cast<Eigen::Index>(i)) = entries[i].value;
  return d;
}

void ObservationSet::validate(int n_theta) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidParameter("ObservationSet: sigma must be positive");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto &e = entries[i];
    if (e.sensor_index < 0 || e.sensor_index >= n_theta)
      throw InvalidParameter("ObservationSet: sensor index out of range");
    if (i > 0 && e.time < entries[i - 1].time)
      throw InvalidParameter("ObservationSet: times must be nondecreasing");
    if (!std::isfinite(e.value))
      throw InvalidParameter("ObservationSet: non-finite datum");
  }
}

void ProposalConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0))
    throw InvalidParameter("ProposalConfig: beta must lie in (0, 1]");
  if (n_total < 1 || n_warm < 0 || n_warm > n_total)
    throw InvalidParameter("ProposalConfig: need 0 <= n_warm <= n_total, n_total >= 1");
  if (k0 < 1)
    throw InvalidParameter("ProposalConfig: k0 must be >= 1");
  if (!(accept_low > 0.0 && accept_low < accept_high && accept_high < 1.0))
    throw InvalidParameter("ProposalConfig: invalid acceptance band");
  if (!(tune_fraction >= 0.0 && tune_fraction <= 1.0))
    throw InvalidParameter("ProposalConfig: tune_fraction must lie in [0, 1]");
  if (!(jitter_scale >= 0.0))
    throw InvalidParameter("ProposalConfig: jitter_scale must be >= 0");
  if (field_thinning < 1)
    throw InvalidParameter("ProposalConfig: field_thinning must be >= 1");
}

double potential(const Eigen::VectorXd &predictions, const ObservationSet &obs) {
  if (predictions.size() != static_cast<Eigen::Index>(obs.entries.size()))
    throw InvalidParameter("potential: prediction/observation size mismatch");
  const Eigen::VectorXd r = obs.values() - predictions;
  return r.squaredNorm() / (2.0 * obs.sigma * obs.sigma);
}

double misfit(const UnconstrainedParams &xi, const ObservationSet &obs,
              const ForwardModel &forward) {
  const auto result = forward.evaluate(xi);
  if (!result)
    return kRejectedPotential;
  return potential(result->predictions, obs);
}

double beta_from_delta(double delta) {
  if (!(delta >= 0.0))
    throw InvalidParameter("beta_from_delta: delta must be >= 0");
  return 2.0 * std::sqrt(2.0 * delta) / (2.0 + delta);
}

namespace {

Eigen::VectorXd standard_normal_vector(Eigen::Index n, Rng &rng) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i)
    z(i) = standard_normal(rng);
  return z;
}

} // namespace

UnconstrainedParams pcn_propose(const UnconstrainedParams &xi, double beta,
                                const PriorSpec &prior, Rng &rng) {
  if (xi.size() != prior.variances.size())
    throw InvalidParameter("pcn_propose: dimension mismatch");
  const Eigen::VectorXd w =
      prior.variances.cwiseSqrt().cwiseProduct(standard_normal_vector(xi.size(), rng));
  return std::sqrt(1.0 - beta * beta) * xi + beta * w;
}

EmpiricalCovariance empirical_cov(const std::vector<Eigen::VectorXd> &samples,
                                  double jitter, const PriorSpec &prior) {
  if (samples.size() < 2)
    return {prior.covariance()};
  const auto p = samples.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto &s : samples)
    mean += s;
  mean /= static_cast<double>(samples.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (const auto &s : samples) {
    const Eigen::VectorXd d = s - mean;
    c.noalias() += d * d.transpose();
  }
  c /= static_cast<double>(samples.size() - 1);
  c = 0.5 * (c + c.transpose());
  c.diagonal().array() += jitter;
  return {c};
}

AdaptivePcnKernel::AdaptivePcnKernel(const PriorSpec &prior,
                                     const EmpiricalCovariance &emp) {
  const auto p = prior.variances.size();
  if (emp.C.rows() != p || emp.C.cols() != p)
    throw InvalidParameter("AdaptivePcnKernel: covariance dimension mismatch");
  sqrt_b_ = prior.variances.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_b = sqrt_b_.cwiseInverse();
  Eigen::MatrixXd s = inv_sqrt_b.asDiagonal() * emp.C * inv_sqrt_b.asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  s_vectors_ = eig.eigenvectors();
  s_values_ = eig.eigenvalues();

  Eigen::LLT<Eigen::MatrixXd> llt(emp.C);
  if (llt.info() == Eigen::Success) {
    noise_factor_ = llt.matrixL();
  } else {
    // Semidefinite C: fall back to the symmetric root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ce(emp.C);
    noise_factor_ = ce.eigenvectors() *
                    ce.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                    ce.eigenvectors().transpose();
  }
}

Eigen::MatrixXd AdaptivePcnKernel::mean_operator(double beta) const {
  const Eigen::VectorXd root =
      (1.0 - beta * beta * s_values_.array()).max(0.0).sqrt().matrix();
  const Eigen::MatrixXd middle =
      s_vectors_ * root.asDiagonal() * s_vectors_.transpose();
  return sqrt_b_.asDiagonal() * middle * sqrt_b_.cwiseInverse().asDiagonal();
}

double AdaptivePcnKernel::max_beta() const {
  const double top = s_values_.maxCoeff();
  return top > 0.0 ? 1.0 / std::sqrt(top) : 1.0;
}

UnconstrainedParams AdaptivePcnKernel::propose(const UnconstrainedParams &xi,
                                               double beta, Rng &rng) const {
  if (xi.size() != sqrt_b_.size())
    throw InvalidParameter("apcn_propose: dimension mismatch");
  const Eigen::VectorXd w = noise_factor_ * standard_normal_vector(xi.size(), rng);
  return mean_operator(beta) * xi + beta * w;
}

UnconstrainedParams apcn_propose(const UnconstrainedParams &xi, double beta,
                                 const PriorSpec &prior,
                                 const EmpiricalCovariance &emp, Rng &rng) {
  return AdaptivePcnKernel(prior, emp).propose(xi, beta, rng);
}

double acceptance_probability(double phi_current, double phi_proposed) {
  if (phi_proposed == kRejectedPotential)
    return 0.0;
  return std::min(1.0, std::exp(phi_current - phi_proposed));
}

bool accept(double phi_current, double phi_proposed, Rng &rng) {
  const double u = uniform01(rng);
  if (phi_proposed == kRejectedPotential)
    return false;
  return std::log(u) < phi_current - phi_proposed;
}

double PosteriorEnsemble::acceptance_rate() const {
  return samples.empty() ? 0.0
                         : static_cast<double>(accept_count) / samples.size();
}

std::size_t PosteriorEnsemble::burn_in_index(double fraction) const {
  const auto n = samples.size();
  const auto skip = static_cast<std::size_t>(std::floor(fraction * n));
  return std::min(skip, n == 0 ? 0 : n - 1);
}

PosteriorSummary summarize(const PosteriorEnsemble &ensemble,
                           double burn_fraction) {
  if (ensemble.samples.empty())
    throw InvalidParameter("summarize: empty ensemble");
  const auto first = ensemble.burn_in_index(burn_fraction);
  const auto p = ensemble.samples.front().size();
  const auto n = ensemble.samples.size() - first;
  PosteriorSummary out;
  out.mean = Eigen::VectorXd::Zero(p);
  out.stddev = Eigen::VectorXd::Zero(p);
  for (auto i = first; i < ensemble.samples.size(); ++i)
    out.mean += ensemble.samples[i];
  out.mean /= static_cast<double>(n);
  if (n > 1) {
    for (auto i = first; i < ensemble.samples.size(); ++i)
      out.stddev += (ensemble.samples[i] - out.mean).cwiseAbs2();
    out.stddev = (out.stddev / static_cast<double>(n - 1)).cwiseSqrt();
  }
  out.acceptance_rate = ensemble.acceptance_rate();
  out.retained = n;
  return out;
}

namespace {

// Iterations (1-based) at which a new proposal phase begins.
std::vector<int> phase_starts(const ProposalConfig &cfg) {
  std::vector<int> starts{1};
  if (cfg.n_warm >= 1 && cfg.n_warm + 1 <= cfg.n_total)
    starts.push_back(cfg.n_warm + 1);
  for (long m = cfg.k0 + 1L; m <= cfg.n_total; m += cfg.k0)
    if (m > cfg.n_warm + 1)
      starts.push_back(static_cast<int>(m));
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

std::optional<ForwardResult> evaluate_or_abort(const ForwardModel &forward,
                                               const UnconstrainedParams &xi,
                                               int iteration) {
  try {
    return forward.evaluate(xi);
  } catch (const std::exception &e) {
    throw ChainAborted("forward model failed at iteration " +
                       std::to_string(iteration) + ": " + e.what());
  }
}

} // namespace

PosteriorEnsemble run_chain(const UnconstrainedParams &initial_xi,
                            const ObservationSet &obs, const PriorSpec &prior,
                            const ProposalConfig &cfg,
                            const ForwardModel &forward, Rng &rng) {
  cfg.validate();
  prior.validate();
  if (initial_xi.size() != prior.variances.size())
    throw InvalidParameter("run_chain: initial guess has wrong dimension");

  const auto p = prior.dimension();
  const double jitter = cfg.jitter_scale * prior.variances.sum() / p;
  const double target = 0.5 * (cfg.accept_low + cfg.accept_high);

  // Start from the initial guess; if it is inadmissible, from the first
  // admissible prior draw.
  UnconstrainedParams xi = initial_xi;
  auto current = evaluate_or_abort(forward, xi, 0);
  for (int attempt = 0; !current && attempt < 10000; ++attempt) {
    xi = pcn_propose(Eigen::VectorXd::Zero(p), 1.0, prior, rng);
    current = evaluate_or_abort(forward, xi, 0);
  }
  if (!current)
    throw ChainAborted("run_chain: no admissible starting point found");
  double phi = potential(current->predictions, obs);

  PosteriorEnsemble ens;
  ens.samples.reserve(cfg.n_total);
  ens.potentials.reserve(cfg.n_total);
  ens.accepted.reserve(cfg.n_total);
  ens.flux_rings.reserve(cfg.n_total);

  const auto starts = phase_starts(cfg);
  std::optional<AdaptivePcnKernel> kernel;
  double beta_pcn = cfg.beta;
  double beta_apcn = cfg.beta;
  int phase_first = 1;
  int tune_length = 0;
  double beta_max = 1.0;

  for (int k = 1; k <= cfg.n_total; ++k) {
    const bool adaptive = k > cfg.n_warm;
    if (std::binary_search(starts.begin(), starts.end(), k)) {
      phase_first = k;
      const auto next = std::upper_bound(starts.begin(), starts.end(), k);
      const int last = next == starts.end() ? cfg.n_total : *next - 1;
      tune_length = cfg.auto_tune
                        ? static_cast<int>(std::ceil(cfg.tune_fraction *
                                                     (last - k + 1)))
                        : 0;
      if (adaptive) {
        kernel.emplace(prior, empirical_cov(ens.samples, jitter, prior));
        beta_max = kernel->max_beta();
        beta_apcn = std::min(beta_apcn, beta_max);
      }
    }

    double &beta = adaptive ? beta_apcn : beta_pcn;
    const UnconstrainedParams proposal =
        adaptive ? kernel->propose(xi, beta, rng)
                 : pcn_propose(xi, beta, prior, rng);
    auto result = evaluate_or_abort(forward, proposal, k);
    const double phi_new =
        result ? potential(result->predictions, obs) : kRejectedPotential;
    const bool ok = accept(phi, phi_new, rng);
    if (ok) {
      xi = proposal;
      phi = phi_new;
      current = std::move(result);
      ++ens.accept_count;
    }

    const int t = k - phase_first;
    if (t < tune_length) {
      const double gain = std::pow(t + 1.0, -0.6);
      beta = std::clamp(beta * std::exp(gain * ((ok ? 1.0 : 0.0) - target)),
                        1e-4, adaptive ? beta_max : 1.0);
    }

    ens.samples.push_back(xi);
    ens.potentials.push_back(phi);
    ens.accepted.push_back(ok ? 1 : 0);
    ens.flux_rings.push_back(current->ring);
    if (k % cfg.field_thinning == 0) {
      ens.fields.push_back(current->field);
      ens.field_sample_index.push_back(ens.samples.size() - 1);
    }
  }
  ens.final_beta = cfg.n_total > cfg.n_warm ? beta_apcn : beta_pcn;
  return ens;
}

} // namespace fluxsense
