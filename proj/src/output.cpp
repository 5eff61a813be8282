#include "fluxsense/output.hpp"

#include "fluxsense/assimilation.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace fluxsense {

std::string format_double(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  if (value == 0.0)
    value = 0.0; // drop the sign of negative zero
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

void write_trace_csv(std::ostream &out, const PosteriorEnsemble &ensemble,
                     int round, bool header) {
  const auto p = ensemble.samples.empty() ? 0 : ensemble.samples.front().size();
  if (header) {
    out << "round,iteration";
    for (Eigen::Index i = 0; i < p; ++i)
      out << ",xi_" << i + 1;
    out << ",misfit,accepted\n";
  }
  for (std::size_t k = 0; k < ensemble.samples.size(); ++k) {
    out << round << ',' << k + 1;
    for (Eigen::Index i = 0; i < p; ++i)
      out << ',' << format_double(ensemble.samples[k](i));
    out << ',' << format_double(ensemble.potentials[k]) << ','
        << static_cast<int>(ensemble.accepted[k]) << '\n';
  }
}

namespace {

std::ofstream open_file(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

nlohmann::json to_json(const Eigen::VectorXd &v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back(v(i));
  return arr;
}

} // namespace

void write_bundle(const ExperimentResult &result,
                  const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  const auto &config = result.config;
  const double h_theta = 2.0 * std::numbers::pi / config.n_theta;

  {
    auto out = open_file(dir / "trace.csv");
    bool header = true;
    for (const auto &rec : result.rounds) {
      write_trace_csv(out, rec.ensemble, rec.round + 1, header);
      header = false;
    }
  }

  {
    auto out = open_file(dir / "sensors.csv");
    out << "round,time,index_1,index_2,angle_1,angle_2,strategy\n";
    for (const auto &rec : result.rounds)
      out << rec.round + 1 << ',' << format_double(rec.t_end) << ','
          << rec.sensors.first << ',' << rec.sensors.second << ','
          << format_double(rec.sensors.first * h_theta) << ','
          << format_double(rec.sensors.second * h_theta) << ','
          << to_string(config.strategy) << '\n';
  }

  {
    auto out = open_file(dir / "flux_variance.csv");
    out << "round";
    for (int a = 0; a < config.n_theta; ++a)
      out << ",var_" << a;
    out << '\n';
    for (const auto &rec : result.rounds) {
      out << rec.round + 1;
      for (double v : rec.flux_variance.variances)
        out << ',' << format_double(v);
      out << '\n';
    }
  }

  {
    auto out = open_file(dir / "shape_samples.csv");
    const int thin = config.sampler.field_thinning;
    if (config.source_kind == SourceKind::Circle) {
      out << "round,sample,rho,omega,eta_1,eta_2\n";
    } else {
      out << "round,sample";
      for (int a = 0; a < config.n_theta; ++a)
        out << ",q_" << a;
      out << '\n';
    }
    for (const auto &rec : result.rounds) {
      const auto &ens = rec.ensemble;
      for (auto i = ens.burn_in_index(config.burn_in); i < ens.size(); ++i) {
        if ((i + 1) % static_cast<std::size_t>(thin) != 0)
          continue;
        out << rec.round + 1 << ',' << i + 1;
        if (config.source_kind == SourceKind::Circle) {
          const auto c = circle_from_unconstrained(ens.samples[i]);
          out << ',' << format_double(c.rho) << ',' << format_double(c.omega)
              << ',' << format_double(c.eta.x()) << ','
              << format_double(c.eta.y());
        } else {
          for (int a = 0; a < config.n_theta; ++a)
            out << ',' << format_double(star_radius(a * h_theta, ens.samples[i]));
        }
        out << '\n';
      }
    }
  }

  {
    nlohmann::json summary;
    summary["config"] = serialize_config(config);
    summary["stopped_by_cycle"] = result.stopped_by_cycle;
    summary["completed"] = !result.error.has_value();
    if (result.error)
      summary["error"] = *result.error;
    auto rounds = nlohmann::json::array();
    auto itinerary = nlohmann::json::array();
    for (const auto &rec : result.rounds) {
      nlohmann::json r;
      r["round"] = rec.round + 1;
      r["t0"] = rec.t0;
      r["t_end"] = rec.t_end;
      r["sensors"] = {rec.sensors.first, rec.sensors.second};
      r["posterior_mean"] = to_json(rec.summary.mean);
      r["posterior_std"] = to_json(rec.summary.stddev);
      r["acceptance_rate"] = rec.summary.acceptance_rate;
      r["final_beta"] = rec.ensemble.final_beta;
      r["retained_samples"] = rec.summary.retained;
      if (rec.eta_mean)
        r["eta_mean"] = {rec.eta_mean->x(), rec.eta_mean->y()};
      r["stopped"] = rec.stopped;
      rounds.push_back(r);
      itinerary.push_back({rec.sensors.first, rec.sensors.second});
    }
    summary["rounds"] = rounds;
    summary["itinerary"] = itinerary;
    auto out = open_file(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }

  {
    nlohmann::json timing;
    double total = 0.0;
    auto per_round = nlohmann::json::array();
    for (const auto &rec : result.rounds) {
      per_round.push_back(rec.wall_seconds);
      total += rec.wall_seconds;
    }
    timing["round_seconds"] = per_round;
    timing["total_seconds"] = total;
    auto out = open_file(dir / "timing.json");
    out << timing.dump(2) << '\n';
  }
}

void write_forward_dump(const ForwardDump &dump,
                        const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_file(dir / "flux.csv");
    const auto n = dump.final_state.grid.n_theta();
    out << "time";
    for (int a = 0; a < n; ++a)
      out << ",flux_" << a;
    out << '\n';
    for (const auto &ring : dump.rings) {
      out << format_double(ring.t);
      for (double v : ring.values)
        out << ',' << format_double(v);
      out << '\n';
    }
  }
  auto out = open_file(dir / "field.csv");
  write_field_csv(out, dump.final_state);
}

} // namespace fluxsense
