#include "fluxsense/config.hpp"

#include "fluxsense/errors.hpp"
#include "fluxsense/output.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fluxsense {

std::string_view to_string(DataMode mode) {
  return mode == DataMode::PerRound ? "per-round" : "cumulative";
}

DataMode data_mode_from_string(std::string_view name) {
  if (name == "per-round")
    return DataMode::PerRound;
  if (name == "cumulative")
    return DataMode::Cumulative;
  throw InvalidParameter("unknown data mode '" + std::string(name) + "'");
}

ConfigError::ConfigError(int line_, const std::string &message)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + message
                                   : message),
      line(line_) {}

int ExperimentConfig::parameter_count() const {
  return fluxsense::parameter_count(source_kind, harmonics);
}

PriorSpec ExperimentConfig::prior() const {
  return source_kind == SourceKind::Circle ? PriorSpec::identity(2)
                                           : PriorSpec::star(harmonics);
}

void ExperimentConfig::validate() const {
  try {
    const PolarGrid grid(n_r, n_theta);
    if (truth.size() != parameter_count())
      throw InvalidParameter("source.truth has " + std::to_string(truth.size()) +
                             " entries, expected " +
                             std::to_string(parameter_count()));
    if (!truth.allFinite())
      throw InvalidParameter("source.truth must be finite");
    if (!rasterize(make_source(source_kind, truth), grid))
      throw InvalidParameter("source.truth is not an admissible star shape");
    if (!std::isfinite(b))
      throw InvalidParameter("solver.b must be finite");
    if (steps_per_window < 1)
      throw InvalidParameter("solver.steps_per_window must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw InvalidParameter("noise.sigma must be >= 0");
    sampler.validate();
    if (sampler.field_thinning > sampler.n_total)
      throw InvalidParameter("sampler.field_thinning exceeds sampler.n_total");
    if (!(burn_in >= 0.0 && burn_in < 1.0))
      throw InvalidParameter("sampler.burn_in must lie in [0, 1)");
    if (times.empty() || !(times.front() > 0.0))
      throw InvalidParameter("schedule.times must be nonempty and start above 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw InvalidParameter("schedule.times must be strictly increasing");
    for (int s : {initial_sensors.first, initial_sensors.second})
      if (s < 0 || s >= n_theta)
        throw InvalidParameter("schedule.initial_sensors out of range");
    if (initial_sensors.first == initial_sensors.second)
      throw InvalidParameter("schedule.initial_sensors must be distinct");
    if (strategy == StrategyKind::PosteriorAngle &&
        source_kind != SourceKind::Circle)
      throw InvalidParameter("posterior-angle strategy requires a circle source");
  } catch (const InvalidParameter &e) {
    throw ConfigError(0, e.what());
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig &o) const {
  const auto &s = sampler;
  const auto &t = o.sampler;
  return source_kind == o.source_kind && harmonics == o.harmonics &&
         truth.size() == o.truth.size() && truth == o.truth && n_r == o.n_r &&
         n_theta == o.n_theta && b == o.b &&
         steps_per_window == o.steps_per_window && sigma == o.sigma &&
         s.beta == t.beta && s.auto_tune == t.auto_tune &&
         s.n_warm == t.n_warm && s.n_total == t.n_total && s.k0 == t.k0 &&
         s.accept_low == t.accept_low && s.accept_high == t.accept_high &&
         s.tune_fraction == t.tune_fraction &&
         s.jitter_scale == t.jitter_scale &&
         s.field_thinning == t.field_thinning && burn_in == o.burn_in &&
         times == o.times && initial_sensors == o.initial_sensors &&
         strategy == o.strategy && angle_mean == o.angle_mean &&
         data_mode == o.data_mode && seed == o.seed &&
         output_dir == o.output_dir;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(trim(item));
  return out;
}

double to_double(const std::string &s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw InvalidParameter("expected a number, got '" + s + "'");
  return v;
}

long long to_integer(const std::string &s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw InvalidParameter("expected an integer, got '" + s + "'");
  return v;
}

int to_int(const std::string &s) {
  const auto v = to_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw InvalidParameter("integer out of range: '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string &s) {
  if (s == "true")
    return true;
  if (s == "false")
    return false;
  throw InvalidParameter("expected true or false, got '" + s + "'");
}

std::vector<double> to_doubles(const std::string &s) {
  std::vector<double> out;
  for (const auto &item : split_list(s))
    out.push_back(to_double(item));
  return out;
}

std::string join(const std::vector<double> &values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0)
      out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig &, const std::string &)> read;
  std::function<std::string(const ExperimentConfig &)> write;
};

const std::vector<Field> &fields() {
  using C = ExperimentConfig;
  using S = std::string;
  static const std::vector<Field> table = {
      {"source.kind",
       [](C &c, const S &v) { c.source_kind = source_kind_from_string(v); },
       [](const C &c) { return S(to_string(c.source_kind)); }},
      {"source.harmonics", [](C &c, const S &v) { c.harmonics = to_int(v); },
       [](const C &c) { return std::to_string(c.harmonics); }},
      {"source.truth",
       [](C &c, const S &v) {
         const auto xs = to_doubles(v);
         c.truth = Eigen::Map<const Eigen::VectorXd>(xs.data(),
                                                     static_cast<Eigen::Index>(xs.size()));
       },
       [](const C &c) {
         return join(std::vector<double>(c.truth.data(),
                                         c.truth.data() + c.truth.size()));
       }},
      {"grid.n_r", [](C &c, const S &v) { c.n_r = to_int(v); },
       [](const C &c) { return std::to_string(c.n_r); }},
      {"grid.n_theta", [](C &c, const S &v) { c.n_theta = to_int(v); },
       [](const C &c) { return std::to_string(c.n_theta); }},
      {"solver.b", [](C &c, const S &v) { c.b = to_double(v); },
       [](const C &c) { return format_double(c.b); }},
      {"solver.steps_per_window",
       [](C &c, const S &v) { c.steps_per_window = to_int(v); },
       [](const C &c) { return std::to_string(c.steps_per_window); }},
      {"noise.sigma", [](C &c, const S &v) { c.sigma = to_double(v); },
       [](const C &c) { return format_double(c.sigma); }},
      {"sampler.beta", [](C &c, const S &v) { c.sampler.beta = to_double(v); },
       [](const C &c) { return format_double(c.sampler.beta); }},
      {"sampler.auto_tune",
       [](C &c, const S &v) { c.sampler.auto_tune = to_bool(v); },
       [](const C &c) { return S(c.sampler.auto_tune ? "true" : "false"); }},
      {"sampler.accept_low",
       [](C &c, const S &v) { c.sampler.accept_low = to_double(v); },
       [](const C &c) { return format_double(c.sampler.accept_low); }},
      {"sampler.accept_high",
       [](C &c, const S &v) { c.sampler.accept_high = to_double(v); },
       [](const C &c) { return format_double(c.sampler.accept_high); }},
      {"sampler.n_warm", [](C &c, const S &v) { c.sampler.n_warm = to_int(v); },
       [](const C &c) { return std::to_string(c.sampler.n_warm); }},
      {"sampler.n_total",
       [](C &c, const S &v) { c.sampler.n_total = to_int(v); },
       [](const C &c) { return std::to_string(c.sampler.n_total); }},
      {"sampler.k0", [](C &c, const S &v) { c.sampler.k0 = to_int(v); },
       [](const C &c) { return std::to_string(c.sampler.k0); }},
      {"sampler.tune_fraction",
       [](C &c, const S &v) { c.sampler.tune_fraction = to_double(v); },
       [](const C &c) { return format_double(c.sampler.tune_fraction); }},
      {"sampler.jitter_scale",
       [](C &c, const S &v) { c.sampler.jitter_scale = to_double(v); },
       [](const C &c) { return format_double(c.sampler.jitter_scale); }},
      {"sampler.field_thinning",
       [](C &c, const S &v) { c.sampler.field_thinning = to_int(v); },
       [](const C &c) { return std::to_string(c.sampler.field_thinning); }},
      {"sampler.burn_in", [](C &c, const S &v) { c.burn_in = to_double(v); },
       [](const C &c) { return format_double(c.burn_in); }},
      {"schedule.times", [](C &c, const S &v) { c.times = to_doubles(v); },
       [](const C &c) { return join(c.times); }},
      {"schedule.initial_sensors",
       [](C &c, const S &v) {
         const auto xs = split_list(v);
         if (xs.size() != 2)
           throw InvalidParameter("expected two sensor indices");
         c.initial_sensors = {to_int(xs[0]), to_int(xs[1])};
       },
       [](const C &c) {
         return std::to_string(c.initial_sensors.first) + ", " +
                std::to_string(c.initial_sensors.second);
       }},
      {"schedule.strategy",
       [](C &c, const S &v) { c.strategy = strategy_from_string(v); },
       [](const C &c) { return S(to_string(c.strategy)); }},
      {"schedule.angle_mean",
       [](C &c, const S &v) { c.angle_mean = angle_mean_from_string(v); },
       [](const C &c) { return S(to_string(c.angle_mean)); }},
      {"schedule.data_mode",
       [](C &c, const S &v) { c.data_mode = data_mode_from_string(v); },
       [](const C &c) { return S(to_string(c.data_mode)); }},
      {"seed",
       [](C &c, const S &v) {
         const auto x = to_integer(v);
         if (x < 0)
           throw InvalidParameter("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(x);
       },
       [](const C &c) { return std::to_string(c.seed); }},
      {"output.dir", [](C &c, const S &v) { c.output_dir = v; },
       [](const C &c) { return c.output_dir; }},
  };
  return table;
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const auto line = trim(raw);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value'");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    const auto &table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field &f) { return f.key == key; });
    if (it == table.end())
      throw ConfigError(line_no, "unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    try {
      it->read(config, value);
    } catch (const InvalidParameter &e) {
      throw ConfigError(line_no, key + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig &config) {
  std::string out;
  for (const auto &f : fields())
    out += f.key + " = " + f.write(config) + "\n";
  return out;
}

namespace {

ExperimentConfig circle_paper() {
  ExperimentConfig c;
  c.source_kind = SourceKind::Circle;
  c.truth = Eigen::Vector2d(0.0, -1.0);
  c.n_r = 33;
  c.n_theta = 36;
  c.b = 50.0;
  c.sigma = 0.05;
  c.sampler.n_warm = 0;
  c.sampler.n_total = 10000;
  c.sampler.k0 = 2500;
  c.times = {0.5, 1.0, 1.5};
  c.initial_sensors = {22, 30};
  c.strategy = StrategyKind::PosteriorAngle;
  return c;
}

ExperimentConfig peanut_paper() {
  ExperimentConfig c;
  c.source_kind = SourceKind::Star;
  c.harmonics = 2;
  Eigen::VectorXd truth(5);
  truth << 1.0, 0.0, 0.0, 0.0, 0.3;
  c.truth = truth;
  c.n_r = 33;
  c.n_theta = 36;
  c.b = 10.0;
  c.sigma = 0.01;
  c.sampler.n_warm = 1000;
  c.sampler.n_total = 15000;
  c.sampler.k0 = 2500;
  c.times = {0.5, 1.0, 1.5, 2.0, 2.5};
  c.initial_sensors = {11, 5};
  c.strategy = StrategyKind::MaxFluxVariance;
  return c;
}

ExperimentConfig with_strategy(ExperimentConfig c, StrategyKind s) {
  c.strategy = s;
  return c;
}

ExperimentConfig circle_desk() {
  auto c = circle_paper();
  c.sampler.n_total = 2000;
  return c;
}

ExperimentConfig peanut_desk() {
  auto c = peanut_paper();
  c.sampler.n_warm = 200;
  c.sampler.n_total = 3000;
  c.times = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  return c;
}

const std::map<std::string, std::function<ExperimentConfig()>> &presets() {
  static const std::map<std::string, std::function<ExperimentConfig()>> table = {
      {"circle-paper", circle_paper},
      {"circle-fixed-paper",
       [] { return with_strategy(circle_paper(), StrategyKind::Fixed); }},
      {"circle-random-paper",
       [] { return with_strategy(circle_paper(), StrategyKind::RandomEachRound); }},
      {"circle-desk", circle_desk},
      {"circle-fixed-desk",
       [] { return with_strategy(circle_desk(), StrategyKind::Fixed); }},
      {"peanut-paper", peanut_paper},
      {"peanut-fixed-paper",
       [] { return with_strategy(peanut_paper(), StrategyKind::Fixed); }},
      {"peanut-random-paper",
       [] { return with_strategy(peanut_paper(), StrategyKind::RandomEachRound); }},
      {"peanut-desk", peanut_desk},
  };
  return table;
}

} // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto &[name, make] : presets())
    names.push_back(name);
  return names;
}

ExperimentConfig preset(std::string_view name) {
  const auto &table = presets();
  const auto it = table.find(std::string(name));
  if (it == table.end())
    throw ConfigError(0, "unknown preset '" + std::string(name) + "'");
  auto config = it->second();
  config.validate();
  return config;
}

} // namespace fluxsense
