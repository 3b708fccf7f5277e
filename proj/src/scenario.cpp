#include "privdr/scenario.hpp"

#include "privdr/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace privdr
{
  namespace
  {
    template <typename T>
    void
    read_key(YAML::Node const& node, char const* key, T& out, std::string const& section)
    {
      auto const value = node[key];
      if (!value) {
        return;
      }
      try {
        out = value.as<T>();
      } catch (YAML::Exception const& e) {
        throw InputError{"config: cannot read " + section + key + ": " + e.what()};
      }
    }

    void
    read_optional(YAML::Node const& node, char const* key, std::optional<double>& out)
    {
      if (auto const value = node[key]) {
        try {
          out = value.as<double>();
        } catch (YAML::Exception const& e) {
          throw InputError{std::string{"config: cannot read buildings.overrides."} + key + ": " + e.what()};
        }
      }
    }

    void
    require(bool ok, std::string const& message)
    {
      if (!ok) {
        throw InputError{"config: " + message};
      }
    }
  }

  void
  ScenarioConfig::validate() const
  {
    require(n_buildings >= 1, "n_buildings must be at least 1");
    require(horizon_steps >= 1, "horizon_steps must be at least 1");
    require(step_seconds > 0 && 86400 % step_seconds == 0, "step_seconds must divide one day");
    try {
      dp.validate();
      mpc.validate();
      building.validate_cooling();
    } catch (std::invalid_argument const& e) {
      throw InputError{std::string{"config: "} + e.what()};
    }
    require(jitter >= 0.0 && jitter < 1.0, "buildings.jitter must lie in [0, 1)");
    for (auto const& o : overrides) {
      require(o.index < n_buildings, "override index " + std::to_string(o.index) + " out of range");
    }
    require(pv.peak_kw >= 0.0, "traces.pv.peak_kw must be nonnegative");
    require(pv.cloud_intensity >= 0.0 && pv.cloud_intensity <= 1.0,
            "traces.pv.cloud_intensity must lie in [0, 1]");
    require(weather.swing_c >= 0.0, "traces.weather.swing_c must be nonnegative");
    require(weather.perturbation_c >= 0.0, "traces.weather.perturbation_c must be nonnegative");
  }

  SeedPlan
  derive_seeds(std::uint64_t master)
  {
    Rng rng{master};
    SeedPlan plan;
    plan.noise = rng();
    plan.clouds = rng();
    plan.weather = rng();
    plan.initial_temps = rng();
    plan.jitter = rng();
    return plan;
  }

  ScenarioConfig
  parse_config(std::string const& yaml_text)
  {
    YAML::Node root;
    try {
      root = YAML::Load(yaml_text);
    } catch (YAML::Exception const& e) {
      throw InputError{std::string{"config: YAML parse error: "} + e.what()};
    }
    ScenarioConfig c;
    if (!root || root.IsNull()) {
      c.validate();
      return c;
    }
    require(root.IsMap(), "top level must be a mapping");

    read_key(root, "seed", c.seed, "");
    read_key(root, "n_buildings", c.n_buildings, "");
    read_key(root, "horizon_steps", c.horizon_steps, "");
    read_key(root, "step_seconds", c.step_seconds, "");
    if (auto const s = root["solver"]) {
      try {
        c.solver = parse_solver(s.as<std::string>());
      } catch (std::invalid_argument const& e) {
        throw InputError{std::string{"config: solver: "} + e.what()};
      }
    }

    if (auto const dp = root["dp"]) {
      read_key(dp, "epsilon", c.dp.epsilon, "dp.");
      read_key(dp, "delta", c.dp.delta, "dp.");
      read_key(dp, "sensitivity_kw", c.dp.sensitivity, "dp.");
    }
    if (auto const mpc = root["mpc"]) {
      read_key(mpc, "horizon_np", c.mpc.horizon_np, "mpc.");
      read_key(mpc, "weight_q", c.mpc.weight_q, "mpc.");
      read_key(mpc, "weight_r", c.mpc.weight_r, "mpc.");
      read_key(mpc, "setpoint_c", c.mpc.setpoint, "mpc.");
      read_key(mpc, "comfort_min_c", c.mpc.comfort_min, "mpc.");
      read_key(mpc, "comfort_max_c", c.mpc.comfort_max, "mpc.");
    }
    if (auto const b = root["buildings"]) {
      if (auto const d = b["defaults"]) {
        read_key(d, "a_per_h", c.building.a, "buildings.defaults.");
        read_key(d, "b_c_per_h", c.building.b, "buildings.defaults.");
        read_key(d, "g_temp_per_h", c.building.g_temp, "buildings.defaults.");
        read_key(d, "g_solar_c_per_h_kw_m2", c.building.g_solar, "buildings.defaults.");
        read_key(d, "p_rate_kw", c.building.p_rate, "buildings.defaults.");
      }
      read_key(b, "jitter", c.jitter, "buildings.");
      if (auto const list = b["overrides"]) {
        require(list.IsSequence(), "buildings.overrides must be a list");
        for (auto const& item : list) {
          BuildingOverride o;
          require(static_cast<bool>(item["index"]), "buildings.overrides entry needs an index");
          read_key(item, "index", o.index, "buildings.overrides.");
          read_optional(item, "a_per_h", o.a);
          read_optional(item, "b_c_per_h", o.b);
          read_optional(item, "g_temp_per_h", o.g_temp);
          read_optional(item, "g_solar_c_per_h_kw_m2", o.g_solar);
          read_optional(item, "p_rate_kw", o.p_rate);
          c.overrides.push_back(o);
        }
      }
    }
    if (auto const t = root["traces"]) {
      if (auto const pv = t["pv"]) {
        read_key(pv, "csv", c.pv.csv_path, "traces.pv.");
        read_key(pv, "peak_kw", c.pv.peak_kw, "traces.pv.");
        read_key(pv, "cloud_intensity", c.pv.cloud_intensity, "traces.pv.");
      }
      if (auto const w = t["weather"]) {
        read_key(w, "csv", c.weather.csv_path, "traces.weather.");
        read_key(w, "mean_c", c.weather.mean_c, "traces.weather.");
        read_key(w, "swing_c", c.weather.swing_c, "traces.weather.");
        read_key(w, "perturbation_c", c.weather.perturbation_c, "traces.weather.");
      }
    }
    c.validate();
    return c;
  }

  ScenarioConfig
  load_config(std::filesystem::path const& path)
  {
    std::ifstream in{path};
    if (!in) {
      throw InputError{"cannot open config file: " + path.string()};
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto config = parse_config(buffer.str());
    // Relative trace paths resolve against the config file's directory.
    auto const base = path.parent_path();
    for (auto* p : {&config.pv.csv_path, &config.weather.csv_path}) {
      if (!p->empty() && std::filesystem::path{*p}.is_relative()) {
        *p = (base / *p).lexically_normal().string();
      }
    }
    return config;
  }

  std::string
  dump_config(ScenarioConfig const& c)
  {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "n_buildings" << YAML::Value << c.n_buildings;
    out << YAML::Key << "horizon_steps" << YAML::Value << c.horizon_steps;
    out << YAML::Key << "step_seconds" << YAML::Value << c.step_seconds;
    out << YAML::Key << "solver" << YAML::Value << std::string{solver_name(c.solver)};

    out << YAML::Key << "dp" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "epsilon" << YAML::Value << c.dp.epsilon;
    out << YAML::Key << "delta" << YAML::Value << c.dp.delta;
    out << YAML::Key << "sensitivity_kw" << YAML::Value << c.dp.sensitivity;
    out << YAML::EndMap;

    out << YAML::Key << "mpc" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "horizon_np" << YAML::Value << c.mpc.horizon_np;
    out << YAML::Key << "weight_q" << YAML::Value << c.mpc.weight_q;
    out << YAML::Key << "weight_r" << YAML::Value << c.mpc.weight_r;
    out << YAML::Key << "setpoint_c" << YAML::Value << c.mpc.setpoint;
    out << YAML::Key << "comfort_min_c" << YAML::Value << c.mpc.comfort_min;
    out << YAML::Key << "comfort_max_c" << YAML::Value << c.mpc.comfort_max;
    out << YAML::EndMap;

    out << YAML::Key << "buildings" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "defaults" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "a_per_h" << YAML::Value << c.building.a;
    out << YAML::Key << "b_c_per_h" << YAML::Value << c.building.b;
    out << YAML::Key << "g_temp_per_h" << YAML::Value << c.building.g_temp;
    out << YAML::Key << "g_solar_c_per_h_kw_m2" << YAML::Value << c.building.g_solar;
    out << YAML::Key << "p_rate_kw" << YAML::Value << c.building.p_rate;
    out << YAML::EndMap;
    out << YAML::Key << "jitter" << YAML::Value << c.jitter;
    out << YAML::Key << "overrides" << YAML::Value << YAML::BeginSeq;
    for (auto const& o : c.overrides) {
      out << YAML::BeginMap;
      out << YAML::Key << "index" << YAML::Value << o.index;
      if (o.a) out << YAML::Key << "a_per_h" << YAML::Value << *o.a;
      if (o.b) out << YAML::Key << "b_c_per_h" << YAML::Value << *o.b;
      if (o.g_temp) out << YAML::Key << "g_temp_per_h" << YAML::Value << *o.g_temp;
      if (o.g_solar) out << YAML::Key << "g_solar_c_per_h_kw_m2" << YAML::Value << *o.g_solar;
      if (o.p_rate) out << YAML::Key << "p_rate_kw" << YAML::Value << *o.p_rate;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;

    out << YAML::Key << "traces" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "pv" << YAML::Value << YAML::BeginMap;
    if (!c.pv.csv_path.empty()) {
      out << YAML::Key << "csv" << YAML::Value << c.pv.csv_path;
    }
    out << YAML::Key << "peak_kw" << YAML::Value << c.pv.peak_kw;
    out << YAML::Key << "cloud_intensity" << YAML::Value << c.pv.cloud_intensity;
    out << YAML::EndMap;
    out << YAML::Key << "weather" << YAML::Value << YAML::BeginMap;
    if (!c.weather.csv_path.empty()) {
      out << YAML::Key << "csv" << YAML::Value << c.weather.csv_path;
    }
    out << YAML::Key << "mean_c" << YAML::Value << c.weather.mean_c;
    out << YAML::Key << "swing_c" << YAML::Value << c.weather.swing_c;
    out << YAML::Key << "perturbation_c" << YAML::Value << c.weather.perturbation_c;
    out << YAML::EndMap;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string{out.c_str()} + "\n";
  }

  std::size_t
  samples_per_days(int days, int step_seconds)
  {
    if (days < 1) {
      throw std::invalid_argument{"days must be at least 1"};
    }
    if (step_seconds <= 0 || 86400 % step_seconds != 0) {
      throw std::invalid_argument{"step_seconds must divide 86400"};
    }
    return static_cast<std::size_t>(days) * static_cast<std::size_t>(86400 / step_seconds);
  }

  std::vector<double>
  clear_sky_shape(int days, int step_seconds)
  {
    auto const n = samples_per_days(days, step_seconds);
    std::vector<double> shape(n, 0.0);
    constexpr double sunrise_h = 6.0;
    constexpr double daylight_h = 12.0;
    for (std::size_t k = 0; k < n; ++k) {
      auto const seconds_of_day = (static_cast<long long>(k) * step_seconds) % 86400;
      auto const hour = seconds_of_day / 3600.0;
      auto const phase = (hour - sunrise_h) / daylight_h;
      if (phase > 0.0 && phase < 1.0) {
        shape[k] = std::sin(std::numbers::pi * phase);
      }
    }
    return shape;
  }

  std::vector<double>
  cloud_factors(std::size_t length, double intensity, std::uint64_t seed)
  {
    if (intensity < 0.0 || intensity > 1.0) {
      throw std::invalid_argument{"cloud intensity must lie in [0, 1]"};
    }
    // AR(1)-smoothed uniform cover in [0, 1]
    constexpr double persistence = 0.7;
    Rng rng{seed};
    std::vector<double> factors(length, 1.0);
    double cover = uniform_open01(rng);
    for (std::size_t k = 0; k < length; ++k) {
      if (k > 0) {
        cover = persistence * cover + (1.0 - persistence) * uniform_open01(rng);
      }
      factors[k] = 1.0 - intensity * cover;
    }
    return factors;
  }

  Trace
  synth_pv(int days, int step_seconds, double peak_kw, double cloud_intensity, std::uint64_t seed)
  {
    auto const shape = clear_sky_shape(days, step_seconds);
    auto const clouds = cloud_factors(shape.size(), cloud_intensity, seed);
    Trace pv;
    pv.unit = Unit::Kilowatt;
    pv.step_seconds = step_seconds;
    pv.start_label = "synthetic day 1 00:00";
    pv.values.resize(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) {
      pv.values[k] = peak_kw * shape[k] * clouds[k];
    }
    return pv;
  }

  Trace
  synth_weather(
    int days,
    int step_seconds,
    double mean_c,
    double swing_c,
    std::uint64_t seed,
    double perturbation_c)
  {
    auto const n = samples_per_days(days, step_seconds);
    constexpr double peak_hour = 15.0;
    constexpr double smoothing = 0.8;
    Rng rng{seed};
    Trace t;
    t.unit = Unit::Celsius;
    t.step_seconds = step_seconds;
    t.start_label = "synthetic day 1 00:00";
    t.values.resize(n);
    double wobble = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      auto const hour = ((static_cast<long long>(k) * step_seconds) % 86400) / 3600.0;
      auto const diurnal = std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
      // convex blend of draws in [-1, 1] stays in [-1, 1]
      wobble = smoothing * wobble + (1.0 - smoothing) * (2.0 * uniform_open01(rng) - 1.0);
      t.values[k] = mean_c + swing_c * diurnal + perturbation_c * wobble;
    }
    return t;
  }

  namespace
  {
    int
    days_covering(std::size_t steps, int step_seconds)
    {
      auto const per_day = static_cast<std::size_t>(86400 / step_seconds);
      return static_cast<int>((steps + per_day - 1) / per_day);
    }

    ContinuousThermalModel
    building_model(ScenarioConfig const& config, std::size_t index, Rng& jitter_rng)
    {
      auto m = config.building;
      if (config.jitter > 0.0) {
        auto const perturb = [&](double value) {
          return value * (1.0 + config.jitter * (2.0 * uniform_open01(jitter_rng) - 1.0));
        };
        m.a = perturb(m.a);
        m.b = perturb(m.b);
        m.g_temp = perturb(m.g_temp);
        m.g_solar = perturb(m.g_solar);
        m.p_rate = perturb(m.p_rate);
      }
      for (auto const& o : config.overrides) {
        if (o.index != index) {
          continue;
        }
        if (o.a) m.a = *o.a;
        if (o.b) m.b = *o.b;
        if (o.g_temp) m.g_temp = *o.g_temp;
        if (o.g_solar) m.g_solar = *o.g_solar;
        if (o.p_rate) m.p_rate = *o.p_rate;
      }
      try {
        m.validate_cooling();
      } catch (std::invalid_argument const& e) {
        throw InputError{"building " + std::to_string(index) + ": " + e.what()};
      }
      return m;
    }
  }

  Simulation
  build_simulation(ScenarioConfig const& config)
  {
    config.validate();
    Simulation sim;
    sim.seeds = derive_seeds(config.seed);
    auto const steps = config.horizon_steps;
    auto const days = days_covering(steps, config.step_seconds);

    Rng jitter_rng{sim.seeds.jitter};
    for (std::size_t j = 0; j < config.n_buildings; ++j) {
      sim.continuous.push_back(building_model(config, j, jitter_rng));
      sim.models.push_back(discretize(sim.continuous.back(), config.step_seconds));
    }

    Rng temp_rng{sim.seeds.initial_temps};
    auto const lo = config.mpc.comfort_min;
    auto const hi = config.mpc.comfort_max;
    for (std::size_t j = 0; j < config.n_buildings; ++j) {
      auto const temp = std::clamp(lo + (hi - lo) * uniform_open01(temp_rng), lo, hi);
      sim.init_states.push_back(BuildingState{temp, 0});
    }

    if (config.pv.csv_path.empty()) {
      sim.pv = synth_pv(days, config.step_seconds, config.pv.peak_kw, config.pv.cloud_intensity,
                        sim.seeds.clouds);
    } else {
      try {
        sim.pv = load_trace(config.pv.csv_path, Unit::Kilowatt, config.step_seconds);
      } catch (InputError const& e) {
        throw InputError{std::string{"pv trace: "} + e.what()};
      }
    }
    if (sim.pv.size() < steps) {
      throw InputError{
        "pv trace: " + std::to_string(sim.pv.size()) + " samples, horizon needs "
        + std::to_string(steps)};
    }
    sim.pv.values.resize(steps);

    sim.disturbances.step_seconds = config.step_seconds;
    if (config.weather.csv_path.empty()) {
      auto const t_out = synth_weather(days, config.step_seconds, config.weather.mean_c,
                                       config.weather.swing_c, sim.seeds.weather,
                                       config.weather.perturbation_c);
      // Irradiance shares the PV cloud process at 1 kW/m2 clear-sky peak.
      auto const q = synth_pv(days, config.step_seconds, 1.0, config.pv.cloud_intensity,
                              sim.seeds.clouds);
      sim.disturbances.t_out = t_out.values;
      sim.disturbances.q_solar = q.values;
    } else {
      try {
        sim.disturbances = load_disturbance_csv(config.weather.csv_path, config.step_seconds);
      } catch (InputError const& e) {
        throw InputError{std::string{"weather trace: "} + e.what()};
      }
    }
    if (sim.disturbances.size() < steps) {
      throw InputError{
        "weather trace: " + std::to_string(sim.disturbances.size())
        + " samples, horizon needs " + std::to_string(steps)};
    }
    sim.disturbances.t_out.resize(steps);
    sim.disturbances.q_solar.resize(steps);
    return sim;
  }
}
