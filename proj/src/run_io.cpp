#include "privdr/run_io.hpp"

#include "csv.hpp"
#include "privdr/error.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace privdr
{
  namespace
  {
    std::ofstream
    open_out(std::filesystem::path const& path)
    {
      std::ofstream out{path};
      if (!out) {
        throw InputError{"cannot write file: " + path.string()};
      }
      return out;
    }

    std::filesystem::path
    require_file(std::filesystem::path const& dir, char const* name)
    {
      auto const path = dir / name;
      if (!std::filesystem::is_regular_file(path)) {
        throw InputError{"missing run file: " + path.string()};
      }
      return path;
    }

    std::string
    fmt(double v) { return format_double(v); }
  }

  void
  write_manifest(std::filesystem::path const& path, Manifest const& manifest)
  {
    auto out = open_out(path);
    out << dump_config(manifest.config);
    YAML::Emitter derived;
    derived.SetDoublePrecision(17);
    derived << YAML::BeginMap << YAML::Key << "derived" << YAML::Value << YAML::BeginMap;
    derived << YAML::Key << "noise_seed" << YAML::Value << manifest.dp.seed;
    derived << YAML::Key << "laplace_scale_kw" << YAML::Value << laplace_scale(manifest.dp);
    derived << YAML::Key << "delta_slack" << YAML::Value << manifest.dp.has_delta_slack();
    derived << YAML::Key << "max_p_rate_kw" << YAML::Value << manifest.max_p_rate_kw;
    derived << YAML::EndMap << YAML::EndMap;
    out << derived.c_str() << '\n';
  }

  Manifest
  read_manifest(std::filesystem::path const& path)
  {
    std::ifstream in{path};
    if (!in) {
      throw InputError{"missing run file: " + path.string()};
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    Manifest m;
    m.config = parse_config(buffer.str());
    m.dp = m.config.dp;
    try {
      auto const root = YAML::Load(buffer.str());
      auto const derived = root["derived"];
      if (!derived) {
        throw InputError{path.string() + ": manifest lacks a derived section"};
      }
      m.dp.seed = derived["noise_seed"].as<std::uint64_t>();
      m.max_p_rate_kw = derived["max_p_rate_kw"].as<double>();
    } catch (YAML::Exception const& e) {
      throw InputError{path.string() + ": " + e.what()};
    }
    return m;
  }

  void
  write_run_detail(std::filesystem::path const& dir, RunReport const& r)
  {
    auto const n = r.n_steps();
    {
      auto out = open_out(dir / run_files::dispatch);
      out << "step,ref_kw,agg_kw,residual_kw,n_on,violations\n";
      for (std::size_t k = 0; k < n; ++k) {
        out << k << ',' << fmt(r.reference_kw[k]) << ',' << fmt(r.aggregate_kw[k]) << ','
            << fmt(r.residual_kw[k]) << ',' << r.n_on[k] << ',' << r.violations[k] << '\n';
      }
    }
    {
      auto out = open_out(dir / run_files::traces);
      out << "step,pv_kw,noise_kw,net_pv_kw,ref_kw,t_out_c,q_solar_kw_m2,in_envelope,infeasible_units\n";
      for (std::size_t k = 0; k < n; ++k) {
        out << k << ',' << fmt(r.pv_kw[k]) << ',' << fmt(r.noise_kw[k]) << ','
            << fmt(r.net_pv_kw[k]) << ',' << fmt(r.reference_kw[k]) << ','
            << fmt(r.t_out[k]) << ',' << fmt(r.q_solar[k]) << ','
            << static_cast<int>(r.in_envelope[k]) << ',' << r.infeasible_units[k] << '\n';
      }
    }
    {
      auto out = open_out(dir / run_files::temperatures);
      out << "step";
      for (std::size_t j = 0; j < r.n_buildings(); ++j) {
        out << ",b" << j;
      }
      out << '\n';
      for (std::size_t k = 0; k < n; ++k) {
        out << k;
        for (std::size_t j = 0; j < r.n_buildings(); ++j) {
          out << ',' << fmt(r.temps[j][k]);
        }
        out << '\n';
      }
    }
    {
      auto out = open_out(dir / run_files::initial_temps);
      out << "building,temp_c\n";
      for (std::size_t j = 0; j < r.initial_temps.size(); ++j) {
        out << j << ',' << fmt(r.initial_temps[j]) << '\n';
      }
    }
    write_noise_csv(dir / run_files::noise, NoiseTrace{r.noise_kw, r.step_seconds});
  }

  RunReport
  read_run_detail(std::filesystem::path const& dir, Manifest const& manifest)
  {
    RunReport r;
    r.step_seconds = manifest.config.step_seconds;
    r.comfort_min = manifest.config.mpc.comfort_min;
    r.comfort_max = manifest.config.mpc.comfort_max;
    r.max_p_rate = manifest.max_p_rate_kw;

    {
      auto const t = csv::read(require_file(dir, run_files::dispatch));
      auto const c_ref = t.column("ref_kw");
      auto const c_agg = t.column("agg_kw");
      auto const c_res = t.column("residual_kw");
      auto const c_on = t.column("n_on");
      auto const c_vio = t.column("violations");
      for (auto const& row : t.rows) {
        if (row.fields.size() < t.header.size()) {
          throw InputError{csv::where(t, row) + ": missing field"};
        }
        r.reference_kw.push_back(csv::parse_double(row.fields[c_ref], t, row));
        r.aggregate_kw.push_back(csv::parse_double(row.fields[c_agg], t, row));
        r.residual_kw.push_back(csv::parse_double(row.fields[c_res], t, row));
        r.n_on.push_back(static_cast<int>(csv::parse_int(row.fields[c_on], t, row)));
        r.violations.push_back(static_cast<int>(csv::parse_int(row.fields[c_vio], t, row)));
      }
    }
    auto const n = r.reference_kw.size();
    if (n == 0) {
      throw InputError{(dir / run_files::dispatch).string() + ": no data rows"};
    }
    {
      auto const t = csv::read(require_file(dir, run_files::traces));
      if (t.rows.size() != n) {
        throw InputError{t.source + ": row count differs from " + run_files::dispatch};
      }
      auto const c_pv = t.column("pv_kw");
      auto const c_noise = t.column("noise_kw");
      auto const c_net = t.column("net_pv_kw");
      auto const c_tout = t.column("t_out_c");
      auto const c_q = t.column("q_solar_kw_m2");
      auto const c_env = t.column("in_envelope");
      auto const c_inf = t.column("infeasible_units");
      for (auto const& row : t.rows) {
        if (row.fields.size() < t.header.size()) {
          throw InputError{csv::where(t, row) + ": missing field"};
        }
        r.pv_kw.push_back(csv::parse_double(row.fields[c_pv], t, row));
        r.noise_kw.push_back(csv::parse_double(row.fields[c_noise], t, row));
        r.net_pv_kw.push_back(csv::parse_double(row.fields[c_net], t, row));
        r.t_out.push_back(csv::parse_double(row.fields[c_tout], t, row));
        r.q_solar.push_back(csv::parse_double(row.fields[c_q], t, row));
        r.in_envelope.push_back(static_cast<std::uint8_t>(csv::parse_int(row.fields[c_env], t, row)));
        r.infeasible_units.push_back(static_cast<int>(csv::parse_int(row.fields[c_inf], t, row)));
      }
    }
    {
      auto const t = csv::read(require_file(dir, run_files::temperatures));
      if (t.rows.size() != n) {
        throw InputError{t.source + ": row count differs from " + run_files::dispatch};
      }
      auto const buildings = t.header.size() - 1;
      r.temps.assign(buildings, std::vector<double>(n));
      for (std::size_t k = 0; k < n; ++k) {
        auto const& row = t.rows[k];
        if (row.fields.size() != t.header.size()) {
          throw InputError{csv::where(t, row) + ": wrong field count"};
        }
        for (std::size_t j = 0; j < buildings; ++j) {
          r.temps[j][k] = csv::parse_double(row.fields[j + 1], t, row);
        }
      }
    }
    {
      auto const t = csv::read(require_file(dir, run_files::initial_temps));
      auto const c = t.column("temp_c");
      for (auto const& row : t.rows) {
        if (row.fields.size() < t.header.size()) {
          throw InputError{csv::where(t, row) + ": missing field"};
        }
        r.initial_temps.push_back(csv::parse_double(row.fields[c], t, row));
      }
    }
    return r;
  }

  void
  write_summary_csv(std::filesystem::path const& path, RunSummary const& s)
  {
    auto out = open_out(path);
    out << "rmse_kw,max_abs_residual_kw,comfort_violations,clamped_steps,infeasible_steps,"
           "envelope_steps,max_envelope_error_kw,noise_mean_kw,noise_variance_kw2,"
           "expected_variance_kw2,max_divergence_kw,mean_divergence_kw\n";
    out << fmt(s.rmse_kw) << ',' << fmt(s.max_abs_residual_kw) << ',' << s.comfort_violations
        << ',' << s.clamped_steps << ',' << s.infeasible_steps << ',' << s.envelope_steps << ','
        << fmt(s.max_envelope_error_kw) << ',' << fmt(s.noise.mean) << ','
        << fmt(s.noise.variance) << ',' << fmt(s.noise.expected_variance) << ','
        << fmt(s.max_divergence_kw) << ',' << fmt(s.mean_divergence_kw) << '\n';
  }

  void
  write_histogram_csv(std::filesystem::path const& path, Histogram const& hist)
  {
    auto out = open_out(path);
    out << "bin,lo_kw,hi_kw,center_kw,count\n";
    auto const w = hist.width();
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
      auto const lo = hist.lo + static_cast<double>(b) * w;
      out << b << ',' << fmt(lo) << ',' << fmt(lo + w) << ',' << fmt(hist.center(b)) << ','
          << hist.counts[b] << '\n';
    }
  }

  void
  write_moments_csv(std::filesystem::path const& path, MomentCheck const& m, double scale)
  {
    auto out = open_out(path);
    out << "laplace_scale_kw,mean_kw,variance_kw2,expected_variance_kw2,variance_defined\n";
    out << fmt(scale) << ',' << fmt(m.mean) << ',' << fmt(m.variance) << ','
        << fmt(m.expected_variance) << ',' << (m.variance_defined ? 1 : 0) << '\n';
  }

  void
  write_plot_data(std::filesystem::path const& dir, RunReport const& r, std::size_t n_bins)
  {
    std::filesystem::create_directories(dir);
    auto const n = r.n_steps();
    auto const hours = [&](std::size_t k) {
      return fmt(static_cast<double>(k) * r.step_seconds / 3600.0);
    };
    {
      auto out = open_out(dir / "noise.dat");
      out << "hour,noise_kw\n";
      for (std::size_t k = 0; k < n; ++k) {
        out << hours(k) << ',' << fmt(r.noise_kw[k]) << '\n';
      }
    }
    {
      auto const h = noise_histogram(r.noise_kw, n_bins);
      auto out = open_out(dir / "noise_histogram.dat");
      out << "center_kw,count\n";
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << fmt(h.center(b)) << ',' << h.counts[b] << '\n';
      }
    }
    {
      auto out = open_out(dir / "net_pv.dat");
      out << "hour,pv_kw,net_pv_kw\n";
      for (std::size_t k = 0; k < n; ++k) {
        out << hours(k) << ',' << fmt(r.pv_kw[k]) << ',' << fmt(r.net_pv_kw[k]) << '\n';
      }
    }
    {
      auto out = open_out(dir / "temperatures.dat");
      out << "hour,min_c,mean_c,max_c,band_lo_c,band_hi_c\n";
      for (std::size_t k = 0; k < n; ++k) {
        double lo = 0.0;
        double hi = 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < r.n_buildings(); ++j) {
          auto const t = r.temps[j][k];
          lo = j == 0 ? t : std::min(lo, t);
          hi = j == 0 ? t : std::max(hi, t);
          sum += t;
        }
        auto const mean = r.n_buildings() > 0 ? sum / static_cast<double>(r.n_buildings()) : 0.0;
        out << hours(k + 1) << ',' << fmt(lo) << ',' << fmt(mean) << ',' << fmt(hi) << ','
            << fmt(r.comfort_min) << ',' << fmt(r.comfort_max) << '\n';
      }
    }
    {
      auto out = open_out(dir / "tracking.dat");
      out << "hour,ref_kw,agg_kw\n";
      for (std::size_t k = 0; k < n; ++k) {
        out << hours(k) << ',' << fmt(r.reference_kw[k]) << ',' << fmt(r.aggregate_kw[k]) << '\n';
      }
    }
  }
}
