#include "privdr/privacy.hpp"

#include "csv.hpp"
#include "privdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace privdr
{
  double
  uniform_open01(Rng& rng)
  {
    constexpr double inv_2_53 = 1.0 / 9007199254740992.0;
    return (static_cast<double>(rng() >> 11) + 0.5) * inv_2_53;
  }

  void
  DPParams::validate() const
  {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument{"epsilon must be positive and finite"};
    }
    if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
      throw std::invalid_argument{"sensitivity must be positive and finite"};
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
      throw std::invalid_argument{"delta must lie in [0, 1)"};
    }
    auto const scale = sensitivity / epsilon;
    if (!std::isfinite(scale) || !(scale > 0.0)) {
      throw std::invalid_argument{"laplace scale sensitivity/epsilon is not finite"};
    }
  }

  double
  laplace_scale(DPParams const& params)
  {
    params.validate();
    return params.sensitivity / params.epsilon;
  }

  double
  laplace_pdf(double x, double scale)
  {
    if (!(scale > 0.0)) {
      throw std::invalid_argument{"laplace scale must be positive"};
    }
    return std::exp(-std::abs(x) / scale) / (2.0 * scale);
  }

  double
  laplace_from_uniform(double p, double scale)
  {
    auto const centered = p - 0.5;
    auto const sign = centered < 0.0 ? -1.0 : (centered > 0.0 ? 1.0 : 0.0);
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(centered));
  }

  double
  sample_laplace(double scale, Rng& rng)
  {
    return laplace_from_uniform(uniform_open01(rng), scale);
  }

  NoiseTrace
  generate_noise_trace(DPParams const& params, std::size_t length, int step_seconds)
  {
    if (length == 0) {
      throw std::invalid_argument{"noise trace length must be at least 1"};
    }
    if (step_seconds <= 0) {
      throw std::invalid_argument{"step_seconds must be positive"};
    }
    auto const scale = laplace_scale(params);
    Rng rng{params.seed};
    NoiseTrace trace;
    trace.step_seconds = step_seconds;
    trace.values.reserve(length);
    for (std::size_t k = 0; k < length; ++k) {
      trace.values.push_back(sample_laplace(scale, rng));
    }
    return trace;
  }

  Trace
  compute_net_pv(Trace const& pv, NoiseTrace const& noise)
  {
    if (pv.size() != noise.size()) {
      throw std::invalid_argument{
        "pv and noise lengths differ: " + std::to_string(pv.size()) + " vs "
        + std::to_string(noise.size())};
    }
    if (pv.step_seconds != noise.step_seconds) {
      throw std::invalid_argument{"pv and noise step sizes differ"};
    }
    Trace net = pv;
    for (std::size_t k = 0; k < net.values.size(); ++k) {
      net.values[k] = pv.values[k] - noise.values[k];
    }
    return net;
  }

  bool
  density_ratio_bound_check(DPParams const& params, double x, double shift)
  {
    auto const scale = laplace_scale(params);
    if (std::abs(shift) > params.sensitivity) {
      throw std::invalid_argument{"|shift| exceeds the sensitivity; datasets are not neighbors"};
    }
    // log pdf(x) - log pdf(x - shift)
    auto const log_ratio = (std::abs(x - shift) - std::abs(x)) / scale;
    auto const slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, params.epsilon);
    return log_ratio <= params.epsilon + slack;
  }

  double
  mechanism_expected_squared_error(DPParams const& params, std::size_t m)
  {
    if (m == 0) {
      throw std::invalid_argument{"query count m must be at least 1"};
    }
    auto const scale = laplace_scale(params);
    return 2.0 * static_cast<double>(m) * scale * scale;
  }

  void
  write_noise_csv(std::filesystem::path const& path, NoiseTrace const& noise)
  {
    std::ofstream out{path};
    if (!out) {
      throw InputError{"cannot write file: " + path.string()};
    }
    out << "step,noise_kw\n";
    for (std::size_t k = 0; k < noise.values.size(); ++k) {
      out << k << ',' << format_double(noise.values[k]) << '\n';
    }
  }

  NoiseTrace
  load_noise_csv(std::filesystem::path const& path, int step_seconds)
  {
    auto const trace = load_trace(path, Unit::Kilowatt, step_seconds);
    return NoiseTrace{trace.values, step_seconds};
  }
}
