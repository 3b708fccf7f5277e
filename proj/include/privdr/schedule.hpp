#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace privdr
{
  /// Binary ON/OFF decisions, one row per building, one column per step.
  /// Stored row-major; the flattened order defines the lexicographic
  /// tie-break used by the solvers.
  struct Schedule
  {
    std::size_t n_buildings = 0;
    std::size_t n_steps = 0;
    std::vector<std::uint8_t> u;

    Schedule() = default;

    Schedule(std::size_t buildings, std::size_t steps)
      : n_buildings{buildings}, n_steps{steps}, u(buildings * steps, 0)
    {
    }

    int
    at(std::size_t building, std::size_t k) const { return u[building * n_steps + k]; }

    void
    set(std::size_t building, std::size_t k, int value)
    {
      if (value != 0 && value != 1) {
        throw std::invalid_argument{"schedule entries must be 0 or 1"};
      }
      u[building * n_steps + k] = static_cast<std::uint8_t>(value);
    }

    bool
    operator==(Schedule const&) const = default;
  };
}
