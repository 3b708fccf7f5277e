#pragma once

#include <stdexcept>
#include <string>

namespace privdr
{
  /// Bad or inconsistent input data (files, configuration, trace contents).
  class InputError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// The exact solver refuses instances above its tractability guard.
  class SolverGuardError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };
}
