#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlab {

enum class ErrorKind {
  Dimension,      // fields or states on mismatched grids
  Domain,         // argument outside the admissible set (f <= 0, outside a window)
  Stability,      // time step above the parabolic limit, NaN/Inf, lost positivity
  Singularity,    // evaluation at or past a finite blow-up time
  Config,         // scenario/configuration rejected
  Unsupported,    // operation not defined for this background or flow
  Ordering,       // time endpoints out of order
  SearchFailure,  // parameter search exhausted its range
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hlab
