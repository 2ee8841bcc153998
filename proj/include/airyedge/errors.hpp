#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace airyedge {

// Error taxonomy shared across the library. Each maps to one failure kind a
// caller can act on; CLI translates any of these to exit code 1.
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct capability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singularity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct accuracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct frame_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct discretization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct divergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct stiffness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw domain_error(std::string(what) + ": non-finite argument");
}

}  // namespace airyedge
