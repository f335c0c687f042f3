#pragma once

#include <stdexcept>
#include <string>

namespace spf {

/// Diagnostic raised by any pipeline stage. `stage` names the stage
/// ("parse", "layout", "compose", ...) and is echoed by the driver.
class Error : public std::runtime_error {
public:
  Error(std::string stage, const std::string &msg)
      : std::runtime_error(stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string &stage() const { return stage_; }

private:
  std::string stage_;
};

} // namespace spf
