#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kwc {

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by operations that require eps > 0 when called at the singular limit.
struct SingularLimitError : std::runtime_error {
  explicit SingularLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct StepFailure : std::runtime_error {
  StepFailure(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_index(step) {}
  int step_index;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> msgs)
      : std::runtime_error(join(msgs)), messages(std::move(msgs)) {}
  explicit ConfigError(const std::string& msg) : ConfigError(std::vector<std::string>{msg}) {}
  std::vector<std::string> messages;

 private:
  static std::string join(const std::vector<std::string>& msgs) {
    std::string out;
    for (const auto& m : msgs) {
      if (!out.empty()) out += "; ";
      out += m;
    }
    return out;
  }
};

}  // namespace kwc
