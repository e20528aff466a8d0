#pragma once

#include <stdexcept>
#include <string>

namespace kpg {

/// Tensor shapes that do not line up; the message names the offending block.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller handed in a value outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad configuration key or value. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or structurally invalid data. The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An event whose posts do not form a rooted tree.
class MalformedEventError : public DataError {
 public:
  MalformedEventError(const std::string& event_id, const std::string& what)
      : DataError("malformed event '" + event_id + "': " + what), event_id_(event_id) {}

  const std::string& event_id() const noexcept { return event_id_; }

 private:
  std::string event_id_;
};

}  // namespace kpg
