#pragma once

#include <stdexcept>
#include <string>

namespace wake {

/// Coarse failure classes; the CLI maps them onto exit codes.
enum class ErrorClass { config, precondition, convergence, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

inline Error config_error(const std::string& what) { return {ErrorClass::config, "Config", what}; }
inline Error io_error(const std::string& what) { return {ErrorClass::io, "Io", what}; }
inline Error precondition(const std::string& kind, const std::string& what) {
  return {ErrorClass::precondition, kind, what};
}
inline Error convergence(const std::string& kind, const std::string& what) {
  return {ErrorClass::convergence, kind, what};
}

inline int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::config: return 2;
    case ErrorClass::precondition: return 3;
    case ErrorClass::convergence: return 4;
    case ErrorClass::io: return 5;
  }
  return 1;
}

inline const char* class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::config: return "config";
    case ErrorClass::precondition: return "precondition";
    case ErrorClass::convergence: return "convergence";
    case ErrorClass::io: return "io";
  }
  return "unknown";
}

}  // namespace wake
