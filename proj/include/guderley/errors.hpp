#pragma once

#include <stdexcept>
#include <string>

namespace guderley {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy mirrors the CLI exit codes: Domain -> 2, Anomaly -> 3,
// NoBracket -> 4.
enum class ErrorKind { Domain, Anomaly, NoBracket };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    const char* kind_name() const noexcept {
        switch (kind_) {
            case ErrorKind::Domain: return "domain";
            case ErrorKind::Anomaly: return "anomaly";
            case ErrorKind::NoBracket: return "no_bracket";
        }
        return "unknown";
    }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& msg) {
    throw Error(ErrorKind::Domain, msg);
}

[[noreturn]] inline void throw_anomaly(const std::string& msg) {
    throw Error(ErrorKind::Anomaly, msg);
}

[[noreturn]] inline void throw_no_bracket(const std::string& msg) {
    throw Error(ErrorKind::NoBracket, msg);
}

}  // namespace guderley
