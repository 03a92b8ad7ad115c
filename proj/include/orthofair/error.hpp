#pragma once

#include <cstddef>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orthofair {

enum class Errc {
  // numerical
  NotPositiveDefinite,
  ConvergenceFailure,
  DegenerateDirection,
  ZeroWithinScatter,
  ZeroMeanDifference,
  ZeroVariance,
  IllConditionedKernel,
  // data
  DegenerateClass,
  DegenerateGroup,
  SingleClass,
  DimensionMismatch,
  ResampleDegenerate,
  ParseError,
  SchemaError,
  InvalidArgument,
  IoError,
};

inline constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::DegenerateDirection: return "DegenerateDirection";
    case Errc::ZeroWithinScatter: return "ZeroWithinScatter";
    case Errc::ZeroMeanDifference: return "ZeroMeanDifference";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::IllConditionedKernel: return "IllConditionedKernel";
    case Errc::DegenerateClass: return "DegenerateClass";
    case Errc::DegenerateGroup: return "DegenerateGroup";
    case Errc::SingleClass: return "SingleClass";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ResampleDegenerate: return "ResampleDegenerate";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// True for failures of the numerical machinery (as opposed to bad input data).
inline constexpr bool is_numerical(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite:
    case Errc::ConvergenceFailure:
    case Errc::DegenerateDirection:
    case Errc::ZeroWithinScatter:
    case Errc::ZeroMeanDifference:
    case Errc::ZeroVariance:
    case Errc::IllConditionedKernel:
      return true;
    default:
      return false;
  }
}

/// Exception carrying a machine-readable code and, where meaningful, an index
/// (pivot, coordinate, line number, class value).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), message_(what), index_(index) {}

  Errc code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::string message_;
  std::optional<std::size_t> index_;
};

namespace detail {
inline bool& warnings_enabled() {
  static bool enabled = true;
  return enabled;
}
}  // namespace detail

inline void set_warnings_enabled(bool enabled) { detail::warnings_enabled() = enabled; }

inline void warn(std::string_view message) {
  if (detail::warnings_enabled()) std::cerr << "warning: " << message << '\n';
}

}  // namespace orthofair
