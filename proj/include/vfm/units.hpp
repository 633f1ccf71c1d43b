#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vfm {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::remainder(a, two_pi);
    if (w <= -pi) w += two_pi;
    return w;
}

/// Smallest representative of an angle modulo pi, in (-pi/2, pi/2].
/// Used when two steering angles are equivalent up to the sign of the drive.
inline double wrap_half_pi(double a) {
    double w = std::remainder(a, pi);
    if (w <= -pi / 2.0) w += pi;
    return w;
}

inline double hz_to_rad(double hz) { return two_pi * hz; }
inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

enum class ErrorCode {
    GraspOutsideObject,
    OriginSingularity,
    DegenerateTarget,
    ZeroAngularVelocity,
    NonFiniteState,
    PhaseTimeout,
    Infeasible,
    ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::GraspOutsideObject: return "GraspOutsideObject";
        case ErrorCode::OriginSingularity: return "OriginSingularity";
        case ErrorCode::DegenerateTarget: return "DegenerateTarget";
        case ErrorCode::ZeroAngularVelocity: return "ZeroAngularVelocity";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::PhaseTimeout: return "PhaseTimeout";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace vfm
