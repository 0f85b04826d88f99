#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulselab {

enum class Errc {
    invalid_grid,
    incompatible_mask,
    degenerate_spectrum,
    invalid_argument,
    uncalibrated_system,
    calibration_failed,
    out_of_range,
    invalid_policy,
    degenerate_normalization,
    evaluation_error,
    empty_input,
    degenerate_landscape,
    missing_compound,
    config_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type; callers branch on code(), humans read what().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Thrown when calibration misses its quality bar; carries the best value reached.
class CalibrationError : public Error {
public:
    CalibrationError(double best_ratio, const std::string& detail)
        : Error(Errc::calibration_failed, detail), best_ratio_(best_ratio) {}
    double best_ratio() const noexcept { return best_ratio_; }

private:
    double best_ratio_;
};

}  // namespace pulselab
