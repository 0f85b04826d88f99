#include "pulselab/error.hpp"

namespace pulselab {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_grid: return "invalid-grid";
        case Errc::incompatible_mask: return "incompatible-mask";
        case Errc::degenerate_spectrum: return "degenerate-spectrum";
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::uncalibrated_system: return "uncalibrated-system";
        case Errc::calibration_failed: return "calibration-failed";
        case Errc::out_of_range: return "out-of-range";
        case Errc::invalid_policy: return "invalid-policy";
        case Errc::degenerate_normalization: return "degenerate-normalization";
        case Errc::evaluation_error: return "evaluation-error";
        case Errc::empty_input: return "empty-input";
        case Errc::degenerate_landscape: return "degenerate-landscape";
        case Errc::missing_compound: return "missing-compound";
        case Errc::config_error: return "config-error";
        case Errc::io_error: return "io-error";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace pulselab
