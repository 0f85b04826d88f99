#pragma once

// The seven acceptance criteria evaluated against a configuration.
// Shared by `pulselab demo` and the acceptance test binary.

#include <functional>
#include <string>
#include <vector>

#include "pulselab/config.hpp"

namespace pulselab::cli {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Time limits in seconds; each measured on one core.
inline constexpr double kCalibrationLimit = 30.0;
inline constexpr double kScanLimit = 120.0;
inline constexpr double kMatrixLimit = 300.0;

inline constexpr double kMinTpaRatio = 0.99;
inline constexpr int kCalibrationSeeds = 10;
inline constexpr double kLandscapeRatioLo = 1.5;
inline constexpr double kLandscapeRatioHi = 2.5;
inline constexpr double kMinEfficacy = 0.95;
inline constexpr double kTlTargetTwo = 0.15;     // CH2BrCl TL J on System II
inline constexpr double kBestTargetTwo = 1.1;    // best optimized CH2BrCl J on System II
inline constexpr double kTargetTolerance = 0.30; // relative
inline constexpr double kMaxShiftGain = 0.10;

// Called after each criterion so callers can stream results.
using CriterionSink = std::function<void(const CriterionResult&)>;

std::vector<CriterionResult> run_acceptance(const Config& cfg, const CriterionSink& sink = {});

// "PASS  3 transfer-efficacy: ... (1.2 s)"
std::string format_criterion(const CriterionResult& r);

}  // namespace pulselab::cli
