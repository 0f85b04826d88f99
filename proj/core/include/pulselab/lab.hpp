#pragma once

// Session object: calibrated systems plus the campaign recipes built on them.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pulselab/campaigns.hpp"
#include "pulselab/config.hpp"

namespace pulselab {

class Lab {
public:
    // Calibrates every configured system with its calibration seed.
    explicit Lab(Config cfg);

    const Config& config() const noexcept { return cfg_; }
    const LaserSystem& system(const std::string& name) const;
    std::shared_ptr<const LaserSystem> system_ptr(const std::string& name) const;
    const CalibrationResult& calibration(const std::string& name) const;
    Assay assay(const std::string& system, const std::string& substrate) const;
    std::vector<Assay> assays(const std::string& system) const;

    GAConfig ga_config(const std::string& system, std::uint64_t seed) const;
    // Reagents k = 0..count-1 use seed reagent_seed + k.
    std::vector<OptimizationTrace> optimize_reagents(const std::string& system,
                                                     const std::string& substrate, int count) const;
    // One GA-trained mask per substrate on `system`; family j uses matrix_seed + j.
    std::map<std::string, PhaseMask> reagent_bank(const std::string& system) const;
    // Bank masks moved onto `target` under `policy` (pixel copy by default), then evaluated there.
    TransferMatrix matrix(const std::string& target, const std::string& bank_system,
                          const std::map<std::string, PhaseMask>& bank, ObjectiveMode mode,
                          const TransferPolicy& policy = {}) const;

private:
    Config cfg_;
    std::map<std::string, std::shared_ptr<LaserSystem>> systems_;
    std::map<std::string, CalibrationResult> calibrations_;
};

}  // namespace pulselab
