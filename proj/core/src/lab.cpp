#include "pulselab/lab.hpp"

#include <fmt/format.h>

#include "pulselab/error.hpp"

namespace pulselab {

Lab::Lab(Config cfg) : cfg_(std::move(cfg)) {
    for (const auto& sc : cfg_.systems) {
        auto sys = std::make_shared<LaserSystem>(make_laser_system(sc.spec));
        GAConfig ga = calibration_ga_config(*sys);
        ga.workers = cfg_.ga.workers;
        calibrations_.emplace(sc.spec.name, calibrate_tl(*sys, ga, sc.calibration_seed));
        systems_.emplace(sc.spec.name, std::move(sys));
    }
}

std::shared_ptr<const LaserSystem> Lab::system_ptr(const std::string& name) const {
    auto it = systems_.find(name);
    if (it == systems_.end()) throw Error(Errc::config_error, fmt::format("unknown system '{}'", name));
    return it->second;
}

const LaserSystem& Lab::system(const std::string& name) const { return *system_ptr(name); }

const CalibrationResult& Lab::calibration(const std::string& name) const {
    auto it = calibrations_.find(name);
    if (it == calibrations_.end()) throw Error(Errc::config_error, fmt::format("unknown system '{}'", name));
    return it->second;
}

Assay Lab::assay(const std::string& system, const std::string& substrate) const {
    return Assay(system_ptr(system), cfg_.registry.find(substrate));
}

std::vector<Assay> Lab::assays(const std::string& system) const {
    std::vector<Assay> out;
    for (const auto& s : cfg_.registry.entries()) out.emplace_back(system_ptr(system), s);
    return out;
}

GAConfig Lab::ga_config(const std::string& system, std::uint64_t seed) const {
    return make_ga_config(cfg_.ga, this->system(system).grid(), seed);
}

std::vector<OptimizationTrace> Lab::optimize_reagents(const std::string& system,
                                                      const std::string& substrate, int count) const {
    const Assay a = assay(system, substrate);
    std::vector<OptimizationTrace> out;
    for (int k = 0; k < count; ++k)
        out.push_back(optimize_reagent(a, ga_config(system, cfg_.campaign.reagent_seed + static_cast<std::uint64_t>(k))));
    return out;
}

std::map<std::string, PhaseMask> Lab::reagent_bank(const std::string& system) const {
    std::map<std::string, PhaseMask> bank;
    const auto& grid = this->system(system).grid();
    for (const auto& s : cfg_.registry.entries()) {
        const Assay a(system_ptr(system), s);
        const auto seed = cfg_.campaign.matrix_seed + static_cast<std::uint64_t>(s.family_index);
        bank.emplace(s.name, best_mask(optimize_reagent(a, ga_config(system, seed)), grid));
    }
    return bank;
}

TransferMatrix Lab::matrix(const std::string& target, const std::string& bank_system,
                           const std::map<std::string, PhaseMask>& bank, ObjectiveMode mode,
                           const TransferPolicy& policy) const {
    std::map<std::string, PhaseMask> moved;
    for (const auto& [name, mask] : bank)
        moved.emplace(name, transfer_mask(mask, system(bank_system), system(target), policy));
    return family_matrix(assays(target), moved, mode, cfg_.ga.workers);
}

}  // namespace pulselab
