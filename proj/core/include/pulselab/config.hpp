#pragma once

// INI configuration with sections [system.*], [substrate.*], [ga], [scan], [campaign].
// Unknown sections or keys are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "pulselab/ga.hpp"
#include "pulselab/laser.hpp"
#include "pulselab/registry.hpp"

namespace pulselab {

struct SystemConfig {
    LaserSystemSpec spec;
    std::uint64_t calibration_seed = 1;
};

struct GASettings {
    int population = 40;
    int generations = 60;
    double crossover_rate = 0.8;
    double mutation_rate = 0.2;
    int elite_count = 2;
    double sigma_decay = 0.95;
    double blend_alpha = 0.5;
    Genome mutation_sigma{3.0e3, 6.0e4, 4.0e5, 0.015};
    double bound_a_fs2 = 2.0e4;
    double bound_b_fs3 = 4.0e5;
    double bound_c_fs4 = 4.0e6;
    double omega0_window_fraction = 0.5;  // share of pixels around the center
    bool seed_flat = true;
    unsigned workers = 0;

    bool operator==(const GASettings&) const = default;
};

struct ScanSettings {
    double a_min_fs2 = -2.0e4;
    double a_max_fs2 = 2.0e4;
    double b_min_fs3 = -4.0e5;
    double b_max_fs3 = 4.0e5;
    int n_a = 41;
    int n_b = 41;

    bool operator==(const ScanSettings&) const = default;
};

struct CampaignSettings {
    int reagents_per_system = 4;
    int repeats = 2;
    std::uint64_t reagent_seed = 100;  // reagent k uses reagent_seed + k
    std::uint64_t matrix_seed = 7;     // bank entry for family j uses matrix_seed + j
    std::string transfer_substrates = "CH2BrCl,CH2ICl";

    bool operator==(const CampaignSettings&) const = default;
};

struct Config {
    std::vector<SystemConfig> systems;
    Registry registry;
    GASettings ga;
    ScanSettings scan;
    CampaignSettings campaign;

    const SystemConfig& system(const std::string& name) const;
};

Config default_config();
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
// Canonical text form; equal configs serialize identically.
std::string serialize_config(const Config& cfg);
// FNV-1a 64 of the canonical form, 16 hex digits.
std::string config_digest(const Config& cfg);
std::string fnv1a_hex(const std::string& bytes);

GAConfig make_ga_config(const GASettings& s, const SpectralGrid& grid, std::uint64_t seed);

}  // namespace pulselab
