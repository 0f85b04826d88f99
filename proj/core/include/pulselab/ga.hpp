#pragma once

// Real-coded genetic algorithm over (A, B, C, omega0).

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pulselab/pulse.hpp"

namespace pulselab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double width() const noexcept { return hi - lo; }
    double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
};

inline constexpr std::size_t kGenes = 4;  // A, B, C, omega0
using Genome = std::array<double, kGenes>;

Genome to_genome(const PolynomialPhase& p) noexcept;
PolynomialPhase to_phase(const Genome& g) noexcept;

struct GAConfig {
    int population = 40;
    int generations = 60;
    double crossover_rate = 0.8;
    double mutation_rate = 0.2;
    Genome mutation_sigma{3.0e3, 6.0e4, 4.0e5, 0.015};
    double sigma_decay = 0.95;  // per generation
    double blend_alpha = 0.5;
    int elite_count = 2;
    std::array<Interval, kGenes> bounds{};
    std::uint64_t seed = 1;
    // Start the population from the flat phase at the omega0 midpoint.
    bool seed_flat = true;
    unsigned workers = 0;  // 0: hardware concurrency
};

// Default search box: A +-2e4, B +-4e5, C +-4e6, omega0 over the central half of the grid.
GAConfig default_ga_config(const SpectralGrid& grid);
void validate(const GAConfig& cfg);

struct Individual {
    PolynomialPhase params;
    std::optional<double> fitness;
};

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

struct OptimizationTrace {
    std::vector<GenerationStats> generations;
    Individual best;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;
};

using Evaluator = std::function<double(const PolynomialPhase&)>;

// Evaluator must be pure and thread-safe. Calls: population * (generations + 1).
OptimizationTrace run_ga(const Evaluator& evaluator, const GAConfig& cfg);
PhaseMask best_mask(const OptimizationTrace& trace, const SpectralGrid& grid);
std::string trace_csv(const OptimizationTrace& trace);

}  // namespace pulselab
