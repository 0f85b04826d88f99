#include "pulselab/ga.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulselab/error.hpp"
#include "pulselab/parallel.hpp"
#include "pulselab/random.hpp"

namespace pulselab {

Genome to_genome(const PolynomialPhase& p) noexcept { return {p.a, p.b, p.c, p.omega0}; }
PolynomialPhase to_phase(const Genome& g) noexcept { return {g[0], g[1], g[2], g[3]}; }

GAConfig default_ga_config(const SpectralGrid& grid) {
    GAConfig cfg;
    const int n = grid.pixel_count();
    const int quarter = n / 4;
    // Central 50% of the pixels; frequency falls with pixel index.
    const double w_hi = grid.omega(std::clamp(grid.center_pixel() - quarter, 0, n - 1));
    const double w_lo = grid.omega(std::clamp(grid.center_pixel() + quarter, 0, n - 1));
    cfg.bounds = {Interval{-2.0e4, 2.0e4}, Interval{-4.0e5, 4.0e5}, Interval{-4.0e6, 4.0e6},
                  Interval{w_lo, w_hi}};
    return cfg;
}

void validate(const GAConfig& cfg) {
    if (cfg.population < 4) throw Error(Errc::invalid_argument, "population must be >= 4");
    if (cfg.generations < 0) throw Error(Errc::invalid_argument, "generations must be >= 0");
    if (cfg.elite_count < 0 || cfg.elite_count >= cfg.population)
        throw Error(Errc::invalid_argument, "elite_count must lie in [0, population)");
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(cfg.crossover_rate) || !rate_ok(cfg.mutation_rate))
        throw Error(Errc::invalid_argument, "rates must lie in [0, 1]");
    if (!(cfg.sigma_decay > 0.0) || !(cfg.blend_alpha >= 0.0))
        throw Error(Errc::invalid_argument, "sigma_decay must be > 0 and blend_alpha >= 0");
    for (std::size_t k = 0; k < kGenes; ++k) {
        const auto& b = cfg.bounds[k];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi)
            throw Error(Errc::invalid_argument, fmt::format("bounds for gene {} are empty", k));
        if (!(cfg.mutation_sigma[k] >= 0.0))
            throw Error(Errc::invalid_argument, "mutation sigma must be >= 0");
    }
}

namespace {

struct Member {
    Genome genes{};
    double fitness = 0.0;
};

// Descending fitness; ties keep the earlier index so ranking is order-stable.
std::vector<std::size_t> rank(const std::vector<Member>& pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness > pop[b].fitness; });
    return idx;
}

GenerationStats stats(int gen, const std::vector<Member>& pop) {
    GenerationStats s;
    s.generation = gen;
    s.best = pop.front().fitness;
    double sum = 0.0;
    for (const auto& m : pop) {
        s.best = std::max(s.best, m.fitness);
        sum += m.fitness;
    }
    s.mean = sum / static_cast<double>(pop.size());
    double var = 0.0;
    for (const auto& m : pop) var += (m.fitness - s.mean) * (m.fitness - s.mean);
    s.std = std::sqrt(var / static_cast<double>(pop.size()));
    return s;
}

void evaluate_all(std::vector<Member>& members, const Evaluator& eval, int gen, unsigned workers) {
    parallel_for(
        members.size(),
        [&](std::size_t i) {
            const double f = eval(to_phase(members[i].genes));
            if (!std::isfinite(f))
                throw Error(Errc::evaluation_error,
                            fmt::format("non-finite fitness at generation {} individual {}", gen, i));
            members[i].fitness = f;
        },
        workers);
}

std::size_t tournament(const std::vector<Member>& pop, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(pop.size());
    const auto a = static_cast<std::size_t>(rng.below(n));
    const auto b = static_cast<std::size_t>(rng.below(n));
    if (pop[a].fitness > pop[b].fitness) return a;
    if (pop[b].fitness > pop[a].fitness) return b;
    return std::min(a, b);
}

Member breed(const std::vector<Member>& pop, const GAConfig& cfg, int gen, std::size_t idx) {
    Rng rng(stream_key(cfg.seed, static_cast<std::uint64_t>(gen), idx));
    const Member& p1 = pop[tournament(pop, rng)];
    const Member& p2 = pop[tournament(pop, rng)];
    Member child = p1;
    if (rng.uniform() < cfg.crossover_rate) {
        for (std::size_t k = 0; k < kGenes; ++k) {
            const double lo = std::min(p1.genes[k], p2.genes[k]);
            const double hi = std::max(p1.genes[k], p2.genes[k]);
            const double pad = cfg.blend_alpha * (hi - lo);
            child.genes[k] = cfg.bounds[k].clamp(rng.uniform(lo - pad, hi + pad));
        }
    }
    const double decay = std::pow(cfg.sigma_decay, gen);
    for (std::size_t k = 0; k < kGenes; ++k) {
        if (cfg.bounds[k].width() <= 0.0) {
            child.genes[k] = cfg.bounds[k].lo;
            continue;
        }
        if (rng.uniform() < cfg.mutation_rate)
            child.genes[k] =
                cfg.bounds[k].clamp(child.genes[k] + cfg.mutation_sigma[k] * decay * rng.normal());
    }
    child.fitness = 0.0;
    return child;
}

}  // namespace

OptimizationTrace run_ga(const Evaluator& evaluator, const GAConfig& cfg) {
    validate(cfg);
    const auto P = static_cast<std::size_t>(cfg.population);
    const auto E = static_cast<std::size_t>(cfg.elite_count);

    std::vector<Member> pop(P);
    for (std::size_t i = 0; i < P; ++i) {
        Rng rng(stream_key(cfg.seed, 0, i));
        for (std::size_t k = 0; k < kGenes; ++k)
            pop[i].genes[k] = cfg.bounds[k].clamp(rng.uniform(cfg.bounds[k].lo, cfg.bounds[k].hi));
    }
    if (cfg.seed_flat) {
        Genome flat{0.0, 0.0, 0.0, 0.5 * (cfg.bounds[3].lo + cfg.bounds[3].hi)};
        for (std::size_t k = 0; k < kGenes; ++k) flat[k] = cfg.bounds[k].clamp(flat[k]);
        pop[0].genes = flat;
    }

    OptimizationTrace trace;
    trace.seed = cfg.seed;
    evaluate_all(pop, evaluator, 0, cfg.workers);
    trace.evaluations += P;
    {
        const auto order = rank(pop);
        std::vector<Member> sorted;
        sorted.reserve(P);
        for (auto i : order) sorted.push_back(pop[i]);
        pop = std::move(sorted);
    }
    trace.generations.push_back(stats(0, pop));

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Member> kids(P);
        for (std::size_t i = 0; i < P; ++i) kids[i] = breed(pop, cfg, gen, i);
        evaluate_all(kids, evaluator, gen, cfg.workers);
        trace.evaluations += P;

        const auto kid_order = rank(kids);
        std::vector<Member> next;
        next.reserve(P);
        for (std::size_t i = 0; i < E; ++i) next.push_back(pop[i]);  // pop is kept ranked
        for (std::size_t i = 0; next.size() < P; ++i) next.push_back(kids[kid_order[i]]);
        const auto order = rank(next);
        pop.clear();
        for (auto i : order) pop.push_back(next[i]);
        trace.generations.push_back(stats(gen, pop));
    }

    trace.best.params = to_phase(pop.front().genes);
    trace.best.fitness = pop.front().fitness;
    return trace;
}

PhaseMask best_mask(const OptimizationTrace& trace, const SpectralGrid& grid) {
    if (trace.generations.empty() || !trace.best.fitness)
        throw Error(Errc::empty_input, "trace holds no evaluated individual");
    return eval_polynomial_phase(trace.best.params, grid);
}

std::string trace_csv(const OptimizationTrace& trace) {
    std::string out = "generation,best,mean,std\n";
    for (const auto& g : trace.generations)
        out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", g.generation, g.best, g.mean, g.std);
    return out;
}

}  // namespace pulselab
