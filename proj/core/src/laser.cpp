#include "pulselab/laser.hpp"

#include <fmt/format.h>

#include <cmath>

#include "pulselab/error.hpp"
#include "pulselab/random.hpp"

namespace pulselab {

LaserSystemSpec system_one_spec() {
    LaserSystemSpec s;
    s.name = "I";
    s.center_wavelength_nm = 800.0;
    s.nm_per_pixel = 0.155;
    s.bandwidth_fwhm_nm = 57.5;
    s.delivered_energy_uJ = 375.0;
    s.spot_diameter_um = 40.0;
    s.intensity_scale = 1.0;
    s.residual_phase_seed = 11;
    s.s2_threshold_scale = 1.0;
    return s;
}

LaserSystemSpec system_two_spec() {
    LaserSystemSpec s;
    s.name = "II";
    s.center_wavelength_nm = 791.0;
    s.nm_per_pixel = 0.179;
    s.bandwidth_fwhm_nm = 51.5;
    s.delivered_energy_uJ = 355.0;
    s.spot_diameter_um = 45.0;
    s.intensity_scale = 0.5;
    s.residual_phase_seed = 22;
    s.s2_threshold_scale = 1.0e-3;
    return s;
}

void validate(const LaserSystemSpec& s) {
    if (s.name.empty()) throw Error(Errc::invalid_argument, "system name is empty");
    if (!(s.bandwidth_fwhm_nm > 0.0) || !(s.delivered_energy_uJ > 0.0) || !(s.spot_diameter_um > 0.0))
        throw Error(Errc::invalid_argument,
                    fmt::format("system {}: bandwidth, energy and spot must be positive", s.name));
    if (!(s.intensity_scale > 0.0 && s.intensity_scale <= 2.0))
        throw Error(Errc::invalid_argument,
                    fmt::format("system {}: intensity_scale must lie in (0, 2]", s.name));
    for (double m : s.residual_magnitude)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw Error(Errc::invalid_argument,
                        fmt::format("system {}: residual magnitudes must be >= 0", s.name));
    if (!(s.s2_threshold_scale > 0.0))
        throw Error(Errc::invalid_argument,
                    fmt::format("system {}: s2_threshold_scale must be positive", s.name));
}

SpectralGrid grid_of(const LaserSystemSpec& s) {
    return make_grid(s.pixel_count, s.center_pixel, s.center_wavelength_nm, s.nm_per_pixel);
}

void LaserSystem::set_tl_reference(PhaseMask mask) {
    if (mask.grid_tag != grid_.tag() || mask.size() != static_cast<std::size_t>(grid_.pixel_count()))
        throw Error(Errc::incompatible_mask, "reference mask sampled on a different grid");
    tl_reference_ = std::move(mask);
}

LaserSystem make_laser_system(const LaserSystemSpec& spec) {
    validate(spec);
    LaserSystem sys;
    sys.spec_ = spec;
    sys.grid_ = grid_of(spec);
    sys.amplitude_ = gaussian_amplitude(sys.grid_, spec.bandwidth_fwhm_nm);
    Rng rng(stream_key(spec.residual_phase_seed, 0x7265736964ULL, 0));
    const auto& m = spec.residual_magnitude;
    // Draw order is fixed (A, B, C) so magnitudes can be zeroed independently.
    const double a = rng.uniform(-1.0, 1.0) * m[0];
    const double b = rng.uniform(-1.0, 1.0) * m[1];
    const double c = rng.uniform(-1.0, 1.0) * m[2];
    sys.residual_poly_ = PolynomialPhase{a, b, c, sys.grid_.center_omega()};
    sys.residual_ = eval_polynomial_phase(sys.residual_poly_, sys.grid_);
    return sys;
}

TemporalField shape_pulse(const LaserSystem& system, const PhaseMask& mask, ShapeMode mode) {
    PhaseMask total = compose_masks(system.residual_phase(), mask);
    if (mode == ShapeMode::calibrated) {
        if (!system.calibrated())
            throw Error(Errc::uncalibrated_system,
                        fmt::format("system {} has no reference mask", system.spec().name));
        total = compose_masks(total, *system.tl_reference());
    }
    auto field = make_spectral_field(system.amplitude(), std::move(total), system.grid());
    return synthesize_temporal(field, system.spec().delivered_energy_uJ);
}

double delivered_peak_intensity(const LaserSystem& system, const TemporalField& field) {
    return peak_intensity(field, system.spec().spot_diameter_um) * system.spec().intensity_scale;
}

GAConfig calibration_ga_config(const LaserSystem& system) {
    GAConfig cfg;
    const auto& m = system.spec().residual_magnitude;
    const double wa = 1.5 * m[0] + 2.0e3;
    const double wb = 1.5 * m[1] + 2.0e3;
    const double wc = 1.5 * m[2] + 2.0e4;
    const double w0 = system.grid().center_omega();
    cfg.bounds = {Interval{-wa, wa}, Interval{-wb, wb}, Interval{-wc, wc}, Interval{w0, w0}};
    cfg.mutation_sigma = {0.1 * wa, 0.1 * wb, 0.1 * wc, 0.0};
    cfg.sigma_decay = 0.95;
    return cfg;
}

double analytic_tpa_optimum(const LaserSystem& system) {
    // Exact negation of the residual leaves a flat total phase.
    auto field = make_spectral_field(system.amplitude(), zero_mask(system.grid()), system.grid());
    return tpa_signal(synthesize_temporal(field, system.spec().delivered_energy_uJ));
}

CalibrationResult calibrate_tl(LaserSystem& system, GAConfig cfg, std::uint64_t seed,
                               double min_ratio) {
    cfg.seed = seed;
    const double optimum = analytic_tpa_optimum(system);
    const SpectralGrid& grid = system.grid();
    const LaserSystem& view = system;
    Evaluator eval = [&view, &grid, optimum](const PolynomialPhase& p) {
        const auto field = shape_pulse(view, eval_polynomial_phase(p, grid), ShapeMode::bypass_reference);
        return tpa_signal(field) / optimum;
    };
    CalibrationResult out;
    out.trace = run_ga(eval, cfg);
    out.reference = best_mask(out.trace, grid);
    out.tpa_ratio = *out.trace.best.fitness;
    out.tpa = out.tpa_ratio * optimum;
    if (out.tpa_ratio < min_ratio)
        throw CalibrationError(out.tpa_ratio,
                               fmt::format("system {} reached TPA ratio {:.4f} < {:.4f}",
                                           system.spec().name, out.tpa_ratio, min_ratio));
    system.set_tl_reference(out.reference);
    return out;
}

int compute_pixel_shift(const LaserSystemSpec& source, const LaserSystemSpec& target) {
    const SpectralGrid tg = grid_of(target);
    grid_of(source);  // validates the source grid
    const double pos = target.center_pixel +
                       (source.center_wavelength_nm - target.center_wavelength_nm) / target.nm_per_pixel;
    const long nearest = std::lround(pos);
    if (nearest < 0 || nearest >= tg.pixel_count())
        throw Error(Errc::out_of_range,
                    fmt::format("{} nm lies outside the target grid", source.center_wavelength_nm));
    return static_cast<int>(nearest) - source.center_pixel;
}

PhaseMask transfer_mask(const PhaseMask& mask, const LaserSystem& source, const LaserSystem& target,
                        const TransferPolicy& policy) {
    const SpectralGrid& sg = source.grid();
    const SpectralGrid& tg = target.grid();
    if (mask.grid_tag != sg.tag() || mask.size() != static_cast<std::size_t>(sg.pixel_count()))
        throw Error(Errc::incompatible_mask, "mask is not on the source grid");
    const int n = tg.pixel_count();
    if (std::abs(policy.shift_pixels) >= n)
        throw Error(Errc::invalid_policy, "shift exceeds the pixel count");
    if (policy.resample && policy.shift_pixels != 0)
        throw Error(Errc::invalid_policy, "resample and shift are exclusive");
    if (!policy.resample && sg.pixel_count() != n)
        throw Error(Errc::invalid_policy, "pixel copy needs equal pixel counts");

    PhaseMask out = zero_mask(tg);
    if (policy.resample) {
        const int ns = sg.pixel_count();
        for (int i = 0; i < n; ++i) {
            const double pos = (tg.wavelength(i) - sg.wavelength(0)) / sg.nm_per_pixel();
            double v;
            if (pos <= 0.0) {
                v = mask.phase.front();
            } else if (pos >= ns - 1) {
                v = mask.phase.back();
            } else {
                const auto j = static_cast<std::size_t>(pos);
                const double t = pos - static_cast<double>(j);
                v = mask.phase[j] * (1.0 - t) + mask.phase[j + 1] * t;
            }
            out.phase[static_cast<std::size_t>(i)] = v;
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const int dst = i + policy.shift_pixels;
        if (dst >= 0 && dst < n)
            out.phase[static_cast<std::size_t>(dst)] = mask.phase[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace pulselab
