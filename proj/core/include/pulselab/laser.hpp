#pragma once

// Virtual laser-plus-shaper apparatus.

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "pulselab/ga.hpp"
#include "pulselab/pulse.hpp"

namespace pulselab {

struct LaserSystemSpec {
    std::string name;
    int pixel_count = 640;
    int center_pixel = 320;
    double center_wavelength_nm = 800.0;
    double nm_per_pixel = 0.155;
    double bandwidth_fwhm_nm = 57.5;      // amplitude-spectrum FWHM
    double delivered_energy_uJ = 375.0;
    double spot_diameter_um = 40.0;       // focal spot size
    double intensity_scale = 1.0;         // (0, 2]
    std::uint64_t residual_phase_seed = 1;
    std::array<double, 3> residual_magnitude{0.0, 2.0e4, 2.0e5};  // fs^2, fs^3, fs^4
    // Detection floor multiplier applied to every substrate's S2 threshold.
    double s2_threshold_scale = 1.0;

    bool operator==(const LaserSystemSpec&) const = default;
};

LaserSystemSpec system_one_spec();
LaserSystemSpec system_two_spec();
void validate(const LaserSystemSpec& spec);
SpectralGrid grid_of(const LaserSystemSpec& spec);

class LaserSystem {
public:
    const LaserSystemSpec& spec() const noexcept { return spec_; }
    const SpectralGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& amplitude() const noexcept { return amplitude_; }
    const PhaseMask& residual_phase() const noexcept { return residual_; }
    const PolynomialPhase& residual_polynomial() const noexcept { return residual_poly_; }
    const std::optional<PhaseMask>& tl_reference() const noexcept { return tl_reference_; }
    bool calibrated() const noexcept { return tl_reference_.has_value(); }

    // Installs a reference mask; grid tag must match.
    void set_tl_reference(PhaseMask mask);

private:
    friend LaserSystem make_laser_system(const LaserSystemSpec& spec);
    LaserSystemSpec spec_;
    SpectralGrid grid_;
    std::vector<double> amplitude_;
    PolynomialPhase residual_poly_;
    PhaseMask residual_;
    std::optional<PhaseMask> tl_reference_;
};

LaserSystem make_laser_system(const LaserSystemSpec& spec);

enum class ShapeMode { calibrated, bypass_reference };

// Total phase = residual + reference (unless bypassed) + mask.
TemporalField shape_pulse(const LaserSystem& system, const PhaseMask& mask,
                          ShapeMode mode = ShapeMode::calibrated);
// Focal peak intensity including the system's intensity scale, TW/cm^2.
double delivered_peak_intensity(const LaserSystem& system, const TemporalField& field);

// Narrow-box GA used to null the residual phase; omega0 pinned at the center pixel.
GAConfig calibration_ga_config(const LaserSystem& system);
// TPA of the exact-negation optimum, i.e. a flat total phase.
double analytic_tpa_optimum(const LaserSystem& system);

struct CalibrationResult {
    PhaseMask reference;
    double tpa = 0.0;
    double tpa_ratio = 0.0;  // against analytic_tpa_optimum
    OptimizationTrace trace;
};

// Runs the GA, stores the reference on success, throws CalibrationError below min_ratio.
CalibrationResult calibrate_tl(LaserSystem& system, GAConfig cfg, std::uint64_t seed,
                               double min_ratio = 0.99);

struct TransferPolicy {
    int shift_pixels = 0;
    bool resample = false;
};

// Target pixel nearest the source center wavelength, minus the source center pixel.
int compute_pixel_shift(const LaserSystemSpec& source, const LaserSystemSpec& target);
PhaseMask transfer_mask(const PhaseMask& mask, const LaserSystem& source, const LaserSystem& target,
                        const TransferPolicy& policy);

}  // namespace pulselab
