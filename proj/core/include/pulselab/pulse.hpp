#pragma once

// Spectral grids, polynomial phases, mask algebra and Fourier synthesis.
// Units: fs, rad/fs, nm, uJ, TW/cm^2.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace pulselab {

inline constexpr double kSpeedOfLight = 299.792458;  // nm/fs
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr std::size_t kTransformSize = 4096;

using cplx = std::complex<double>;

class SpectralGrid {
public:
    SpectralGrid() = default;

    int pixel_count() const noexcept { return pixel_count_; }
    int center_pixel() const noexcept { return center_pixel_; }
    double center_wavelength_nm() const noexcept { return center_wavelength_nm_; }
    double nm_per_pixel() const noexcept { return nm_per_pixel_; }
    const std::string& tag() const noexcept { return tag_; }

    double wavelength(int i) const noexcept {
        return center_wavelength_nm_ + (i - center_pixel_) * nm_per_pixel_;
    }
    // Strictly decreasing in i.
    double omega(int i) const noexcept { return omega_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& omegas() const noexcept { return omega_; }
    double center_omega() const noexcept { return omega(center_pixel_); }

    bool operator==(const SpectralGrid& o) const noexcept { return tag_ == o.tag_; }

private:
    friend SpectralGrid make_grid(int, int, double, double);
    int pixel_count_ = 0;
    int center_pixel_ = 0;
    double center_wavelength_nm_ = 0.0;
    double nm_per_pixel_ = 0.0;
    std::string tag_;
    std::vector<double> omega_;
};

SpectralGrid make_grid(int pixel_count, int center_pixel, double center_wavelength_nm,
                       double nm_per_pixel);

struct PolynomialPhase {
    double a = 0.0;       // fs^2
    double b = 0.0;       // fs^3
    double c = 0.0;       // fs^4
    double omega0 = 0.0;  // rad/fs

    bool operator==(const PolynomialPhase&) const = default;
};

struct PhaseMask {
    std::vector<double> phase;  // radians, unwrapped
    std::string grid_tag;

    std::size_t size() const noexcept { return phase.size(); }
};

PhaseMask zero_mask(const SpectralGrid& grid);
PhaseMask eval_polynomial_phase(const PolynomialPhase& poly, const SpectralGrid& grid);
PhaseMask compose_masks(const PhaseMask& a, const PhaseMask& b);
// Wraps into [0, 2pi); only the virtual LCM writer uses this.
PhaseMask wrap_mask(const PhaseMask& m);

struct SpectralField {
    std::vector<double> amplitude;  // sqrt of spectral intensity, per pixel
    PhaseMask phase;
    SpectralGrid grid;
};

// Gaussian amplitude in wavelength whose amplitude FWHM equals fwhm_nm.
std::vector<double> gaussian_amplitude(const SpectralGrid& grid, double fwhm_nm);
SpectralField make_spectral_field(std::vector<double> amplitude, PhaseMask phase,
                                  const SpectralGrid& grid);

// Complex spectrum on a uniform ascending frequency grid, baseband bin k at k*d_omega.
struct UniformSpectrum {
    std::vector<cplx> values;
    double omega_min = 0.0;
    double d_omega = 0.0;
};

UniformSpectrum resample_uniform(const SpectralField& field);

struct TemporalField {
    std::vector<cplx> samples;   // sample n sits at t = (n - N/2) * dt
    double dt = 0.0;             // fs
    double energy_uJ = 0.0;      // integral of |E|^2 dt
    double centroid = 0.0;       // spectral power centroid, baseband rad/fs
    double rms_bandwidth = 0.0;  // spectral power rms width, rad/fs

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t n) const noexcept {
        return (static_cast<double>(n) - static_cast<double>(samples.size() / 2)) * dt;
    }
};

// Unnormalized synthesis: integral |E|^2 dt equals sum |values|^2 d_omega.
TemporalField synthesize_uniform(const UniformSpectrum& spectrum);
TemporalField synthesize_temporal(const SpectralField& field, double pulse_energy_uJ);

std::vector<double> intensity_profile(const TemporalField& field);
double field_energy(const TemporalField& field);
double peak_intensity(const TemporalField& field, double spot_diameter_um);
double tpa_signal(const TemporalField& field);
// (integral I)^2 / integral I^2, in fs.
double effective_duration(const TemporalField& field);
// FWHM of |E|^2 with linear interpolation at the half-maximum crossings.
double intensity_fwhm(const TemporalField& field);

}  // namespace pulselab
