#include "pulselab/pulse.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "pulselab/error.hpp"

namespace pulselab {

SpectralGrid make_grid(int pixel_count, int center_pixel, double center_wavelength_nm,
                       double nm_per_pixel) {
    if (pixel_count < 2) throw Error(Errc::invalid_grid, "pixel_count must be >= 2");
    if (!(nm_per_pixel > 0.0) || !std::isfinite(nm_per_pixel))
        throw Error(Errc::invalid_grid, "nm_per_pixel must be positive");
    if (!(center_wavelength_nm > 0.0) || !std::isfinite(center_wavelength_nm))
        throw Error(Errc::invalid_grid, "center_wavelength_nm must be positive");
    if (center_pixel < 0 || center_pixel >= pixel_count)
        throw Error(Errc::invalid_grid, "center_pixel outside the pixel range");
    const double lowest = center_wavelength_nm - center_pixel * nm_per_pixel;
    if (!(lowest > 0.0)) throw Error(Errc::invalid_grid, "wavelength crosses zero on the grid");

    SpectralGrid g;
    g.pixel_count_ = pixel_count;
    g.center_pixel_ = center_pixel;
    g.center_wavelength_nm_ = center_wavelength_nm;
    g.nm_per_pixel_ = nm_per_pixel;
    g.tag_ = fmt::format("grid:{}:{}:{:.6f}:{:.6f}", pixel_count, center_pixel,
                         center_wavelength_nm, nm_per_pixel);
    g.omega_.resize(static_cast<std::size_t>(pixel_count));
    for (int i = 0; i < pixel_count; ++i)
        g.omega_[static_cast<std::size_t>(i)] = 2.0 * kPi * kSpeedOfLight / g.wavelength(i);
    return g;
}

PhaseMask zero_mask(const SpectralGrid& grid) {
    return PhaseMask{std::vector<double>(static_cast<std::size_t>(grid.pixel_count()), 0.0),
                     grid.tag()};
}

PhaseMask eval_polynomial_phase(const PolynomialPhase& p, const SpectralGrid& grid) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) ||
        !std::isfinite(p.omega0))
        throw Error(Errc::invalid_argument, "polynomial phase has non-finite coefficients");
    PhaseMask m = zero_mask(grid);
    for (int i = 0; i < grid.pixel_count(); ++i) {
        const double d = grid.omega(i) - p.omega0;
        const double d2 = d * d;
        m.phase[static_cast<std::size_t>(i)] = p.a * d2 + p.b * d2 * d + p.c * d2 * d2;
    }
    return m;
}

PhaseMask compose_masks(const PhaseMask& a, const PhaseMask& b) {
    if (a.grid_tag != b.grid_tag || a.size() != b.size())
        throw Error(Errc::incompatible_mask,
                    fmt::format("cannot compose '{}' with '{}'", a.grid_tag, b.grid_tag));
    PhaseMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.phase[i] += b.phase[i];
    return out;
}

PhaseMask wrap_mask(const PhaseMask& m) {
    PhaseMask out = m;
    for (double& v : out.phase) {
        v = std::fmod(v, 2.0 * kPi);
        if (v < 0.0) v += 2.0 * kPi;
    }
    return out;
}

std::vector<double> gaussian_amplitude(const SpectralGrid& grid, double fwhm_nm) {
    if (!(fwhm_nm > 0.0)) throw Error(Errc::invalid_argument, "bandwidth must be positive");
    std::vector<double> amp(static_cast<std::size_t>(grid.pixel_count()));
    const double k = 4.0 * std::log(2.0) / (fwhm_nm * fwhm_nm);
    for (int i = 0; i < grid.pixel_count(); ++i) {
        const double d = grid.wavelength(i) - grid.center_wavelength_nm();
        amp[static_cast<std::size_t>(i)] = std::exp(-k * d * d);
    }
    return amp;
}

SpectralField make_spectral_field(std::vector<double> amplitude, PhaseMask phase,
                                  const SpectralGrid& grid) {
    const auto n = static_cast<std::size_t>(grid.pixel_count());
    if (amplitude.size() != n || phase.size() != n)
        throw Error(Errc::incompatible_mask, "amplitude/phase length differs from grid");
    if (phase.grid_tag != grid.tag())
        throw Error(Errc::incompatible_mask, "phase mask sampled on a different grid");
    bool any = false;
    for (double a : amplitude) {
        if (!(a >= 0.0) || !std::isfinite(a))
            throw Error(Errc::invalid_argument, "amplitude must be finite and non-negative");
        any = any || a > 0.0;
    }
    if (!any) throw Error(Errc::degenerate_spectrum, "amplitude is identically zero");
    return SpectralField{std::move(amplitude), std::move(phase), grid};
}

UniformSpectrum resample_uniform(const SpectralField& field) {
    const int n = field.grid.pixel_count();
    const auto un = static_cast<std::size_t>(n);
    // Ascending-frequency view of the pixel arrays (pixel frequency decreases with index).
    std::vector<double> w(un), amp(un), ph(un);
    for (std::size_t i = 0; i < un; ++i) {
        const std::size_t src = un - 1 - i;
        w[i] = field.grid.omegas()[src];
        amp[i] = field.amplitude[src];
        ph[i] = field.phase.phase[src];
    }
    UniformSpectrum out;
    out.omega_min = w.front();
    out.d_omega = (w.back() - w.front()) / static_cast<double>(n - 1);
    out.values.resize(un);
    std::size_t j = 0;
    for (std::size_t k = 0; k < un; ++k) {
        const double wu = out.omega_min + static_cast<double>(k) * out.d_omega;
        while (j + 2 < un && w[j + 1] <= wu) ++j;
        const double t = (wu - w[j]) / (w[j + 1] - w[j]);
        const double a = amp[j] * (1.0 - t) + amp[j + 1] * t;
        const double p = ph[j] * (1.0 - t) + ph[j + 1] * t;
        out.values[k] = std::polar(a, p);
    }
    return out;
}

namespace {

std::size_t transform_size(std::size_t bins) {
    std::size_t n = kTransformSize;
    while (n < 4 * bins) n *= 2;
    return n;
}

}  // namespace

TemporalField synthesize_uniform(const UniformSpectrum& spec) {
    if (spec.values.empty() || !(spec.d_omega > 0.0))
        throw Error(Errc::degenerate_spectrum, "empty uniform spectrum");
    const std::size_t bins = spec.values.size();
    const std::size_t n = transform_size(bins);

    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double pw = std::norm(spec.values[k]);
        const double wk = static_cast<double>(k) * spec.d_omega;
        p0 += pw;
        p1 += pw * wk;
        p2 += pw * wk * wk;
    }
    if (!(p0 > 0.0)) throw Error(Errc::degenerate_spectrum, "spectrum carries no power");

    std::vector<cplx> buf(n, cplx{});
    std::copy(spec.values.begin(), spec.values.end(), buf.begin());
    detail::inverse_dft(buf);

    TemporalField out;
    out.dt = 2.0 * kPi / (static_cast<double>(n) * spec.d_omega);
    out.samples.resize(n);
    const double scale = spec.d_omega / std::sqrt(2.0 * kPi);
    for (std::size_t i = 0; i < n; ++i) out.samples[(i + n / 2) % n] = buf[i] * scale;
    out.energy_uJ = field_energy(out);
    out.centroid = p1 / p0;
    out.rms_bandwidth = std::sqrt(std::max(0.0, p2 / p0 - out.centroid * out.centroid));
    return out;
}

TemporalField synthesize_temporal(const SpectralField& field, double pulse_energy_uJ) {
    if (!(pulse_energy_uJ > 0.0) || !std::isfinite(pulse_energy_uJ))
        throw Error(Errc::invalid_argument, "pulse energy must be positive");
    TemporalField out = synthesize_uniform(resample_uniform(field));
    if (!(out.energy_uJ > 0.0))
        throw Error(Errc::degenerate_spectrum, "synthesized field carries no energy");
    const double s = std::sqrt(pulse_energy_uJ / out.energy_uJ);
    for (auto& v : out.samples) v *= s;
    out.energy_uJ = pulse_energy_uJ;
    return out;
}

std::vector<double> intensity_profile(const TemporalField& field) {
    std::vector<double> out(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = std::norm(field.samples[i]);
    return out;
}

double field_energy(const TemporalField& field) {
    double s = 0.0;
    for (const auto& v : field.samples) s += std::norm(v);
    return s * field.dt;
}

double peak_intensity(const TemporalField& field, double spot_diameter_um) {
    if (!(spot_diameter_um > 0.0)) throw Error(Errc::invalid_argument, "spot size must be positive");
    double peak = 0.0;  // uJ/fs
    for (const auto& v : field.samples) peak = std::max(peak, std::norm(v));
    const double radius_cm = 0.5 * spot_diameter_um * 1e-4;
    const double area_cm2 = kPi * radius_cm * radius_cm;
    return peak * 1e9 / area_cm2 / 1e12;  // uJ/fs -> W, W/cm^2 -> TW/cm^2
}

double tpa_signal(const TemporalField& field) {
    double s = 0.0;
    for (const auto& v : field.samples) {
        const double i = std::norm(v);
        s += i * i;
    }
    return s * field.dt;
}

double effective_duration(const TemporalField& field) {
    double s1 = 0.0, s2 = 0.0;
    for (const auto& v : field.samples) {
        const double i = std::norm(v);
        s1 += i;
        s2 += i * i;
    }
    if (!(s2 > 0.0)) return 0.0;
    return s1 * s1 / s2 * field.dt;
}

double intensity_fwhm(const TemporalField& field) {
    const auto inten = intensity_profile(field);
    if (inten.empty()) return 0.0;
    const auto peak_it = std::max_element(inten.begin(), inten.end());
    const double half = 0.5 * *peak_it;
    if (!(half > 0.0)) return 0.0;
    const auto ip = static_cast<std::size_t>(peak_it - inten.begin());
    std::size_t l = ip, r = ip;
    while (l > 0 && inten[l - 1] >= half) --l;
    while (r + 1 < inten.size() && inten[r + 1] >= half) ++r;
    double left = static_cast<double>(l);
    double right = static_cast<double>(r);
    if (l > 0) left -= (inten[l] - half) / (inten[l] - inten[l - 1]);
    if (r + 1 < inten.size()) right += (inten[r] - half) / (inten[r] - inten[r + 1]);
    return (right - left) * field.dt;
}

}  // namespace pulselab
