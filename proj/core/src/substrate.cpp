#include "pulselab/substrate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "pulselab/error.hpp"

namespace pulselab {

void validate(const SubstrateSpec& s) {
    auto fail = [&](const char* what) {
        throw Error(Errc::invalid_argument, fmt::format("substrate {}: {}", s.name, what));
    };
    if (s.name.empty()) throw Error(Errc::invalid_argument, "substrate name is empty");
    if (s.family_index < 1 || s.family_index > 9) fail("family_index must lie in 1..9");
    if (!(s.n_diss >= 2.0) || !(s.n_ion > s.n_diss)) fail("orders must satisfy n_ion > n_diss >= 2");
    if (!(s.preferred_stretch_fs > 0.0)) fail("preferred_stretch_fs must be positive");
    if (!(s.stretch_width_short > 0.0) || !(s.stretch_width_long > 0.0))
        fail("stretch widths must be positive");
    if (!(s.coulomb_threshold_TWcm2 > 0.0) || !(s.coulomb_order > 0.0) || !(s.coulomb_gain >= 0.0))
        fail("Coulomb parameters out of range");
    if (!(s.k1 > 0.0) || !(s.k2 > 0.0)) fail("signal scales must be positive");
    if (!(s.s2_threshold_fraction > 0.0)) fail("s2_threshold_fraction must be positive");
    const auto& t = s.charge_state_thresholds;
    if (!(t[0] > 0.0 && t[1] > t[0] && t[2] > t[1])) fail("charge thresholds must increase with q");
    if (!(s.k_ce >= 0.0)) fail("k_ce must be >= 0");
    if (!(s.parent_mass > 0.0 && s.s1_mass > 0.0 && s.s2_mass > 0.0)) fail("masses must be positive");
}

IonSignals ion_signals(const SubstrateSpec& sub, const TemporalField& field, double peak_I,
                       SignalOptions opts) {
    if (!(peak_I >= 0.0)) throw Error(Errc::invalid_argument, "peak intensity must be >= 0");
    const std::size_t n = field.size();
    std::vector<double> inten(n);
    double imax = 0.0, total = 0.0, total_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inten[i] = std::norm(field.samples[i]);
        imax = std::max(imax, inten[i]);
        total += inten[i];
        total_sq += inten[i] * inten[i];
    }
    IonSignals out;
    if (!(imax > 0.0) || !(peak_I > 0.0)) return out;

    const double dt = field.dt;
    const double to_model = peak_I / imax / kIntensityUnit;

    // Stretch resonance: asymmetric Gaussian in log effective duration.
    const double tau_eff = total * total / total_sq * dt;
    const double lt = std::log(tau_eff / sub.preferred_stretch_fs);
    const double ww = lt < 0.0 ? sub.stretch_width_short : sub.stretch_width_long;
    const double g_res = std::exp(-lt * lt / (2.0 * ww * ww));

    const double log_pc = std::log(sub.coulomb_threshold_TWcm2 / kIntensityUnit);
    const double pc_m = std::exp(sub.coulomb_order * log_pc);
    const bool asym = opts.temporal_asymmetry;
    const double s_w = asym ? sub.sequencing_weight : 0.0;
    const bool chirp_term = s_w != 0.0 && field.rms_bandwidth > 0.0;

    double cum = 0.0, mp = 0.0, co = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += inten[i];
        const double p = inten[i] * to_model;
        if (!(p > 0.0)) continue;
        double q = asym ? cum / total : 0.5;
        if (chirp_term) {
            // Instantaneous frequency from the forward phase difference.
            const std::size_t j = i + 1 < n ? i : i - 1;
            const double w = std::arg(field.samples[j + 1] * std::conj(field.samples[j])) / dt;
            const double nu = std::clamp((w - field.centroid) / field.rms_bandwidth, -1.0, 1.0);
            q *= 1.0 - s_w * nu;
        }
        const double lp = std::log(p);
        const double pd = std::exp(sub.n_diss * lp);
        const double pm = std::exp(sub.coulomb_order * lp);
        const double h = pm / (pm + pc_m);
        mp += pd * q;
        co += pd * sub.coulomb_gain * h * q;
        s2 += std::exp(sub.n_ion * lp);
    }
    out.s1 = sub.k1 * g_res * (mp + co) * dt;
    out.s2 = sub.k2 * s2 * dt;
    out.s1_coulomb_fraction = (mp + co) > 0.0 ? co / (mp + co) : 0.0;
    return out;
}

double objective_J(const IonSignals& s, double s2_threshold, ObjectiveMode mode) {
    if (!(s2_threshold > 0.0)) throw Error(Errc::invalid_argument, "s2 threshold must be positive");
    if (mode == ObjectiveMode::ga) return s.s2 < s2_threshold ? 0.0 : s.s1 / s.s2;
    return s.s1 / std::max(s.s2, s2_threshold);
}

double normalized_J(double j, double j_tl) {
    if (!(j_tl > 0.0))
        throw Error(Errc::degenerate_normalization, fmt::format("TL yield {} is not positive", j_tl));
    return j / j_tl;
}

ObjectiveResult evaluate_objective(const IonSignals& s, double s2_threshold, double j_tl,
                                   ObjectiveMode mode) {
    ObjectiveResult r;
    r.thresholded = s.s2 < s2_threshold;
    r.j = objective_J(s, s2_threshold, mode);
    r.j_tilde = normalized_J(r.j, j_tl);
    return r;
}

double flight_time_us(double mass_amu, int charge) {
    if (!(mass_amu > 0.0) || charge < 1) throw Error(Errc::invalid_argument, "bad ion mass or charge");
    return kTofConstant * std::sqrt(mass_amu / charge);
}

IonSpectrum synth_tof_spectrum(const SubstrateSpec& sub, const TemporalField& field, double peak_I) {
    const IonSignals sig = ion_signals(sub, field, peak_I);
    IonSpectrum spec;
    spec.peaks.push_back({sub.parent_label, 1, flight_time_us(sub.parent_mass, 1), 0.2 * sig.s2, 0.0, false});
    spec.peaks.push_back({sub.s2_label, 1, flight_time_us(sub.s2_mass, 1), sig.s2, 0.0, false});
    const double split = sig.s1_coulomb_fraction > 0.0 ? sub.k_ce * std::sqrt(peak_I) : 0.0;
    spec.peaks.push_back({sub.s1_label, 1, flight_time_us(sub.s1_mass, 1), sig.s1, split, true});
    double amp = sig.s1 * sig.s1_coulomb_fraction;
    for (int q = 2; q <= 4; ++q) {
        amp *= 0.3;
        if (peak_I < sub.charge_state_thresholds[static_cast<std::size_t>(q - 2)]) break;
        spec.peaks.push_back({sub.s1_label, q, flight_time_us(sub.s1_mass, q), amp, split, true});
    }
    std::sort(spec.peaks.begin(), spec.peaks.end(),
              [](const IonPeak& a, const IonPeak& b) { return a.flight_time_us < b.flight_time_us; });
    return spec;
}

IntensityDiagnostics intensity_diagnostics(const IonSpectrum& spectrum) {
    if (spectrum.peaks.empty()) throw Error(Errc::empty_input, "spectrum has no peaks");
    IntensityDiagnostics d;
    for (const auto& p : spectrum.peaks) {
        if (p.halogen) d.max_charge = std::max(d.max_charge, p.charge);
        d.max_split_us = std::max(d.max_split_us, p.doublet_split_us);
    }
    return d;
}

std::string spectrum_csv(const IonSpectrum& spectrum) {
    std::string out = "ion,q,flight_time_us,amplitude,doublet_split_us\n";
    for (const auto& p : spectrum.peaks)
        out += fmt::format("{},{},{:.9g},{:.9g},{:.9g}\n", p.ion, p.charge, p.flight_time_us,
                           p.amplitude, p.doublet_split_us);
    return out;
}

}  // namespace pulselab
