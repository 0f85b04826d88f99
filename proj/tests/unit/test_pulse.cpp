#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "pulselab/error.hpp"
#include "pulselab/laser.hpp"
#include "pulselab/pulse.hpp"
#include "pulselab/random.hpp"

using namespace pulselab;

namespace {

SpectralGrid grid_one() { return make_grid(640, 320, 800.0, 0.155); }

TemporalField synth(const SpectralGrid& g, const PhaseMask& m, double fwhm = 57.5, double energy = 375.0) {
    return synthesize_temporal(make_spectral_field(gaussian_amplitude(g, fwhm), m, g), energy);
}

PhaseMask random_polynomial_mask(const SpectralGrid& g, Rng& rng) {
    const PolynomialPhase p{rng.uniform(-2e4, 2e4), rng.uniform(-4e5, 4e5), rng.uniform(-4e6, 4e6),
                            g.omega(160 + static_cast<int>(rng.below(321)))};
    return eval_polynomial_phase(p, g);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Grid, CenterWavelengthsMatchTheTwoShapers) {
    EXPECT_DOUBLE_EQ(grid_one().wavelength(320), 800.0);
    EXPECT_DOUBLE_EQ(make_grid(640, 320, 791.0, 0.179).wavelength(320), 791.0);
}

TEST(Grid, OmegaIsAngularFrequencyOfEachPixel) {
    const auto g = grid_one();
    for (int i : {0, 17, 320, 639}) {
        const double lambda = 800.0 + (i - 320) * 0.155;
        EXPECT_NEAR(g.omega(i), 2.0 * 3.14159265358979323846 * 299.792458 / lambda, 1e-12);
    }
    for (int i = 1; i < 640; ++i) EXPECT_LT(g.omega(i), g.omega(i - 1));
}

TEST(Grid, RejectsNonPhysicalGrids) {
    EXPECT_THROW(make_grid(0, 0, 800.0, 0.155), Error);
    EXPECT_THROW(make_grid(640, 700, 800.0, 0.155), Error);
    EXPECT_THROW(make_grid(640, 320, 800.0, -0.1), Error);
    EXPECT_THROW(make_grid(640, 320, 40.0, 0.155), Error);  // lowest pixel below zero wavelength
}

TEST(Grid, TagEncodesGeometry) {
    EXPECT_EQ(grid_one().tag(), "grid:640:320:800.000000:0.155000");
    EXPECT_FALSE(grid_one() == make_grid(640, 320, 791.0, 0.179));
}

TEST(PolynomialPhase, MatchesPointwiseEvaluation) {
    const auto g = grid_one();
    const PolynomialPhase p{1.2e3, -3.4e4, 5.6e5, g.omega(300)};
    const auto m = eval_polynomial_phase(p, g);
    ASSERT_EQ(m.size(), 640u);
    EXPECT_EQ(m.grid_tag, g.tag());
    for (int i = 0; i < 640; i += 13) {
        const double d = g.omega(i) - g.omega(300);
        const double expect = 1.2e3 * d * d - 3.4e4 * d * d * d + 5.6e5 * d * d * d * d;
        EXPECT_NEAR(m.phase[static_cast<std::size_t>(i)], expect, 1e-12 * std::max(1.0, std::abs(expect)));
    }
    EXPECT_DOUBLE_EQ(m.phase[300], 0.0);
}

TEST(PolynomialPhase, ZeroCoefficientsGiveZeroMask) {
    const auto g = grid_one();
    const auto m = eval_polynomial_phase({0, 0, 0, g.center_omega()}, g);
    EXPECT_TRUE(std::all_of(m.phase.begin(), m.phase.end(), [](double v) { return v == 0.0; }));
}

TEST(PolynomialPhase, NonFiniteCoefficientsThrow) {
    EXPECT_THROW(eval_polynomial_phase({std::nan(""), 0, 0, 2.3}, grid_one()), Error);
}

TEST(MaskAlgebra, ComposeAddsAndChecksGrids) {
    const auto g = grid_one();
    auto a = zero_mask(g), b = zero_mask(g);
    a.phase[5] = 1.0;
    b.phase[5] = 2.5;
    EXPECT_DOUBLE_EQ(compose_masks(a, b).phase[5], 3.5);
    EXPECT_THROW(compose_masks(a, zero_mask(make_grid(640, 320, 791.0, 0.179))), Error);
}

TEST(MaskAlgebra, WrapLandsInHalfOpenTwoPiInterval) {
    auto m = zero_mask(grid_one());
    m.phase[0] = -0.5;
    m.phase[1] = 7.0;
    m.phase[2] = 2.0 * kPi;
    const auto w = wrap_mask(m);
    for (double v : w.phase) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 2.0 * kPi);
    }
    EXPECT_NEAR(w.phase[0], 2.0 * kPi - 0.5, 1e-12);
    EXPECT_NEAR(w.phase[1], 7.0 - 2.0 * kPi, 1e-12);
}

TEST(Amplitude, GaussianHalfMaximumSitsAtHalfBandwidth) {
    const auto g = grid_one();
    const auto amp = gaussian_amplitude(g, 57.5);
    EXPECT_NEAR(*std::max_element(amp.begin(), amp.end()), amp[320], 0.0);
    // 57.5/2 nm from the center is 185.48 pixels: interpolate the amplitude there.
    const double pos = 320.0 + 28.75 / 0.155;
    const auto j = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(j);
    EXPECT_NEAR((amp[j] * (1 - t) + amp[j + 1] * t) / amp[320], 0.5, 1e-3);
}

TEST(Synthesis, ParsevalHoldsForRandomSpectra) {
    Rng rng(stream_key(3, 0, 0));
    for (int trial = 0; trial < 20; ++trial) {
        UniformSpectrum s;
        s.omega_min = 2.0;
        s.d_omega = 2e-4 * (1 + trial);
        for (int i = 0; i < 640; ++i) s.values.emplace_back(rng.normal(), rng.normal());
        double spectral = 0.0;
        for (const auto& v : s.values) spectral += std::norm(v) * s.d_omega;
        EXPECT_LE(rel(field_energy(synthesize_uniform(s)), spectral), 1e-9);
    }
}

TEST(Synthesis, EnergyNormalizationIsExact) {
    const auto g = grid_one();
    Rng rng(stream_key(4, 0, 0));
    for (int i = 0; i < 10; ++i) EXPECT_LE(rel(field_energy(synth(g, random_polynomial_mask(g, rng))), 375.0), 1e-12);
}

TEST(Synthesis, FlatPhaseMaximizesTwoPhotonSignal) {
    const auto g = grid_one();
    const double flat = tpa_signal(synth(g, zero_mask(g)));
    Rng rng(stream_key(5, 0, 0));
    for (int i = 0; i < 100; ++i) EXPECT_LE(tpa_signal(synth(g, random_polynomial_mask(g, rng))), flat * (1 + 1e-12));
}

TEST(Synthesis, ConjugatePhaseTimeReversesIntensity) {
    const auto g = grid_one();
    Rng rng(stream_key(6, 0, 0));
    const auto m = random_polynomial_mask(g, rng);
    auto neg = m;
    for (double& v : neg.phase) v = -v;
    const auto a = intensity_profile(synth(g, m)), b = intensity_profile(synth(g, neg));
    const double peak = *std::max_element(a.begin(), a.end());
    const std::size_t n = a.size();
    for (std::size_t i = 1; i < n; ++i) ASSERT_NEAR(a[i], b[n - i], 1e-9 * peak) << i;
}

TEST(Synthesis, FlatPhaseGivesEvenIntensity) {
    // Real spectrum: E(t) = E*(-t), so |E|^2 is even about t = 0.
    const auto g = grid_one();
    const auto a = intensity_profile(synth(g, zero_mask(g)));
    const double peak = *std::max_element(a.begin(), a.end());
    const std::size_t n = a.size();
    for (std::size_t i = 1; i < n; ++i) ASSERT_NEAR(a[i], a[n - i], 1e-9 * peak);
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), static_cast<long>(n / 2));
}

TEST(Synthesis, ConstantPhaseLeavesIntensityUnchanged) {
    const auto g = grid_one();
    Rng rng(stream_key(7, 0, 0));
    const auto m = random_polynomial_mask(g, rng);
    auto shifted = m;
    for (double& v : shifted.phase) v += 1.234;
    const auto a = intensity_profile(synth(g, m)), b = intensity_profile(synth(g, shifted));
    const double peak = *std::max_element(a.begin(), a.end());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12 * peak);
}

TEST(Synthesis, LinearPhaseDelaysWithoutReshaping) {
    const auto g = grid_one();
    const auto base = synth(g, zero_mask(g));
    const int shift = 25;
    const double tau = shift * base.dt;
    auto lin = zero_mask(g);
    for (int i = 0; i < 640; ++i) lin.phase[static_cast<std::size_t>(i)] = g.omega(i) * tau;
    const auto moved = synth(g, lin);
    const auto a = intensity_profile(base), b = intensity_profile(moved);
    const double peak = *std::max_element(a.begin(), a.end());
    const std::size_t n = a.size();
    // exp(i omega tau) advances the envelope: I_new(t) = I(t + tau).
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(b[i], a[(i + shift) % n], 1e-9 * peak);
    EXPECT_LE(rel(tpa_signal(moved), tpa_signal(base)), 1e-9);
}

TEST(Synthesis, TransformLimitedDurationMatchesDirectSummation) {
    // Oracle: |sum_i A_i w_i exp(i omega_i t)|^2 by direct summation on the pixel grid, no FFT.
    // The untruncated Gaussian bound 2 sqrt(ln 2) / sigma is a floor: the window clips the wings.
    for (const auto& [lambda, dl, fwhm] : {std::tuple{800.0, 0.155, 57.5}, std::tuple{791.0, 0.179, 51.5}}) {
        const auto g = make_grid(640, 320, lambda, dl);
        const auto amp = gaussian_amplitude(g, fwhm);
        const int n = g.pixel_count();
        auto power = [&](double t) {
            std::complex<double> sum{};
            for (int i = 0; i < n; ++i) {
                const double w = std::abs(g.omega(std::min(i + 1, n - 1)) - g.omega(std::max(i - 1, 0))) /
                                 ((i == 0 || i == n - 1) ? 1.0 : 2.0);
                sum += amp[static_cast<std::size_t>(i)] * w * std::polar(1.0, g.omega(i) * t);
            }
            return std::norm(sum);
        };
        const double half = 0.5 * power(0.0);
        double lo = 0.0, hi = 200.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (power(mid) > half ? lo : hi) = mid;
        }
        const double oracle = 2.0 * lo;
        const double measured = intensity_fwhm(synth(g, zero_mask(g), fwhm));
        EXPECT_LE(rel(measured, oracle), 0.02) << lambda;

        const double d_omega = 2 * kPi * kSpeedOfLight * fwhm / (lambda * lambda);
        const double sigma = d_omega / (2 * std::sqrt(2 * std::log(2.0)));
        EXPECT_GT(measured, 2 * std::sqrt(std::log(2.0)) / sigma) << lambda;
    }
}

TEST(Synthesis, ChirpStretchesThePulse) {
    const auto g = grid_one();
    const double tl = effective_duration(synth(g, zero_mask(g)));
    double prev = tl;
    for (double a : {2e3, 5e3, 1e4, 2e4}) {
        const double d = effective_duration(synth(g, eval_polynomial_phase({a, 0, 0, g.center_omega()}, g)));
        EXPECT_GT(d, prev);
        prev = d;
    }
    // Far-field chirp: duration grows ~ 2A * d_omega_rms, so doubling A roughly doubles it.
    const double d1 = effective_duration(synth(g, eval_polynomial_phase({1e4, 0, 0, g.center_omega()}, g)));
    const double d2 = effective_duration(synth(g, eval_polynomial_phase({2e4, 0, 0, g.center_omega()}, g)));
    EXPECT_NEAR(d2 / d1, 2.0, 0.1);
}

TEST(Synthesis, PeakIntensityUsesSpotDiameter) {
    const auto g = grid_one();
    const auto f = synth(g, zero_mask(g));
    const auto inten = intensity_profile(f);
    const double imax = *std::max_element(inten.begin(), inten.end());
    const double r_cm = 20e-4;
    const double expect = imax * 1e-6 / 1e-15 / (kPi * r_cm * r_cm) / 1e12;  // uJ/fs -> W, then TW/cm^2
    EXPECT_LE(rel(peak_intensity(f, 40.0), expect), 1e-12);
}

TEST(Synthesis, DefaultPeakIntensitiesFallInTheReportedBands) {
    // Undo the residual by hand so no calibration is involved.
    auto flat_total = [](const LaserSystem& sys) {
        auto m = sys.residual_phase();
        for (double& v : m.phase) v = -v;
        return shape_pulse(sys, m, ShapeMode::bypass_reference);
    };
    const double one = peak_intensity(flat_total(make_laser_system(system_one_spec())), 40.0);
    const double two = peak_intensity(flat_total(make_laser_system(system_two_spec())), 45.0);
    EXPECT_GE(one, 930.0);
    EXPECT_LE(one, 1270.0);
    EXPECT_GE(two, 670.0);
    EXPECT_LE(two, 960.0);
}
