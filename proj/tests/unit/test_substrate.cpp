#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pulselab/error.hpp"
#include "pulselab/laser.hpp"
#include "pulselab/random.hpp"
#include "pulselab/registry.hpp"
#include "pulselab/substrate.hpp"

using namespace pulselab;

namespace {

const SpectralGrid& grid() {
    static const SpectralGrid g = make_grid(640, 320, 800.0, 0.155);
    return g;
}

TemporalField field_for(const PhaseMask& m) {
    return synthesize_temporal(make_spectral_field(gaussian_amplitude(grid(), 57.5), m, grid()), 375.0);
}

PhaseMask chirp(double a, double b, double c = 0.0) {
    return eval_polynomial_phase({a, b, c, grid().center_omega()}, grid());
}

SubstrateSpec bromochloromethane() { return default_registry().find("CH2BrCl"); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int max_charge_at(const SubstrateSpec& s, double peak) {
    return intensity_diagnostics(synth_tof_spectrum(s, field_for(zero_mask(grid())), peak)).max_charge;
}

}  // namespace

TEST(Objective, PlainRatioAboveThreshold) {
    EXPECT_DOUBLE_EQ(objective_J({3.0, 1.0, 0.0}, 0.1, ObjectiveMode::ga), 3.0);
    EXPECT_DOUBLE_EQ(objective_J({3.0, 1.0, 0.0}, 0.1, ObjectiveMode::report), 3.0);
}

TEST(Objective, GaModeZeroesSubThresholdYields) {
    EXPECT_EQ(objective_J({3.0, 0.05, 0.0}, 0.1, ObjectiveMode::ga), 0.0);
}

TEST(Objective, ReportModeFloorsS2AtTheThreshold) {
    EXPECT_DOUBLE_EQ(objective_J({3.0, 0.05, 0.0}, 0.1, ObjectiveMode::report), 30.0);
}

TEST(Objective, ThresholdRuleIsExactAtTheBoundary) {
    const double thr = 0.25;
    EXPECT_DOUBLE_EQ(objective_J({1.0, thr, 0.0}, thr, ObjectiveMode::ga), 4.0);
    EXPECT_EQ(objective_J({1.0, std::nextafter(thr, 0.0), 0.0}, thr, ObjectiveMode::ga), 0.0);
    Rng rng(stream_key(21, 0, 0));
    for (int i = 0; i < 1000; ++i) {
        const IonSignals s{rng.uniform(1e-6, 5.0), rng.uniform(0.0, 1.0), 0.0};
        const double ga = objective_J(s, 0.5, ObjectiveMode::ga);
        EXPECT_EQ(ga == 0.0, s.s2 < 0.5);
        EXPECT_GT(objective_J(s, 0.5, ObjectiveMode::report), 0.0);
    }
}

TEST(Objective, ThresholdMustBePositive) {
    EXPECT_THROW(objective_J({1, 1, 0}, 0.0, ObjectiveMode::ga), Error);
}

TEST(Objective, EvaluateFlagsThresholdedCells) {
    const auto below = evaluate_objective({3.0, 0.05, 0.0}, 0.1, 2.0, ObjectiveMode::report);
    EXPECT_TRUE(below.thresholded);
    EXPECT_DOUBLE_EQ(below.j, 30.0);
    EXPECT_DOUBLE_EQ(below.j_tilde, 15.0);
    const auto above = evaluate_objective({3.0, 1.0, 0.0}, 0.1, 2.0, ObjectiveMode::ga);
    EXPECT_FALSE(above.thresholded);
    EXPECT_DOUBLE_EQ(above.j_tilde, 1.5);
}

TEST(Normalization, TlYieldMapsToOne) {
    EXPECT_DOUBLE_EQ(normalized_J(0.15, 0.15), 1.0);
    EXPECT_EQ(normalized_J(0.0, 0.3), 0.0);
    EXPECT_THROW(normalized_J(1.0, 0.0), Error);
    Rng rng(stream_key(22, 0, 0));
    for (int i = 0; i < 100; ++i) {
        const double j = rng.uniform(0, 10), tl = rng.uniform(1e-3, 5);
        EXPECT_LE(rel(normalized_J(j, tl) * tl, j), 1e-12);
    }
}

TEST(IonSignals, ZeroFieldGivesNoIons) {
    TemporalField f = field_for(zero_mask(grid()));
    for (auto& v : f.samples) v = 0.0;
    const auto s = ion_signals(bromochloromethane(), f, 0.0);
    EXPECT_EQ(s.s1, 0.0);
    EXPECT_EQ(s.s2, 0.0);
    const auto s2 = ion_signals(bromochloromethane(), field_for(zero_mask(grid())), 0.0);
    EXPECT_EQ(s2.s1, 0.0);
    EXPECT_EQ(s2.s2, 0.0);
}

TEST(IonSignals, NegativeIntensityIsRejected) {
    EXPECT_THROW(ion_signals(bromochloromethane(), field_for(zero_mask(grid())), -1.0), Error);
}

TEST(IonSignals, TimeReversalIsInvisibleWithoutTheAsymmetryFactor) {
    const SignalOptions off{false};
    for (const auto& [a, b] : {std::pair{4e3, 6e4}, std::pair{-7e3, 2e5}, std::pair{1e4, -1e5}}) {
        const auto m = chirp(a, b, 3e5);
        auto neg = m;
        for (double& v : neg.phase) v = -v;
        const auto fa = field_for(m), fb = field_for(neg);
        const auto sa = ion_signals(bromochloromethane(), fa, 600.0, off);
        const auto sb = ion_signals(bromochloromethane(), fb, 600.0, off);
        EXPECT_LE(rel(sb.s1, sa.s1), 1e-9);
        EXPECT_LE(rel(sb.s2, sa.s2), 1e-9);
        // With the factor on, the two time orders differ.
        const auto ta = ion_signals(bromochloromethane(), fa, 600.0);
        const auto tb = ion_signals(bromochloromethane(), fb, 600.0);
        EXPECT_GT(rel(tb.s1, ta.s1), 1e-6);
    }
}

TEST(IonSignals, ConstantPhaseOffsetChangesNothing) {
    const auto m = chirp(5e3, 7e4, 1e5);
    auto off = m;
    for (double& v : off.phase) v += 2.5;
    const auto a = ion_signals(bromochloromethane(), field_for(m), 800.0);
    const auto b = ion_signals(bromochloromethane(), field_for(off), 800.0);
    EXPECT_LE(rel(b.s1, a.s1), 1e-9);
    EXPECT_LE(rel(b.s2, a.s2), 1e-9);
}

TEST(IonSignals, SignalsStayInRange) {
    Rng rng(stream_key(23, 0, 0));
    const Registry family = default_registry();
    for (const auto& sub : family.entries()) {
        const auto s = ion_signals(sub, field_for(chirp(rng.uniform(-2e4, 2e4), rng.uniform(-4e5, 4e5))),
                                   rng.uniform(10.0, 1500.0));
        EXPECT_GE(s.s1, 0.0);
        EXPECT_GE(s.s2, 0.0);
        EXPECT_GE(s.s1_coulomb_fraction, 0.0);
        EXPECT_LE(s.s1_coulomb_fraction, 1.0);
    }
}

TEST(IonSignals, S2ScalesWithTheIonizationOrder) {
    const auto f = field_for(zero_mask(grid()));
    const auto a = ion_signals(bromochloromethane(), f, 300.0), b = ion_signals(bromochloromethane(), f, 600.0);
    EXPECT_LE(rel(b.s2 / a.s2, std::pow(2.0, bromochloromethane().n_ion)), 1e-9);
}

TEST(IonSignals, TransformLimitedPulseFavorsTheMethylHalideIon) {
    // Same pulse energy: a chirped pulse has a lower peak in proportion to its max |E|^2.
    const auto sub = bromochloromethane();
    const auto tl = field_for(zero_mask(grid())), st = field_for(chirp(6e3, 9e4));
    auto peak_of = [](const TemporalField& f) {
        const auto i = intensity_profile(f);
        return *std::max_element(i.begin(), i.end());
    };
    const double p_tl = 1000.0, p_st = p_tl * peak_of(st) / peak_of(tl);
    const auto a = ion_signals(sub, tl, p_tl), b = ion_signals(sub, st, p_st);
    EXPECT_GT(b.s1 / b.s2, 3.0 * a.s1 / a.s2);
}

TEST(Spectrum, FlightTimesFollowTheSquareRootLaw) {
    EXPECT_DOUBLE_EQ(flight_time_us(35.0, 1), kTofConstant * std::sqrt(35.0));
    EXPECT_DOUBLE_EQ(flight_time_us(35.0, 4), kTofConstant * std::sqrt(35.0 / 4.0));
    EXPECT_THROW(flight_time_us(35.0, 0), Error);
    const auto spec = synth_tof_spectrum(bromochloromethane(), field_for(zero_mask(grid())), 1000.0);
    for (const auto& p : spec.peaks) {
        EXPECT_GE(p.doublet_split_us, 0.0);
        EXPECT_GT(p.flight_time_us, 0.0);
    }
    for (std::size_t i = 1; i < spec.peaks.size(); ++i)
        EXPECT_LE(spec.peaks[i - 1].flight_time_us, spec.peaks[i].flight_time_us);
}

TEST(Spectrum, ChlorineFourPlusAppearsOnlyAtFullIntensity) {
    const auto sub = bromochloromethane();
    EXPECT_EQ(max_charge_at(sub, 1118.0), 4);
    EXPECT_EQ(max_charge_at(sub, 0.5 * 1118.0), 3);
}

TEST(Spectrum, ChargeStatesFollowTheirThresholds) {
    const auto sub = bromochloromethane();
    const auto& t = sub.charge_state_thresholds;
    EXPECT_EQ(max_charge_at(sub, std::nextafter(t[0], 0.0)), 1);
    EXPECT_EQ(max_charge_at(sub, t[0]), 2);
    EXPECT_EQ(max_charge_at(sub, t[1]), 3);
    EXPECT_EQ(max_charge_at(sub, t[2]), 4);
}

TEST(Spectrum, DoubletSplitFollowsSquareRootOfIntensity) {
    const auto sub = bromochloromethane();
    const auto f = field_for(zero_mask(grid()));
    const double a = intensity_diagnostics(synth_tof_spectrum(sub, f, 200.0)).max_split_us;
    const double b = intensity_diagnostics(synth_tof_spectrum(sub, f, 800.0)).max_split_us;
    ASSERT_GT(a, 0.0);
    EXPECT_LE(rel(b, 2.0 * a), 1e-12);
    EXPECT_LE(rel(a, sub.k_ce * std::sqrt(200.0)), 1e-12);
}

TEST(Spectrum, DiagnosticsAreMonotoneInIntensity) {
    const auto f = field_for(zero_mask(grid()));
    const Registry family = default_registry();
    for (const auto& sub : family.entries()) {
        IntensityDiagnostics prev{0, 0.0};
        for (double peak = 25.0; peak <= 2000.0; peak *= 1.3) {
            const auto d = intensity_diagnostics(synth_tof_spectrum(sub, f, peak));
            EXPECT_GE(d.max_charge, prev.max_charge) << sub.name << " " << peak;
            EXPECT_GE(d.max_split_us, prev.max_split_us) << sub.name << " " << peak;
            prev = d;
        }
    }
}

TEST(Spectrum, SinglePeakHasNoSplit) {
    IonSpectrum s;
    s.peaks.push_back({"Cl", 1, 5.3, 1.0, 0.0, true});
    EXPECT_EQ(intensity_diagnostics(s).max_split_us, 0.0);
    EXPECT_EQ(intensity_diagnostics(s).max_charge, 1);
    EXPECT_THROW(intensity_diagnostics(IonSpectrum{}), Error);
}

TEST(Spectrum, CsvHasOneRowPerPeak) {
    const auto spec = synth_tof_spectrum(bromochloromethane(), field_for(zero_mask(grid())), 1000.0);
    const auto csv = spectrum_csv(spec);
    EXPECT_EQ(csv.rfind("ion,q,flight_time_us,amplitude,doublet_split_us\n", 0), 0u);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), spec.peaks.size() + 1);
}

TEST(SubstrateSpec, ValidationEnforcesOrdersAndThresholds) {
    auto s = bromochloromethane();
    s.n_ion = 2.5;
    s.n_diss = 3.0;
    EXPECT_THROW(validate(s), Error);
    s = bromochloromethane();
    s.charge_state_thresholds = {300, 200, 700};
    EXPECT_THROW(validate(s), Error);
    s = bromochloromethane();
    s.family_index = 10;
    EXPECT_THROW(validate(s), Error);
}
