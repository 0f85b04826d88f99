#pragma once

// Calibrated fragmentation surrogate: S1 / S2 ion signals, ratio objectives and
// synthetic time-of-flight spectra.

#include <array>
#include <string>
#include <vector>

#include "pulselab/pulse.hpp"

namespace pulselab {

struct SubstrateSpec {
    std::string name;
    int family_index = 0;  // 1..9
    std::string s1_label;      // ion labels without charge suffix
    std::string s2_label;
    std::string parent_label;

    double n_ion = 6.0;   // S2 multiphoton order
    double n_diss = 3.0;  // S1 order
    double sequencing_weight = 0.01;
    double preferred_stretch_fs = 2000.0;
    double stretch_width_short = 1.5;  // log-width below the preferred stretch
    double stretch_width_long = 6.0;   // log-width above it
    double coulomb_threshold_TWcm2 = 2000.0;
    double coulomb_order = 3.5;
    double coulomb_gain = 1.0e13;
    double k1 = 1.0;
    double k2 = 1.0;
    // S2 threshold as a fraction of the TL S2 on the evaluating system.
    double s2_threshold_fraction = 1.0e-12;

    std::array<double, 3> charge_state_thresholds{150.0, 300.0, 700.0};  // q = 2, 3, 4
    double k_ce = 0.004;  // us per sqrt(TW/cm^2)

    double parent_mass = 0.0;
    double s1_mass = 0.0;
    double s2_mass = 0.0;
};

void validate(const SubstrateSpec& s);

struct IonSignals {
    double s1 = 0.0;
    double s2 = 0.0;
    double s1_coulomb_fraction = 0.0;
};

struct SignalOptions {
    // false: Q(t) = 1/2 and no sequencing term, so S1 depends on |E(t)|^2 only up to time order.
    bool temporal_asymmetry = true;
};

inline constexpr double kIntensityUnit = 1000.0;  // TW/cm^2 per model intensity unit

IonSignals ion_signals(const SubstrateSpec& substrate, const TemporalField& field, double peak_I,
                       SignalOptions opts = {});

enum class ObjectiveMode { ga, report };

double objective_J(const IonSignals& s, double s2_threshold, ObjectiveMode mode);
double normalized_J(double j, double j_tl);

struct ObjectiveResult {
    double j = 0.0;
    double j_tilde = 0.0;
    bool thresholded = false;
};

ObjectiveResult evaluate_objective(const IonSignals& s, double s2_threshold, double j_tl,
                                   ObjectiveMode mode);

struct IonPeak {
    std::string ion;
    int charge = 1;
    double flight_time_us = 0.0;
    double amplitude = 0.0;
    double doublet_split_us = 0.0;
    bool halogen = false;
};

struct IonSpectrum {
    std::vector<IonPeak> peaks;
};

inline constexpr double kTofConstant = 0.9;  // us per sqrt(amu / e)

double flight_time_us(double mass_amu, int charge);
IonSpectrum synth_tof_spectrum(const SubstrateSpec& substrate, const TemporalField& field,
                               double peak_I);

struct IntensityDiagnostics {
    int max_charge = 0;
    double max_split_us = 0.0;
};

IntensityDiagnostics intensity_diagnostics(const IonSpectrum& spectrum);
std::string spectrum_csv(const IonSpectrum& spectrum);

}  // namespace pulselab
