#pragma once

// Landscape scans, reagent transfer studies and the reagent x substrate matrix.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pulselab/ga.hpp"
#include "pulselab/laser.hpp"
#include "pulselab/registry.hpp"
#include "pulselab/substrate.hpp"

namespace pulselab {

// A calibrated system paired with one substrate; caches the TL baseline.
class Assay {
public:
    Assay(std::shared_ptr<const LaserSystem> system, SubstrateSpec substrate);

    const LaserSystem& system() const noexcept { return *system_; }
    const std::shared_ptr<const LaserSystem>& system_ptr() const noexcept { return system_; }
    const SubstrateSpec& substrate() const noexcept { return substrate_; }
    const IonSignals& tl_signals() const noexcept { return tl_; }
    double s2_threshold() const noexcept { return threshold_; }
    double j_tl() const noexcept { return j_tl_; }

    IonSignals signals(const PhaseMask& mask) const;
    ObjectiveResult objective(const PhaseMask& mask, ObjectiveMode mode) const;

private:
    std::shared_ptr<const LaserSystem> system_;
    SubstrateSpec substrate_;
    IonSignals tl_;
    double threshold_ = 0.0;
    double j_tl_ = 0.0;
};

// GA on J (ga mode) for one assay.
OptimizationTrace optimize_reagent(const Assay& assay, const GAConfig& cfg);

struct LandscapeResult {
    std::vector<double> a_values;              // fs^2
    std::vector<double> b_values;              // fs^3
    std::vector<std::vector<double>> j_grid;   // [a][b]
    std::string system;
    std::string substrate;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

std::vector<double> linspace(const Range& r, int n);

// J (report mode) with C = 0 and omega0 at the center pixel.
LandscapeResult scan_landscape(const Assay& assay, const Range& a_range, const Range& b_range,
                               int n_a, int n_b, unsigned workers = 0);

struct LandscapeMaximum {
    double a = 0.0;
    double b = 0.0;
    double j = 0.0;
    std::size_t cells = 0;
};

struct LandscapeFeatures {
    bool origin_is_near_min = false;
    double origin_percentile = 0.0;  // fraction of cells strictly below J(0,0)
    std::vector<LandscapeMaximum> maxima;
    int quadrant_a = 0;  // sign of A at the global argmax
    int quadrant_b = 0;
    double asymmetry_score = 0.0;
    double j_max = 0.0;
};

LandscapeFeatures landscape_features(const LandscapeResult& result, double level = 0.9);
std::string landscape_csv(const LandscapeResult& result);

struct ReagentOutcome {
    std::string label;
    std::string source_system;
    double mean_j_tilde = 0.0;
    double std_j_tilde = 0.0;
    double efficacy = 0.0;
};

struct TransferReport {
    std::vector<ReagentOutcome> transferred;
    std::vector<ReagentOutcome> native;
    double tl_baseline = 1.0;
    double best_native = 0.0;
};

// Noise hook: multiplicative perturbation of J for repeat r; identity by default.
using NoiseHook = std::function<double(double j_tilde, std::size_t reagent, int repeat)>;

TransferReport transfer_efficacy(const std::vector<PhaseMask>& reagents_src,
                                 const std::vector<PhaseMask>& reagents_native,
                                 const LaserSystem& source, const Assay& target,
                                 const TransferPolicy& policy, int repeats,
                                 const NoiseHook& noise = {});

struct ShiftOutcome {
    double j_tilde_copy = 0.0;
    double j_tilde_shifted = 0.0;
    double gain = 0.0;  // shifted / copy - 1
};

struct ShiftReport {
    int shift_pixels = 0;
    std::vector<ShiftOutcome> reagents;
    double max_gain = 0.0;
};

// Default copy vs. an alternative policy (shift by compute_pixel_shift unless given).
ShiftReport shift_study(const std::vector<PhaseMask>& reagents, const LaserSystem& source,
                        const Assay& target, const TransferPolicy* alternative = nullptr);

struct TransferMatrix {
    std::vector<std::string> labels;               // family order
    std::vector<std::vector<double>> j_tilde;      // [reagent][substrate]
    std::vector<std::vector<bool>> thresholded;
    std::string system;
};

// Bank masks must be on the system's grid (transfer them first).
TransferMatrix family_matrix(const std::vector<Assay>& assays,
                             const std::map<std::string, PhaseMask>& reagent_bank,
                             ObjectiveMode mode, unsigned workers = 0);
std::string matrix_csv(const TransferMatrix& m);

struct TrendReport {
    double spearman_rho = 0.0;
    std::vector<double> row_fractions;
    double min_row_fraction = 0.0;
    bool trend_i_pass = false;
    bool trend_ii_pass = false;
    std::vector<int> anomaly_reagents;  // rows whose excluded-column cell beat that column's diagonal
};

inline constexpr double kSpearmanBar = 0.8;
inline constexpr double kRowFractionBar = 0.75;

// excluded_column >= 0: steps touching that column's anomaly cells are skipped.
TrendReport trend_checks(const TransferMatrix& m, int excluded_column = -1);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pulselab
