// Regenerates the frozen substrate registry.
//
// The nine substrates share one surrogate form. Preferred stretches follow a
// geometric chain in family index anchored at CH2BrCl; CHBr3 sits on the chain
// at a separate index and carries its own S2 threshold fraction. Short-side
// widths start from a power law and are then bisected so that GA-optimized
// gains on System I grow by a small constant factor per family step, which
// keeps neighbouring reagents from out-yielding a substrate's own. Signal
// scales k1 are fixed last: the TL yield of CH2BrCl on System II hits its
// target and TL yields on System I grow by a constant factor per step.
//
// Usage: calibrate_registry [--report] [--frozen] [--config PATH] [chain options]

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <iostream>

#include "pulselab/config.hpp"
#include "pulselab/lab.hpp"

using namespace pulselab;

namespace {

struct Chain {
    double anchor_stretch_fs = 2000.0;
    int anchor_index = 7;
    double stretch_ratio = 1.8;
    double anchor_width = 1.72;
    double width_power = 0.85;
    double width_slope = -0.008;
    double tl_duration_fs = 37.0;
    double chbr3_index = 8.0;
    double chbr3_threshold = 5.0e-5;
    double threshold = 1.0e-12;
    double tl_target_two = 0.15;  // CH2BrCl TL yield on System II
    double tl_step = 1.25;        // TL yield ratio between neighbours on System I
    double coulomb_order = 3.5;
    double coulomb_threshold = 2000.0;
    double coulomb_gain = 1.0e13;
    double long_width = 6.0;
    double sequencing = 0.01;
    bool fit_widths = true;
    double gain_step = 1.02;  // System I optimized-gain ratio between neighbours
};

double stretch_at(const Chain& c, double j) {
    return c.anchor_stretch_fs * std::pow(c.stretch_ratio, j - c.anchor_index);
}

double width_at(const Chain& c, double j) {
    const double tp = stretch_at(c, j);
    const double rel = std::log(tp / c.tl_duration_fs) / std::log(c.anchor_stretch_fs / c.tl_duration_fs);
    return c.anchor_width * std::pow(rel, c.width_power) * (1.0 + c.width_slope * (j - c.anchor_index));
}

Registry chain_registry(const Registry& base, const Chain& c) {
    std::vector<SubstrateSpec> out;
    for (SubstrateSpec s : base.entries()) {
        const bool chbr3 = s.name == "CHBr3";
        const double j = chbr3 ? c.chbr3_index : s.family_index;
        s.preferred_stretch_fs = stretch_at(c, j);
        s.stretch_width_short = width_at(c, j);
        s.s2_threshold_fraction = chbr3 ? c.chbr3_threshold : c.threshold;
        s.k1 = 1.0;
        s.coulomb_order = c.coulomb_order;
        s.coulomb_threshold_TWcm2 = c.coulomb_threshold;
        s.coulomb_gain = c.coulomb_gain;
        s.stretch_width_long = c.long_width;
        s.sequencing_weight = c.sequencing;
        out.push_back(s);
    }
    return Registry(out);
}

// Optimized-over-TL gain of `s` on System I with the bank seed for its family.
double bank_gain(const Lab& lab, const SubstrateSpec& s) {
    const Assay a(lab.system_ptr("I"), s);
    const auto seed = lab.config().campaign.matrix_seed + static_cast<std::uint64_t>(s.family_index);
    const auto trace = optimize_reagent(a, lab.ga_config("I", seed));
    const auto mask = best_mask(trace, lab.system("I").grid());
    return a.objective(mask, ObjectiveMode::report).j / a.j_tl();
}

// Bisects the short-side width of every non-anchor substrate so its System I
// gain follows anchor_gain * gain_step^(j - anchor). Gain falls as width grows.
Registry fit_widths(const Lab& lab, const Chain& c) {
    const Registry& reg = lab.config().registry;
    const double anchor = bank_gain(lab, reg.find("CH2BrCl"));
    fmt::print("// anchor gain {:.4f}\n", anchor);
    std::vector<SubstrateSpec> out;
    for (SubstrateSpec s : reg.entries()) {
        if (s.family_index != c.anchor_index) {
            const double target = anchor * std::pow(c.gain_step, s.family_index - c.anchor_index);
            double lo = std::log(0.2), hi = std::log(6.0);
            for (int it = 0; it < 14; ++it) {
                s.stretch_width_short = std::exp(0.5 * (lo + hi));
                (bank_gain(lab, s) > target ? lo : hi) = std::log(s.stretch_width_short);
            }
            s.stretch_width_short = std::exp(0.5 * (lo + hi));
            fmt::print("// {} width {:.5f} gain {:.4f} target {:.4f}\n", s.name, s.stretch_width_short,
                       bank_gain(lab, s), target);
        }
        out.push_back(s);
    }
    return Registry(out);
}

Registry scale_k1(const Lab& lab, const Chain& c) {
    const Registry& reg = lab.config().registry;
    const double anchor_two = lab.assay("II", "CH2BrCl").j_tl();
    const double k_anchor = c.tl_target_two / anchor_two;
    const double anchor_one = lab.assay("I", "CH2BrCl").j_tl() * k_anchor;
    std::vector<SubstrateSpec> out;
    for (SubstrateSpec s : reg.entries()) {
        const double target = anchor_one * std::pow(c.tl_step, s.family_index - c.anchor_index);
        s.k1 = target / lab.assay("I", s.name).j_tl();
        out.push_back(s);
    }
    return Registry(out);
}

void print_rows(const Registry& reg) {
    for (const auto& s : reg.entries())
        fmt::print("    {{\"{}\", \"{}\", \"{}\", {}, {}, {}, {:.17g}, {:.17g}, {:.17g}, {:g}, {}, {}, {}, {}}},\n", s.name,
                   s.s1_label, s.s2_label, s.parent_mass, s.s1_mass, s.s2_mass, s.preferred_stretch_fs,
                   s.stretch_width_short, s.k1, s.s2_threshold_fraction, s.charge_state_thresholds[0],
                   s.charge_state_thresholds[1], s.charge_state_thresholds[2], s.k_ce);
}

bool want(const std::string& stages, const char* name) {
    return stages == "all" || stages.find(name) != std::string::npos;
}

void report(const Lab& lab, const std::string& stages) {
    const auto& camp = lab.config().campaign;
    for (const auto& name : {"I", "II"}) {
        const auto& cal = lab.calibration(name);
        fmt::print("calibration {}: TPA ratio {:.5f}\n", name, cal.tpa_ratio);
    }
    const auto& sc = lab.config().scan;
    double jmax[2] = {0, 0};
    if (want(stages, "landscape")) {
    int k = 0;
    for (const auto& name : {"I", "II"}) {
        const auto res = scan_landscape(lab.assay(name, "CH2BrCl"), {sc.a_min_fs2, sc.a_max_fs2},
                                        {sc.b_min_fs3, sc.b_max_fs3}, sc.n_a, sc.n_b);
        const auto f = landscape_features(res);
        jmax[k++] = f.j_max;
        fmt::print("landscape {}: origin_min {} (pct {:.3f}) components {} quadrant ({:+d},{:+d}) jmax {:.4g}\n",
                   name, f.origin_is_near_min, f.origin_percentile, f.maxima.size(), f.quadrant_a,
                   f.quadrant_b, f.j_max);
        for (const auto& m : f.maxima) fmt::print("    max A {:.0f} B {:.0f} J {:.4g} cells {}\n", m.a, m.b, m.j, m.cells);
    }
    fmt::print("landscape ratio I/II {:.3f}\n", jmax[0] / jmax[1]);
    }

    for (const auto& sub : {"CH2BrCl", "CH2ICl"}) {
        if (!want(stages, "transfer")) break;
        const auto src = lab.optimize_reagents("I", sub, camp.reagents_per_system);
        const auto nat = lab.optimize_reagents("II", sub, camp.reagents_per_system);
        std::vector<PhaseMask> ms, mn;
        for (const auto& t : src) ms.push_back(best_mask(t, lab.system("I").grid()));
        for (const auto& t : nat) mn.push_back(best_mask(t, lab.system("II").grid()));
        const Assay two = lab.assay("II", sub);
        const Assay one = lab.assay("I", sub);
        const auto rep = transfer_efficacy(ms, mn, lab.system("I"), two, TransferPolicy{}, camp.repeats);
        fmt::print("{}: J_TL I {:.4g} II {:.4g}; best native II J {:.4g} (gain {:.3f})\n", sub, one.j_tl(),
                   two.j_tl(), rep.best_native * two.j_tl(), rep.best_native);
        for (const auto& t : src) fmt::print("    I reagent gain {:.3f}  A {:.0f} B {:.0f} C {:.0f} w0 {:.4f}\n",
                                             *t.best.fitness / one.j_tl(), t.best.params.a, t.best.params.b,
                                             t.best.params.c, t.best.params.omega0);
        for (const auto& o : rep.transferred) fmt::print("    transferred efficacy {:.4f}\n", o.efficacy);
        for (const auto& o : rep.native) fmt::print("    native efficacy {:.4f}\n", o.efficacy);
        if (std::string(sub) == "CH2BrCl") {
            const auto sh = shift_study(ms, lab.system("I"), two);
            fmt::print("    shift {} px: max gain {:.4f}\n", sh.shift_pixels, sh.max_gain);
        }
    }

    if (!want(stages, "matrix")) return;
    const auto bank = lab.reagent_bank("I");
    const int chbr3 = static_cast<int>(lab.config().registry.find("CHBr3").family_index - 1);
    for (const auto& name : {"I", "II"}) {
        const auto m = lab.matrix(name, "I", bank, ObjectiveMode::report);
        const auto tr = trend_checks(m, std::string(name) == "II" ? chbr3 : -1);
        fmt::print("matrix {}:\n", name);
        for (std::size_t r = 0; r < m.labels.size(); ++r) {
            fmt::print("  {:>8}", m.labels[r]);
            for (std::size_t s = 0; s < m.labels.size(); ++s)
                fmt::print(" {:7.3f}{}", m.j_tilde[r][s], m.thresholded[r][s] ? '*' : ' ');
            fmt::print("\n");
        }
        fmt::print("  rho {:.3f} fractions", tr.spearman_rho);
        for (double f : tr.row_fractions) fmt::print(" {:.2f}", f);
        fmt::print("\n  CHBr3 column above its diagonal for rows:");
        for (std::size_t r = 0; r < m.labels.size(); ++r)
            if (static_cast<int>(r) != chbr3 && m.j_tilde[r][chbr3] > m.j_tilde[chbr3][chbr3]) fmt::print(" {}", m.labels[r]);
        fmt::print("\n");
    }

    for (const auto& name : {"I", "II"}) {
        const Assay a = lab.assay(name, "CH2BrCl");
        const auto field = shape_pulse(a.system(), zero_mask(a.system().grid()));
        const double peak = delivered_peak_intensity(a.system(), field);
        const auto d = intensity_diagnostics(synth_tof_spectrum(a.substrate(), field, peak));
        fmt::print("diagnostics {}: peak {:.1f} TW/cm2 max_charge {} split {:.4f} us\n", name, peak, d.max_charge,
                   d.max_split_us);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regenerate the frozen substrate registry"};
    Chain c;
    bool do_report = false;
    bool frozen = false;
    std::string stages = "all";
    std::string config_path;
    app.add_option("--config", config_path, "base configuration (defaults to built-in)");
    app.add_flag("--report", do_report, "run the full scorecard on the regenerated registry");
    app.add_flag("--frozen", frozen, "score the built-in registry instead of regenerating it");
    app.add_option("--stages", stages, "landscape,transfer,matrix or all");
    app.add_option("--anchor-stretch", c.anchor_stretch_fs);
    app.add_option("--stretch-ratio", c.stretch_ratio);
    app.add_option("--anchor-width", c.anchor_width);
    app.add_option("--width-power", c.width_power);
    app.add_option("--width-slope", c.width_slope);
    app.add_option("--chbr3-index", c.chbr3_index);
    app.add_option("--chbr3-threshold", c.chbr3_threshold);
    app.add_option("--tl-step", c.tl_step);
    app.add_option("--coulomb-order", c.coulomb_order);
    app.add_option("--coulomb-threshold", c.coulomb_threshold);
    app.add_option("--coulomb-gain", c.coulomb_gain);
    app.add_option("--long-width", c.long_width);
    app.add_option("--sequencing", c.sequencing);
    app.add_option("--fit-widths", c.fit_widths, "fit widths to a gain ramp (default on)");
    app.add_option("--gain-step", c.gain_step);
    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = config_path.empty() ? default_config() : load_config(config_path);
        if (frozen) {
            report(Lab(cfg), stages);
            return 0;
        }
        cfg.registry = chain_registry(cfg.registry, c);
        if (c.fit_widths) cfg.registry = fit_widths(Lab(cfg), c);
        cfg.registry = scale_k1(Lab(cfg), c);
        fmt::print("// registry rows\n");
        print_rows(cfg.registry);
        if (do_report) report(Lab(cfg), stages);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
