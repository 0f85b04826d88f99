#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "acceptance.hpp"
#include "pulselab/error.hpp"
#include "pulselab/io.hpp"
#include "pulselab/lab.hpp"
#include "pulselab/version.hpp"

namespace pulselab::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string manifest_json(const RunManifest& m) {
    ordered_json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["config_digest"] = m.config_digest;
    j["seeds"] = ordered_json::object();
    for (const auto& [k, v] : m.seeds) j["seeds"][k] = v;
    j["artifacts"] = m.artifacts;
    j["version"] = m.version;
    j["duration_s"] = m.duration_s;
    return j.dump(2) + "\n";
}

namespace {

const std::vector<std::string> kCommands{"calibrate", "spectrum", "scan", "optimize", "transfer", "matrix", "demo"};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::string system;
    std::string substrate = "CH2BrCl";
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::string policy = "copy";
    std::string source = "I";
    std::string mask_path;
};

// One command invocation: owns the manifest and the output directory.
class Session {
public:
    Session(std::string command, std::vector<std::string> argv, const Options& opt, std::ostream& out)
        : opt_(opt), out_(out), t0_(std::chrono::steady_clock::now()) {
        manifest_.command = std::move(command);
        manifest_.argv = std::move(argv);
        manifest_.version = kVersion;
        cfg_ = opt.config_path.empty() ? default_config() : load_config(opt.config_path);
        manifest_.config_digest = config_digest(cfg_);
        for (const auto& sc : cfg_.systems) manifest_.seeds["calibration." + sc.spec.name] = sc.calibration_seed;
        fs::create_directories(opt.out);
    }

    const Config& config() const { return cfg_; }
    Config& mutable_config() { return cfg_; }
    const Options& options() const { return opt_; }
    std::ostream& out() { return out_; }

    // Command flag value or a default, validated against configured systems.
    std::string system_or(const std::string& fallback) const { return require_system(opt_.system.empty() ? fallback : opt_.system); }

    std::string require_system(const std::string& name) const {
        for (const auto& sc : cfg_.systems)
            if (sc.spec.name == name) return name;
        throw UsageError(fmt::format("unknown system '{}'", name));
    }

    std::string substrate() const {
        if (!cfg_.registry.contains(opt_.substrate)) throw UsageError(fmt::format("unknown substrate '{}'", opt_.substrate));
        return opt_.substrate;
    }

    void seed(const std::string& key, std::uint64_t value) { manifest_.seeds[key] = value; }

    void write(const std::string& name, const std::string& content) {
        write_text_file((fs::path(opt_.out) / name).string(), content);
        manifest_.artifacts.push_back(name);
    }

    void write_mask(const std::string& name, const PhaseMask& mask) {
        write_mask_file((fs::path(opt_.out) / name).string(), mask);
        manifest_.artifacts.push_back(name);
    }

    void finish() {
        manifest_.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        write_text_file((fs::path(opt_.out) / "manifest.json").string(), manifest_json(manifest_));
    }

private:
    Options opt_;
    std::ostream& out_;
    std::chrono::steady_clock::time_point t0_;
    Config cfg_;
    RunManifest manifest_;
};

TransferPolicy make_policy(const std::string& name, const LaserSystem& source, const LaserSystem& target) {
    if (name == "shift") return TransferPolicy{compute_pixel_shift(source.spec(), target.spec()), false};
    if (name == "resample") return TransferPolicy{0, true};
    return TransferPolicy{};
}

int cmd_calibrate(Session& s) {
    const Lab lab(s.config());
    std::string csv = "system,seed,tpa,tpa_ratio,evaluations\n";
    for (const auto& sc : s.config().systems) {
        const auto& name = sc.spec.name;
        if (!s.options().system.empty() && s.options().system != name) continue;
        const auto& cal = lab.calibration(name);
        csv += fmt::format("{},{},{:.17g},{:.17g},{}\n", name, sc.calibration_seed, cal.tpa, cal.tpa_ratio,
                           cal.trace.evaluations);
        s.write_mask(fmt::format("tl_reference_{}.mask", name), cal.reference);
        s.write(fmt::format("calibration_trace_{}.csv", name), trace_csv(cal.trace));
        s.out() << fmt::format("system {}: TPA ratio {:.5f}\n", name, cal.tpa_ratio);
    }
    if (!s.options().system.empty()) s.require_system(s.options().system);
    s.write("calibration.csv", csv);
    return kOk;
}

int cmd_spectrum(Session& s) {
    const std::string sys = s.system_or("I"), sub = s.substrate();
    const Lab lab(s.config());
    const Assay a = lab.assay(sys, sub);
    const PhaseMask mask = s.options().mask_path.empty() ? zero_mask(a.system().grid())
                                                         : read_mask_file(s.options().mask_path);
    const auto field = shape_pulse(a.system(), mask);
    const double peak = delivered_peak_intensity(a.system(), field);
    const auto spectrum = synth_tof_spectrum(a.substrate(), field, peak);
    const auto d = intensity_diagnostics(spectrum);
    s.write(fmt::format("spectrum_{}_{}.csv", sys, sub), spectrum_csv(spectrum));
    s.out() << fmt::format("{} on {}: peak {:.1f} TW/cm2, max halogen charge {}, doublet split {:.4f} us\n", sub, sys,
                           peak, d.max_charge, d.max_split_us);
    return kOk;
}

int cmd_scan(Session& s) {
    const std::string sys = s.system_or("I"), sub = s.substrate();
    const Lab lab(s.config());
    const auto& sc = s.config().scan;
    const auto res = scan_landscape(lab.assay(sys, sub), {sc.a_min_fs2, sc.a_max_fs2}, {sc.b_min_fs3, sc.b_max_fs3},
                                    sc.n_a, sc.n_b, s.config().ga.workers);
    s.write(fmt::format("landscape_{}_{}.csv", sys, sub), landscape_csv(res));
    ordered_json j;
    if (sc.n_a * sc.n_b > 1) {
        const auto f = landscape_features(res);
        j["origin_is_near_min"] = f.origin_is_near_min;
        j["origin_percentile"] = f.origin_percentile;
        j["maxima"] = ordered_json::array();
        for (const auto& m : f.maxima)
            j["maxima"].push_back({{"A_fs2", m.a}, {"B_fs3", m.b}, {"J", m.j}, {"cells", m.cells}});
        j["quadrant"] = {f.quadrant_a, f.quadrant_b};
        j["asymmetry_score"] = f.asymmetry_score;
        j["j_max"] = f.j_max;
        s.out() << fmt::format("{} on {}: {} maxima, quadrant ({:+d},{:+d}), origin percentile {:.3f}\n", sub, sys,
                               f.maxima.size(), f.quadrant_a, f.quadrant_b, f.origin_percentile);
    } else {
        j["j"] = res.j_grid[0][0];
        s.out() << fmt::format("{} on {}: J {:.6g}\n", sub, sys, res.j_grid[0][0]);
    }
    s.write(fmt::format("landscape_{}_{}_features.json", sys, sub), j.dump(2) + "\n");
    return kOk;
}

int cmd_optimize(Session& s) {
    const std::string sys = s.system_or("I"), sub = s.substrate();
    const std::uint64_t seed = s.options().seed.value_or(s.config().campaign.reagent_seed);
    s.seed("ga", seed);
    const Lab lab(s.config());
    const Assay a = lab.assay(sys, sub);
    const auto trace = optimize_reagent(a, lab.ga_config(sys, seed));
    const auto& p = trace.best.params;
    s.write_mask(fmt::format("optimize_{}_{}.mask", sys, sub), best_mask(trace, a.system().grid()));
    s.write(fmt::format("optimize_{}_{}_trace.csv", sys, sub), trace_csv(trace));
    s.out() << fmt::format("{} on {}: J {:.6g} ({:.3f} x TL) at A {:.6g} fs2, B {:.6g} fs3, C {:.6g} fs4\n", sub, sys,
                           trace.best.fitness.value_or(0.0), trace.best.fitness.value_or(0.0) / a.j_tl(), p.a, p.b,
                           p.c);
    return kOk;
}

int cmd_transfer(Session& s) {
    const std::string target = s.system_or("II"), source = s.require_system(s.options().source);
    const std::string sub = s.substrate();
    if (s.options().seed) s.mutable_config().campaign.reagent_seed = *s.options().seed;
    const auto& camp = s.config().campaign;
    for (int k = 0; k < camp.reagents_per_system; ++k)
        s.seed(fmt::format("reagent.{}", k), camp.reagent_seed + static_cast<std::uint64_t>(k));
    const Lab lab(s.config());
    auto masks = [&](const std::string& sys) {
        std::vector<PhaseMask> out;
        for (const auto& t : lab.optimize_reagents(sys, sub, camp.reagents_per_system))
            out.push_back(best_mask(t, lab.system(sys).grid()));
        return out;
    };
    const Assay a = lab.assay(target, sub);
    const auto policy = make_policy(s.options().policy, lab.system(source), lab.system(target));
    const auto rep = transfer_efficacy(masks(source), masks(target), lab.system(source), a, policy, camp.repeats);
    std::string csv = "reagent,source_system,mean_J_tilde,std_J_tilde,efficacy\n";
    for (const auto* group : {&rep.transferred, &rep.native})
        for (const auto& o : *group)
            csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", o.label, o.source_system, o.mean_j_tilde,
                               o.std_j_tilde, o.efficacy);
    s.write(fmt::format("transfer_{}_{}_{}.csv", source, target, sub), csv);
    for (const auto& o : rep.transferred)
        s.out() << fmt::format("{} {} -> {}: efficacy {:.4f}\n", o.label, source, target, o.efficacy);
    return kOk;
}

int cmd_matrix(Session& s) {
    const std::string target = s.system_or("II"), source = s.require_system(s.options().source);
    if (s.options().seed) s.mutable_config().campaign.matrix_seed = *s.options().seed;
    for (const auto& sub : s.config().registry.entries())
        s.seed("bank." + sub.name, s.config().campaign.matrix_seed + static_cast<std::uint64_t>(sub.family_index));
    const Lab lab(s.config());
    const auto policy = make_policy(s.options().policy, lab.system(source), lab.system(target));
    const auto m = lab.matrix(target, source, lab.reagent_bank(source), ObjectiveMode::report, policy);
    const int chbr3 = s.config().registry.contains("CHBr3") ? s.config().registry.find("CHBr3").family_index - 1 : -1;
    const auto tr = trend_checks(m, chbr3);
    s.write(fmt::format("matrix_{}.csv", target), matrix_csv(m));
    ordered_json j;
    j["system"] = target;
    j["bank_system"] = source;
    j["spearman_rho"] = tr.spearman_rho;
    j["trend_i_pass"] = tr.trend_i_pass;
    j["row_fractions"] = tr.row_fractions;
    j["min_row_fraction"] = tr.min_row_fraction;
    j["trend_ii_pass"] = tr.trend_ii_pass;
    j["anomaly_reagents"] = ordered_json::array();
    for (int r : tr.anomaly_reagents) j["anomaly_reagents"].push_back(m.labels[static_cast<std::size_t>(r)]);
    s.write(fmt::format("trend_{}.json", target), j.dump(2) + "\n");
    s.out() << fmt::format("matrix {}: rho {:.3f}, min row fraction {:.3f}, {} CHBr3 anomaly cells\n", target,
                           tr.spearman_rho, tr.min_row_fraction, tr.anomaly_reagents.size());
    return kOk;
}

int cmd_demo(Session& s) {
    std::string text;
    const auto results = run_acceptance(s.config(), [&](const CriterionResult& r) {
        const std::string line = format_criterion(r);
        s.out() << line << "\n" << std::flush;
        text += line + "\n";
    });
    s.write("acceptance.txt", text);
    const bool all = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
    return all ? kOk : kAcceptanceFailed;
}

void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--config", o.config_path, "configuration file (built-in defaults if omitted)");
    sub.add_option("--out", o.out, "output directory")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (!args.empty() && args[0].rfind('-', 0) != 0 &&
        std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
        err << fmt::format("error: unknown subcommand '{}' (expected one of: {})\n", args[0],
                           fmt::join(kCommands, ", "));
        return kUsage;
    }

    CLI::App app{"Photonic reagent simulation lab", "pulselab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Options o;
    const std::map<std::string, std::string> about{
        {"calibrate", "find the TL reference mask of each system"},
        {"spectrum", "synthetic time-of-flight spectrum for a system, substrate and mask"},
        {"scan", "J landscape over (A, B) with features"},
        {"optimize", "GA optimization of J on one system and substrate"},
        {"transfer", "relative efficacy of reagents moved between systems"},
        {"matrix", "reagent x substrate matrix with trend checks"},
        {"demo", "end-to-end acceptance run"},
    };
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        add_common(*sub, o);
        if (name != "demo") sub->add_option("--system", o.system, "laser system name");
        if (name == "spectrum" || name == "scan" || name == "optimize" || name == "transfer")
            sub->add_option("--substrate", o.substrate, "substrate name")->capture_default_str();
        if (name == "optimize" || name == "transfer" || name == "matrix")
            sub->add_option("--seed", o.seed, "GA seed (optimize), reagent base seed (transfer), bank base seed (matrix)");
        if (name == "transfer" || name == "matrix") {
            sub->add_option("--policy", o.policy, "mask transfer policy")
                ->check(CLI::IsMember({"copy", "shift", "resample"}))
                ->capture_default_str();
            sub->add_option("--source", o.source, "system the reagents are trained on")->capture_default_str();
        }
        if (name == "spectrum") sub->add_option("--mask", o.mask_path, "mask file (flat phase if omitted)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n";
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Session s(command, args, o, out);
        int code = kOk;
        if (command == "calibrate") code = cmd_calibrate(s);
        else if (command == "spectrum") code = cmd_spectrum(s);
        else if (command == "scan") code = cmd_scan(s);
        else if (command == "optimize") code = cmd_optimize(s);
        else if (command == "transfer") code = cmd_transfer(s);
        else if (command == "matrix") code = cmd_matrix(s);
        else code = cmd_demo(s);
        s.finish();
        return code;
    } catch (const UsageError& e) {
        err << "error: usage: " << e.what() << "\n";
    } catch (const Error& e) {
        if (e.code() == Errc::io_error && !o.config_path.empty() && !fs::is_regular_file(o.config_path))
            err << fmt::format("error: unreadable config '{}'\n", o.config_path);
        else if (e.code() == Errc::config_error)
            err << "error: config schema violation: " << e.what() << "\n";
        else
            err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kUsage;
}

}  // namespace pulselab::cli
