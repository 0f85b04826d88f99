#include "pulselab/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pulselab/error.hpp"

namespace pulselab {
namespace {

struct Field {
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};
using Fields = std::vector<Field>;

[[noreturn]] void bad_value(const std::string& key, const std::string& v) {
    throw Error(Errc::config_error, fmt::format("cannot parse value '{}' for key '{}'", v, key));
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) bad_value(key, v);
    return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int out{};
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) bad_value(key, v);
    return out;
}

Field real(const std::string& key, double& ref) {
    return {key, [&ref, key](const std::string& v) { ref = parse_double(key, v); },
            [&ref] { return fmt::format("{}", ref); }};
}

template <class Int>
Field integer(const std::string& key, Int& ref) {
    return {key, [&ref, key](const std::string& v) { ref = parse_int<Int>(key, v); },
            [&ref] { return fmt::format("{}", ref); }};
}

Field flag(const std::string& key, bool& ref) {
    return {key,
            [&ref, key](const std::string& v) {
                if (v == "true") ref = true;
                else if (v == "false") ref = false;
                else bad_value(key, v);
            },
            [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field text(const std::string& key, std::string& ref) {
    return {key, [&ref](const std::string& v) { ref = v; }, [&ref] { return ref; }};
}

Fields system_fields(SystemConfig& c) {
    auto& s = c.spec;
    return {integer("pixel_count", s.pixel_count),
            integer("center_pixel", s.center_pixel),
            real("center_wavelength_nm", s.center_wavelength_nm),
            real("nm_per_pixel", s.nm_per_pixel),
            real("bandwidth_fwhm_nm", s.bandwidth_fwhm_nm),
            real("delivered_energy_uJ", s.delivered_energy_uJ),
            real("spot_diameter_um", s.spot_diameter_um),
            real("intensity_scale", s.intensity_scale),
            integer("residual_phase_seed", s.residual_phase_seed),
            real("residual_A_fs2", s.residual_magnitude[0]),
            real("residual_B_fs3", s.residual_magnitude[1]),
            real("residual_C_fs4", s.residual_magnitude[2]),
            real("s2_threshold_scale", s.s2_threshold_scale),
            integer("calibration_seed", c.calibration_seed)};
}

Fields substrate_fields(SubstrateSpec& s) {
    return {integer("family_index", s.family_index),
            text("s1_label", s.s1_label),
            text("s2_label", s.s2_label),
            text("parent_label", s.parent_label),
            real("n_ion", s.n_ion),
            real("n_diss", s.n_diss),
            real("sequencing_weight", s.sequencing_weight),
            real("preferred_stretch_fs", s.preferred_stretch_fs),
            real("stretch_width_short", s.stretch_width_short),
            real("stretch_width_long", s.stretch_width_long),
            real("coulomb_threshold_TWcm2", s.coulomb_threshold_TWcm2),
            real("coulomb_order", s.coulomb_order),
            real("coulomb_gain", s.coulomb_gain),
            real("k1", s.k1),
            real("k2", s.k2),
            real("s2_threshold_fraction", s.s2_threshold_fraction),
            real("charge_threshold_q2_TWcm2", s.charge_state_thresholds[0]),
            real("charge_threshold_q3_TWcm2", s.charge_state_thresholds[1]),
            real("charge_threshold_q4_TWcm2", s.charge_state_thresholds[2]),
            real("k_ce_us", s.k_ce),
            real("parent_mass_amu", s.parent_mass),
            real("s1_mass_amu", s.s1_mass),
            real("s2_mass_amu", s.s2_mass)};
}

Fields ga_fields(GASettings& g) {
    return {integer("population", g.population),
            integer("generations", g.generations),
            real("crossover_rate", g.crossover_rate),
            real("mutation_rate", g.mutation_rate),
            integer("elite_count", g.elite_count),
            real("sigma_decay", g.sigma_decay),
            real("blend_alpha", g.blend_alpha),
            real("sigma_A_fs2", g.mutation_sigma[0]),
            real("sigma_B_fs3", g.mutation_sigma[1]),
            real("sigma_C_fs4", g.mutation_sigma[2]),
            real("sigma_omega0_radfs", g.mutation_sigma[3]),
            real("bound_A_fs2", g.bound_a_fs2),
            real("bound_B_fs3", g.bound_b_fs3),
            real("bound_C_fs4", g.bound_c_fs4),
            real("omega0_window_fraction", g.omega0_window_fraction),
            flag("seed_flat", g.seed_flat),
            integer("workers", g.workers)};
}

Fields scan_fields(ScanSettings& s) {
    return {real("a_min_fs2", s.a_min_fs2), real("a_max_fs2", s.a_max_fs2),
            real("b_min_fs3", s.b_min_fs3), real("b_max_fs3", s.b_max_fs3),
            integer("n_a", s.n_a),          integer("n_b", s.n_b)};
}

Fields campaign_fields(CampaignSettings& c) {
    return {integer("reagents_per_system", c.reagents_per_system), integer("repeats", c.repeats),
            integer("reagent_seed", c.reagent_seed), integer("matrix_seed", c.matrix_seed),
            text("transfer_substrates", c.transfer_substrates)};
}

void apply(Fields fields, const boost::property_tree::ptree& section, const std::string& name) {
    std::map<std::string, const Field*> by_key;
    for (const auto& f : fields) by_key[f.key] = &f;
    for (const auto& [key, node] : section) {
        auto it = by_key.find(key);
        if (it == by_key.end())
            throw Error(Errc::config_error, fmt::format("unknown key '{}' in [{}]", key, name));
        it->second->set(node.get_value<std::string>());
    }
}

void emit(std::string& out, const std::string& name, const Fields& fields) {
    out += fmt::format("[{}]\n", name);
    for (const auto& f : fields) out += fmt::format("{} = {}\n", f.key, f.get());
    out += "\n";
}

void check(const Config& cfg) {
    if (cfg.systems.empty()) throw Error(Errc::config_error, "no [system.*] section");
    for (const auto& s : cfg.systems) {
        validate(s.spec);
        grid_of(s.spec);
    }
    if (cfg.scan.n_a < 1 || cfg.scan.n_b < 1) throw Error(Errc::config_error, "scan needs n_a, n_b >= 1");
    if (cfg.campaign.reagents_per_system < 1 || cfg.campaign.repeats < 2)
        throw Error(Errc::config_error, "campaign needs >= 1 reagent and >= 2 repeats");
    if (!(cfg.ga.omega0_window_fraction >= 0.0 && cfg.ga.omega0_window_fraction <= 1.0))
        throw Error(Errc::config_error, "omega0_window_fraction must lie in [0, 1]");
}

}  // namespace

const SystemConfig& Config::system(const std::string& name) const {
    for (const auto& s : systems)
        if (s.spec.name == name) return s;
    throw Error(Errc::config_error, fmt::format("unknown system '{}'", name));
}

Config default_config() {
    Config cfg;
    cfg.systems.push_back({system_one_spec(), 1});
    cfg.systems.push_back({system_two_spec(), 2});
    cfg.registry = default_registry();
    return cfg;
}

Config parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(Errc::config_error, e.what());
    }
    Config cfg = default_config();
    std::vector<SubstrateSpec> subs = cfg.registry.entries();
    for (const auto& [name, section] : tree) {
        if (section.empty() && !section.data().empty())
            throw Error(Errc::config_error, fmt::format("key '{}' outside any section", name));
        if (name == "ga") {
            apply(ga_fields(cfg.ga), section, name);
        } else if (name == "scan") {
            apply(scan_fields(cfg.scan), section, name);
        } else if (name == "campaign") {
            apply(campaign_fields(cfg.campaign), section, name);
        } else if (name.rfind("system.", 0) == 0 && name.size() > 7) {
            const std::string id = name.substr(7);
            auto it = std::find_if(cfg.systems.begin(), cfg.systems.end(),
                                   [&](const SystemConfig& s) { return s.spec.name == id; });
            if (it == cfg.systems.end()) {
                SystemConfig fresh{system_one_spec(), 1};
                fresh.spec.name = id;
                cfg.systems.push_back(fresh);
                it = std::prev(cfg.systems.end());
            }
            apply(system_fields(*it), section, name);
        } else if (name.rfind("substrate.", 0) == 0 && name.size() > 10) {
            const std::string id = name.substr(10);
            auto it = std::find_if(subs.begin(), subs.end(), [&](const SubstrateSpec& s) { return s.name == id; });
            if (it == subs.end()) {
                SubstrateSpec fresh;
                fresh.name = id;
                fresh.parent_label = id;
                subs.push_back(fresh);
                it = std::prev(subs.end());
            }
            apply(substrate_fields(*it), section, name);
        } else {
            throw Error(Errc::config_error, fmt::format("unknown section [{}]", name));
        }
    }
    cfg.registry = Registry(std::move(subs));
    check(cfg);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::io_error, fmt::format("cannot read config '{}'", path));
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& cfg) {
    Config c = cfg;  // field binders need mutable references
    std::string out;
    for (auto& s : c.systems) emit(out, "system." + s.spec.name, system_fields(s));
    std::vector<SubstrateSpec> subs = c.registry.entries();
    for (auto& s : subs) emit(out, "substrate." + s.name, substrate_fields(s));
    emit(out, "ga", ga_fields(c.ga));
    emit(out, "scan", scan_fields(c.scan));
    emit(out, "campaign", campaign_fields(c.campaign));
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string config_digest(const Config& cfg) { return fnv1a_hex(serialize_config(cfg)); }

GAConfig make_ga_config(const GASettings& s, const SpectralGrid& grid, std::uint64_t seed) {
    GAConfig g;
    g.population = s.population;
    g.generations = s.generations;
    g.crossover_rate = s.crossover_rate;
    g.mutation_rate = s.mutation_rate;
    g.elite_count = s.elite_count;
    g.sigma_decay = s.sigma_decay;
    g.blend_alpha = s.blend_alpha;
    g.mutation_sigma = s.mutation_sigma;
    g.seed_flat = s.seed_flat;
    g.workers = s.workers;
    g.seed = seed;
    const int n = grid.pixel_count();
    const int half = static_cast<int>(s.omega0_window_fraction * n / 2.0);
    const double w_hi = grid.omega(std::clamp(grid.center_pixel() - half, 0, n - 1));
    const double w_lo = grid.omega(std::clamp(grid.center_pixel() + half, 0, n - 1));
    g.bounds = {Interval{-s.bound_a_fs2, s.bound_a_fs2}, Interval{-s.bound_b_fs3, s.bound_b_fs3},
                Interval{-s.bound_c_fs4, s.bound_c_fs4}, Interval{w_lo, w_hi}};
    validate(g);
    return g;
}

}  // namespace pulselab
