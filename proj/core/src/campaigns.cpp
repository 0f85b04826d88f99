#include "pulselab/campaigns.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulselab/error.hpp"
#include "pulselab/parallel.hpp"

namespace pulselab {

Assay::Assay(std::shared_ptr<const LaserSystem> system, SubstrateSpec substrate)
    : system_(std::move(system)), substrate_(std::move(substrate)) {
    if (!system_) throw Error(Errc::invalid_argument, "assay needs a laser system");
    if (!system_->calibrated())
        throw Error(Errc::uncalibrated_system,
                    fmt::format("system {} has no reference mask", system_->spec().name));
    validate(substrate_);
    tl_ = signals(zero_mask(system_->grid()));
    threshold_ = substrate_.s2_threshold_fraction * tl_.s2 * system_->spec().s2_threshold_scale;
    if (!(threshold_ > 0.0))
        throw Error(Errc::degenerate_normalization,
                    fmt::format("{} on {}: TL S2 is zero", substrate_.name, system_->spec().name));
    j_tl_ = objective_J(tl_, threshold_, ObjectiveMode::report);
    if (!(j_tl_ > 0.0))
        throw Error(Errc::degenerate_normalization,
                    fmt::format("{} on {}: TL yield is zero", substrate_.name, system_->spec().name));
}

IonSignals Assay::signals(const PhaseMask& mask) const {
    const TemporalField field = shape_pulse(*system_, mask);
    return ion_signals(substrate_, field, delivered_peak_intensity(*system_, field));
}

ObjectiveResult Assay::objective(const PhaseMask& mask, ObjectiveMode mode) const {
    return evaluate_objective(signals(mask), threshold_, j_tl_, mode);
}

OptimizationTrace optimize_reagent(const Assay& assay, const GAConfig& cfg) {
    const SpectralGrid& grid = assay.system().grid();
    Evaluator eval = [&assay, &grid](const PolynomialPhase& p) {
        return assay.objective(eval_polynomial_phase(p, grid), ObjectiveMode::ga).j;
    };
    return run_ga(eval, cfg);
}

std::vector<double> linspace(const Range& r, int n) {
    if (n < 1) throw Error(Errc::invalid_argument, "grid needs at least one point");
    if (n == 1) return {0.5 * (r.lo + r.hi)};
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = r.lo + (r.hi - r.lo) * i / (n - 1);
    return v;
}

LandscapeResult scan_landscape(const Assay& assay, const Range& a_range, const Range& b_range,
                               int n_a, int n_b, unsigned workers) {
    LandscapeResult res;
    res.a_values = linspace(a_range, n_a);
    res.b_values = linspace(b_range, n_b);
    res.system = assay.system().spec().name;
    res.substrate = assay.substrate().name;
    res.j_grid.assign(res.a_values.size(), std::vector<double>(res.b_values.size(), 0.0));
    const SpectralGrid& grid = assay.system().grid();
    const double w0 = grid.center_omega();
    const std::size_t nb = res.b_values.size();
    parallel_for(
        res.a_values.size() * nb,
        [&](std::size_t cell) {
            const std::size_t i = cell / nb, j = cell % nb;
            const PolynomialPhase p{res.a_values[i], res.b_values[j], 0.0, w0};
            res.j_grid[i][j] =
                assay.objective(eval_polynomial_phase(p, grid), ObjectiveMode::report).j;
        },
        workers);
    return res;
}

namespace {

std::size_t nearest_index(const std::vector<double>& v, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i] - x) < std::abs(v[best] - x)) best = i;
    return best;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

LandscapeFeatures landscape_features(const LandscapeResult& r, double level) {
    const std::size_t na = r.a_values.size(), nb = r.b_values.size();
    if (na == 0 || nb == 0 || r.j_grid.size() != na)
        throw Error(Errc::degenerate_landscape, "landscape grid is empty or ragged");
    std::vector<double> all;
    all.reserve(na * nb);
    for (const auto& row : r.j_grid) {
        if (row.size() != nb) throw Error(Errc::degenerate_landscape, "landscape grid is ragged");
        all.insert(all.end(), row.begin(), row.end());
    }
    const auto [mn, mx] = std::minmax_element(all.begin(), all.end());
    if (!(*mx > *mn)) throw Error(Errc::degenerate_landscape, "landscape is constant");

    LandscapeFeatures f;
    f.j_max = *mx;
    const double j0 = r.j_grid[nearest_index(r.a_values, 0.0)][nearest_index(r.b_values, 0.0)];
    f.origin_is_near_min = j0 <= percentile(all, 0.10);
    f.origin_percentile = static_cast<double>(std::count_if(all.begin(), all.end(),
                                                            [j0](double v) { return v < j0; })) /
                          static_cast<double>(all.size());

    const std::size_t arg = static_cast<std::size_t>(mx - all.begin());
    f.quadrant_a = sign_of(r.a_values[arg / nb]);
    f.quadrant_b = sign_of(r.b_values[arg % nb]);

    // 4-connected components of the superlevel set.
    const double cut = level * f.j_max;
    std::vector<int> label(na * nb, -1);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < na * nb; ++s) {
        if (label[s] >= 0 || all[s] < cut) continue;
        const int id = static_cast<int>(f.maxima.size());
        LandscapeMaximum m;
        m.j = -1.0;
        stack.assign(1, s);
        label[s] = id;
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            ++m.cells;
            if (all[c] > m.j) {
                m.j = all[c];
                m.a = r.a_values[c / nb];
                m.b = r.b_values[c % nb];
            }
            const std::size_t i = c / nb, j = c % nb;
            auto visit = [&](std::size_t ii, std::size_t jj) {
                const std::size_t k = ii * nb + jj;
                if (label[k] < 0 && all[k] >= cut) {
                    label[k] = id;
                    stack.push_back(k);
                }
            };
            if (i > 0) visit(i - 1, j);
            if (i + 1 < na) visit(i + 1, j);
            if (j > 0) visit(i, j - 1);
            if (j + 1 < nb) visit(i, j + 1);
        }
        f.maxima.push_back(m);
    }
    std::stable_sort(f.maxima.begin(), f.maxima.end(),
                     [](const LandscapeMaximum& a, const LandscapeMaximum& b) { return a.j > b.j; });

    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            f.asymmetry_score = std::max(
                f.asymmetry_score, std::abs(r.j_grid[i][j] - r.j_grid[na - 1 - i][nb - 1 - j]) / f.j_max);
    return f;
}

std::string landscape_csv(const LandscapeResult& r) {
    std::string out = "A_fs2,B_fs3,J\n";
    for (std::size_t i = 0; i < r.a_values.size(); ++i)
        for (std::size_t j = 0; j < r.b_values.size(); ++j)
            out += fmt::format("{:.9g},{:.9g},{:.17g}\n", r.a_values[i], r.b_values[j], r.j_grid[i][j]);
    return out;
}

namespace {

ReagentOutcome repeated(const Assay& target, const PhaseMask& mask, std::size_t idx, int repeats,
                        const NoiseHook& noise) {
    const double base = target.objective(mask, ObjectiveMode::report).j_tilde;
    std::vector<double> v(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) v[static_cast<std::size_t>(r)] = noise ? noise(base, idx, r) : base;
    ReagentOutcome o;
    o.mean_j_tilde = std::accumulate(v.begin(), v.end(), 0.0) / repeats;
    double var = 0.0;
    for (double x : v) var += (x - o.mean_j_tilde) * (x - o.mean_j_tilde);
    o.std_j_tilde = std::sqrt(var / std::max(1, repeats - 1));
    return o;
}

}  // namespace

TransferReport transfer_efficacy(const std::vector<PhaseMask>& reagents_src,
                                 const std::vector<PhaseMask>& reagents_native,
                                 const LaserSystem& source, const Assay& target,
                                 const TransferPolicy& policy, int repeats, const NoiseHook& noise) {
    if (reagents_src.empty() || reagents_native.empty())
        throw Error(Errc::empty_input, "transfer study needs reagents on both sides");
    if (repeats < 2) throw Error(Errc::invalid_argument, "repeats must be >= 2");
    TransferReport rep;
    rep.tl_baseline = normalized_J(target.j_tl(), target.j_tl());
    for (std::size_t i = 0; i < reagents_native.size(); ++i) {
        auto o = repeated(target, reagents_native[i], i, repeats, noise);
        o.label = fmt::format("native-{}", i + 1);
        o.source_system = target.system().spec().name;
        rep.best_native = std::max(rep.best_native, o.mean_j_tilde);
        rep.native.push_back(o);
    }
    for (std::size_t i = 0; i < reagents_src.size(); ++i) {
        const PhaseMask moved = transfer_mask(reagents_src[i], source, target.system(), policy);
        auto o = repeated(target, moved, reagents_native.size() + i, repeats, noise);
        o.label = fmt::format("transferred-{}", i + 1);
        o.source_system = source.spec().name;
        rep.transferred.push_back(o);
    }
    if (!(rep.best_native > 0.0))
        throw Error(Errc::degenerate_normalization, "best native reagent has zero yield");
    for (auto* list : {&rep.native, &rep.transferred})
        for (auto& o : *list) o.efficacy = o.mean_j_tilde / rep.best_native;
    return rep;
}

ShiftReport shift_study(const std::vector<PhaseMask>& reagents, const LaserSystem& source,
                        const Assay& target, const TransferPolicy* alternative) {
    ShiftReport rep;
    TransferPolicy alt;
    if (alternative != nullptr) {
        alt = *alternative;
    } else {
        alt.shift_pixels = compute_pixel_shift(source.spec(), target.system().spec());
    }
    rep.shift_pixels = alt.shift_pixels;
    rep.max_gain = -1.0;
    for (const auto& m : reagents) {
        ShiftOutcome o;
        o.j_tilde_copy =
            target.objective(transfer_mask(m, source, target.system(), TransferPolicy{}), ObjectiveMode::report)
                .j_tilde;
        o.j_tilde_shifted =
            target.objective(transfer_mask(m, source, target.system(), alt), ObjectiveMode::report).j_tilde;
        o.gain = o.j_tilde_shifted / o.j_tilde_copy - 1.0;
        rep.max_gain = std::max(rep.max_gain, o.gain);
        rep.reagents.push_back(o);
    }
    if (reagents.empty()) rep.max_gain = 0.0;
    return rep;
}

TransferMatrix family_matrix(const std::vector<Assay>& assays,
                             const std::map<std::string, PhaseMask>& bank, ObjectiveMode mode,
                             unsigned workers) {
    if (assays.empty()) throw Error(Errc::empty_input, "no substrates");
    TransferMatrix m;
    m.system = assays.front().system().spec().name;
    std::vector<const PhaseMask*> masks;
    for (const auto& a : assays) {
        if (a.system().spec().name != m.system)
            throw Error(Errc::invalid_argument, "assays span several systems");
        auto it = bank.find(a.substrate().name);
        if (it == bank.end())
            throw Error(Errc::missing_compound, fmt::format("no reagent for {}", a.substrate().name));
        m.labels.push_back(a.substrate().name);
        masks.push_back(&it->second);
    }
    const std::size_t n = assays.size();
    m.j_tilde.assign(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<char>> flags(n, std::vector<char>(n, 0));
    parallel_for(
        n * n,
        [&](std::size_t cell) {
            const std::size_t r = cell / n, s = cell % n;
            const auto o = assays[s].objective(*masks[r], mode);
            m.j_tilde[r][s] = o.j_tilde;
            flags[r][s] = o.thresholded ? 1 : 0;
        },
        workers);
    m.thresholded.assign(n, std::vector<bool>(n, false));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) m.thresholded[r][s] = flags[r][s] != 0;
    return m;
}

std::string matrix_csv(const TransferMatrix& m) {
    std::string out = "reagent,substrate,J_tilde,thresholded\n";
    for (std::size_t r = 0; r < m.labels.size(); ++r)
        for (std::size_t s = 0; s < m.labels.size(); ++s)
            out += fmt::format("{},{},{:.17g},{}\n", m.labels[r], m.labels[s], m.j_tilde[r][s],
                               m.thresholded[r][s] ? 1 : 0);
    return out;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(Errc::invalid_argument, "spearman needs paired data");
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

TrendReport trend_checks(const TransferMatrix& m, int excluded_column) {
    const std::size_t n = m.labels.size();
    if (n < 2 || m.j_tilde.size() != n) throw Error(Errc::invalid_argument, "matrix must be square, n >= 2");
    TrendReport rep;
    std::vector<double> idx(n), diag(n);
    for (std::size_t k = 0; k < n; ++k) {
        idx[k] = static_cast<double>(k + 1);
        diag[k] = m.j_tilde[k][k];
    }
    rep.spearman_rho = spearman(idx, diag);

    const bool exclude = excluded_column >= 0 && static_cast<std::size_t>(excluded_column) < n;
    const auto c = static_cast<std::size_t>(exclude ? excluded_column : 0);
    auto anomalous = [&](std::size_t row, std::size_t col) {
        return exclude && col == c && row != c && m.j_tilde[row][c] > m.j_tilde[c][c];
    };
    if (exclude)
        for (std::size_t k = 0; k < n; ++k)
            if (anomalous(k, c)) rep.anomaly_reagents.push_back(static_cast<int>(k));

    rep.min_row_fraction = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        int ok = 0, total = 0;
        auto step = [&](std::size_t a, std::size_t b) {
            if (anomalous(k, a) || anomalous(k, b)) return;
            ++total;
            const double tol = 1e-12 * std::max(1.0, std::abs(m.j_tilde[k][a]));
            if (m.j_tilde[k][b] <= m.j_tilde[k][a] + tol) ++ok;
        };
        for (std::size_t j = k; j + 1 < n; ++j) step(j, j + 1);
        for (std::size_t j = k; j > 0; --j) step(j, j - 1);
        const double frac = total > 0 ? static_cast<double>(ok) / total : 1.0;
        rep.row_fractions.push_back(frac);
        rep.min_row_fraction = std::min(rep.min_row_fraction, frac);
    }
    rep.trend_i_pass = rep.spearman_rho >= kSpearmanBar;
    rep.trend_ii_pass = rep.min_row_fraction >= kRowFractionBar;
    return rep;
}

}  // namespace pulselab
