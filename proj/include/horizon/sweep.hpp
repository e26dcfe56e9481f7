// sweep.hpp
// Expansion-rate sweeps, threshold search and channel verification reports,
// plus CSV/JSON emission of the resulting records.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "horizon/desitter_channel.hpp"
#include "horizon/entangled_states.hpp"
#include "horizon/fock_algebra.hpp"
#include "horizon/info_measures.hpp"

namespace horizon {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ClosedFormMode { numeric_only, paper_only, both };
enum class OutputFormat { csv, json };

inline ClosedFormMode parse_closed_form_mode(std::string_view s) {
    if (s == "numeric") return ClosedFormMode::numeric_only;
    if (s == "paper") return ClosedFormMode::paper_only;
    if (s == "both") return ClosedFormMode::both;
    throw std::invalid_argument("unknown closed-form mode '" + std::string(s) + "' (expected numeric, paper or both)");
}

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected csv or json)");
}

struct GammaGrid {
    double min = 0.0;
    double max = 2.0;
    double step = 0.01;

    void validate() const {
        if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step))
            throw std::invalid_argument("gamma grid: values must be finite");
        if (min < 0.0) throw std::invalid_argument("gamma grid: min must be >= 0");
        if (min > max) throw std::invalid_argument("gamma grid: min must be <= max");
        if (!(step > 0.0)) throw std::invalid_argument("gamma grid: step must be > 0");
    }

    /// floor((max - min)/step) + 1 points, min + i*step; the epsilon keeps
    /// (0, 2, 0.01) at 201 points despite 2/0.01 not being exact.
    [[nodiscard]] std::vector<double> points() const {
        validate();
        const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
        std::vector<double> g(count);
        for (std::size_t i = 0; i < count; ++i) g[i] = min + static_cast<double>(i) * step;
        return g;
    }

    /// "MIN:MAX:STEP"
    static GammaGrid parse(const std::string& spec) {
        GammaGrid g;
        char tail = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &g.min, &g.max, &g.step, &tail) != 3)
            throw std::invalid_argument("gamma grid '" + spec + "' is not MIN:MAX:STEP");
        g.validate();
        return g;
    }
};

struct SweepConfig {
    std::vector<StateKind> kinds{StateKind::ghz, StateKind::w};
    std::vector<Measure> measures{std::begin(all_measures), std::end(all_measures)};
    GammaGrid grid;
    std::optional<Index> truncation; ///< nullopt = auto
    double tail_tol = default_tail_tol;
    ClosedFormMode closed_form = ClosedFormMode::both;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    unsigned workers = 0; ///< 0 = hardware concurrency

    void validate() const {
        grid.validate();
        if (kinds.empty()) throw std::invalid_argument("sweep: no state kind selected");
        if (measures.empty()) throw std::invalid_argument("sweep: no measure selected");
        if (!(tail_tol > 0.0)) throw std::invalid_argument("sweep: tail_tol must be > 0");
        if (truncation && *truncation == 0) throw std::invalid_argument("sweep: truncation must be >= 1");
    }

    [[nodiscard]] ChannelParams params_at(double gamma) const {
        return truncation ? ChannelParams::fixed(gamma, *truncation, tail_tol) : ChannelParams::automatic(gamma, tail_tol);
    }
};

/// One (gamma, kind, measure) row.
struct MeasureRecord {
    double gamma = 0.0;
    StateKind kind = StateKind::ghz;
    Measure measure = Measure::fidelity;
    std::optional<double> value_numeric;
    std::optional<double> value_closed;
    std::optional<double> abs_diff;
    Index truncation = 0;
    double tail_bound = 0.0;
};

/// Below this gamma the sweep reports only numeric values for the series
/// measures.
inline constexpr double small_gamma_guard = 1e-4;

inline std::optional<double> closed_value(Measure m, StateKind kind, const ChannelParams& p) {
    const double g = p.gamma;
    const Index terms = p.fock_dim();
    std::optional<double> v;
    switch (m) {
    case Measure::fidelity: v = fidelity_closed_paper(kind, g); break;
    case Measure::mi_ab:
        if (g >= small_gamma_guard) v = bipartite_mi_closed(kind, g, terms);
        break;
    case Measure::mi_abc:
        if (g >= small_gamma_guard) v = tripartite_mi_closed(kind, g, terms);
        break;
    case Measure::negativity:
        if (g >= small_gamma_guard) v = kind == StateKind::ghz ? 0.0 : negativity_w_closed(g, terms);
        break;
    }
    if (v && !std::isfinite(*v)) v.reset();
    return v;
}

/// Records for one gamma and kind, in measure order.
inline std::vector<MeasureRecord> evaluate_point(StateKind kind, const ChannelParams& p, const std::vector<Measure>& measures,
                                                 ClosedFormMode mode) {
    std::vector<Measure> sorted = measures;
    std::sort(sorted.begin(), sorted.end(), [](Measure a, Measure b) { return to_string(a) < to_string(b); });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    const bool numeric = mode != ClosedFormMode::paper_only;
    const bool closed = mode != ClosedFormMode::numeric_only;
    auto needs = [&](Measure m) { return std::find(sorted.begin(), sorted.end(), m) != sorted.end(); };

    std::optional<ThermalizedSystem> sys;
    std::optional<DensityOperator> rho_ab;
    if (numeric && (needs(Measure::mi_ab) || needs(Measure::mi_abc) || needs(Measure::negativity))) {
        sys = thermalize(kind, p);
        rho_ab = partial_trace(sys->rho_abc, {party::alice, party::bob});
    }

    std::vector<MeasureRecord> out;
    for (Measure m : sorted) {
        MeasureRecord r;
        r.gamma = p.gamma;
        r.kind = kind;
        r.measure = m;
        r.truncation = p.truncation;
        r.tail_bound = p.tail_bound();
        if (numeric) {
            switch (m) {
            case Measure::fidelity:
                r.value_numeric = entanglement_fidelity_numeric(embedded_initial(kind, p), kraus_set(p));
                break;
            case Measure::mi_ab: r.value_numeric = mutual_information(*rho_ab, {party::alice}, {party::bob}); break;
            case Measure::mi_abc: r.value_numeric = tripartite_mi_numeric(*sys); break;
            case Measure::negativity: r.value_numeric = negativity(*rho_ab, party::alice); break;
            }
        }
        if (closed) r.value_closed = closed_value(m, kind, p);
        if (r.value_numeric && r.value_closed) r.abs_diff = std::abs(*r.value_numeric - *r.value_closed);
        out.push_back(r);
    }
    return out;
}

/// Rows sorted by gamma, then kind, then measure name. Output does not
/// depend on the worker count.
inline std::vector<MeasureRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::vector<double> gammas = cfg.grid.points();
    std::vector<StateKind> kinds = cfg.kinds;
    std::sort(kinds.begin(), kinds.end(), [](StateKind a, StateKind b) { return to_string(a) < to_string(b); });
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

    const std::size_t jobs = gammas.size() * kinds.size();
    std::vector<std::vector<MeasureRecord>> slots(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto worker = [&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
            try {
                const double g = gammas[j / kinds.size()];
                slots[j] = evaluate_point(kinds[j % kinds.size()], cfg.params_at(g), cfg.measures, cfg.closed_form);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    unsigned n = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, jobs));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<MeasureRecord> out;
    for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
    return out;
}

// ---------------------------------------------------------------------------
// Emission

/// 12 significant digits.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline const char* csv_header = "gamma,kind,measure,value_numeric,value_closed,abs_diff,truncation,tail_bound";

inline std::string to_csv(const std::vector<MeasureRecord>& records) {
    std::ostringstream os;
    os << csv_header << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; };
    for (const auto& r : records) {
        os << format_number(r.gamma) << ',' << to_string(r.kind) << ',' << to_string(r.measure) << ','
           << opt(r.value_numeric) << ',' << opt(r.value_closed) << ',' << opt(r.abs_diff) << ',' << r.truncation << ','
           << format_number(r.tail_bound) << '\n';
    }
    return os.str();
}

/// Numbers are rounded to 12 significant digits first, so the JSON text
/// parses back to the same decimal strings the CSV carries.
inline std::string to_json(const std::vector<MeasureRecord>& records) {
    auto num = [](double v) { return nlohmann::json(std::stod(format_number(v))); };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : nlohmann::json(nullptr); };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"gamma", num(r.gamma)},
                       {"kind", std::string(to_string(r.kind))},
                       {"measure", std::string(to_string(r.measure))},
                       {"value_numeric", opt(r.value_numeric)},
                       {"value_closed", opt(r.value_closed)},
                       {"abs_diff", opt(r.abs_diff)},
                       {"truncation", r.truncation},
                       {"tail_bound", num(r.tail_bound)}});
    }
    return arr.dump(2) + "\n";
}

/// Writes to `path`, or to stdout when the path is empty or "-".
inline void emit(const std::vector<MeasureRecord>& records, OutputFormat format, const std::string& path) {
    const std::string text = format == OutputFormat::csv ? to_csv(records) : to_json(records);
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw io_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// key=value config files

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"state", "measure", "gamma", "truncation", "tail-tol",
                                               "closed-form", "format", "out", "workers"};
    return keys;
}

/// Lines of `key = value`; blank lines and '#' comments are skipped. Unknown
/// keys are errors. Repeated keys accumulate (state, measure).
inline std::multimap<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config file '" + path + "'");
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::multimap<std::string, std::string> out;
    std::string line;
    for (int lineno = 1; std::getline(f, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out.emplace(key, value);
    }
    return out;
}

/// "auto" or a positive integer.
inline std::optional<Index> parse_truncation(const std::string& s) {
    if (s == "auto") return std::nullopt;
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || v < 1 || v > static_cast<long long>(max_truncation) * 4)
        throw std::invalid_argument("truncation '" + s + "' is not auto or a positive integer");
    return static_cast<Index>(v);
}

// ---------------------------------------------------------------------------
// Threshold

struct ThresholdReport {
    double gamma_star = 0.0;
    double paper_value = paper_threshold;
    double eq24_value = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] std::string text() const {
        std::ostringstream os;
        os << "negativity threshold (W state)\n"
           << "  gamma_star (numeric bisection) = " << format_number(gamma_star) << "  (tol " << tolerance << ")\n"
           << "  paper_value                    = " << format_number(paper_value) << "\n"
           << "  eq24_value  ln(1+sqrt 2)       = " << format_number(eq24_value) << "\n"
           << "  |gamma_star - paper_value|     = " << format_number(std::abs(gamma_star - paper_value)) << "\n"
           << "  |gamma_star - eq24_value|      = " << format_number(std::abs(gamma_star - eq24_value)) << "\n"
           << "  |paper_value - eq24_value|     = " << format_number(std::abs(paper_value - eq24_value)) << "\n";
        return os.str();
    }
};

inline ThresholdReport find_threshold(StateKind kind, double tol, double tail_tol = default_tail_tol) {
    ThresholdSearch s;
    s.gamma_tol = tol;
    s.tail_tol = tail_tol;
    ThresholdReport r;
    r.gamma_star = negativity_threshold(kind, s);
    r.eq24_value = pt_sign_change_gamma();
    r.tolerance = tol;
    return r;
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyCheck {
    std::string name;
    double value;
    double limit;
    bool ok;
};

struct RouteResiduals {
    double closed_vs_purified = 0.0;
    double closed_vs_kraus = 0.0;
    double purified_vs_kraus = 0.0;
    [[nodiscard]] double worst() const { return std::max({closed_vs_purified, closed_vs_kraus, purified_vs_kraus}); }
};

/// The three constructions of rho'_AB compared elementwise.
inline RouteResiduals route_residuals(StateKind kind, const ChannelParams& p, const KrausSet& ks) {
    const Matrix closed = final_rho_ab_closed(kind, p).matrix();
    const Matrix purified = final_rho_ab(kind, p).matrix();
    const Matrix kraus = apply_channel(embedded_initial(kind, p), ks, party::bob).matrix();
    return {(closed - purified).cwiseAbs().maxCoeff(), (closed - kraus).cwiseAbs().maxCoeff(),
            (purified - kraus).cwiseAbs().maxCoeff()};
}

/// |S(rho_ABC) - S(rho_BII)|; zero when the purification is pure.
inline double purity_defect(const ThermalizedSystem& sys) {
    const double s_abc = von_neumann_entropy(sys.rho_abc);
    const double s_two = von_neumann_entropy(partial_trace(sys.total_pure, {purified::bob_region_two}));
    return std::abs(s_abc - s_two);
}

struct VerifyReport {
    ChannelParams params;
    std::vector<VerifyCheck> checks;
    std::vector<std::string> notes;
    bool tail_warning = false;

    [[nodiscard]] bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.ok; });
    }

    [[nodiscard]] std::string text() const {
        std::ostringstream os;
        os << "channel verification at gamma = " << format_number(params.gamma) << ", N = " << params.truncation
           << ", tail bound = " << format_number(params.tail_bound()) << "\n";
        for (const auto& c : checks)
            os << "  [" << (c.ok ? "ok" : "FAIL") << "] " << c.name << " = " << format_number(c.value) << "  (limit "
               << format_number(c.limit) << ")\n";
        for (const auto& n : notes) os << "  " << n << "\n";
        return os.str();
    }
};

inline constexpr double route_tolerance = 1e-10;
inline constexpr double choi_tolerance = 1e-10;
inline constexpr double purity_tolerance = 1e-9;

inline VerifyReport verify_channel(double gamma, std::optional<Index> truncation, double tail_tol = default_tail_tol) {
    VerifyReport r;
    r.params = truncation ? ChannelParams::fixed(gamma, *truncation, tail_tol) : ChannelParams::automatic(gamma, tail_tol);
    const ChannelParams& p = r.params;
    r.tail_warning = p.tail_exceeds_tol();
    if (r.tail_warning)
        r.notes.push_back("warning: tail bound " + format_number(p.tail_bound()) + " exceeds tail_tol " + format_number(tail_tol) +
                          (truncation ? " at the requested N" : " (truncation capped at 512)"));

    const KrausSet ks = kraus_set(p);
    const double bound = p.tail_bound() + 1e-12;
    r.checks.push_back({"completeness defect (input levels 0,1)", ks.completeness_defect(), bound,
                        ks.completeness_defect() <= bound});
    const double choi_min = choi_min_eigenvalue_gram(ks);
    r.checks.push_back({"Choi min eigenvalue (lower limit)", choi_min, -choi_tolerance, choi_min >= -choi_tolerance});

    for (StateKind kind : {StateKind::ghz, StateKind::w}) {
        const std::string k(to_string(kind));
        const RouteResiduals res = route_residuals(kind, p, ks);
        r.checks.push_back({k + " route residual closed/purified", res.closed_vs_purified, route_tolerance,
                            res.closed_vs_purified <= route_tolerance});
        r.checks.push_back({k + " route residual closed/kraus", res.closed_vs_kraus, route_tolerance, res.closed_vs_kraus <= route_tolerance});
        r.checks.push_back({k + " route residual purified/kraus", res.purified_vs_kraus, route_tolerance,
                            res.purified_vs_kraus <= route_tolerance});

        const DensityOperator in = embedded_initial(kind, p);
        const double trace_loss = std::abs(apply_channel(in, ks, party::bob).trace() - in.trace());
        r.checks.push_back({k + " trace change", trace_loss, ks.completeness_defect() + 1e-12,
                            trace_loss <= ks.completeness_defect() + 1e-12});

        const double pd = purity_defect(thermalize(kind, p));
        r.checks.push_back({k + " purity defect |S(ABC) - S(B_II)|", pd, purity_tolerance, pd <= purity_tolerance});
    }

    // audit overlay, informational only
    r.notes.push_back("full-space completeness defect (all N+1 levels) = " + format_number(ks.full_space_defect()));
    r.notes.push_back("completeness defect with the printed tanh^2 prefactor = " +
                      format_number(kraus_set(p, KrausReading::printed_tanh_squared).completeness_defect()));
    for (StateKind kind : {StateKind::ghz, StateKind::w}) {
        const double fn = entanglement_fidelity_numeric(embedded_initial(kind, p), ks);
        const double fp = fidelity_closed_paper(kind, gamma);
        r.notes.push_back(std::string(to_string(kind)) + " fidelity numeric = " + format_number(fn) + ", printed = " + format_number(fp) +
                          ", gap = " + format_number(std::abs(fn - fp)));
    }
    if (gamma > 0.0) {
        const Vector spec = pt_spectrum(final_rho_ab(StateKind::w, p));
        const auto [lp, lm] = pt_spectrum_w_closed(gamma, 0);
        r.notes.push_back("W PT spectrum numeric min/max = " + format_number(spec(0)) + " / " + format_number(spec(spec.size() - 1)) +
                          ", printed lambda_0^-/lambda_0^+ = " + format_number(lm) + " / " + format_number(lp));
    }
    return r;
}

} // namespace horizon
