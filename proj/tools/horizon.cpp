// horizon: expansion-rate sweeps, negativity threshold and channel checks.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "horizon/sweep.hpp"

namespace {

namespace hz = horizon;

enum exit_code : int { ok = 0, usage = 1, tolerance = 2, io = 3 };

struct Flags {
    std::vector<std::string> states;
    std::vector<std::string> measures;
    std::string gamma;
    std::string truncation;
    double tail_tol = 0.0;
    bool tail_tol_set = false;
    std::string closed_form;
    std::string format;
    std::string out;
    std::string config;
    unsigned workers = 0;
    double tol = 1e-6;
};

std::vector<std::string> config_values(const std::multimap<std::string, std::string>& cfg, const std::string& key) {
    std::vector<std::string> v;
    auto [b, e] = cfg.equal_range(key);
    for (auto it = b; it != e; ++it) v.push_back(it->second);
    return v;
}

// Flags override the config file; repeatable flags replace the file's list.
void merge_config(Flags& f, CLI::App& cmd) {
    if (f.config.empty()) return;
    const auto cfg = hz::read_config_file(f.config);
    auto last = [&](const std::string& key) -> std::optional<std::string> {
        auto v = config_values(cfg, key);
        if (v.empty()) return std::nullopt;
        return v.back();
    };
    auto given = [&](const char* name) { return cmd.get_option_no_throw(name) && cmd.count(name) > 0; };

    if (!given("--state")) {
        const auto v = config_values(cfg, "state");
        if (!v.empty()) f.states = v;
    }
    if (!given("--measure")) {
        const auto v = config_values(cfg, "measure");
        if (!v.empty()) f.measures = v;
    }
    if (!given("--gamma")) if (auto v = last("gamma")) f.gamma = *v;
    if (!given("--truncation")) if (auto v = last("truncation")) f.truncation = *v;
    if (!given("--closed-form")) if (auto v = last("closed-form")) f.closed_form = *v;
    if (!given("--format")) if (auto v = last("format")) f.format = *v;
    if (!given("--out")) if (auto v = last("out")) f.out = *v;
    if (!given("--tail-tol")) {
        if (auto v = last("tail-tol")) {
            f.tail_tol = std::stod(*v);
            f.tail_tol_set = true;
        }
    }
    if (!given("--workers")) if (auto v = last("workers")) f.workers = static_cast<unsigned>(std::stoul(*v));
}

hz::SweepConfig build_sweep_config(const Flags& f) {
    hz::SweepConfig cfg;
    if (!f.states.empty()) {
        cfg.kinds.clear();
        for (const auto& s : f.states) cfg.kinds.push_back(hz::parse_state_kind(s));
    }
    if (!f.measures.empty()) {
        cfg.measures.clear();
        for (const auto& m : f.measures) {
            if (m == "all") {
                cfg.measures.assign(std::begin(hz::all_measures), std::end(hz::all_measures));
                break;
            }
            cfg.measures.push_back(hz::parse_measure(m));
        }
    }
    if (!f.gamma.empty()) cfg.grid = hz::GammaGrid::parse(f.gamma);
    if (!f.truncation.empty()) cfg.truncation = hz::parse_truncation(f.truncation);
    if (f.tail_tol_set) cfg.tail_tol = f.tail_tol;
    if (!f.closed_form.empty()) cfg.closed_form = hz::parse_closed_form_mode(f.closed_form);
    if (!f.format.empty()) cfg.format = hz::parse_output_format(f.format);
    cfg.output_path = f.out;
    cfg.workers = f.workers;
    cfg.validate();
    return cfg;
}

int run_sweep(const Flags& f) {
    const hz::SweepConfig cfg = build_sweep_config(f);
    const auto records = hz::run_sweep(cfg);
    double worst = 0.0;
    double worst_gamma = 0.0;
    for (const auto& r : records)
        if (r.tail_bound > cfg.tail_tol && r.tail_bound > worst) {
            worst = r.tail_bound;
            worst_gamma = r.gamma;
        }
    if (worst > 0.0)
        std::cerr << "warning: truncation tail bound exceeds tail_tol " << hz::format_number(cfg.tail_tol)
                  << " (worst " << hz::format_number(worst) << " at gamma " << hz::format_number(worst_gamma)
                  << "); see the tail_bound column\n";
    hz::emit(records, cfg.format, cfg.output_path);
    return ok;
}

int run_threshold(const Flags& f) {
    const auto kind = f.states.empty() ? hz::StateKind::w : hz::parse_state_kind(f.states.back());
    if (kind == hz::StateKind::ghz) {
        std::cerr << "threshold: the GHZ state has no negativity at any expansion rate (its partial transpose is\n"
                     "positive), so there is no threshold to find. Use --state w.\n";
        return usage;
    }
    const auto report = hz::find_threshold(kind, f.tol, f.tail_tol_set ? f.tail_tol : hz::default_tail_tol);
    std::cout << report.text();
    return ok;
}

int run_verify(const Flags& f) {
    double gamma = 0.5;
    if (!f.gamma.empty()) {
        std::size_t used = 0;
        gamma = std::stod(f.gamma, &used);
        if (used != f.gamma.size()) throw std::invalid_argument("verify: --gamma takes a single value");
    }
    const auto truncation = f.truncation.empty() ? std::nullopt : hz::parse_truncation(f.truncation);
    const auto report = hz::verify_channel(gamma, truncation, f.tail_tol_set ? f.tail_tol : hz::default_tail_tol);
    std::cout << report.text();
    if (report.tail_warning) std::cerr << "warning: tail bound exceeds tail_tol; results carry the bound above\n";
    return report.ok() ? ok : tolerance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"De Sitter horizon channel: entanglement measures of thermalized GHZ/W states"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--truncation", f.truncation, "Fock cutoff N: auto or a positive integer");
        cmd->add_option_function<double>(
            "--tail-tol", [&](double v) { f.tail_tol = v; f.tail_tol_set = true; }, "Truncation tail tolerance (default 1e-12)");
        cmd->add_option("--config", f.config, "key=value config file; flags take precedence");
    };

    auto* sweep = app.add_subcommand("sweep", "Sweep gamma and emit measure records");
    sweep->add_option("--state", f.states, "ghz or w (repeatable; default both)")->check(CLI::IsMember({"ghz", "w"}));
    sweep->add_option("--measure", f.measures, "fidelity, mi-ab, mi-abc, negativity or all (repeatable)")
        ->check(CLI::IsMember({"fidelity", "mi-ab", "mi-abc", "negativity", "all"}));
    sweep->add_option("--gamma", f.gamma, "MIN:MAX:STEP (default 0:2:0.01)");
    sweep->add_option("--closed-form", f.closed_form, "numeric, paper or both")->check(CLI::IsMember({"numeric", "paper", "both"}));
    sweep->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", f.out, "Output path (default stdout)");
    sweep->add_option("--workers", f.workers, "Worker threads (default: hardware concurrency)");
    add_common(sweep);

    auto* threshold = app.add_subcommand("threshold", "Find the gamma where W-state negativity vanishes");
    threshold->add_option("--state", f.states, "w (ghz is rejected)")->check(CLI::IsMember({"ghz", "w"}));
    threshold->add_option("--tol", f.tol, "Bisection tolerance in gamma (default 1e-6)");
    add_common(threshold);

    auto* verify = app.add_subcommand("verify", "Check CPTP properties and route equivalence at one gamma");
    verify->add_option("--gamma", f.gamma, "Expansion rate (default 0.5)");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        CLI::App* cmd = sweep->parsed() ? sweep : threshold->parsed() ? threshold : verify;
        merge_config(f, *cmd);
        if (sweep->parsed()) return run_sweep(f);
        if (threshold->parsed()) return run_threshold(f);
        return run_verify(f);
    } catch (const hz::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
}
