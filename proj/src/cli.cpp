#include "relaysel/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "relaysel/analytic.hpp"
#include "relaysel/config.hpp"
#include "relaysel/sim.hpp"

namespace relaysel {

namespace {

struct Options {
    std::string config;
    std::string out = "-";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::optional<double> grid_step;
    std::string target;
    std::string model = "perslot";
};

void row(std::ostream& out, const std::string& name, double value) {
    out << name << ',' << format_number(value) << '\n';
}

std::string relay_label(std::size_t i) { return "relay" + std::to_string(i + 1); }

void require_plan(const AppConfig& c, std::initializer_list<PlanKind> plans, const char* command) {
    if (!c.has_link) throw ConfigError(std::string(command) + ": config has no [link] section");
    for (PlanKind p : plans)
        if (c.experiment.link.kind == p) return;
    throw ConfigError(std::string(command) + ": not available for this link.plan");
}

void write_selection(std::ostream& out, const std::string& prefix, const SelectionProbs& q) {
    for (std::size_t a = 0; a < q.q_by_relay.size(); ++a) row(out, prefix + "_" + relay_label(a), q.q_by_relay[a]);
    row(out, prefix + "_none", q.q_none);
}

void cmd_approx(const AppConfig& c, std::ostream& out) {
    require_plan(c, {PlanKind::Amc, PlanKind::SingleMode}, "approx");
    const auto s = to_analytic_scenario(c);
    out << "quantity,value\n";
    row(out, "g_sd", s.g_sd);
    for (std::size_t a = 0; a < s.relay_count(); ++a) {
        row(out, "g_s_" + relay_label(a), s.g_sa[a]);
        row(out, "g_" + relay_label(a) + "_d", s.g_ad[a]);
    }
    if (c.experiment.link.kind == PlanKind::Amc) {
        const auto p = decode_probs_amc(s);
        row(out, "p11", p.p11);
        row(out, "p21", p.p21);
        row(out, "p12", p.p12);
        row(out, "p22", p.p22);
        write_selection(out, "q_mode1", selection_probs(s, SourceMode::Mode1));
        write_selection(out, "q_mode2", selection_probs(s, SourceMode::Mode2));
        row(out, "r_app_amc", r_app_amc(s));
    } else {
        const auto t = decode_probs_sm(s);
        row(out, "tau1", t.tau1);
        row(out, "tau2", t.tau2);
        write_selection(out, "q", selection_probs(s, SourceMode::Single));
        row(out, "r_app_sm", r_app_sm(s));
    }
}

void cmd_simulate(AppConfig c, const Options& o, std::ostream& out) {
    if (!c.has_link) throw ConfigError("simulate: config has no [link] section");
    auto& e = c.experiment;
    if (o.seed) e.seed = *o.seed;
    if (o.trials) e.trials = *o.trials;
    if (o.workers) e.workers = *o.workers;
    write_csv(out, run_sweep(e), e.seed);
}

void cmd_optimize(const AppConfig& c, const Options& o, std::ostream& out) {
    const double step = o.grid_step.value_or(c.grid_step);
    if (o.target == "contention") {
        require_plan(c, {PlanKind::Amc, PlanKind::SingleMode}, "optimize --target contention");
        const auto s = to_analytic_scenario(c);
        const bool amc = c.experiment.link.kind == PlanKind::Amc;
        const auto best = optimize_contention(s, amc ? Objective::Amc : Objective::SingleMode, step);
        out << "quantity,value\n";
        for (std::size_t a = 0; a < best.p.size(); ++a) row(out, "p_" + relay_label(a), best.p[a]);
        row(out, amc ? "r_app_amc" : "r_app_sm", best.value);
        return;
    }
    require_plan(c, {PlanKind::Amc}, "optimize --target switchpoint");
    const auto& link = c.experiment.link;
    const double step_db = o.grid_step.value_or(c.switchpoint_step_db);
    const auto s = to_analytic_scenario(c);
    const double n0 = noise_linear(prepare(c.experiment).channel);
    const auto points = static_cast<std::size_t>(std::floor((link.beta_db - link.alpha_db) / step_db + 1e-9)) + 1;
    std::vector<double> grid_db, grid;
    for (std::size_t i = 0; i < points; ++i) {
        grid_db.push_back(link.alpha_db + static_cast<double>(i) * step_db);
        grid.push_back(n0 * db_to_linear(grid_db.back()));
    }
    const auto best = optimize_switchpoint(s, grid);
    std::size_t idx = 0;
    while (grid[idx] != best.gamma_swp) ++idx;
    out << "quantity,value\n";
    row(out, "gamma_swp_db", grid_db[idx]);
    row(out, "r_app_amc", best.value);
}

void cmd_overhead(const AppConfig& c, std::ostream& out) {
    if (!c.overhead) throw ConfigError("overhead: config has no [overhead] section");
    const auto r = overhead_report(*c.overhead);
    auto us = [](std::int64_t ps) { return static_cast<double>(ps) / 1e6; };
    out << "quantity,value\n";
    row(out, "propagation_delay_us", us(r.propagation_delay_ps));
    row(out, "ack_interval_us", us(r.ack_interval_ps));
    row(out, "minislot_us", us(r.minislot_ps));
    row(out, "contention_us", us(r.contention_ps));
    row(out, "announce_us", us(r.announce_ps));
    row(out, "data_symbols", static_cast<double>(r.data_symbols));
    row(out, "data_time_us", us(r.data_time_ps));
    row(out, "guard_total_us", us(r.guard_total_ps));
    row(out, "data_interval_overhead_pct", r.data_interval_overhead_pct);
    row(out, "slot_overhead_pct", r.slot_overhead_pct);
}

void cmd_oracle(const AppConfig& c, const Options& o, std::ostream& out) {
    require_plan(c, {PlanKind::Amc, PlanKind::SingleMode}, "oracle");
    const auto s = to_analytic_scenario(c);
    const auto model = o.model == "persistent" ? DecodeModel::Persistent : DecodeModel::PerSlot;
    std::vector<std::pair<std::string, SourceMode>> modes;
    if (c.experiment.link.kind == PlanKind::Amc)
        modes = {{"mode1", SourceMode::Mode1}, {"mode2", SourceMode::Mode2}};
    else
        modes = {{"single", SourceMode::Single}};
    out << "source_mode,relay,closed_form,enumerated\n";
    for (const auto& [name, mode] : modes) {
        const auto closed = selection_probs(s, mode);
        const auto enumerated = enumerate_selection_probs(s, mode, model, c.experiment.contention.weighting);
        for (std::size_t a = 0; a < s.relay_count(); ++a)
            out << name << ',' << relay_label(a) << ',' << format_number(closed.q_by_relay[a]) << ','
                << format_number(enumerated.q_by_relay[a]) << '\n';
        out << name << ",none," << format_number(closed.q_none) << ',' << format_number(enumerated.q_none) << '\n';
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relay selection analysis and simulation", "relaysel"};
    app.require_subcommand(1, 1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file")->required();
        sub->add_option("--out", o.out, "output file, '-' for standard output");
    };
    auto* approx = app.add_subcommand("approx", "closed-form throughput approximations");
    common(approx);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials and sweeps, CSV output");
    common(simulate);
    simulate->add_option("--seed", o.seed, "override experiment.seed");
    simulate->add_option("--trials", o.trials, "override experiment.trials")->check(CLI::PositiveNumber);
    simulate->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    auto* optimize = app.add_subcommand("optimize", "grid search over contention probabilities or switching point");
    common(optimize);
    optimize->add_option("--target", o.target, "contention or switchpoint")
        ->required()
        ->check(CLI::IsMember({"contention", "switchpoint"}));
    optimize->add_option("--grid-step", o.grid_step, "grid step (probability, or dB for switchpoint)")
        ->check(CLI::PositiveNumber);
    auto* overhead = app.add_subcommand("overhead", "protocol overhead ratios");
    common(overhead);
    auto* oracle = app.add_subcommand("oracle", "enumerated vs closed-form selection probabilities");
    common(oracle);
    oracle->add_option("--model", o.model, "perslot or persistent")
        ->check(CLI::IsMember({"perslot", "persistent"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        const AppConfig config = parse_config(o.config);
        std::ofstream file;
        std::ostream* sink = &out;
        if (o.out != "-") {
            file.open(o.out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open '" + o.out + "' for writing");
            sink = &file;
        }
        if (*approx)
            cmd_approx(config, *sink);
        else if (*simulate)
            cmd_simulate(config, o, *sink);
        else if (*optimize)
            cmd_optimize(config, o, *sink);
        else if (*overhead)
            cmd_overhead(config, *sink);
        else
            cmd_oracle(config, o, *sink);
        sink->flush();
        if (!*sink) throw std::runtime_error("failed writing output");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace relaysel
