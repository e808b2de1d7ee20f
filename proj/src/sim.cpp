#include "relaysel/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace relaysel {

namespace {

constexpr std::uint64_t kTopologyStream = 0x7470;
constexpr std::uint64_t kContentionStream = 0x6374;

struct ParameterSetter {
    const char* name;
    void (*apply)(ExperimentConfig&, double);
};

std::size_t to_count(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument(std::string(what) + " must be a whole number");
    return static_cast<std::size_t>(v);
}

const ParameterSetter kSetters[] = {
    {"contention.p", [](ExperimentConfig& c, double v) { c.contention.contention_prob = {v}; }},
    {"contention.minislots",
     [](ExperimentConfig& c, double v) { c.contention.minislots = to_count(v, "contention.minislots"); }},
    {"contention.eta_opp_db", [](ExperimentConfig& c, double v) { c.contention.eta_opp_db = v; }},
    {"contention.beta_opp_db", [](ExperimentConfig& c, double v) { c.contention.beta_opp_db = v; }},
    {"contention.winner_bias", [](ExperimentConfig& c, double v) { c.contention.winner_bias = v; }},
    {"channel.target_snr_db", [](ExperimentConfig& c, double v) { c.target_snr_db = v; }},
    {"channel.tx_power_above_noise_db",
     [](ExperimentConfig& c, double v) {
         c.channel.tx_power_above_noise_db = v;
         c.target_snr_db.reset();
     }},
    {"topology.uniform_relays",
     [](ExperimentConfig& c, double v) { c.topology.uniform_count = to_count(v, "topology.uniform_relays"); }},
    {"link.alpha_db", [](ExperimentConfig& c, double v) { c.link.alpha_db = v; }},
    {"link.beta_db", [](ExperimentConfig& c, double v) { c.link.beta_db = v; }},
    {"link.gamma_db", [](ExperimentConfig& c, double v) { c.link.gamma_db = v; }},
    {"link.gamma_swp_db", [](ExperimentConfig& c, double v) { c.link.gamma_swp_db = v; }},
    {"link.phi_db", [](ExperimentConfig& c, double v) { c.link.phi_db = v; }},
    {"experiment.slot_limit",
     [](ExperimentConfig& c, double v) { c.slot_limit = to_count(v, "experiment.slot_limit"); }},
};

double fade(std::uint64_t key, NodeId from, NodeId to, std::uint32_t slot, double mean) {
    return sample_block_fading(key, {from, to}, slot, mean).gain;
}

// One receiver's view of the packet: the destination, or a relay that is
// still trying to recover the message.
class Receiver {
public:
    explicit Receiver(const PreparedExperiment& ex) : ex_(&ex) {
        acc_.discard_threshold = ex.discard_threshold;
        acc_.slot_limit = ex.slot_horizon;
    }

    // Returns true when the message is recovered after this slot.
    bool receive(double snr, std::size_t stage, const TransmissionMode* mode) {
        if (ex_->config.link.kind == PlanKind::Rcpc) {
            slots_.push_back({snr, static_cast<double>(rcpc_stage_bits(ex_->config.link.rcpc, stage))});
            combined_ = rcpc_combined_snr(slots_, ex_->discard_threshold);
            threshold_ = ex_->config.link.rcpc.decode_threshold(stage);
            return rcpc_decode_success(slots_, ex_->config.link.rcpc, stage, ex_->discard_threshold);
        }
        acc_ = chase_update(acc_, snr, *mode);
        combined_ = acc_.combined_snr;
        threshold_ = governing_threshold(acc_, ex_->policy);
        return decode_success_amc(acc_, ex_->policy);
    }

    double combined() const noexcept { return combined_; }
    double threshold() const noexcept { return threshold_; }

private:
    const PreparedExperiment* ex_;
    ChaseAccumulator acc_;
    std::vector<RcpcSlot> slots_;
    double combined_ = 0.0;
    double threshold_ = 0.0;
};

}  // namespace

bool is_sweepable(const std::string& name) {
    return std::any_of(std::begin(kSetters), std::end(kSetters), [&](const auto& s) { return name == s.name; });
}

void apply_parameter(ExperimentConfig& config, const std::string& name, double value) {
    for (const auto& s : kSetters) {
        if (name == s.name) {
            s.apply(config, value);
            return;
        }
    }
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

PreparedExperiment prepare(const ExperimentConfig& config) {
    PreparedExperiment ex;
    ex.config = config;

    if (config.topology.uniform_count) {
        Rng rng(derive_key(config.seed, {kTopologyStream}));
        ex.topology = place_relays_uniform(rng, *config.topology.uniform_count, config.topology.d_sd_m);
    } else {
        ex.topology.destination = {config.topology.d_sd_m, 0.0};
        ex.topology.relays = config.topology.relays;
    }
    validate(ex.topology);
    const std::size_t n = ex.topology.relay_count();

    validate(config.channel);
    ex.channel = config.target_snr_db ? with_target_snr(config.channel, config.topology.d_sd_m, *config.target_snr_db)
                                      : config.channel;

    const auto& cs = config.contention;
    ex.contention.strategy = cs.strategy;
    ex.contention.minislots = cs.minislots;
    ex.contention.contention_prob = cs.contention_prob.size() == 1 ? std::vector<double>(n, cs.contention_prob[0])
                                                                   : cs.contention_prob;
    if (!uses_minislots(cs.strategy) && ex.contention.contention_prob.empty())
        ex.contention.contention_prob.assign(n, 0.0);
    ex.contention.eta_opp = cs.eta_opp_db ? db_to_linear(*cs.eta_opp_db) : 0.0;
    ex.contention.beta_opp =
        cs.beta_opp_db ? db_to_linear(*cs.beta_opp_db) : std::numeric_limits<double>::infinity();
    ex.contention.winner_bias = cs.winner_bias;
    ex.contention.weighting = cs.weighting;
    validate(ex.contention, n);

    const auto& lp = config.link;
    if (!(lp.f > 0.0 && lp.f <= 1.0)) throw std::invalid_argument("link: f must lie in (0, 1]");
    if (!(lp.info_bits > 0.0)) throw std::invalid_argument("link: info_bits must be > 0");
    switch (lp.kind) {
        case PlanKind::Amc:
            ex.policy = two_mode_policy(lp.alpha_db, lp.beta_db, lp.gamma_swp_db);
            validate(ex.policy);
            break;
        case PlanKind::SingleMode:
            ex.policy = single_mode_policy(lp.gamma_db);
            validate(ex.policy);
            break;
        case PlanKind::Rcpc:
            validate(lp.rcpc);
            break;
    }
    ex.discard_threshold = lp.phi_db ? db_to_linear(*lp.phi_db) : 0.0;

    if (config.slot_limit < 1) throw std::invalid_argument("experiment: slot_limit must be >= 1");
    if (config.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (config.workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
    ex.slot_horizon = lp.kind == PlanKind::Rcpc ? std::min(config.slot_limit, lp.rcpc.stages()) : config.slot_limit;

    ex.snr_per_gain = tx_energy_linear(ex.channel) / noise_linear(ex.channel);
    const auto& t = ex.topology;
    ex.mean_sd = average_gain(ex.channel, distance(t.source, t.destination));
    for (const auto& r : t.relays) {
        ex.mean_sr.push_back(average_gain(ex.channel, distance(t.source, r)));
        ex.mean_rd.push_back(average_gain(ex.channel, distance(r, t.destination)));
    }
    if (config.relay_overhearing) {
        ex.mean_rr.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    ex.mean_rr[i][j] =
                        average_gain(ex.channel, std::max(distance(t.relays[i], t.relays[j]),
                                                          ex.channel.reference_distance_m));
    }
    return ex;
}

void relay_decode_update(std::vector<bool>& decoded, const std::vector<double>& relay_snr, double threshold) {
    for (std::size_t i = 0; i < decoded.size(); ++i)
        if (!decoded[i] && relay_snr[i] >= threshold) decoded[i] = true;
}

TrialRecord simulate_packet(std::uint64_t key, const PreparedExperiment& ex) {
    const auto& cfg = ex.config;
    const std::size_t n = ex.topology.relay_count();
    const bool rcpc = cfg.link.kind == PlanKind::Rcpc;
    Rng contention_rng(derive_key(key, {kContentionStream}));

    TrialRecord rec;
    Receiver destination(ex);
    std::vector<bool> decoded(n, false);
    std::vector<Receiver> relay_rx;
    if (cfg.relay_overhearing) relay_rx.assign(n, Receiver(ex));
    std::vector<RelayState> states(n);
    std::vector<double> relay_snr(n);
    std::vector<double> bits;

    for (std::size_t stage = 1; stage <= ex.slot_horizon; ++stage) {
        const auto slot = static_cast<std::uint32_t>(stage);
        SelectionResult tx = SelectionResult::source();
        double gain = 0.0;
        if (stage == 1) {
            gain = fade(key, kSourceNode, kDestinationNode, slot, ex.mean_sd);
        } else {
            // The NACK opening this slot lets every relay measure its gain to
            // the destination for the slot ahead.
            for (std::size_t i = 0; i < n; ++i)
                states[i] = {i, decoded[i], fade(key, relay_node(i), kDestinationNode, slot, ex.mean_rd[i])};
            if (uses_minislots(ex.contention.strategy)) {
                const auto eligible = eligible_set(states, ex.contention.eta_opp);
                const auto outcome = run_contention(contention_rng, eligible, states, ex.contention);
                tx = select_transmitter(contention_rng, outcome, ex.contention);
            } else {
                tx = select_baseline(states, ex.topology, ex.contention.strategy);
            }
            gain = tx.is_source() ? fade(key, kSourceNode, kDestinationNode, slot, ex.mean_sd)
                                  : states[*tx.relay].gain_to_destination;
        }

        const double snr = ex.snr_per_gain * gain;
        const TransmissionMode* mode = rcpc ? nullptr : &mode_for_gain(ex.policy, snr);
        const bool success = destination.receive(snr, stage, mode);
        bits.push_back(rcpc ? static_cast<double>(rcpc_stage_bits(cfg.link.rcpc, stage))
                            : mode->coded_bits(cfg.link.info_bits));
        rec.transmitters.push_back(tx);
        rec.modes.push_back(mode ? mode->mode_id : 0);
        rec.slots_used = stage;
        rec.combined_snr = destination.combined();
        rec.governing_threshold = destination.threshold();

        // Relays listening to this slot's transmission.
        const NodeId sender = tx.is_source() ? kSourceNode : relay_node(*tx.relay);
        if (cfg.relay_overhearing) {
            for (std::size_t i = 0; i < n; ++i) {
                if (decoded[i] || (tx.relay && *tx.relay == i)) continue;
                const double mean = tx.is_source() ? ex.mean_sr[i] : ex.mean_rr[*tx.relay][i];
                const double s = ex.snr_per_gain * fade(key, sender, relay_node(i), slot, mean);
                if (relay_rx[i].receive(s, stage, mode)) decoded[i] = true;
            }
        } else if (stage == 1) {
            for (std::size_t i = 0; i < n; ++i)
                relay_snr[i] = ex.snr_per_gain * fade(key, kSourceNode, relay_node(i), slot, ex.mean_sr[i]);
            relay_decode_update(decoded, relay_snr,
                                rcpc ? cfg.link.rcpc.decode_threshold(1) : mode->decode_threshold());
        }

        if (success) {
            rec.success = true;
            break;
        }
    }

    for (double b : bits) rec.coded_bits += b;
    rec.realized_rate = rcpc ? rcpc_packet_rate(cfg.link.rcpc, static_cast<std::int64_t>(rec.coded_bits), rec.success)
                             : realized_rate_amc(bits, rec.success, cfg.link.f, cfg.link.info_bits);
    return rec;
}

ThroughputEstimate estimate(const std::vector<double>& samples) {
    ThroughputEstimate e;
    e.trials = samples.size();
    if (samples.empty()) return e;
    double sum = 0.0;
    for (double x : samples) sum += x;
    e.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - e.mean) * (x - e.mean);
        const double var = ss / static_cast<double>(samples.size() - 1);
        e.stderr_ = std::sqrt(var / static_cast<double>(samples.size()));
    }
    e.ci95 = 1.96 * e.stderr_;
    return e;
}

std::uint64_t trial_key(std::uint64_t seed, std::size_t sweep_index, std::size_t trial_index) noexcept {
    return derive_key(seed, {sweep_index, trial_index});
}

ThroughputEstimate run_trials(const PreparedExperiment& ex, std::size_t sweep_index) {
    const std::size_t trials = ex.config.trials;
    const std::size_t workers = std::min(ex.config.workers, trials);
    std::vector<double> rates(trials);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            rates[i] = simulate_packet(trial_key(ex.config.seed, sweep_index, i), ex).realized_rate;
    };
    if (workers <= 1) {
        work(0, trials);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (trials + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(trials, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return estimate(rates);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
    std::vector<Strategy> strategies = config.strategies;
    if (strategies.empty()) strategies.push_back(config.contention.strategy);

    std::vector<SweepRow> rows;
    for (Strategy s : strategies) {
        ExperimentConfig base = config;
        base.contention.strategy = s;
        if (!config.sweep) {
            rows.push_back({"none", std::nullopt, s, run_trials(prepare(base), 0)});
            continue;
        }
        const auto& sw = *config.sweep;
        for (std::size_t i = 0; i < sw.values.size(); ++i) {
            ExperimentConfig point = base;
            apply_parameter(point, sw.parameter, sw.values[i]);
            rows.push_back({sw.parameter, sw.values[i], s, run_trials(prepare(point), i)});
        }
    }
    return rows;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::uint64_t seed) {
    out << "sweep_param,sweep_value,trials,mean_throughput,stderr,ci95,seed,strategy\n";
    for (const auto& r : rows) {
        out << r.parameter << ',' << (r.value ? format_number(*r.value) : std::string()) << ',' << r.estimate.trials
            << ',' << format_number(r.estimate.mean) << ',' << format_number(r.estimate.stderr_) << ','
            << format_number(r.estimate.ci95) << ',' << seed << ',' << to_string(r.strategy) << '\n';
    }
}

}  // namespace relaysel
