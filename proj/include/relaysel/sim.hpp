#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relaysel/contention.hpp"
#include "relaysel/link.hpp"
#include "relaysel/netmodel.hpp"

namespace relaysel {

enum class PlanKind { Amc, SingleMode, Rcpc };

// Where the relays come from: an explicit list, or `uniform_count` relays
// placed once per experiment from the experiment seed.
struct TopologySource {
    double d_sd_m = 100.0;
    std::vector<Position> relays;
    std::optional<std::size_t> uniform_count;
};

struct ContentionSpec {
    Strategy strategy = Strategy::Id;
    std::size_t minislots = 10;
    std::vector<double> contention_prob;  // one per relay, or a single value for all
    std::optional<double> eta_opp_db;     // |h|^2 in dB; absent means every decoder contends
    std::optional<double> beta_opp_db;    // |h|^2 in dB
    double winner_bias = 0.75;
    WinnerWeighting weighting = WinnerWeighting::Slot;
};

// Decode thresholds are dB SNR.
struct LinkPlan {
    PlanKind kind = PlanKind::Amc;
    double alpha_db = 3.0;
    double beta_db = 9.0;
    double gamma_db = 13.0;
    double gamma_swp_db = 4.0;
    std::optional<double> phi_db;  // absent: nothing is discarded
    double f = 1.0;
    double info_bits = 1912.0;
    RcpcSchedule rcpc;
};

struct Sweep {
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentConfig {
    TopologySource topology;
    ChannelParams channel;
    std::optional<double> target_snr_db;  // overrides tx power: mean SNR at the destination
    ContentionSpec contention;
    LinkPlan link;
    std::size_t slot_limit = 2;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    // Undecoded relays also listen to relay retransmissions.
    bool relay_overhearing = false;
    std::optional<Sweep> sweep;
    std::vector<Strategy> strategies;  // empty: just contention.strategy
};

// Sets a numeric parameter addressed by its configuration key
// ("contention.p", "channel.target_snr_db", ...). Throws on unknown names.
void apply_parameter(ExperimentConfig& config, const std::string& name, double value);
bool is_sweepable(const std::string& name);

// Everything a trial needs, resolved to linear units once per run.
struct PreparedExperiment {
    ExperimentConfig config;
    Topology topology;
    ChannelParams channel;
    ContentionConfig contention;
    AmcPolicy policy;  // AMC or single-mode plans
    double discard_threshold = 0.0;
    double snr_per_gain = 0.0;  // tx energy / N0
    std::size_t slot_horizon = 0;
    double mean_sd = 0.0;
    std::vector<double> mean_sr, mean_rd;
    std::vector<std::vector<double>> mean_rr;  // only filled with relay_overhearing
};

PreparedExperiment prepare(const ExperimentConfig& config);

struct TrialRecord {
    std::size_t slots_used = 0;
    std::vector<SelectionResult> transmitters;  // per slot; slot 1 is always the source
    std::vector<int> modes;                     // per slot; 0 for RCPC
    bool success = false;
    double coded_bits = 0.0;
    double realized_rate = 0.0;
    double combined_snr = 0.0;         // what the final decode test saw
    double governing_threshold = 0.0;  // and what it was compared against
};

// Draws fresh block fading for every link in each slot from `trial_key`.
TrialRecord simulate_packet(std::uint64_t trial_key, const PreparedExperiment& experiment);

// Relays that already hold the message keep it; the others decode iff their
// SNR meets `threshold` (linear).
void relay_decode_update(std::vector<bool>& decoded, const std::vector<double>& relay_snr, double threshold);

struct ThroughputEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    double ci95 = 0.0;
};

ThroughputEstimate estimate(const std::vector<double>& samples);

std::uint64_t trial_key(std::uint64_t seed, std::size_t sweep_index, std::size_t trial_index) noexcept;

// Runs config.trials packets on config.workers threads. The result does not
// depend on the worker count: each trial owns its stream and the reduction
// runs in trial order.
ThroughputEstimate run_trials(const PreparedExperiment& experiment, std::size_t sweep_index);

struct SweepRow {
    std::string parameter;
    std::optional<double> value;
    Strategy strategy = Strategy::Id;
    ThroughputEstimate estimate;
};

// One row per (strategy, sweep value); without a sweep, one row per strategy.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::uint64_t seed);
std::string format_number(double v);

}  // namespace relaysel
