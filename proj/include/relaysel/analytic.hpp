#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "relaysel/contention.hpp"

namespace relaysel {

// Inputs of the two-slot throughput approximations. Every threshold is an
// absolute received power on the same scale as the |G|^2 values (a dB SNR
// threshold times the linear noise power). The closed forms carry no
// eta_opp term, so every decoding relay may contend.
struct AnalyticScenario {
    double g_sd = 0.0;
    std::vector<double> g_sa;  // |G_{s,a}|^2 per relay
    std::vector<double> g_ad;  // |G_{a,d}|^2 per relay
    double alpha = 0.0;        // mode 1 decode threshold
    double beta = 0.0;         // mode 2 decode threshold
    double phi = 0.0;          // Chase discard threshold
    double gamma = 0.0;        // single-mode decode threshold
    double gamma_swp = 0.0;    // AMC switching point
    double f = 1.0;            // outer-code effective rate
    std::size_t minislots = 1;
    std::vector<double> contention_prob;

    std::size_t relay_count() const noexcept { return g_sa.size(); }
};

void validate(const AnalyticScenario& s);

// Which transmission the relays just overheard: AMC mode 1, AMC mode 2, or
// the single-mode scheme.
enum class SourceMode { Mode1, Mode2, Single };

double rho(const AnalyticScenario& s, std::size_t relay, SourceMode mode);
// Probability that `relay` alone transmits in a given minislot.
double win_probability(const AnalyticScenario& s, std::size_t relay, SourceMode mode);
double q_selected(const AnalyticScenario& s, std::size_t relay, SourceMode mode);

struct SelectionProbs {
    std::vector<double> q_by_relay;
    double q_none = 1.0;
};

SelectionProbs selection_probs(const AnalyticScenario& s, SourceMode mode);

// Brute-force selection probabilities, independent of the closed form.
// PerSlot draws every relay's decode state afresh in each minislot, which is
// the independence the closed form assumes. Persistent fixes decode states
// for the whole contention period, which is what the simulator does; the two
// coincide for K = 1 or when every rho is 0 or 1.
enum class DecodeModel { PerSlot, Persistent };

SelectionProbs enumerate_selection_probs(const AnalyticScenario& s, SourceMode mode,
                                         DecodeModel model = DecodeModel::PerSlot,
                                         WinnerWeighting weighting = WinnerWeighting::Slot);

struct AmcDecodeProbs {
    double p11 = 0.0;  // slot 1, mode 1
    double p21 = 0.0;  // slot 1, mode 2
    double p12 = 0.0;  // slot 2, mode 1
    double p22 = 0.0;  // slot 2, mode 2
};

AmcDecodeProbs decode_probs_amc(const AnalyticScenario& s);
double r_app_amc(const AnalyticScenario& s);

struct SingleModeProbs {
    double tau1 = 0.0;
    double tau2 = 0.0;
};

SingleModeProbs decode_probs_sm(const AnalyticScenario& s);
double r_app_sm(const AnalyticScenario& s);

enum class Objective { SingleMode, Amc };

struct ContentionOptimum {
    std::vector<double> p;
    double value = 0.0;
};

// Exhaustive grid over [0, 1]^K_r; ties resolve to the lexicographically
// smallest vector. K_r is capped at 4.
ContentionOptimum optimize_contention(const AnalyticScenario& s, Objective objective, double grid_step = 0.01);

struct SwitchpointOptimum {
    double gamma_swp = 0.0;
    double value = 0.0;
};

// Grid argmax of r_app_amc over the supplied switching points (absolute
// power, each >= alpha); ties go to the earliest grid entry.
SwitchpointOptimum optimize_switchpoint(const AnalyticScenario& s, const std::vector<double>& grid);

struct OverheadInputs {
    double d_sd_m = 100.0;
    double training_us = 20.0;
    double ofdm_symbol_us = 4.0;
    double data_symbol_us = 3.2;
    double data_guard_us = 0.8;
    std::size_t minislots = 3;
    std::int64_t frame_length_octets = 2048;  // the PLCP LENGTH field
    std::int64_t bits_per_data_symbol = 24;
    // The propagation delay is quoted at this resolution (0 keeps it exact).
    double delay_resolution_us = 0.1;
};

// Durations are integer picoseconds so that the ratios stay exact until the
// final conversion to a percentage.
struct OverheadReport {
    std::int64_t propagation_delay_ps = 0;
    std::int64_t ack_interval_ps = 0;
    std::int64_t minislot_ps = 0;
    std::int64_t contention_ps = 0;
    std::int64_t announce_ps = 0;
    std::int64_t data_symbols = 0;
    std::int64_t data_time_ps = 0;
    std::int64_t guard_total_ps = 0;
    double data_interval_overhead_pct = 0.0;
    double slot_overhead_pct = 0.0;
};

OverheadReport overhead_report(const OverheadInputs& in);

}  // namespace relaysel
