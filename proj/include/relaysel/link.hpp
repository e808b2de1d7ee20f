#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace relaysel {

// A modulation/code-rate pair. Decoding is an SNR-threshold test: a receiver
// holding combined SNR >= decode threshold recovers the message.
struct TransmissionMode {
    int mode_id = 1;  // 1-based; mode 1 carries the mother code
    std::string label;
    double code_rate = 0.5;
    int bits_per_symbol = 1;
    double decode_threshold_db = 0.0;

    double decode_threshold() const noexcept;  // linear SNR
    // Coded bits needed to carry `info_bits` information bits.
    double coded_bits(double info_bits) const noexcept { return info_bits / code_rate; }
};

// Modes ordered by index; switch_thresholds[j] (linear SNR) is the lower
// edge of modes[j + 1]. A received SNR equal to a threshold selects the
// upper mode.
struct AmcPolicy {
    std::vector<TransmissionMode> modes;
    std::vector<double> switch_thresholds;
};

void validate(const AmcPolicy& policy);

AmcPolicy two_mode_policy(double lambda1_db, double lambda2_db, double gamma_swp_db);
AmcPolicy single_mode_policy(double gamma_db);

const TransmissionMode& mode_for_gain(const AmcPolicy& policy, double received_snr);

// Chase combining modelled as SNR addition. Packets received below the
// discard threshold are dropped but still consume a slot.
struct ChaseAccumulator {
    double combined_snr = 0.0;
    double discard_threshold = 0.0;  // phi, linear SNR
    std::size_t slots_used = 0;
    std::uint32_t modes_used = 0;  // bit (mode_id - 1) set when that mode contributed
    std::size_t slot_limit = 2;

    bool used_mode(int mode_id) const noexcept { return (modes_used >> (mode_id - 1)) & 1U; }
    friend bool operator==(const ChaseAccumulator&, const ChaseAccumulator&) = default;
};

ChaseAccumulator chase_update(const ChaseAccumulator& acc, double slot_snr, const TransmissionMode& mode);

// The governing threshold is the mode's own when a single mode contributed;
// any mixture is decoded on the mother code, i.e. against mode 1.
double governing_threshold(const ChaseAccumulator& acc, const AmcPolicy& policy);
bool decode_success_amc(const ChaseAccumulator& acc, const AmcPolicy& policy);

// f * k / (total coded bits) on success, 0 otherwise.
double realized_rate_amc(std::span<const double> coded_bits_per_slot, bool success, double f, double info_bits);

struct RcpcSchedule {
    std::vector<double> rates;  // strictly decreasing, last is the mother rate
    std::vector<double> decode_thresholds_db;
    int mother_memory = 6;       // M
    int puncture_period = 8;     // P
    std::int64_t info_bits = 1912;          // k
    std::int64_t mother_codeword_bits = 5736;  // n

    std::size_t stages() const noexcept { return rates.size(); }
    double decode_threshold(std::size_t stage) const;  // linear SNR, stage is 1-based
};

void validate(const RcpcSchedule& s);

// Coded bits sent in `stage` (1-based): the full rate-R_1 codeword first,
// then the increment that lowers the rate to R_stage.
std::int64_t rcpc_stage_bits(const RcpcSchedule& s, std::size_t stage);
std::int64_t rcpc_cumulative_bits(const RcpcSchedule& s, std::size_t stage);

struct RcpcSlot {
    double slot_snr = 0.0;  // linear
    double coded_bits = 0.0;
};

double rcpc_combined_snr(std::span<const RcpcSlot> slots, double discard_threshold);

// Bits-weighted mean SNR over the kept slots against the threshold of
// R_stage. A history where every slot was discarded never decodes.
bool rcpc_decode_success(std::span<const RcpcSlot> slots, const RcpcSchedule& schedule, std::size_t stage,
                         double discard_threshold = 0.0);

// (k / (n + M)) * (P / (P + l_av)).
double rcpc_rate_formula(double info_bits, double mother_bits, double memory, double period, double l_av);

struct RcpcPacketRecord {
    bool success = false;
    std::vector<std::int64_t> stage_bits;  // bits sent in each stage actually used
};

// Aggregate effective rate. l_AV is the mean number of bits sent beyond the
// first stage per P information bits, averaged over every attempted packet;
// only delivered packets count toward k.
double rcpc_effective_rate(std::span<const RcpcPacketRecord> records, const RcpcSchedule& schedule);

// Per-packet version of the same quantity, used for Monte Carlo means.
double rcpc_packet_rate(const RcpcSchedule& schedule, std::int64_t bits_sent, bool success);

}  // namespace relaysel
