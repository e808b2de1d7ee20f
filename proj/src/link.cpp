#include "relaysel/link.hpp"

#include <cmath>
#include <stdexcept>

#include "relaysel/netmodel.hpp"

namespace relaysel {

double TransmissionMode::decode_threshold() const noexcept { return db_to_linear(decode_threshold_db); }

void validate(const AmcPolicy& policy) {
    if (policy.modes.empty()) throw std::invalid_argument("amc: at least one mode required");
    if (policy.modes.size() != policy.switch_thresholds.size() + 1)
        throw std::invalid_argument("amc: need exactly one switch threshold between consecutive modes");
    if (policy.modes.size() > 32) throw std::invalid_argument("amc: at most 32 modes");
    for (std::size_t i = 0; i < policy.modes.size(); ++i) {
        const auto& m = policy.modes[i];
        if (m.mode_id != static_cast<int>(i + 1)) throw std::invalid_argument("amc: mode ids must be 1..N in order");
        if (!(m.code_rate > 0.0 && m.code_rate < 1.0)) throw std::invalid_argument("amc: code rate outside (0, 1)");
        if (m.bits_per_symbol < 1) throw std::invalid_argument("amc: bits_per_symbol must be >= 1");
        if (!std::isfinite(m.decode_threshold_db)) throw std::invalid_argument("amc: decode threshold must be finite");
        if (i > 0 && m.decode_threshold_db < policy.modes[i - 1].decode_threshold_db)
            throw std::invalid_argument("amc: decode thresholds must be nondecreasing in mode index");
    }
    for (std::size_t i = 0; i < policy.switch_thresholds.size(); ++i) {
        if (!(policy.switch_thresholds[i] > 0.0)) throw std::invalid_argument("amc: switch thresholds must be > 0");
        if (i > 0 && !(policy.switch_thresholds[i] > policy.switch_thresholds[i - 1]))
            throw std::invalid_argument("amc: switch thresholds must be strictly increasing");
    }
}

AmcPolicy two_mode_policy(double lambda1_db, double lambda2_db, double gamma_swp_db) {
    AmcPolicy p;
    p.modes = {
        {1, "BPSK r=1/3", 1.0 / 3.0, 1, lambda1_db},
        {2, "QPSK r=2/3", 2.0 / 3.0, 2, lambda2_db},
    };
    p.switch_thresholds = {db_to_linear(gamma_swp_db)};
    return p;
}

AmcPolicy single_mode_policy(double gamma_db) {
    AmcPolicy p;
    p.modes = {{1, "16-QAM r=1/2", 0.5, 4, gamma_db}};
    return p;
}

const TransmissionMode& mode_for_gain(const AmcPolicy& policy, double received_snr) {
    std::size_t j = 0;
    while (j < policy.switch_thresholds.size() && received_snr >= policy.switch_thresholds[j]) ++j;
    return policy.modes[j];
}

ChaseAccumulator chase_update(const ChaseAccumulator& acc, double slot_snr, const TransmissionMode& mode) {
    if (acc.slots_used >= acc.slot_limit) throw std::out_of_range("chase_update: slot limit reached");
    ChaseAccumulator next = acc;
    ++next.slots_used;
    if (slot_snr < acc.discard_threshold) return next;
    next.combined_snr += slot_snr;
    next.modes_used |= 1U << (mode.mode_id - 1);
    return next;
}

double governing_threshold(const ChaseAccumulator& acc, const AmcPolicy& policy) {
    const std::uint32_t m = acc.modes_used;
    const bool single = m != 0 && (m & (m - 1)) == 0;
    if (single) {
        for (const auto& mode : policy.modes)
            if (acc.used_mode(mode.mode_id)) return mode.decode_threshold();
    }
    return policy.modes.front().decode_threshold();
}

bool decode_success_amc(const ChaseAccumulator& acc, const AmcPolicy& policy) {
    if (acc.modes_used == 0) return false;
    return acc.combined_snr >= governing_threshold(acc, policy);
}

double realized_rate_amc(std::span<const double> coded_bits_per_slot, bool success, double f, double info_bits) {
    if (!success) return 0.0;
    double total = 0.0;
    for (double b : coded_bits_per_slot) total += b;
    if (!(total > 0.0)) throw std::invalid_argument("realized_rate_amc: no coded bits");
    return f * info_bits / total;
}

double RcpcSchedule::decode_threshold(std::size_t stage) const {
    if (stage < 1 || stage > decode_thresholds_db.size()) throw std::out_of_range("rcpc: stage out of range");
    return db_to_linear(decode_thresholds_db[stage - 1]);
}

void validate(const RcpcSchedule& s) {
    if (s.rates.empty()) throw std::invalid_argument("rcpc: at least one rate required");
    if (s.rates.size() != s.decode_thresholds_db.size())
        throw std::invalid_argument("rcpc: one decode threshold per rate required");
    for (std::size_t i = 0; i < s.rates.size(); ++i) {
        if (!(s.rates[i] > 0.0 && s.rates[i] <= 1.0)) throw std::invalid_argument("rcpc: rate outside (0, 1]");
        if (i > 0 && !(s.rates[i] < s.rates[i - 1])) throw std::invalid_argument("rcpc: rates must strictly decrease");
        if (i > 0 && !(s.decode_thresholds_db[i] < s.decode_thresholds_db[i - 1]))
            throw std::invalid_argument("rcpc: decode thresholds must strictly increase with code rate");
    }
    if (s.info_bits <= 0 || s.mother_codeword_bits <= 0 || s.mother_memory < 0 || s.puncture_period <= 0)
        throw std::invalid_argument("rcpc: k, n, P must be positive and M nonnegative");
    const double mother = static_cast<double>(s.info_bits) / static_cast<double>(s.mother_codeword_bits);
    if (std::abs(mother - s.rates.back()) > 1e-9)
        throw std::invalid_argument("rcpc: k/n does not match the mother code rate");
    for (double r : s.rates) {
        const double bits = static_cast<double>(s.info_bits) / r;
        if (std::abs(bits - std::round(bits)) > 1e-6)
            throw std::invalid_argument("rcpc: info_bits / rate must be an integer for every rate");
    }
}

std::int64_t rcpc_cumulative_bits(const RcpcSchedule& s, std::size_t stage) {
    if (stage < 1 || stage > s.rates.size()) throw std::out_of_range("rcpc: stage out of range");
    return std::llround(static_cast<double>(s.info_bits) / s.rates[stage - 1]);
}

std::int64_t rcpc_stage_bits(const RcpcSchedule& s, std::size_t stage) {
    const auto total = rcpc_cumulative_bits(s, stage);
    return stage == 1 ? total : total - rcpc_cumulative_bits(s, stage - 1);
}

double rcpc_combined_snr(std::span<const RcpcSlot> slots, double discard_threshold) {
    double weighted = 0.0, bits = 0.0;
    for (const auto& s : slots) {
        if (s.slot_snr < discard_threshold) continue;
        weighted += s.slot_snr * s.coded_bits;
        bits += s.coded_bits;
    }
    return bits > 0.0 ? weighted / bits : 0.0;
}

bool rcpc_decode_success(std::span<const RcpcSlot> slots, const RcpcSchedule& schedule, std::size_t stage,
                         double discard_threshold) {
    if (stage < 1 || stage > schedule.stages() || slots.size() != stage)
        throw std::invalid_argument("rcpc_decode_success: need exactly `stage` slots");
    bool any_kept = false;
    for (const auto& s : slots) any_kept |= s.slot_snr >= discard_threshold;
    if (!any_kept) return false;
    return rcpc_combined_snr(slots, discard_threshold) >= schedule.decode_threshold(stage);
}

double rcpc_rate_formula(double info_bits, double mother_bits, double memory, double period, double l_av) {
    return (info_bits / (mother_bits + memory)) * (period / (period + l_av));
}

double rcpc_effective_rate(std::span<const RcpcPacketRecord> records, const RcpcSchedule& schedule) {
    if (records.empty()) throw std::invalid_argument("rcpc_effective_rate: no packet records");
    const double first = static_cast<double>(rcpc_stage_bits(schedule, 1));
    const double k = static_cast<double>(schedule.info_bits);
    double extra = 0.0, delivered = 0.0;
    for (const auto& r : records) {
        double sent = 0.0;
        for (auto b : r.stage_bits) sent += static_cast<double>(b);
        extra += sent - first;
        if (r.success) delivered += 1.0;
    }
    const double n_packets = static_cast<double>(records.size());
    const double l_av = extra / n_packets * schedule.puncture_period / k;
    return rcpc_rate_formula(k * delivered / n_packets, static_cast<double>(schedule.mother_codeword_bits),
                             schedule.mother_memory, schedule.puncture_period, l_av);
}

double rcpc_packet_rate(const RcpcSchedule& schedule, std::int64_t bits_sent, bool success) {
    if (!success) return 0.0;
    const double k = static_cast<double>(schedule.info_bits);
    const double l = static_cast<double>(bits_sent - rcpc_stage_bits(schedule, 1)) * schedule.puncture_period / k;
    return rcpc_rate_formula(k, static_cast<double>(schedule.mother_codeword_bits), schedule.mother_memory,
                             schedule.puncture_period, l);
}

}  // namespace relaysel
