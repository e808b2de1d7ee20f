#include <cmath>
#include <stdexcept>

#include "relaysel/analytic.hpp"
#include "relaysel/netmodel.hpp"

namespace relaysel {

namespace {

constexpr double kPicosPerMicro = 1e6;

std::int64_t to_ps(double us) { return std::llround(us * kPicosPerMicro); }

}  // namespace

OverheadReport overhead_report(const OverheadInputs& in) {
    for (double d : {in.training_us, in.ofdm_symbol_us, in.data_symbol_us, in.data_guard_us})
        if (!(d > 0.0)) throw std::invalid_argument("overhead: durations must be > 0");
    if (!(in.d_sd_m >= 0.0)) throw std::invalid_argument("overhead: distance must be >= 0");
    if (in.bits_per_data_symbol <= 0 || in.frame_length_octets < 0)
        throw std::invalid_argument("overhead: bad frame parameters");

    OverheadReport r;
    std::int64_t delay = to_ps(in.d_sd_m / kSpeedOfLight * 1e6);
    if (in.delay_resolution_us > 0.0) {
        const std::int64_t step = to_ps(in.delay_resolution_us);
        delay = (delay + step / 2) / step * step;
    }
    r.propagation_delay_ps = delay;

    // One OFDM symbol plus training for every control message.
    const std::int64_t control = to_ps(in.training_us) + to_ps(in.ofdm_symbol_us) + delay;
    r.ack_interval_ps = control;
    r.minislot_ps = control;
    r.contention_ps = static_cast<std::int64_t>(in.minislots) * control;
    r.announce_ps = control;

    // SERVICE (16) + payload + tail (6) bits.
    const std::int64_t payload_bits = 16 + 8 * in.frame_length_octets + 6;
    r.data_symbols = (payload_bits + in.bits_per_data_symbol - 1) / in.bits_per_data_symbol;
    r.data_time_ps = r.data_symbols * to_ps(in.data_symbol_us);
    r.guard_total_ps = r.data_symbols * to_ps(in.data_guard_us);

    const std::int64_t data_overhead = r.guard_total_ps + to_ps(in.training_us) + delay;
    const std::int64_t slot_overhead = data_overhead + r.ack_interval_ps + r.contention_ps + r.announce_ps;
    r.data_interval_overhead_pct = 100.0 * static_cast<double>(data_overhead) / static_cast<double>(r.data_time_ps);
    r.slot_overhead_pct = 100.0 * static_cast<double>(slot_overhead) / static_cast<double>(r.data_time_ps);
    return r;
}

}  // namespace relaysel
