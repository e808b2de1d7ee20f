#include "relaysel/netmodel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaysel {

double distance(const Position& a, const Position& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

void validate(const Topology& t) {
    auto finite = [](const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); };
    if (!finite(t.source) || !finite(t.destination)) throw std::invalid_argument("topology: non-finite endpoint");
    const double d_sd = t.source_destination_distance();
    if (!(d_sd > 0.0)) throw std::invalid_argument("topology: source and destination coincide");
    for (std::size_t i = 0; i < t.relays.size(); ++i) {
        const auto& r = t.relays[i];
        if (!finite(r)) throw std::invalid_argument("topology: relay " + std::to_string(i) + " has non-finite position");
        if (!(distance(r, t.destination) < d_sd))
            throw std::invalid_argument("topology: relay " + std::to_string(i) +
                                        " is not closer to the destination than the source");
    }
}

void validate(const ChannelParams& p) {
    if (!(p.carrier_frequency_hz > 0.0)) throw std::invalid_argument("channel: carrier_frequency_hz must be > 0");
    if (!(p.reference_distance_m > 0.0)) throw std::invalid_argument("channel: reference_distance_m must be > 0");
    if (!(p.path_loss_exponent > 0.0)) throw std::invalid_argument("channel: path_loss_exponent must be > 0");
    if (!(p.bandwidth_hz > 0.0)) throw std::invalid_argument("channel: bandwidth_hz must be > 0");
    if (!std::isfinite(p.noise_power_db) || !std::isfinite(p.tx_power_above_noise_db))
        throw std::invalid_argument("channel: power levels must be finite");
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

double wavelength(const ChannelParams& p) noexcept { return kSpeedOfLight / p.carrier_frequency_hz; }
double noise_linear(const ChannelParams& p) noexcept { return db_to_linear(p.noise_power_db); }
double tx_energy_linear(const ChannelParams& p) noexcept {
    return db_to_linear(p.noise_power_db + p.tx_power_above_noise_db);
}

double average_gain(const ChannelParams& p, double d) {
    if (!(d >= p.reference_distance_m))
        throw std::domain_error("average_gain: distance " + std::to_string(d) + " m is inside the reference distance");
    const double near_field = wavelength(p) / (4.0 * std::numbers::pi * p.reference_distance_m);
    return near_field * near_field * std::pow(d / p.reference_distance_m, -p.path_loss_exponent);
}

double average_received_power(const ChannelParams& p, double d) { return tx_energy_linear(p) * average_gain(p, d); }

ChannelParams with_target_snr(ChannelParams p, double d, double snr_db) {
    p.tx_power_above_noise_db = snr_db - linear_to_db(average_gain(p, d));
    return p;
}

Snr received_snr(double gain, const ChannelParams& p) noexcept {
    const double lin = tx_energy_linear(p) * gain / noise_linear(p);
    return {lin, linear_to_db(lin)};
}

FadingSample sample_block_fading(std::uint64_t stream_key, LinkId link, std::uint32_t slot_index, double mean_gain) {
    Rng rng(derive_key(stream_key, {link.from, link.to, slot_index}));
    return {rng.exponential(mean_gain), slot_index, link};
}

Topology place_relays_uniform(Rng& rng, std::size_t relay_count, double d_sd) {
    Topology t;
    t.destination = {d_sd, 0.0};
    t.relays.reserve(relay_count);
    while (t.relays.size() < relay_count) {
        Position p{rng.uniform() * d_sd, (rng.uniform() - 0.5) * 0.5 * d_sd};
        if (distance(p, t.destination) < d_sd) t.relays.push_back(p);
    }
    return t;
}

}  // namespace relaysel
