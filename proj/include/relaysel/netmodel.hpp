#pragma once

#include <cstdint>
#include <vector>

#include "relaysel/rng.hpp"

namespace relaysel {

// Rounded to 3e8 m/s; the published gain and delay figures use this value.
inline constexpr double kSpeedOfLight = 3.0e8;

struct Position {
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

double distance(const Position& a, const Position& b) noexcept;

// Source sits at the origin. Every relay must be strictly closer to the
// destination than the source is.
struct Topology {
    Position source{};
    Position destination{100.0, 0.0};
    std::vector<Position> relays;

    std::size_t relay_count() const noexcept { return relays.size(); }
    double source_destination_distance() const noexcept { return distance(source, destination); }
};

void validate(const Topology& t);

struct ChannelParams {
    double carrier_frequency_hz = 2.4e9;
    double reference_distance_m = 1.0;
    double path_loss_exponent = 3.0;
    double noise_power_db = -134.0;
    double tx_power_above_noise_db = 110.0;
    double bandwidth_hz = 9e6;
};

void validate(const ChannelParams& p);

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

double wavelength(const ChannelParams& p) noexcept;
double noise_linear(const ChannelParams& p) noexcept;
// Linear transmit energy, identical for every node in every slot.
double tx_energy_linear(const ChannelParams& p) noexcept;

// E(|h|^2) = (lambda_c / (4 pi d0))^2 (d / d0)^-mu. Path loss is folded into
// the fading gain. Throws std::domain_error for d < d0.
double average_gain(const ChannelParams& p, double d);

// |G|^2 = tx energy * E(|h|^2), the mean received power.
double average_received_power(const ChannelParams& p, double d);

// Returns a copy of p whose transmit power gives the requested mean SNR at
// distance d (used by the sweeps that are parameterised by destination SNR).
ChannelParams with_target_snr(ChannelParams p, double d, double snr_db);

struct Snr {
    double linear = 0.0;
    double db = 0.0;
};

Snr received_snr(double gain, const ChannelParams& p) noexcept;

// Node numbering used for link identities: 0 is the source, 1 the
// destination, relays start at 2.
using NodeId = std::uint32_t;
inline constexpr NodeId kSourceNode = 0;
inline constexpr NodeId kDestinationNode = 1;
constexpr NodeId relay_node(std::size_t relay_index) noexcept { return static_cast<NodeId>(relay_index + 2); }

struct LinkId {
    NodeId from = kSourceNode;
    NodeId to = kDestinationNode;
    friend bool operator==(const LinkId&, const LinkId&) = default;
};

struct FadingSample {
    double gain = 0.0;  // |h|^2, path loss included
    std::uint32_t slot_index = 0;
    LinkId link{};
};

// Block-fading draw. The gain is a pure function of (stream_key, link, slot):
// constant within a slot, independent across slots and links.
FadingSample sample_block_fading(std::uint64_t stream_key, LinkId link, std::uint32_t slot_index, double mean_gain);

// Relays uniform in the strip [0, d_sd] x [-d_sd/4, d_sd/4], rejection
// sampled so that every relay is closer than d_sd to the destination.
Topology place_relays_uniform(Rng& rng, std::size_t relay_count, double d_sd);

}  // namespace relaysel
