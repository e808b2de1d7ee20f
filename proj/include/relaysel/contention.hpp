#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "relaysel/netmodel.hpp"
#include "relaysel/rng.hpp"

namespace relaysel {

enum class Strategy { Id, IdCsi1, BestGain, NearestDecoder, SourceOnly };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;
constexpr bool uses_minislots(Strategy s) noexcept { return s == Strategy::Id || s == Strategy::IdCsi1; }

// How the source picks among winning minislots. Slot weighting draws a
// winning minislot uniformly, so a relay that won j slots is j times as
// likely; this matches the j/(K-m) factor of the closed form. Relay
// weighting draws uniformly over distinct winners. Both agree for K = 1.
enum class WinnerWeighting { Slot, Relay };

struct ContentionConfig {
    Strategy strategy = Strategy::Id;
    std::size_t minislots = 10;
    std::vector<double> contention_prob;  // one entry per relay
    double eta_opp = 0.0;                 // linear |h|^2 threshold
    double beta_opp = 0.0;                // linear |h|^2 threshold, ID-CSI-1 only
    double winner_bias = 0.75;            // q, ID-CSI-1 only
    WinnerWeighting weighting = WinnerWeighting::Slot;
};

void validate(const ContentionConfig& c, std::size_t relay_count);

struct RelayState {
    std::size_t relay_id = 0;
    bool decoded = false;
    double gain_to_destination = 0.0;  // |h_{i,d}|^2 for the upcoming slot
};

struct SlotResult {
    enum class Kind { Empty, Winner, Collision };
    Kind kind = Kind::Empty;
    std::size_t relay_id = 0;      // meaningful for Winner
    std::optional<bool> flag_bit;  // set only under ID-CSI-1

    static SlotResult empty() { return {}; }
    static SlotResult collision() { return {Kind::Collision, 0, std::nullopt}; }
    static SlotResult winner(std::size_t id, std::optional<bool> flag = std::nullopt) {
        return {Kind::Winner, id, flag};
    }
};

using ContentionOutcome = std::vector<SlotResult>;

struct SelectionResult {
    std::optional<std::size_t> relay;  // nullopt: the source transmits

    bool is_source() const noexcept { return !relay.has_value(); }
    static SelectionResult source() { return {}; }
    static SelectionResult of_relay(std::size_t id) { return {id}; }
    friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

// Relays that hold the message and whose gain to the destination is strictly
// above eta_opp. Returned in the order they appear in `states`.
std::vector<std::size_t> eligible_set(std::span<const RelayState> states, double eta_opp);

// One contention period of config.minislots minislots. `states` is indexed
// by relay_id and supplies the gains used for ID-CSI-1 flag bits.
ContentionOutcome run_contention(Rng& rng, std::span<const std::size_t> eligible, std::span<const RelayState> states,
                                 const ContentionConfig& config);

SelectionResult select_transmitter(Rng& rng, const ContentionOutcome& outcome, const ContentionConfig& config);

// Centralised selectors used as baselines. Ties go to the lowest relay_id.
SelectionResult select_baseline(std::span<const RelayState> states, const Topology& topology, Strategy strategy);

}  // namespace relaysel
