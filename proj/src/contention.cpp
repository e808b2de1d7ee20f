#include "relaysel/contention.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace relaysel {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 5> kStrategyNames{{
    {Strategy::Id, "ID"},
    {Strategy::IdCsi1, "ID_CSI_1"},
    {Strategy::BestGain, "BEST_GAIN"},
    {Strategy::NearestDecoder, "NEAREST_DECODER"},
    {Strategy::SourceOnly, "SOURCE_ONLY"},
}};

std::size_t pick_uniform(Rng& rng, std::span<const std::size_t> candidates, WinnerWeighting weighting) {
    if (weighting == WinnerWeighting::Slot) return candidates[rng.below(candidates.size())];
    std::vector<std::size_t> distinct(candidates.begin(), candidates.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    return distinct[rng.below(distinct.size())];
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
    for (const auto& [value, name] : kStrategyNames)
        if (value == s) return name;
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (const auto& [value, n] : kStrategyNames)
        if (n == name) return value;
    return std::nullopt;
}

void validate(const ContentionConfig& c, std::size_t relay_count) {
    if (uses_minislots(c.strategy)) {
        if (c.minislots < 1) throw std::invalid_argument("contention: minislots must be >= 1");
        if (c.contention_prob.size() != relay_count)
            throw std::invalid_argument("contention: expected " + std::to_string(relay_count) +
                                        " contention probabilities, got " + std::to_string(c.contention_prob.size()));
    }
    for (double p : c.contention_prob)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("contention: probability outside [0, 1]");
    if (c.strategy == Strategy::IdCsi1) {
        if (!(c.winner_bias > 0.5 && c.winner_bias <= 1.0))
            throw std::invalid_argument("contention: winner_bias must lie in (0.5, 1]");
        if (!(c.beta_opp > c.eta_opp)) throw std::invalid_argument("contention: beta_opp must exceed eta_opp");
    }
    if (!(c.eta_opp >= 0.0)) throw std::invalid_argument("contention: eta_opp must be >= 0");
}

std::vector<std::size_t> eligible_set(std::span<const RelayState> states, double eta_opp) {
    std::vector<std::size_t> out;
    for (const auto& s : states)
        if (s.decoded && s.gain_to_destination > eta_opp) out.push_back(s.relay_id);
    return out;
}

ContentionOutcome run_contention(Rng& rng, std::span<const std::size_t> eligible, std::span<const RelayState> states,
                                 const ContentionConfig& config) {
    if (!uses_minislots(config.strategy))
        throw std::logic_error("run_contention: strategy does not contend");
    const bool with_flag = config.strategy == Strategy::IdCsi1;
    ContentionOutcome outcome;
    outcome.reserve(config.minislots);
    for (std::size_t slot = 0; slot < config.minislots; ++slot) {
        std::size_t senders = 0;
        std::size_t last = 0;
        for (std::size_t id : eligible) {
            if (rng.bernoulli(config.contention_prob[id])) {
                ++senders;
                last = id;
            }
        }
        if (senders == 0) {
            outcome.push_back(SlotResult::empty());
        } else if (senders == 1) {
            std::optional<bool> flag;
            if (with_flag) flag = states[last].gain_to_destination > config.beta_opp;
            outcome.push_back(SlotResult::winner(last, flag));
        } else {
            outcome.push_back(SlotResult::collision());
        }
    }
    return outcome;
}

SelectionResult select_transmitter(Rng& rng, const ContentionOutcome& outcome, const ContentionConfig& config) {
    std::vector<std::size_t> all, flagged, unflagged;
    for (const auto& s : outcome) {
        if (s.kind != SlotResult::Kind::Winner) continue;
        all.push_back(s.relay_id);
        (s.flag_bit.value_or(false) ? flagged : unflagged).push_back(s.relay_id);
    }
    if (all.empty()) return SelectionResult::source();

    if (config.strategy == Strategy::IdCsi1 && !flagged.empty() && !unflagged.empty()) {
        const auto& pool = rng.bernoulli(config.winner_bias) ? flagged : unflagged;
        return SelectionResult::of_relay(pick_uniform(rng, pool, config.weighting));
    }
    return SelectionResult::of_relay(pick_uniform(rng, all, config.weighting));
}

SelectionResult select_baseline(std::span<const RelayState> states, const Topology& topology, Strategy strategy) {
    switch (strategy) {
        case Strategy::SourceOnly:
            return SelectionResult::source();
        case Strategy::BestGain: {
            std::optional<std::size_t> best;
            double best_gain = -1.0;
            for (const auto& s : states) {
                if (!s.decoded) continue;
                if (s.gain_to_destination > best_gain || (s.gain_to_destination == best_gain && s.relay_id < *best)) {
                    best = s.relay_id;
                    best_gain = s.gain_to_destination;
                }
            }
            return {best};
        }
        case Strategy::NearestDecoder: {
            std::optional<std::size_t> best;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& s : states) {
                if (!s.decoded) continue;
                const double d = distance(topology.relays.at(s.relay_id), topology.destination);
                if (d < best_d || (d == best_d && s.relay_id < *best)) {
                    best = s.relay_id;
                    best_d = d;
                }
            }
            return {best};
        }
        case Strategy::Id:
        case Strategy::IdCsi1:
            break;
    }
    throw std::logic_error("select_baseline: contention strategies go through select_transmitter");
}

}  // namespace relaysel
