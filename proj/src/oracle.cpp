// Exhaustive enumeration of contention outcomes. Kept free of any binomial
// algebra so that it can check the closed-form selection probabilities.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaysel/analytic.hpp"

namespace relaysel {

namespace {

// Distribution of a single minislot: index a < n means relay a won,
// index n means nobody did (empty or collision).
using SlotDistribution = std::vector<double>;

// Every relay is independently one of {not decoded, decoded & silent,
// decoded & sends}; 3^n patterns.
SlotDistribution per_slot_distribution(const std::vector<double>& decode, const std::vector<double>& send) {
    const std::size_t n = decode.size();
    SlotDistribution dist(n + 1, 0.0);
    std::vector<int> state(n, 0);
    while (true) {
        double prob = 1.0;
        std::size_t senders = 0, who = 0;
        for (std::size_t i = 0; i < n; ++i) {
            switch (state[i]) {
                case 0: prob *= 1.0 - decode[i]; break;
                case 1: prob *= decode[i] * (1.0 - send[i]); break;
                default:
                    prob *= decode[i] * send[i];
                    ++senders;
                    who = i;
            }
        }
        dist[senders == 1 ? who : n] += prob;
        std::size_t pos = 0;
        while (pos < n && ++state[pos] == 3) state[pos++] = 0;
        if (pos == n) break;
    }
    return dist;
}

// Enumerates all ordered sequences of K minislot outcomes drawn iid from
// `slot` and accumulates the source's selection probabilities.
void accumulate_sequences(const SlotDistribution& slot, std::size_t K, WinnerWeighting weighting, double weight,
                          std::vector<double>& q) {
    const std::size_t outcomes = slot.size();
    const std::size_t none = outcomes - 1;
    std::vector<std::size_t> seq(K, 0);
    std::vector<std::size_t> wins(none, 0);
    while (true) {
        double prob = weight;
        std::fill(wins.begin(), wins.end(), 0);
        std::size_t winning_slots = 0;
        for (std::size_t k = 0; k < K && prob != 0.0; ++k) {
            prob *= slot[seq[k]];
            if (seq[k] != none) {
                ++wins[seq[k]];
                ++winning_slots;
            }
        }
        if (prob != 0.0) {
            if (winning_slots == 0) {
                q[none] += prob;
            } else if (weighting == WinnerWeighting::Slot) {
                for (std::size_t a = 0; a < none; ++a)
                    q[a] += prob * static_cast<double>(wins[a]) / static_cast<double>(winning_slots);
            } else {
                const auto distinct = static_cast<double>(std::count_if(wins.begin(), wins.end(),
                                                                        [](std::size_t w) { return w > 0; }));
                for (std::size_t a = 0; a < none; ++a)
                    if (wins[a] > 0) q[a] += prob / distinct;
            }
        }
        std::size_t pos = 0;
        while (pos < K && ++seq[pos] == outcomes) seq[pos++] = 0;
        if (pos == K) break;
    }
}

}  // namespace

SelectionProbs enumerate_selection_probs(const AnalyticScenario& s, SourceMode mode, DecodeModel model,
                                         WinnerWeighting weighting) {
    const std::size_t n = s.relay_count();
    const std::size_t K = s.minislots;
    if (model == DecodeModel::PerSlot && (n > 10 || K > 6))
        throw std::invalid_argument("enumerate_selection_probs: instance too large (K_r <= 10, K <= 6)");
    if (model == DecodeModel::Persistent && (n > 8 || K > 4))
        throw std::invalid_argument("enumerate_selection_probs: instance too large (K_r <= 8, K <= 4)");

    std::vector<double> decode(n);
    for (std::size_t a = 0; a < n; ++a) decode[a] = rho(s, a, mode);

    std::vector<double> q(n + 1, 0.0);
    if (model == DecodeModel::PerSlot) {
        accumulate_sequences(per_slot_distribution(decode, s.contention_prob), K, weighting, 1.0, q);
    } else {
        // Fix the decode pattern for the whole contention period, then treat
        // each minislot as a fresh transmit draw among the decoders.
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            double weight = 1.0;
            std::vector<double> fixed(n);
            for (std::size_t a = 0; a < n; ++a) {
                const bool has = (mask >> a) & 1U;
                weight *= has ? decode[a] : 1.0 - decode[a];
                fixed[a] = has ? 1.0 : 0.0;
            }
            if (weight == 0.0) continue;
            accumulate_sequences(per_slot_distribution(fixed, s.contention_prob), K, weighting, weight, q);
        }
    }

    SelectionProbs out;
    out.q_by_relay.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
    out.q_none = q[n];
    return out;
}

}  // namespace relaysel
