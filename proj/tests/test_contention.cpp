#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relaysel/analytic.hpp"
#include "relaysel/contention.hpp"

using namespace relaysel;

namespace {

ContentionConfig id_config(std::vector<double> p, std::size_t minislots) {
    ContentionConfig c;
    c.minislots = minislots;
    c.contention_prob = std::move(p);
    return c;
}

std::vector<RelayState> all_decoded(std::vector<double> gains) {
    std::vector<RelayState> s;
    for (std::size_t i = 0; i < gains.size(); ++i) s.push_back({i, true, gains[i]});
    return s;
}

}  // namespace

TEST_CASE("strategy names round trip") {
    for (auto s : {Strategy::Id, Strategy::IdCsi1, Strategy::BestGain, Strategy::NearestDecoder, Strategy::SourceOnly})
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK_FALSE(parse_strategy("id").has_value());
}

TEST_CASE("eligibility needs the message and a gain strictly above eta") {
    std::vector<RelayState> s{{0, true, 2.0}, {1, false, 5.0}, {2, true, 1.0}, {3, true, 1.5}};
    CHECK(eligible_set(s, 1.0) == std::vector<std::size_t>{0, 3});
    CHECK(eligible_set(s, 0.0) == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("deterministic minislots") {
    Rng rng(1);
    const auto states = all_decoded({1, 1});
    const std::vector<std::size_t> one{0}, both{0, 1};

    auto out = run_contention(rng, one, states, id_config({1.0, 1.0}, 3));
    REQUIRE(out.size() == 3);
    for (const auto& s : out) {
        CHECK(s.kind == SlotResult::Kind::Winner);
        CHECK(s.relay_id == 0);
        CHECK_FALSE(s.flag_bit.has_value());
    }
    for (const auto& s : run_contention(rng, both, states, id_config({1.0, 1.0}, 2)))
        CHECK(s.kind == SlotResult::Kind::Collision);
    for (const auto& s : run_contention(rng, both, states, id_config({0.0, 0.0}, 2)))
        CHECK(s.kind == SlotResult::Kind::Empty);

    CHECK(select_transmitter(rng, {SlotResult::empty(), SlotResult::collision()}, id_config({}, 2)).is_source());
    CHECK(select_transmitter(rng, {SlotResult::collision(), SlotResult::winner(4)}, id_config({}, 2)) ==
          SelectionResult::of_relay(4));
}

TEST_CASE("flag bit follows beta_opp") {
    Rng rng(2);
    auto c = id_config({1.0, 1.0}, 1);
    c.strategy = Strategy::IdCsi1;
    c.beta_opp = 1.5;
    const auto states = all_decoded({2.0, 1.0});
    CHECK(run_contention(rng, std::vector<std::size_t>{0}, states, c)[0].flag_bit == true);
    CHECK(run_contention(rng, std::vector<std::size_t>{1}, states, c)[0].flag_bit == false);
}

TEST_CASE("ID-CSI-1 prefers flagged winners with probability q") {
    Rng rng(3);
    auto c = id_config({}, 2);
    c.strategy = Strategy::IdCsi1;
    c.beta_opp = 1.0;
    c.winner_bias = 0.75;
    const ContentionOutcome mixed{SlotResult::winner(0, true), SlotResult::winner(1, false)};
    constexpr int n = 200000;
    int flagged = 0;
    for (int i = 0; i < n; ++i) flagged += *select_transmitter(rng, mixed, c).relay == 0;
    const double se = std::sqrt(0.75 * 0.25 / n);
    CHECK(std::abs(static_cast<double>(flagged) / n - 0.75) < 4 * se);

    // No bias when every winner sits in one partition.
    const ContentionOutcome same{SlotResult::winner(0, false), SlotResult::winner(1, false)};
    int first = 0;
    for (int i = 0; i < n; ++i) first += *select_transmitter(rng, same, c).relay == 0;
    CHECK(std::abs(static_cast<double>(first) / n - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("slot weighting counts repeated wins, relay weighting does not") {
    Rng rng(4);
    const ContentionOutcome outcome{SlotResult::winner(0), SlotResult::winner(0), SlotResult::winner(1)};
    auto c = id_config({}, 3);
    constexpr int n = 200000;
    int zero = 0;
    for (int i = 0; i < n; ++i) zero += *select_transmitter(rng, outcome, c).relay == 0;
    CHECK(std::abs(static_cast<double>(zero) / n - 2.0 / 3.0) < 4 * std::sqrt(2.0 / 9.0 / n));
    c.weighting = WinnerWeighting::Relay;
    zero = 0;
    for (int i = 0; i < n; ++i) zero += *select_transmitter(rng, outcome, c).relay == 0;
    CHECK(std::abs(static_cast<double>(zero) / n - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("centralized baselines") {
    Topology t;
    t.relays = {{25, 10}, {75, -10}, {75, 10}};
    std::vector<RelayState> s{{0, true, 3.0}, {1, true, 1.0}, {2, true, 3.0}};
    CHECK(select_baseline(s, t, Strategy::BestGain) == SelectionResult::of_relay(0));  // tie -> lowest id
    CHECK(select_baseline(s, t, Strategy::NearestDecoder) == SelectionResult::of_relay(1));  // tie with 2
    s[1].decoded = false;
    CHECK(select_baseline(s, t, Strategy::NearestDecoder) == SelectionResult::of_relay(2));
    CHECK(select_baseline(s, t, Strategy::SourceOnly).is_source());
    for (auto& r : s) r.decoded = false;
    CHECK(select_baseline(s, t, Strategy::BestGain).is_source());
    CHECK_THROWS_AS(select_baseline(s, t, Strategy::Id), std::logic_error);
}

TEST_CASE("contention config validation") {
    auto c = id_config({0.5, 0.5}, 1);
    CHECK_NOTHROW(validate(c, 2));
    CHECK_THROWS(validate(c, 3));
    c.contention_prob = {0.5, 1.5};
    CHECK_THROWS(validate(c, 2));
    c = id_config({0.5}, 0);
    CHECK_THROWS(validate(c, 1));
    c = id_config({0.5}, 1);
    c.strategy = Strategy::IdCsi1;
    c.eta_opp = 2.0;
    c.beta_opp = 1.0;
    CHECK_THROWS(validate(c, 1));
    c.beta_opp = 3.0;
    c.winner_bias = 0.5;
    CHECK_THROWS(validate(c, 1));
}

// Decode states held for the whole contention period, as in the simulator.
TEST_CASE("empirical selection frequencies match the persistent enumeration") {
    AnalyticScenario s;
    s.g_sd = 1.0;
    s.g_sa = {1.0, 0.5, 2.0};
    s.g_ad = {1.0, 1.0, 1.0};
    s.gamma = 0.7;
    s.minislots = 3;
    s.contention_prob = {0.4, 0.7, 0.25};

    for (auto weighting : {WinnerWeighting::Slot, WinnerWeighting::Relay}) {
        const auto expected = enumerate_selection_probs(s, SourceMode::Single, DecodeModel::Persistent, weighting);
        auto c = id_config(s.contention_prob, s.minislots);
        c.weighting = weighting;
        Rng rng(99);
        constexpr int n = 300000;
        std::vector<int> hits(4, 0);
        for (int i = 0; i < n; ++i) {
            std::vector<RelayState> states(3);
            for (std::size_t a = 0; a < 3; ++a) states[a] = {a, rng.bernoulli(rho(s, a, SourceMode::Single)), 1.0};
            const auto outcome = run_contention(rng, eligible_set(states, 0.0), states, c);
            const auto sel = select_transmitter(rng, outcome, c);
            ++hits[sel.relay.value_or(3)];
        }
        for (std::size_t a = 0; a <= 3; ++a) {
            const double q = a < 3 ? expected.q_by_relay[a] : expected.q_none;
            const double freq = static_cast<double>(hits[a]) / n;
            CHECK(std::abs(freq - q) < 3 * std::sqrt(q * (1 - q) / n));
        }
    }
}
