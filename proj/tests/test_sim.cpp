#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "relaysel/analytic.hpp"
#include "relaysel/sim.hpp"

using namespace relaysel;

namespace {

ExperimentConfig two_relay_single_mode() {
    ExperimentConfig c;
    c.topology.relays = {{25, 10}, {75, -10}};
    c.contention.minislots = 1;
    c.contention.contention_prob = {1.0, 0.0};
    c.link.kind = PlanKind::SingleMode;
    c.link.gamma_db = 13;
    c.link.phi_db = -6;
    c.link.f = 1912.0 / 2050.0;
    c.trials = 20000;
    c.seed = 5;
    return c;
}

ExperimentConfig rcpc_strip() {
    ExperimentConfig c;
    c.topology.uniform_count = 8;
    c.target_snr_db = 2;
    c.contention.minislots = 3;
    c.contention.contention_prob = {0.3};
    c.contention.eta_opp_db = -91;
    c.link.kind = PlanKind::Rcpc;
    c.link.rcpc.rates = {4.0 / 5, 2.0 / 3, 4.0 / 7, 1.0 / 2, 1.0 / 3};
    c.link.rcpc.decode_thresholds_db = {6, 4.5, 3.5, 2.5, 0.5};
    c.slot_limit = 5;
    c.trials = 4000;
    c.seed = 9;
    return c;
}

}  // namespace

TEST_CASE("strong direct link decodes in one slot") {
    auto c = two_relay_single_mode();
    c.channel.tx_power_above_noise_db = 200;
    const auto ex = prepare(c);
    const auto r = simulate_packet(trial_key(1, 0, 0), ex);
    CHECK(r.success);
    CHECK(r.slots_used == 1);
    CHECK(r.transmitters.front().is_source());
    CHECK(r.realized_rate == doctest::Approx(c.link.f / 2));
    CHECK(r.coded_bits == doctest::Approx(3824));
}

TEST_CASE("source only with one slot and a hopeless threshold fails") {
    auto c = two_relay_single_mode();
    c.contention.strategy = Strategy::SourceOnly;
    c.slot_limit = 1;
    c.link.gamma_db = 300;
    const auto ex = prepare(c);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto r = simulate_packet(trial_key(1, 0, i), ex);
        CHECK_FALSE(r.success);
        CHECK(r.realized_rate == 0.0);
        CHECK(r.slots_used == 1);
    }
}

TEST_CASE("relay decode state is absorbing and inclusive") {
    std::vector<bool> decoded{true, false, false};
    relay_decode_update(decoded, {0.0, 2.0, 1.999}, 2.0);
    CHECK(decoded == std::vector<bool>{true, true, false});
}

TEST_CASE("relay decode rates match rho") {
    AnalyticScenario s;
    s.g_sd = 1.0;
    s.g_sa = {2.02e-11, 9.09e-13};
    s.g_ad = s.g_sa;
    s.alpha = db_to_linear(-134.0 + 3.0);
    s.contention_prob = {1, 1};
    const ChannelParams ch;
    const double energy = tx_energy_linear(ch), n0 = noise_linear(ch);
    constexpr int n = 1000000;
    std::vector<int> hits(2, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<bool> decoded(2, false);
        std::vector<double> snr(2);
        for (std::size_t a = 0; a < 2; ++a)
            snr[a] = energy *
                     sample_block_fading(trial_key(3, 0, i), {kSourceNode, relay_node(a)}, 1, s.g_sa[a] / energy).gain /
                     n0;
        relay_decode_update(decoded, snr, db_to_linear(3.0));
        for (std::size_t a = 0; a < 2; ++a) hits[a] += decoded[a];
    }
    for (std::size_t a = 0; a < 2; ++a)
        CHECK(std::abs(static_cast<double>(hits[a]) / n - rho(s, a, SourceMode::Mode1)) < 0.003);
}

TEST_CASE("source-only single mode matches the two-slot Chase oracle") {
    auto c = two_relay_single_mode();
    c.contention.strategy = Strategy::SourceOnly;
    c.trials = 1000000;
    const auto ex = prepare(c);
    const auto est = run_trials(ex, 0);
    const double g = ex.snr_per_gain * ex.mean_sd;  // mean SNR
    const double gamma = db_to_linear(13), phi = db_to_linear(-6), f = c.link.f;
    const double expected = f / 2 * oracle::tail(gamma, g) + f / 4 * oracle::chase_second_slot(gamma, phi, g);
    CHECK(std::abs(est.mean - expected) < 3 * est.stderr_);
}

TEST_CASE("selection frequencies in the protocol match the persistent enumeration") {
    ExperimentConfig c;
    c.topology.relays = {{40, 5}, {60, -5}, {80, 0}};
    c.contention.minislots = 3;
    c.contention.contention_prob = {0.5, 0.4, 0.6};
    c.link.kind = PlanKind::SingleMode;
    c.link.gamma_db = 13;
    c.channel.tx_power_above_noise_db = 104;
    c.seed = 21;
    const auto ex = prepare(c);

    AnalyticScenario s;
    s.g_sd = 1.0;
    for (double m : ex.mean_sr) s.g_sa.push_back(ex.snr_per_gain * m);
    s.g_ad = s.g_sa;
    s.gamma = db_to_linear(13);
    s.minislots = 3;
    s.contention_prob = {0.5, 0.4, 0.6};
    const auto expected = enumerate_selection_probs(s, SourceMode::Single, DecodeModel::Persistent);

    std::vector<int> hits(4, 0);
    int rounds = 0;
    for (std::size_t i = 0; i < 300000; ++i) {
        const auto r = simulate_packet(trial_key(c.seed, 0, i), ex);
        if (r.transmitters.size() < 2) continue;
        ++rounds;
        ++hits[r.transmitters[1].relay.value_or(3)];
    }
    REQUIRE(rounds > 100000);
    for (std::size_t a = 0; a <= 3; ++a) {
        const double q = a < 3 ? expected.q_by_relay[a] : expected.q_none;
        CHECK(std::abs(static_cast<double>(hits[a]) / rounds - q) < 3 * std::sqrt(q * (1 - q) / rounds));
    }
}

TEST_CASE("no trial reports success below its governing threshold") {
    for (auto kind : {PlanKind::Amc, PlanKind::SingleMode, PlanKind::Rcpc}) {
        auto c = kind == PlanKind::Rcpc ? rcpc_strip() : two_relay_single_mode();
        c.link.kind = kind;
        if (kind == PlanKind::Amc) c.contention.contention_prob = {0.0, 1.0};
        c.slot_limit = kind == PlanKind::Rcpc ? 5 : 3;
        const auto ex = prepare(c);
        for (std::size_t i = 0; i < 20000; ++i) {
            const auto r = simulate_packet(trial_key(c.seed, 0, i), ex);
            CHECK(r.slots_used <= ex.slot_horizon);
            CHECK(r.transmitters.size() == r.slots_used);
            CHECK(r.transmitters.front().is_source());
            if (r.success) {
                CHECK(r.combined_snr >= r.governing_threshold);
                CHECK(r.realized_rate > 0.0);
            } else {
                CHECK(r.realized_rate == 0.0);
            }
        }
    }
}

TEST_CASE("AMC trial records carry per-slot modes") {
    auto c = two_relay_single_mode();
    c.link.kind = PlanKind::Amc;
    c.contention.contention_prob = {0.0, 1.0};
    const auto ex = prepare(c);
    bool saw[3] = {false, false, false};
    for (std::size_t i = 0; i < 2000; ++i) {
        const auto r = simulate_packet(trial_key(2, 0, i), ex);
        for (int m : r.modes) saw[m] = true;
        if (r.success && r.slots_used == 1) CHECK(r.realized_rate == doctest::Approx(c.link.f * (r.modes[0] == 1 ? 1.0 / 3 : 2.0 / 3)));
    }
    CHECK(saw[1]);
    CHECK(saw[2]);
}

TEST_CASE("results do not depend on the worker count") {
    auto c = rcpc_strip();
    c.workers = 1;
    const auto one = run_trials(prepare(c), 3);
    c.workers = 3;
    const auto three = run_trials(prepare(c), 3);
    CHECK(one.mean == three.mean);
    CHECK(one.stderr_ == three.stderr_);
}

TEST_CASE("a one-value sweep equals a direct run") {
    auto c = rcpc_strip();
    const auto direct = run_sweep(c);
    c.sweep = Sweep{"contention.p", {0.3}};
    const auto swept = run_sweep(c);
    REQUIRE(direct.size() == 1);
    REQUIRE(swept.size() == 1);
    CHECK(direct[0].estimate.mean == swept[0].estimate.mean);
    CHECK(swept[0].parameter == "contention.p");
}

TEST_CASE("strategies share random numbers") {
    auto c = rcpc_strip();
    c.strategies = {Strategy::SourceOnly, Strategy::SourceOnly, Strategy::BestGain};
    const auto rows = run_sweep(c);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].estimate.mean == rows[1].estimate.mean);
    CHECK(rows[2].estimate.mean > rows[0].estimate.mean);
}

TEST_CASE("sweepable parameters") {
    ExperimentConfig c;
    apply_parameter(c, "channel.target_snr_db", 4);
    CHECK(c.target_snr_db == 4.0);
    apply_parameter(c, "contention.minislots", 3);
    CHECK(c.contention.minislots == 3);
    apply_parameter(c, "topology.uniform_relays", 12);
    CHECK(c.topology.uniform_count == 12u);
    CHECK_THROWS(apply_parameter(c, "contention.minislots", 2.5));
    CHECK_THROWS(apply_parameter(c, "nope", 1));
    CHECK(is_sweepable("contention.eta_opp_db"));
    CHECK_FALSE(is_sweepable("experiment.seed"));
}

TEST_CASE("estimate statistics") {
    const auto e = estimate({1.0, 2.0, 3.0, 4.0});
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.ci95 == doctest::Approx(1.96 * e.stderr_));
    CHECK(e.trials == 4);
    CHECK(estimate({}).trials == 0);
}

TEST_CASE("CSV layout") {
    std::vector<SweepRow> rows{{"none", std::nullopt, Strategy::Id, {0.123456789, 1e-4, 10, 1.96e-4}},
                               {"contention.p", 0.05, Strategy::BestGain, {0.5, 0.0, 10, 0.0}}};
    std::ostringstream out;
    write_csv(out, rows, 42);
    CHECK(out.str() ==
          "sweep_param,sweep_value,trials,mean_throughput,stderr,ci95,seed,strategy\n"
          "none,,10,0.123457,0.0001,0.000196,42,ID\n"
          "contention.p,0.05,10,0.5,0,0,42,BEST_GAIN\n");
}

TEST_CASE("invalid experiments are rejected") {
    auto c = two_relay_single_mode();
    c.trials = 0;
    CHECK_THROWS(prepare(c));
    c = two_relay_single_mode();
    c.slot_limit = 0;
    CHECK_THROWS(prepare(c));
    c = two_relay_single_mode();
    c.contention.contention_prob = {0.5, 0.5, 0.5};
    CHECK_THROWS(prepare(c));
    c = rcpc_strip();
    c.link.rcpc.rates.pop_back();
    CHECK_THROWS(prepare(c));
}
