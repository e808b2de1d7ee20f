#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "relaysel/link.hpp"
#include "relaysel/netmodel.hpp"

using namespace relaysel;

namespace {

RcpcSchedule ladder() {
    RcpcSchedule s;
    s.rates = {4.0 / 5, 2.0 / 3, 4.0 / 7, 1.0 / 2, 1.0 / 3};
    s.decode_thresholds_db = {6, 4.5, 3.5, 2.5, 0.5};
    return s;
}

ChaseAccumulator fresh(double phi, std::size_t limit = 2) {
    ChaseAccumulator a;
    a.discard_threshold = phi;
    a.slot_limit = limit;
    return a;
}

}  // namespace

TEST_CASE("AMC mode selection, inclusive at the switching point") {
    const auto p = two_mode_policy(3, 9, 4);
    REQUIRE_NOTHROW(validate(p));
    CHECK(mode_for_gain(p, db_to_linear(3.9)).mode_id == 1);
    CHECK(mode_for_gain(p, db_to_linear(4.0)).mode_id == 2);
    CHECK(mode_for_gain(p, 100.0).mode_id == 2);
    CHECK(mode_for_gain(single_mode_policy(13), 1e9).mode_id == 1);
    CHECK(p.modes[0].coded_bits(1912) == doctest::Approx(5736));
    CHECK(p.modes[1].coded_bits(1912) == doctest::Approx(2868));
}

TEST_CASE("AMC policy validation") {
    auto p = two_mode_policy(3, 9, 4);
    p.switch_thresholds.clear();
    CHECK_THROWS(validate(p));
    p = two_mode_policy(9, 3, 4);
    CHECK_THROWS(validate(p));
    p = two_mode_policy(3, 9, 4);
    p.modes[1].code_rate = 1.0;
    CHECK_THROWS(validate(p));
}

TEST_CASE("Chase combining adds SNR, discards below phi, and counts every slot") {
    const auto p = two_mode_policy(3, 9, 4);
    const auto& m1 = p.modes[0];
    auto a = chase_update(fresh(0.25), 0.1, m1);  // discarded
    CHECK(a.slots_used == 1);
    CHECK(a.combined_snr == 0.0);
    CHECK(a.modes_used == 0u);
    CHECK_FALSE(decode_success_amc(a, p));
    a = chase_update(a, 1.5, m1);
    CHECK(a.slots_used == 2);
    CHECK(a.combined_snr == doctest::Approx(1.5));
    CHECK_THROWS_AS(chase_update(a, 1.0, m1), std::out_of_range);

    // A slot exactly at phi is kept.
    CHECK(chase_update(fresh(0.25), 0.25, m1).combined_snr == doctest::Approx(0.25));
}

TEST_CASE("governing threshold") {
    const auto p = two_mode_policy(3, 9, 4);
    const auto& m1 = p.modes[0];
    const auto& m2 = p.modes[1];
    auto only2 = chase_update(fresh(0), 5.0, m2);
    CHECK(governing_threshold(only2, p) == doctest::Approx(db_to_linear(9)));
    auto mixed = chase_update(only2, 1.0, m1);
    CHECK(governing_threshold(mixed, p) == doctest::Approx(db_to_linear(3)));
    auto only1 = chase_update(fresh(0), 1.0, m1);
    CHECK(governing_threshold(only1, p) == doctest::Approx(db_to_linear(3)));
    // Boundary: combined equal to the threshold decodes.
    auto edge = chase_update(fresh(0), db_to_linear(9), m2);
    CHECK(decode_success_amc(edge, p));
    CHECK(decode_success_amc(mixed, p));  // 6 >= 2
}

TEST_CASE("the six path coefficients of the two-slot AMC expression") {
    const double f = 1912.0 / 2044.0, k = 1912;
    const auto p = two_mode_policy(3, 9, 4);
    const double b1 = p.modes[0].coded_bits(k), b2 = p.modes[1].coded_bits(k);
    auto rate = [&](std::vector<double> bits) { return realized_rate_amc(bits, true, f, k); };
    CHECK(rate({b1}) == doctest::Approx(f / 3));
    CHECK(rate({b2}) == doctest::Approx(2 * f / 3));
    CHECK(rate({b2, b2}) == doctest::Approx(f / 3));
    CHECK(rate({b1, b1}) == doctest::Approx(f / 6));
    CHECK(rate({b1, b2}) == doctest::Approx(2 * f / 9));
    CHECK(rate({b2, b1}) == doctest::Approx(2 * f / 9));
    CHECK(realized_rate_amc(std::vector<double>{b1, b2}, false, f, k) == 0.0);
    const double sm = single_mode_policy(13).modes[0].coded_bits(k);
    CHECK(realized_rate_amc(std::vector<double>{sm}, true, f, k) == doctest::Approx(f / 2));
    CHECK(realized_rate_amc(std::vector<double>{sm, sm}, true, f, k) == doctest::Approx(f / 4));
}

TEST_CASE("RCPC schedule bits") {
    const auto s = ladder();
    REQUIRE_NOTHROW(validate(s));
    const std::vector<std::int64_t> cumulative{2390, 2868, 3346, 3824, 5736};
    const std::vector<std::int64_t> per_stage{2390, 478, 478, 478, 1912};
    for (std::size_t i = 1; i <= 5; ++i) {
        CHECK(rcpc_cumulative_bits(s, i) == cumulative[i - 1]);
        CHECK(rcpc_stage_bits(s, i) == per_stage[i - 1]);
    }
    CHECK_THROWS(rcpc_stage_bits(s, 0));
    CHECK_THROWS(rcpc_stage_bits(s, 6));
}

TEST_CASE("RCPC schedule validation") {
    auto s = ladder();
    s.rates[1] = 0.9;
    CHECK_THROWS(validate(s));
    s = ladder();
    s.decode_thresholds_db[2] = 5.0;
    CHECK_THROWS(validate(s));
    s = ladder();
    s.mother_codeword_bits = 5000;
    CHECK_THROWS(validate(s));
    s = ladder();
    s.info_bits = 1913;
    s.mother_codeword_bits = 5739;
    CHECK_THROWS(validate(s));  // 1913 * 5/4 is not whole
}

TEST_CASE("RCPC decoding uses the bits-weighted mean SNR") {
    const auto s = ladder();
    std::vector<RcpcSlot> slots{{db_to_linear(5.0), 2390}};
    CHECK_FALSE(rcpc_decode_success(slots, s, 1));
    slots.push_back({db_to_linear(7.0), 478});
    const double mean = (db_to_linear(5.0) * 2390 + db_to_linear(7.0) * 478) / 2868;
    CHECK(rcpc_combined_snr(slots, 0.0) == doctest::Approx(mean));
    CHECK(rcpc_decode_success(slots, s, 2));  // mean ~ 5.4 dB >= 4.5 dB
    // Discarding the weak first slot leaves only the strong increment.
    CHECK(rcpc_combined_snr(slots, db_to_linear(6.0)) == doctest::Approx(db_to_linear(7.0)));
    CHECK_FALSE(rcpc_decode_success(slots, s, 2, 1e9));
    CHECK_THROWS(rcpc_decode_success(slots, s, 3));
    // Exactly at threshold.
    CHECK(rcpc_decode_success(std::vector<RcpcSlot>{{db_to_linear(6.0), 2390}}, s, 1));
}

TEST_CASE("RCPC throughput formula") {
    const auto s = ladder();
    const double base = 1912.0 / (5736 + 6);
    CHECK(rcpc_rate_formula(1912, 5736, 6, 8, 0) == doctest::Approx(base));
    CHECK(rcpc_packet_rate(s, 2390, true) == doctest::Approx(base));
    // One increment of 478 bits: l_AV = 478 * 8 / 1912 = 2.
    CHECK(rcpc_packet_rate(s, 2868, true) == doctest::Approx(base * 8.0 / 10.0));
    CHECK(rcpc_packet_rate(s, 5736, false) == 0.0);

    std::vector<RcpcPacketRecord> records{{true, {2390}}, {true, {2390, 478}}, {false, {2390, 478, 478, 478, 1912}}};
    // Extra bits: 0 + 478 + 3346 -> mean 1274.67; l_AV = 1274.67 * 8 / 1912.
    const double l_av = (478.0 + 3346.0) / 3.0 * 8.0 / 1912.0;
    CHECK(rcpc_effective_rate(records, s) == doctest::Approx((2.0 / 3.0) * base * 8.0 / (8.0 + l_av)));
    CHECK_THROWS(rcpc_effective_rate(std::vector<RcpcPacketRecord>{}, s));
}
