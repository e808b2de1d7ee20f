#include "relaysel/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relaysel {

namespace {

double tail(double threshold, double mean_power) { return std::exp(-threshold / mean_power); }

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double threshold_for(const AnalyticScenario& s, SourceMode mode) {
    switch (mode) {
        case SourceMode::Mode1: return s.alpha;
        case SourceMode::Mode2: return s.beta;
        case SourceMode::Single: return s.gamma;
    }
    return s.gamma;
}

void check_relay(const AnalyticScenario& s, std::size_t relay) {
    if (relay >= s.relay_count()) throw std::out_of_range("relay index " + std::to_string(relay) + " out of range");
}

}  // namespace

void validate(const AnalyticScenario& s) {
    if (!(s.g_sd > 0.0)) throw std::invalid_argument("scenario: g_sd must be > 0");
    if (s.g_ad.size() != s.g_sa.size() || s.contention_prob.size() != s.g_sa.size())
        throw std::invalid_argument("scenario: g_sa, g_ad and contention_prob must have one entry per relay");
    for (std::size_t i = 0; i < s.g_sa.size(); ++i) {
        if (!(s.g_sa[i] > 0.0) || !(s.g_ad[i] > 0.0)) throw std::invalid_argument("scenario: relay gains must be > 0");
        if (!(s.contention_prob[i] >= 0.0 && s.contention_prob[i] <= 1.0))
            throw std::invalid_argument("scenario: contention probability outside [0, 1]");
    }
    for (double t : {s.alpha, s.beta, s.phi, s.gamma, s.gamma_swp})
        if (!(t >= 0.0)) throw std::invalid_argument("scenario: thresholds must be >= 0");
    if (!(s.f > 0.0 && s.f <= 1.0)) throw std::invalid_argument("scenario: f must lie in (0, 1]");
    if (s.minislots < 1) throw std::invalid_argument("scenario: minislots must be >= 1");
}

double rho(const AnalyticScenario& s, std::size_t relay, SourceMode mode) {
    check_relay(s, relay);
    return tail(threshold_for(s, mode), s.g_sa[relay]);
}

// p_a rho_a times the probability that no other relay transmits; each other
// relay is silent either because it did not decode or because it decoded and
// chose not to send.
double win_probability(const AnalyticScenario& s, std::size_t relay, SourceMode mode) {
    double u = s.contention_prob.at(relay) * rho(s, relay, mode);
    for (std::size_t c = 0; c < s.relay_count(); ++c)
        if (c != relay) u *= 1.0 - s.contention_prob[c] * rho(s, c, mode);
    return u;
}

// Sum over j won minislots and m minislots without a winner; the remaining
// K - j - m minislots went to other relays, and the source picks one of the
// K - m winning minislots uniformly.
double q_selected(const AnalyticScenario& s, std::size_t relay, SourceMode mode) {
    check_relay(s, relay);
    const std::size_t K = s.minislots;
    double total_win = 0.0;
    for (std::size_t c = 0; c < s.relay_count(); ++c) total_win += win_probability(s, c, mode);
    const double u = win_probability(s, relay, mode);
    const double no_winner = 1.0 - total_win;
    const double other_winner = total_win - u;

    double q = 0.0;
    for (std::size_t j = 1; j <= K; ++j) {
        double inner = 0.0;
        for (std::size_t m = 0; m <= K - j; ++m) {
            inner += static_cast<double>(j) / static_cast<double>(K - m) * binomial(K - j, m) *
                     std::pow(no_winner, static_cast<double>(m)) *
                     std::pow(other_winner, static_cast<double>(K - j - m));
        }
        q += binomial(K, j) * std::pow(u, static_cast<double>(j)) * inner;
    }
    return q;
}

SelectionProbs selection_probs(const AnalyticScenario& s, SourceMode mode) {
    SelectionProbs out;
    out.q_by_relay.resize(s.relay_count());
    double sum = 0.0;
    for (std::size_t a = 0; a < s.relay_count(); ++a) {
        out.q_by_relay[a] = q_selected(s, a, mode);
        sum += out.q_by_relay[a];
    }
    out.q_none = 1.0 - sum;
    return out;
}

AmcDecodeProbs decode_probs_amc(const AnalyticScenario& s) {
    if (s.alpha > s.gamma_swp) throw std::invalid_argument("decode_probs_amc: alpha exceeds gamma_swp");
    const auto q1 = selection_probs(s, SourceMode::Mode1);
    const auto q2 = selection_probs(s, SourceMode::Mode2);

    AmcDecodeProbs p;
    p.p11 = tail(s.alpha, s.g_sd) - tail(s.gamma_swp, s.g_sd);
    p.p21 = tail(s.beta, s.g_sd);
    p.p12 = q1.q_none * (tail(s.phi, s.g_sd) - tail(s.gamma_swp, s.g_sd));
    p.p22 = q2.q_none * tail(s.gamma_swp, s.g_sd);
    for (std::size_t a = 0; a < s.relay_count(); ++a) {
        p.p12 += q1.q_by_relay[a] * (tail(s.phi, s.g_ad[a]) - tail(s.gamma_swp, s.g_ad[a]));
        p.p22 += q2.q_by_relay[a] * tail(s.gamma_swp, s.g_ad[a]);
    }
    return p;
}

double r_app_amc(const AnalyticScenario& s) {
    const auto p = decode_probs_amc(s);
    const double f = s.f;
    return f / 3.0 * p.p11 + 2.0 * f / 3.0 * p.p21 + f / 3.0 * (1.0 - p.p21) * p.p22 +
           f / 6.0 * (1.0 - p.p11) * p.p12 + 2.0 * f / 9.0 * (1.0 - p.p11) * p.p22 +
           2.0 * f / 9.0 * (1.0 - p.p21) * p.p12;
}

SingleModeProbs decode_probs_sm(const AnalyticScenario& s) {
    const auto q = selection_probs(s, SourceMode::Single);
    SingleModeProbs t;
    t.tau1 = tail(s.gamma, s.g_sd);
    t.tau2 = q.q_none * tail(s.phi, s.g_sd);
    for (std::size_t a = 0; a < s.relay_count(); ++a) t.tau2 += q.q_by_relay[a] * tail(s.phi, s.g_ad[a]);
    return t;
}

double r_app_sm(const AnalyticScenario& s) {
    const auto t = decode_probs_sm(s);
    return s.f / 2.0 * t.tau1 + s.f / 4.0 * (1.0 - t.tau1) * t.tau2;
}

ContentionOptimum optimize_contention(const AnalyticScenario& s, Objective objective, double grid_step) {
    const std::size_t n = s.relay_count();
    if (n > 4) throw std::invalid_argument("optimize_contention: at most 4 relays (use the simulator beyond that)");
    if (!(grid_step > 0.0 && grid_step <= 1.0)) throw std::invalid_argument("optimize_contention: bad grid step");

    const auto points = static_cast<std::size_t>(std::llround(1.0 / grid_step)) + 1;
    auto grid_value = [&](std::size_t i) { return std::min(1.0, static_cast<double>(i) * grid_step); };
    auto evaluate = [&](const AnalyticScenario& sc) {
        return objective == Objective::Amc ? r_app_amc(sc) : r_app_sm(sc);
    };

    AnalyticScenario work = s;
    std::vector<std::size_t> idx(n, 0);
    ContentionOptimum best{std::vector<double>(n, 0.0), -1.0};
    // Odometer over the grid, last coordinate fastest: lexicographic order.
    while (true) {
        for (std::size_t i = 0; i < n; ++i) work.contention_prob[i] = grid_value(idx[i]);
        const double v = evaluate(work);
        if (v > best.value) best = {work.contention_prob, v};
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < points) break;
            idx[pos] = 0;
            if (pos == 0) return best;
        }
        if (n == 0) return best;
    }
}

SwitchpointOptimum optimize_switchpoint(const AnalyticScenario& s, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("optimize_switchpoint: empty grid");
    AnalyticScenario work = s;
    SwitchpointOptimum best{grid.front(), -1.0};
    for (double g : grid) {
        if (g < s.alpha) throw std::invalid_argument("optimize_switchpoint: grid point below alpha");
        work.gamma_swp = g;
        const double v = r_app_amc(work);
        if (v > best.value) best = {g, v};
    }
    return best;
}

}  // namespace relaysel
