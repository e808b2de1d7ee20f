#include "relaysel/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace relaysel {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"topology", {"d_sd_m", "relay_x_m", "relay_y_m", "uniform_relays"}},
        {"channel",
         {"carrier_frequency_hz", "reference_distance_m", "path_loss_exponent", "noise_power_db",
          "tx_power_above_noise_db", "bandwidth_hz", "target_snr_db"}},
        {"contention", {"strategy", "minislots", "p", "eta_opp_db", "beta_opp_db", "winner_bias", "weighting"}},
        {"link", {"plan", "alpha_db", "beta_db", "gamma_db", "gamma_swp_db", "phi_db", "f", "info_bits"}},
        {"rcpc", {"rates", "thresholds_db", "memory", "period", "mother_bits"}},
        {"experiment",
         {"slot_limit", "trials", "seed", "workers", "relay_overhearing", "sweep_param", "sweep_values",
          "strategies", "grid_step", "switchpoint_step_db"}},
        {"overhead",
         {"training_us", "ofdm_symbol_us", "data_symbol_us", "data_guard_us", "minislots", "frame_length_octets",
          "bits_per_data_symbol", "delay_resolution_us"}},
    };
    return keys;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::set<std::string> sections, std::string source)
        : entries_(std::move(entries)), sections_(std::move(sections)), source_(std::move(source)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        std::ostringstream msg;
        msg << source_;
        if (line(key) > 0) msg << ":" << line(key);
        msg << ": " << key << ": " << what;
        throw ConfigError(msg.str(), key, line(key));
    }

    double number(const std::string& key) const { return parse_number(key, entries_.at(key).value); }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const std::string& key) const {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        for (auto item : split(entries_.at(key).value, ',')) out.push_back(parse_number(key, item));
        return out;
    }

    std::size_t count(const std::string& key, std::size_t minimum) const {
        const double v = number(key);
        if (v != std::floor(v) || v < static_cast<double>(minimum))
            fail(key, "expected a whole number >= " + std::to_string(minimum) + ", got '" + text(key) + "'");
        return static_cast<std::size_t>(v);
    }

    std::size_t count_or(const std::string& key, std::size_t minimum, std::size_t fallback) const {
        return has(key) ? count(key, minimum) : fallback;
    }

    std::uint64_t unsigned64(const std::string& key) const {
        const std::string& s = entries_.at(key).value;
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an unsigned integer, got '" + s + "'");
        return v;
    }

    bool boolean(const std::string& key) const {
        std::string s = text(key);
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "true" || s == "yes" || s == "1") return true;
        if (s == "false" || s == "no" || s == "0") return false;
        fail(key, "expected true or false, got '" + text(key) + "'");
    }

    const std::string& text(const std::string& key) const { return entries_.at(key).value; }

private:
    double parse_number(const std::string& key, std::string_view s) const {
        auto single = [&](std::string_view part) {
            part = trim(part);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
            if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || !std::isfinite(v))
                fail(key, "malformed number '" + std::string(s) + "'");
            return v;
        };
        const auto slash = s.find('/');
        if (slash == std::string_view::npos) return single(s);
        const double den = single(s.substr(slash + 1));
        if (den == 0.0) fail(key, "zero denominator in '" + std::string(s) + "'");
        return single(s.substr(0, slash)) / den;
    }

    std::map<std::string, Entry> entries_;
    std::set<std::string> sections_;
    std::string source_;
};

Reader tokenize(std::string_view text, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::set<std::string> sections;
    std::string section;
    int line_no = 0;
    auto fail = [&](const std::string& key, const std::string& what) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": " + (key.empty() ? "" : key + ": ") + what, key,
                          line_no);
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("", "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_keys().count(section)) fail("", "unknown section [" + section + "]");
            sections.insert(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("", "expected 'key = value'");
        const std::string name(trim(line.substr(0, eq)));
        const std::string key = section + "." + name;
        if (section.empty()) fail(name, "key outside of any section");
        if (!known_keys().at(section).count(name)) fail(key, "unknown key");
        if (entries.count(key)) fail(key, "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) fail(key, "empty value");
        entries[key] = {std::string(value), line_no};
    }
    return Reader(std::move(entries), std::move(sections), source);
}

void require(const Reader& r, const std::vector<std::string>& keys, std::vector<std::string>& missing) {
    for (const auto& k : keys)
        if (!r.has(k)) missing.push_back(k);
}

void check_range(const Reader& r, const std::string& key, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) {
        std::ostringstream msg;
        msg << "value " << v << " outside [" << lo << ", " << hi << "]";
        r.fail(key, msg.str());
    }
}

void read_topology(const Reader& r, AppConfig& out) {
    auto& t = out.experiment.topology;
    t.d_sd_m = r.number("topology.d_sd_m");
    if (!(t.d_sd_m > 0.0)) r.fail("topology.d_sd_m", "must be > 0");
    if (r.has("topology.relay_x_m") != r.has("topology.relay_y_m"))
        r.fail(r.has("topology.relay_x_m") ? "topology.relay_y_m" : "topology.relay_x_m",
               "relay_x_m and relay_y_m must be given together");
    if (r.has("topology.relay_x_m")) {
        if (r.has("topology.uniform_relays"))
            r.fail("topology.uniform_relays", "cannot be combined with explicit relay coordinates");
        const auto xs = r.list("topology.relay_x_m");
        const auto ys = r.list("topology.relay_y_m");
        if (xs.size() != ys.size()) r.fail("topology.relay_y_m", "needs one entry per relay_x_m entry");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Position p{xs[i], ys[i]};
            if (!(distance(p, {t.d_sd_m, 0.0}) < t.d_sd_m))
                r.fail("topology.relay_x_m", "relay " + std::to_string(i + 1) +
                                                 " is not closer to the destination than the source is");
            t.relays.push_back(p);
        }
    }
    if (r.has("topology.uniform_relays")) t.uniform_count = r.count("topology.uniform_relays", 0);
}

void read_channel(const Reader& r, AppConfig& out) {
    auto& c = out.experiment.channel;
    c.carrier_frequency_hz = r.number("channel.carrier_frequency_hz");
    if (!(c.carrier_frequency_hz > 0.0)) r.fail("channel.carrier_frequency_hz", "must be > 0");
    c.reference_distance_m = r.number("channel.reference_distance_m");
    if (!(c.reference_distance_m > 0.0)) r.fail("channel.reference_distance_m", "must be > 0");
    c.path_loss_exponent = r.number("channel.path_loss_exponent");
    if (!(c.path_loss_exponent > 0.0)) r.fail("channel.path_loss_exponent", "must be > 0");
    c.noise_power_db = r.number("channel.noise_power_db");
    c.tx_power_above_noise_db = r.number_or("channel.tx_power_above_noise_db", c.tx_power_above_noise_db);
    c.bandwidth_hz = r.number_or("channel.bandwidth_hz", c.bandwidth_hz);
    if (!(c.bandwidth_hz > 0.0)) r.fail("channel.bandwidth_hz", "must be > 0");
    out.experiment.target_snr_db = r.optional_number("channel.target_snr_db");
    if (out.experiment.topology.d_sd_m < c.reference_distance_m)
        r.fail("channel.reference_distance_m", "exceeds topology.d_sd_m");
}

void read_contention(const Reader& r, AppConfig& out) {
    auto& c = out.experiment.contention;
    if (r.has("contention.strategy")) {
        const auto s = parse_strategy(r.text("contention.strategy"));
        if (!s) r.fail("contention.strategy", "unknown strategy '" + r.text("contention.strategy") + "'");
        c.strategy = *s;
    }
    c.minislots = r.count_or("contention.minislots", 1, c.minislots);
    if (r.has("contention.p")) {
        c.contention_prob = r.list("contention.p");
        for (double p : c.contention_prob) check_range(r, "contention.p", p, 0.0, 1.0);
        const auto& t = out.experiment.topology;
        const std::size_t n = t.uniform_count ? *t.uniform_count : t.relays.size();
        if (c.contention_prob.size() != 1 && c.contention_prob.size() != n)
            r.fail("contention.p", "expected a single value or one per relay (" + std::to_string(n) + ")");
    }
    c.eta_opp_db = r.optional_number("contention.eta_opp_db");
    c.beta_opp_db = r.optional_number("contention.beta_opp_db");
    if (c.strategy == Strategy::IdCsi1 && !c.beta_opp_db)
        r.fail("contention.beta_opp_db", "required by the ID_CSI_1 strategy");
    if (c.eta_opp_db && c.beta_opp_db && !(*c.beta_opp_db > *c.eta_opp_db))
        r.fail("contention.beta_opp_db", "must exceed contention.eta_opp_db");
    c.winner_bias = r.number_or("contention.winner_bias", c.winner_bias);
    if (!(c.winner_bias > 0.5 && c.winner_bias <= 1.0))
        r.fail("contention.winner_bias", "must lie in (0.5, 1]");
    if (r.has("contention.weighting")) {
        const auto& w = r.text("contention.weighting");
        if (w == "slot")
            c.weighting = WinnerWeighting::Slot;
        else if (w == "relay")
            c.weighting = WinnerWeighting::Relay;
        else
            r.fail("contention.weighting", "expected 'slot' or 'relay', got '" + w + "'");
    }
}

void read_link(const Reader& r, AppConfig& out) {
    auto& l = out.experiment.link;
    const auto& plan = r.text("link.plan");
    if (plan == "amc")
        l.kind = PlanKind::Amc;
    else if (plan == "single")
        l.kind = PlanKind::SingleMode;
    else if (plan == "rcpc")
        l.kind = PlanKind::Rcpc;
    else
        r.fail("link.plan", "expected amc, single or rcpc, got '" + plan + "'");

    l.alpha_db = r.number_or("link.alpha_db", l.alpha_db);
    l.beta_db = r.number_or("link.beta_db", l.beta_db);
    l.gamma_db = r.number_or("link.gamma_db", l.gamma_db);
    l.gamma_swp_db = r.number_or("link.gamma_swp_db", l.gamma_swp_db);
    l.phi_db = r.optional_number("link.phi_db");
    l.f = r.number_or("link.f", l.f);
    if (!(l.f > 0.0 && l.f <= 1.0)) r.fail("link.f", "must lie in (0, 1]");
    l.info_bits = r.number_or("link.info_bits", l.info_bits);
    if (!(l.info_bits > 0.0) || l.info_bits != std::floor(l.info_bits))
        r.fail("link.info_bits", "must be a positive whole number");
    if (l.kind == PlanKind::Amc) {
        if (!(l.beta_db > l.alpha_db)) r.fail("link.beta_db", "must exceed link.alpha_db");
        if (l.gamma_swp_db < l.alpha_db) r.fail("link.gamma_swp_db", "must not be below link.alpha_db");
    }
    if (l.phi_db && l.kind == PlanKind::Amc && *l.phi_db > l.alpha_db)
        r.fail("link.phi_db", "must not exceed link.alpha_db");

    if (l.kind == PlanKind::Rcpc) {
        auto& s = l.rcpc;
        s.rates = r.list("rcpc.rates");
        s.decode_thresholds_db = r.list("rcpc.thresholds_db");
        if (s.decode_thresholds_db.size() != s.rates.size())
            r.fail("rcpc.thresholds_db", "needs one entry per rcpc.rates entry");
        s.mother_memory = static_cast<int>(r.count_or("rcpc.memory", 0, 6));
        s.puncture_period = static_cast<int>(r.count_or("rcpc.period", 1, 8));
        s.info_bits = static_cast<std::int64_t>(l.info_bits);
        s.mother_codeword_bits = static_cast<std::int64_t>(r.count_or("rcpc.mother_bits", 1, 5736));
        try {
            validate(s);
        } catch (const std::exception& e) {
            r.fail("rcpc.rates", e.what());
        }
    }
}

void read_experiment(const Reader& r, AppConfig& out) {
    auto& e = out.experiment;
    e.slot_limit = r.count_or("experiment.slot_limit", 1, e.slot_limit);
    e.trials = r.count_or("experiment.trials", 1, e.trials);
    if (r.has("experiment.seed")) e.seed = r.unsigned64("experiment.seed");
    e.workers = r.count_or("experiment.workers", 1, e.workers);
    if (r.has("experiment.relay_overhearing")) e.relay_overhearing = r.boolean("experiment.relay_overhearing");
    if (r.has("experiment.sweep_param") != r.has("experiment.sweep_values"))
        r.fail(r.has("experiment.sweep_param") ? "experiment.sweep_values" : "experiment.sweep_param",
               "sweep_param and sweep_values must be given together");
    if (r.has("experiment.sweep_param")) {
        const auto& name = r.text("experiment.sweep_param");
        if (!is_sweepable(name)) r.fail("experiment.sweep_param", "'" + name + "' cannot be swept");
        e.sweep = Sweep{name, r.list("experiment.sweep_values")};
    }
    if (r.has("experiment.strategies")) {
        for (auto item : split(r.text("experiment.strategies"), ',')) {
            const auto s = parse_strategy(item);
            if (!s) r.fail("experiment.strategies", "unknown strategy '" + std::string(item) + "'");
            e.strategies.push_back(*s);
        }
    }
    out.grid_step = r.number_or("experiment.grid_step", out.grid_step);
    if (!(out.grid_step > 0.0 && out.grid_step <= 1.0)) r.fail("experiment.grid_step", "must lie in (0, 1]");
    out.switchpoint_step_db = r.number_or("experiment.switchpoint_step_db", out.switchpoint_step_db);
    if (!(out.switchpoint_step_db > 0.0)) r.fail("experiment.switchpoint_step_db", "must be > 0");
}

void read_overhead(const Reader& r, AppConfig& out) {
    OverheadInputs o;
    o.d_sd_m = out.experiment.topology.d_sd_m;
    auto positive = [&](const char* key) {
        const double v = r.number(key);
        if (!(v > 0.0)) r.fail(key, "must be > 0");
        return v;
    };
    o.training_us = positive("overhead.training_us");
    o.ofdm_symbol_us = positive("overhead.ofdm_symbol_us");
    o.data_symbol_us = positive("overhead.data_symbol_us");
    o.data_guard_us = positive("overhead.data_guard_us");
    o.minislots = r.count("overhead.minislots", 1);
    o.frame_length_octets = static_cast<std::int64_t>(r.count("overhead.frame_length_octets", 0));
    o.bits_per_data_symbol = static_cast<std::int64_t>(r.count("overhead.bits_per_data_symbol", 1));
    o.delay_resolution_us = r.number_or("overhead.delay_resolution_us", o.delay_resolution_us);
    if (!(o.delay_resolution_us >= 0.0)) r.fail("overhead.delay_resolution_us", "must be >= 0");
    out.overhead = o;
}

}  // namespace

AppConfig parse_config_text(std::string_view text, const std::string& source) {
    const Reader r = tokenize(text, source);
    const bool overhead_only = r.has_section("overhead") && !r.has_section("link");

    std::vector<std::string> missing;
    require(r, {"topology.d_sd_m"}, missing);
    if (r.has_section("overhead"))
        require(r,
                {"overhead.training_us", "overhead.ofdm_symbol_us", "overhead.data_symbol_us", "overhead.data_guard_us",
                 "overhead.minislots", "overhead.frame_length_octets", "overhead.bits_per_data_symbol"},
                missing);
    if (!overhead_only) {
        require(r, {"channel.carrier_frequency_hz", "channel.reference_distance_m", "channel.path_loss_exponent",
                    "channel.noise_power_db"},
                missing);
        if (!r.has("channel.target_snr_db")) require(r, {"channel.tx_power_above_noise_db"}, missing);
        require(r, {"link.plan"}, missing);
        const std::string plan = r.has("link.plan") ? r.text("link.plan") : "";
        if (plan == "amc") require(r, {"link.alpha_db", "link.beta_db", "link.gamma_swp_db"}, missing);
        if (plan == "single") require(r, {"link.gamma_db"}, missing);
        if (plan == "rcpc") require(r, {"rcpc.rates", "rcpc.thresholds_db"}, missing);
        const auto strategy =
            r.has("contention.strategy") ? parse_strategy(r.text("contention.strategy")) : Strategy::Id;
        if (strategy && uses_minislots(*strategy)) require(r, {"contention.p"}, missing);
    }
    if (!missing.empty()) {
        std::string msg = source + ": missing required key" + (missing.size() > 1 ? "s" : "") + ":";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg, missing.size() == 1 ? missing.front() : std::string());
    }

    AppConfig out;
    read_topology(r, out);
    if (r.has_section("overhead")) read_overhead(r, out);
    if (overhead_only) return out;

    read_channel(r, out);
    read_contention(r, out);
    read_link(r, out);
    read_experiment(r, out);
    out.has_link = true;
    try {
        prepare(out.experiment);
    } catch (const std::exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return out;
}

AppConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path.string());
}

AnalyticScenario to_analytic_scenario(const AppConfig& config) {
    const auto ex = prepare(config.experiment);
    const auto& link = config.experiment.link;
    const double n0 = noise_linear(ex.channel);
    auto absolute = [&](double db) { return n0 * db_to_linear(db); };

    AnalyticScenario s;
    const double energy = tx_energy_linear(ex.channel);
    s.g_sd = energy * ex.mean_sd;
    for (std::size_t i = 0; i < ex.topology.relay_count(); ++i) {
        s.g_sa.push_back(energy * ex.mean_sr[i]);
        s.g_ad.push_back(energy * ex.mean_rd[i]);
    }
    s.alpha = absolute(link.alpha_db);
    s.beta = absolute(link.beta_db);
    s.gamma = absolute(link.gamma_db);
    s.gamma_swp = absolute(link.gamma_swp_db);
    s.phi = link.phi_db ? absolute(*link.phi_db) : 0.0;
    s.f = link.f;
    s.minislots = ex.contention.minislots;
    s.contention_prob = ex.contention.contention_prob;
    return s;
}

}  // namespace relaysel
