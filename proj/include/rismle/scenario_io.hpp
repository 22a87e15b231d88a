// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <algorithm>
#include <climits>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include <rismle/simulator.hpp>

namespace rismle {

// A study description as stored on disk: the Monte Carlo scenario plus the
// tracking-run parameters, in one key = value text document. '#' starts a
// comment, blank lines are ignored, unknown keys are errors.
struct ScenarioFile {
    Scenario scenario = default_scenario();
    TrackingSpec tracking;
};

namespace detail {

// 17 significant digits make the text form reproduce the exact double.
inline std::string fmt_exact(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim_ws(const std::string& s)
{
    const char* ws = " \t";
    const std::size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return "";
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

struct RawEntry {
    std::string value;
    int line = 0;
};

[[noreturn]] inline void parse_fail(int line, const std::string& what)
{
    throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

inline std::map<std::string, RawEntry> tokenize_scenario(const std::string& text)
{
    std::map<std::string, RawEntry> kv;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string body = trim_ws(raw);
        if (body.empty())
            continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            parse_fail(lineno, "expected key = value, got '" + body + "'");
        const std::string key = trim_ws(body.substr(0, eq));
        const std::string value = trim_ws(body.substr(eq + 1));
        if (key.empty())
            parse_fail(lineno, "missing key before '='");
        if (value.empty())
            parse_fail(lineno, "key '" + key + "' has no value");
        const auto [it, fresh] = kv.emplace(key, RawEntry{value, lineno});
        if (!fresh)
            parse_fail(lineno, "duplicate key '" + key + "' (first on line " +
                                   std::to_string(it->second.line) + ")");
    }
    return kv;
}

inline double entry_double(const RawEntry& e, const std::string& key)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != e.value.size())
        parse_fail(e.line, "key '" + key + "' needs a real number, got '" + e.value + "'");
    return v;
}

inline long long entry_ll(const RawEntry& e, const std::string& key)
{
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(e.value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != e.value.size())
        parse_fail(e.line, "key '" + key + "' needs an integer, got '" + e.value + "'");
    return v;
}

inline std::uint64_t entry_u64(const RawEntry& e, const std::string& key)
{
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(e.value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != e.value.size() || e.value.front() == '-')
        parse_fail(e.line, "key '" + key + "' needs an unsigned integer, got '" + e.value + "'");
    return v;
}

} // namespace detail

// Parses a scenario document. Absent keys keep the library defaults, so a
// file may state only what deviates; the serializer always writes every key.
inline ScenarioFile parse_scenario_text(const std::string& text)
{
    std::map<std::string, detail::RawEntry> kv = detail::tokenize_scenario(text);

    auto take = [&](const char* key) -> std::optional<detail::RawEntry> {
        const auto it = kv.find(key);
        if (it == kv.end())
            return std::nullopt;
        detail::RawEntry e = it->second;
        kv.erase(it);
        return e;
    };
    auto dbl = [&](const char* key, double& out) {
        if (const auto e = take(key))
            out = detail::entry_double(*e, key);
    };
    auto intval = [&](const char* key, int& out) {
        if (const auto e = take(key)) {
            const long long v = detail::entry_ll(*e, key);
            if (v < INT_MIN || v > INT_MAX)
                detail::parse_fail(e->line, "key '" + std::string(key) + "' out of range");
            out = static_cast<int>(v);
        }
    };

    ScenarioFile f;
    f.scenario = default_scenario();
    Scenario& s = f.scenario;

    // wavelength first: element spacings may be given in wavelengths
    const auto wl = take("wavelength_m");
    const auto ghz = take("carrier_ghz");
    if (wl && ghz)
        detail::parse_fail(std::max(wl->line, ghz->line),
                           "'wavelength_m' and 'carrier_ghz' both set the wavelength");
    if (wl)
        s.geometry.wavelength = detail::entry_double(*wl, "wavelength_m");
    else if (ghz)
        s.geometry.wavelength = wavelength_for(detail::entry_double(*ghz, "carrier_ghz") * 1e9);

    intval("n_h", s.geometry.n_h);
    intval("n_v", s.geometry.n_v);
    for (const auto& [meters, waves, delta] :
         {std::tuple{"delta_h_m", "spacing_h_wavelengths", &s.geometry.delta_h},
          std::tuple{"delta_v_m", "spacing_v_wavelengths", &s.geometry.delta_v}}) {
        const auto m = take(meters);
        const auto w = take(waves);
        if (m && w)
            detail::parse_fail(std::max(m->line, w->line),
                               "'" + std::string(meters) + "' and '" + waves +
                                   "' both set the element spacing");
        if (m)
            *delta = detail::entry_double(*m, meters);
        else if (w)
            *delta = detail::entry_double(*w, waves) * s.geometry.wavelength;
    }

    intval("bs_antennas", s.bs_antennas);
    dbl("snr_pilot_db", s.snr_pilot_db);
    dbl("snr_data_db", s.snr_data_db);
    dbl("direct_gain_factor", s.direct_gain_factor);
    dbl("noise_power", s.noise_power);
    dbl("azimuth_lo_rad", s.users.azimuth_lo);
    dbl("azimuth_hi_rad", s.users.azimuth_hi);
    dbl("elevation_lo_rad", s.users.elevation_lo);
    dbl("elevation_hi_rad", s.users.elevation_hi);

    if (const auto e = take("distance_law")) {
        if (e->value == "far")
            s.users.law = DistanceLaw::far_field;
        else if (e->value == "near")
            s.users.law = DistanceLaw::near_field;
        else
            detail::parse_fail(e->line,
                               "key 'distance_law' must be far or near, got '" + e->value + "'");
    }
    if (const auto e = take("rician_k_db")) {
        if (e->value == "none")
            s.rician_k_db.reset();
        else
            s.rician_k_db = detail::entry_double(*e, "rician_k_db");
    }
    intval("trials", s.trials);
    if (const auto e = take("master_seed"))
        s.master_seed = detail::entry_u64(*e, "master_seed");

    TrackingSpec& t = f.tracking;
    dbl("room_side_m", t.room_side);
    dbl("speed_mean_mps", t.speed_mean);
    dbl("speed_cap_mps", t.speed_cap);
    dbl("reestimation_period_s", t.reestimation_period);
    dbl("se_sample_period_s", t.se_sample_period);
    intval("initial_pilots", t.initial_pilots);
    intval("reestimation_pilots", t.reestimation_pilots);
    dbl("duration_s", t.duration);

    if (!kv.empty()) {
        const auto worst = std::min_element(kv.begin(), kv.end(), [](auto& a, auto& b) {
            return a.second.line < b.second.line;
        });
        detail::parse_fail(worst->second.line, "unknown key '" + worst->first + "'");
    }
    return f;
}

// Full textual form; parse_scenario_text() on the result restores every field
// bit for bit.
inline std::string serialize_scenario(const ScenarioFile& f)
{
    const Scenario& s = f.scenario;
    const TrackingSpec& t = f.tracking;
    std::string out;
    auto put = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    out += "# RIS geometry\n";
    put("n_h", std::to_string(s.geometry.n_h));
    put("n_v", std::to_string(s.geometry.n_v));
    put("delta_h_m", detail::fmt_exact(s.geometry.delta_h));
    put("delta_v_m", detail::fmt_exact(s.geometry.delta_v));
    put("wavelength_m", detail::fmt_exact(s.geometry.wavelength));
    out += "# link and study\n";
    put("bs_antennas", std::to_string(s.bs_antennas));
    put("snr_pilot_db", detail::fmt_exact(s.snr_pilot_db));
    put("snr_data_db", detail::fmt_exact(s.snr_data_db));
    put("direct_gain_factor", detail::fmt_exact(s.direct_gain_factor));
    put("noise_power", detail::fmt_exact(s.noise_power));
    put("azimuth_lo_rad", detail::fmt_exact(s.users.azimuth_lo));
    put("azimuth_hi_rad", detail::fmt_exact(s.users.azimuth_hi));
    put("elevation_lo_rad", detail::fmt_exact(s.users.elevation_lo));
    put("elevation_hi_rad", detail::fmt_exact(s.users.elevation_hi));
    put("distance_law", s.users.law == DistanceLaw::near_field ? "near" : "far");
    put("rician_k_db", s.rician_k_db ? detail::fmt_exact(*s.rician_k_db) : "none");
    put("trials", std::to_string(s.trials));
    put("master_seed", std::to_string(s.master_seed));
    out += "# tracking runs\n";
    put("room_side_m", detail::fmt_exact(t.room_side));
    put("speed_mean_mps", detail::fmt_exact(t.speed_mean));
    put("speed_cap_mps", detail::fmt_exact(t.speed_cap));
    put("reestimation_period_s", detail::fmt_exact(t.reestimation_period));
    put("se_sample_period_s", detail::fmt_exact(t.se_sample_period));
    put("initial_pilots", std::to_string(t.initial_pilots));
    put("reestimation_pilots", std::to_string(t.reestimation_pilots));
    put("duration_s", detail::fmt_exact(t.duration));
    return out;
}

inline ScenarioFile load_scenario_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_text(buf.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

} // namespace rismle
