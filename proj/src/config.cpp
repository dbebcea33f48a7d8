#include "torsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "torsim/constants.hpp"
#include "torsim/csv.hpp"

namespace torsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

// every object is checked against the set of keys the schema knows, so a
// typo fails loudly instead of silently using a default
void check_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items()) {
        if (key == "comment") continue;  // free-form annotation, allowed anywhere
        if (!known.count(key)) fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required number");
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

PendulumParams parse_pendulum(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"mass_kg", "bar_length_m", "bar_width_m", "bar_thickness_m", "density_kg_m3",
                "resonance_hz", "quality", "l_eff_m", "temperature_k", "damping"});
    PendulumParams p;
    p.mass_kg = get_number(obj, path, "mass_kg");
    p.bar_length_m = get_number(obj, path, "bar_length_m");
    p.bar_width_m = get_number(obj, path, "bar_width_m");
    p.bar_thickness_m = get_number(obj, path, "bar_thickness_m");
    p.density_kg_m3 = get_number(obj, path, "density_kg_m3");
    p.omega_m_rad_s = constants::two_pi * get_number(obj, path, "resonance_hz");
    p.quality = get_number(obj, path, "quality");
    p.l_eff_m = get_number(obj, path, "l_eff_m");
    p.temperature_k = get_number(obj, path, "temperature_k");
    const std::string damping = get_string(obj, path, "damping", "structural");
    if (damping == "structural")
        p.damping = DampingModel::structural;
    else if (damping == "viscous")
        p.damping = DampingModel::viscous;
    else
        fail(path + ".damping", "must be 'structural' or 'viscous'");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return p;
}

CavityParams parse_cavity(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"finesse", "round_trip_m", "input_power_w", "wavelength_m", "detuning", "mode_coupling"});
    CavityParams c;
    c.finesse = get_number(obj, path, "finesse");
    c.round_trip_m = get_number(obj, path, "round_trip_m");
    c.input_power_w = get_number(obj, path, "input_power_w");
    c.wavelength_m = get_number(obj, path, "wavelength_m");
    c.detuning = get_number(obj, path, "detuning");
    c.mode_coupling = get_number(obj, path, "mode_coupling");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return c;
}

std::vector<BendingMode> parse_modes(const json& arr, const std::string& path) {
    if (!arr.is_array()) fail(path, "expected an array of modes");
    std::vector<BendingMode> modes;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string mp = path + "[" + std::to_string(i) + "]";
        const auto& obj = arr[i];
        if (!obj.is_object()) fail(mp, "expected an object");
        check_keys(obj, mp, {"frequency_hz", "quality", "effective_mass_kg"});
        BendingMode m;
        m.omega_rad_s = constants::two_pi * get_number(obj, mp, "frequency_hz");
        m.quality = get_number(obj, mp, "quality");
        m.effective_mass_kg = get_number(obj, mp, "effective_mass_kg");
        try {
            m.validate();
        } catch (const std::invalid_argument& e) {
            fail(mp, e.what());
        }
        modes.push_back(m);
    }
    return modes;
}

}  // namespace

FrequencyGrid Config::budget_grid() const {
    return FrequencyGrid::log_spaced(estimation.f_min_hz, estimation.f_max_hz, estimation.points);
}

Config parse_config(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");
    check_keys(doc, origin,
               {"schema_version", "pendulum", "cavities", "readout", "seismic", "laser", "holder_modes",
                "bending_modes", "csl", "estimation", "simulate"});

    Config cfg;
    cfg.raw = json_text;
    cfg.hash = hash_hex(json_text);

    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
        fail(origin + ".schema_version", "missing required integer");
    cfg.schema_version = doc["schema_version"].get<int>();
    if (cfg.schema_version != 1)
        fail(origin + ".schema_version", "unsupported version " + std::to_string(cfg.schema_version));

    if (!doc.contains("pendulum")) fail(origin + ".pendulum", "missing required section");
    cfg.budget.pendulum = parse_pendulum(doc["pendulum"], origin + ".pendulum");
    for (const auto& w : cfg.budget.pendulum.warnings())
        std::fprintf(stderr, "warning: %s.pendulum: %s\n", origin.c_str(), w.c_str());

    if (!doc.contains("cavities") || !doc["cavities"].is_array() || doc["cavities"].size() != 2)
        fail(origin + ".cavities", "expected an array of exactly two cavities");
    for (std::size_t i = 0; i < 2; ++i)
        cfg.budget.cavities.push_back(
            parse_cavity(doc["cavities"][i], origin + ".cavities[" + std::to_string(i) + "]"));

    {
        const std::string path = origin + ".readout";
        json obj = doc.contains("readout") ? doc["readout"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path, {"omega_eff_hz", "alpha"});
        const double f_eff = get_number_or(obj, path, "omega_eff_hz", 1000.0);
        if (!(f_eff > 0.0)) fail(path + ".omega_eff_hz", "must be positive");
        cfg.budget.omega_eff_readout_rad_s = constants::two_pi * f_eff;
        cfg.alpha_readout = get_number_or(obj, path, "alpha", 0.88);
    }
    {
        const std::string path = origin + ".seismic";
        json obj = doc.contains("seismic") ? doc["seismic"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path, {"ground_asd_1hz", "ground_exponent", "isolation", "length_coupling", "cmrr"});
        auto& s = cfg.budget.seismic;
        s.ground_asd_1hz = get_number_or(obj, path, "ground_asd_1hz", 1e-7);
        s.ground_exponent = get_number_or(obj, path, "ground_exponent", -2.0);
        s.isolation = get_string(obj, path, "isolation", "vertical");
        if (s.isolation != "vertical" && s.isolation != "horizontal")
            fail(path + ".isolation", "must be 'vertical' or 'horizontal'");
        s.length_coupling = get_number_or(obj, path, "length_coupling", 1.0);
        s.cmrr = get_number_or(obj, path, "cmrr", 1.0);
    }
    {
        const std::string path = origin + ".laser";
        json obj = doc.contains("laser") ? doc["laser"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path, {"frequency_noise_asd_hz", "rin_asd", "differential_suppression"});
        auto& l = cfg.budget.laser;
        l.frequency_noise_asd = get_number_or(obj, path, "frequency_noise_asd_hz", 0.0);
        l.rin_asd = get_number_or(obj, path, "rin_asd", 0.0);
        l.differential_suppression = get_number_or(obj, path, "differential_suppression", 1.0);
    }

    if (doc.contains("holder_modes"))
        cfg.budget.holder_modes = parse_modes(doc["holder_modes"], origin + ".holder_modes");
    if (doc.contains("bending_modes"))
        cfg.budget.bending_modes = parse_modes(doc["bending_modes"], origin + ".bending_modes");
    if (cfg.budget.holder_modes.empty()) fail(origin + ".holder_modes", "need at least one mode");
    if (cfg.budget.bending_modes.empty()) fail(origin + ".bending_modes", "need at least one mode");

    {
        const std::string path = origin + ".csl";
        json obj = doc.contains("csl") ? doc["csl"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path, {"r_min_m", "r_max_m", "points", "band_lo_hz", "band_hi_hz"});
        auto& c = cfg.csl;
        c.r_min_m = get_number_or(obj, path, "r_min_m", 1e-9);
        c.r_max_m = get_number_or(obj, path, "r_max_m", 1e-4);
        c.points = static_cast<std::size_t>(get_number_or(obj, path, "points", 200));
        c.band_lo_hz = get_number_or(obj, path, "band_lo_hz", 80.0);
        c.band_hi_hz = get_number_or(obj, path, "band_hi_hz", 120.0);
        if (!(c.r_min_m > 0.0) || !(c.r_max_m > c.r_min_m)) fail(path, "need 0 < r_min_m < r_max_m");
        if (c.points < 1) fail(path + ".points", "must be >= 1");
    }
    {
        const std::string path = origin + ".estimation";
        json obj = doc.contains("estimation") ? doc["estimation"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path, {"f_min_hz", "f_max_hz", "points", "segment_length", "overlap"});
        auto& e = cfg.estimation;
        e.f_min_hz = get_number_or(obj, path, "f_min_hz", 10.0);
        e.f_max_hz = get_number_or(obj, path, "f_max_hz", 500.0);
        e.points = static_cast<std::size_t>(get_number_or(obj, path, "points", 400));
        e.segment_length = static_cast<std::size_t>(get_number_or(obj, path, "segment_length", 1024));
        e.overlap = get_number_or(obj, path, "overlap", 0.5);
        if (!(e.f_min_hz > 0.0) || !(e.f_max_hz > e.f_min_hz)) fail(path, "need 0 < f_min_hz < f_max_hz");
        if (e.points < 2) fail(path + ".points", "must be >= 2");
        if (e.segment_length < 4 || e.segment_length % 2 != 0)
            fail(path + ".segment_length", "must be even and >= 4");
        if (!(e.overlap >= 0.0 && e.overlap < 1.0)) fail(path + ".overlap", "must be in [0, 1)");
    }
    {
        const std::string path = origin + ".simulate";
        json obj = doc.contains("simulate") ? doc["simulate"] : json::object();
        if (!obj.is_object()) fail(path, "expected an object");
        check_keys(obj, path,
                   {"sample_rate_hz", "line_hz", "line_amplitude_m", "alpha_true", "sensing_noise_asd_m"});
        auto& s = cfg.simulate;
        s.sample_rate_hz = get_number_or(obj, path, "sample_rate_hz", 1000.0);
        s.line_hz = get_number_or(obj, path, "line_hz", 73.0);
        s.line_amplitude_m = get_number_or(obj, path, "line_amplitude_m", 1e-12);
        s.alpha_true = get_number_or(obj, path, "alpha_true", 0.88);
        s.sensing_noise_asd_m = get_number_or(obj, path, "sensing_noise_asd_m", 3e-15);
        if (!(s.sample_rate_hz > 0.0)) fail(path + ".sample_rate_hz", "must be positive");
        if (!(s.line_hz > 0.0) || s.line_hz >= s.sample_rate_hz / 2.0)
            fail(path + ".line_hz", "must lie inside (0, Nyquist)");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace torsim
