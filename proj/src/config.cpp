#include "twomass/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

namespace twomass {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config error at '" + path + "': " + why);
}

const json& child(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing field");
    return j.at(key);
}

double num(const json& j, const std::string& key, const std::string& path) {
    const json& v = child(j, key, path);
    // "inf" is accepted where a formula parameter may be unbounded (beta)
    if (v.is_string() && v.get<std::string>() == "inf")
        return std::numeric_limits<double>::infinity();
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, double dflt) {
    return j.is_object() && j.contains(key) && j.at(key).is_number()
               ? j.at(key).get<double>()
               : dflt;
}

std::string str(const json& j, const std::string& key, const std::string& path) {
    const json& v = child(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;

    const json& jp = child(j, "plant", "");
    cfg.plant.m = num(jp, "m", "plant");
    cfg.plant.M = num(jp, "M", "plant");
    cfg.plant.d = num(jp, "d", "plant");
    cfg.plant.D = num(jp, "D", "plant");
    cfg.plant.f = num(jp, "f", "plant");
    cfg.plant.F = num(jp, "F", "plant");
    cfg.plant.beta = num(jp, "beta", "plant");
    cfg.plant.epsilon = num(jp, "epsilon", "plant");
    cfg.plant.v_stick = num_or(jp, "v_stick", 1e-4);
    try {
        cfg.plant.validate();
    } catch (const std::exception& e) {
        fail("plant", e.what());
    }

    const json& jc = child(j, "controller", "");
    std::string type = str(jc, "type", "controller");
    if (type == "relay") {
        RelayConfig rc;
        rc.e = num(jc, "e", "controller");
        rc.h0 = num(jc, "h0", "controller");
        rc.schedule.clear();
        const json& js = child(jc, "schedule", "controller");
        if (!js.is_array() || js.empty()) fail("controller.schedule", "expected nonempty array");
        for (const auto& seg : js) {
            ScheduleSegment s;
            s.duration = num(seg, "duration", "controller.schedule[]");
            s.alpha_plus = num(seg, "alpha_plus", "controller.schedule[]");
            s.alpha_minus = num(seg, "alpha_minus", "controller.schedule[]");
            rc.schedule.push_back(s);
        }
        try {
            rc.validate();
        } catch (const std::exception& e) {
            fail("controller", e.what());
        }
        cfg.controller = rc;
    } else if (type == "pi_triangle") {
        PiTriangleController pc;
        pc.ref.slope = num(jc, "slope", "controller");
        pc.ref.period = num(jc, "period", "controller");
        cfg.pi_bandwidth_hz = num(jc, "bandwidth_hz", "controller");
        try {
            pc.ref.validate();
            pc.pi = pi_gains_from_bandwidth(cfg.plant.m + cfg.plant.M,
                                            cfg.plant.d + cfg.plant.D,
                                            cfg.pi_bandwidth_hz);
        } catch (const std::exception& e) {
            fail("controller", e.what());
        }
        cfg.controller = pc;
    } else {
        fail("controller.type", "expected 'relay' or 'pi_triangle'");
    }

    const json& jsim = child(j, "sim", "");
    cfg.sim.T_s = num(jsim, "T_s", "sim");
    double div = num_or(jsim, "dt_divisor", 10.0);
    cfg.sim.dt = cfg.sim.T_s / div;
    cfg.sim.duration = num(jsim, "duration", "sim");
    cfg.sim.loop_delay_samples = static_cast<int>(num_or(jsim, "loop_delay_samples", 0.0));
    cfg.sim.encoder_bits = static_cast<int>(num_or(jsim, "encoder_bits", 0.0));
    cfg.sim.event_tol = num_or(jsim, "event_tol", std::min(1e-9, cfg.sim.dt / 16.0));
    if (jsim.contains("relay_continuous"))
        cfg.sim.relay_continuous = jsim.at("relay_continuous").get<bool>();
    try {
        cfg.sim.validate();
    } catch (const std::exception& e) {
        fail("sim", e.what());
    }

    if (j.contains("identification")) {
        const json& ji = j.at("identification");
        std::string m = str(ji, "method", "identification");
        if (m == "proposed") cfg.ident.method = IdMethod::Proposed;
        else if (m == "reference") cfg.ident.method = IdMethod::Reference;
        else if (m == "two_encoder") cfg.ident.method = IdMethod::TwoEncoder;
        else fail("identification.method", "expected proposed|reference|two_encoder");
        cfg.ident.proposed.slope_ratio_min = num_or(ji, "slope_ratio_min", ProposedOptions{}.slope_ratio_min);
        cfg.ident.proposed.skip_initial_segments =
            static_cast<int>(num_or(ji, "skip_initial_segments", 1.0));
        if (ji.contains("direction")) {
            std::string d = ji.at("direction").get<std::string>();
            if (d == "both") cfg.ident.proposed.direction = DriftDirection::Both;
            else if (d == "backward") cfg.ident.proposed.direction = DriftDirection::Backward;
            else if (d == "forward") cfg.ident.proposed.direction = DriftDirection::Forward;
            else fail("identification.direction", "expected both|backward|forward");
        }
        if (ji.contains("amplitude_correction"))
            cfg.ident.proposed.amplitude_correction =
                ji.at("amplitude_correction").get<bool>();
        cfg.ident.reference.jerk_threshold_ratio =
            num_or(ji, "jerk_threshold_ratio", 5.0);
        if (ji.contains("use_impact_events"))
            cfg.ident.reference.use_impact_events =
                ji.at("use_impact_events").get<bool>();
    }

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::echo() const {
    json j;
    j["plant"] = {{"m", plant.m},     {"M", plant.M},       {"d", plant.d},
                  {"D", plant.D},     {"f", plant.f},       {"F", plant.F},
                  {"epsilon", plant.epsilon}, {"v_stick", plant.v_stick}};
    if (std::isfinite(plant.beta)) j["plant"]["beta"] = plant.beta;
    else j["plant"]["beta"] = "inf";
    if (is_relay()) {
        const RelayConfig& rc = relay();
        json sched = json::array();
        for (const auto& s : rc.schedule)
            sched.push_back({{"duration", s.duration},
                             {"alpha_plus", s.alpha_plus},
                             {"alpha_minus", s.alpha_minus}});
        j["controller"] = {{"type", "relay"}, {"e", rc.e}, {"h0", rc.h0},
                           {"schedule", sched}};
    } else {
        const auto& pc = pi_triangle();
        j["controller"] = {{"type", "pi_triangle"},
                           {"bandwidth_hz", pi_bandwidth_hz},
                           {"kp", pc.pi.kp},
                           {"ki", pc.pi.ki},
                           {"slope", pc.ref.slope},
                           {"period", pc.ref.period}};
    }
    j["sim"] = {{"T_s", sim.T_s},
                {"dt", sim.dt},
                {"duration", sim.duration},
                {"loop_delay_samples", sim.loop_delay_samples},
                {"encoder_bits", sim.encoder_bits},
                {"event_tol", sim.event_tol},
                {"relay_continuous", sim.relay_continuous}};
    j["identification"] = {{"method", to_string(ident.method)},
                           {"slope_ratio_min", ident.proposed.slope_ratio_min},
                           {"amplitude_correction", ident.proposed.amplitude_correction},
                           {"jerk_threshold_ratio", ident.reference.jerk_threshold_ratio}};
    j["seed"] = seed;
    return j;
}

SimState ExperimentConfig::initial_state() const {
    SimState st;
    st.mode = ContactMode::Gap;
    if (seed != 0 && std::isfinite(plant.beta) && plant.beta > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-0.9 * plant.beta, 0.9 * plant.beta);
        st.x_m = dist(rng);
    }
    if (is_relay())
        st.hysteron = HysteronState::init(st.v_m, relay().e);
    return st;
}

} // namespace twomass
