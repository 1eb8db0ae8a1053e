#pragma once

// Wire protocol of the interactive simulation server: one JSON object per
// WebSocket text frame, discriminated by "type".
//
// Client -> server
//   {"type":"hello","protocol_version":1}
//   {"type":"reset","scenario":"floating_balls"}      or an inline scenario object
//   {"type":"set_fins","left":false,"right":false,"caudal":true}
//   {"type":"set_rate","snapshots_per_s":30}
//   {"type":"pause"}  {"type":"resume"}
//
// Server -> client
//   {"type":"welcome","server_version":"1.0.0","protocol_version":1,"role":"controller","scenarios":[...]}
//   {"type":"state","tick":N,"t":..,"x":..,"y":..,"theta":..,"u":..,"v":..,"r":..,
//    "fins":{"left":..,"right":..,"caudal":..},"events":[{"t":..,"obstacle":i,"x":..,"y":..}]}
//   {"type":"error","code":"...","message":"..."}

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vibrafin/config.hpp"
#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"

#ifndef VIBRAFIN_VERSION
#define VIBRAFIN_VERSION "1.0.0"
#endif

namespace vibrafin::server {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

struct Hello {
    int protocol_version = kProtocolVersion;
};
struct Reset {
    // either a built-in scenario name or an inline scenario
    std::string scenario_name;
    std::optional<io::ScenarioFile> inline_scenario;
};
struct SetFins {
    loco::FinSet fins = loco::kNoFins;
};
struct SetRate {
    double snapshots_per_s = 30.0;
};
struct Pause {};
struct Resume {};

using ClientMessage = std::variant<Hello, Reset, SetFins, SetRate, Pause, Resume>;

class ProtocolError : public ValidationError {
public:
    ProtocolError(std::string code, const std::string& message) : ValidationError("message", message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw ProtocolError("malformed", "unexpected field '" + it.key() + "'");
    }
}

inline bool get_bool(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_boolean())
        throw ProtocolError("malformed", std::string("field '") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

}  // namespace detail

inline ClientMessage parse_client_message(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        throw ProtocolError("malformed", "message is not valid JSON");
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ProtocolError("malformed", "message must be an object with a string 'type'");
    const auto type = j.at("type").get<std::string>();
    if (type == "hello") {
        detail::only_keys(j, {"type", "protocol_version"});
        if (!j.contains("protocol_version") || !j.at("protocol_version").is_number_integer())
            throw ProtocolError("malformed", "hello needs an integer protocol_version");
        return Hello{j.at("protocol_version").get<int>()};
    }
    if (type == "reset") {
        detail::only_keys(j, {"type", "scenario"});
        if (!j.contains("scenario")) throw ProtocolError("malformed", "reset needs a scenario");
        const auto& s = j.at("scenario");
        if (s.is_string()) return Reset{s.get<std::string>(), std::nullopt};
        if (s.is_object()) {
            try {
                return Reset{"", io::scenario_from_json(s)};
            } catch (const ValidationError& e) {
                throw ProtocolError("invalid_scenario", e.what());
            }
        }
        throw ProtocolError("malformed", "scenario must be a name or an object");
    }
    if (type == "set_fins") {
        detail::only_keys(j, {"type", "left", "right", "caudal"});
        return SetFins{{detail::get_bool(j, "left"), detail::get_bool(j, "right"), detail::get_bool(j, "caudal")}};
    }
    if (type == "set_rate") {
        detail::only_keys(j, {"type", "snapshots_per_s"});
        if (!j.contains("snapshots_per_s") || !j.at("snapshots_per_s").is_number())
            throw ProtocolError("malformed", "set_rate needs a numeric snapshots_per_s");
        const double r = j.at("snapshots_per_s").get<double>();
        if (!(r >= 1.0 && r <= 60.0)) throw ProtocolError("invalid_rate", "snapshots_per_s must lie in [1, 60]");
        return SetRate{r};
    }
    if (type == "pause") {
        detail::only_keys(j, {"type"});
        return Pause{};
    }
    if (type == "resume") {
        detail::only_keys(j, {"type"});
        return Resume{};
    }
    throw ProtocolError("unknown_type", "unknown message type '" + type + "'");
}

inline json to_json(const ClientMessage& m) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Hello>) {
                return {{"type", "hello"}, {"protocol_version", v.protocol_version}};
            } else if constexpr (std::is_same_v<T, Reset>) {
                if (v.inline_scenario) return {{"type", "reset"}, {"scenario", io::scenario_to_json(*v.inline_scenario)}};
                return {{"type", "reset"}, {"scenario", v.scenario_name}};
            } else if constexpr (std::is_same_v<T, SetFins>) {
                return {{"type", "set_fins"}, {"left", v.fins[0]}, {"right", v.fins[1]}, {"caudal", v.fins[2]}};
            } else if constexpr (std::is_same_v<T, SetRate>) {
                return {{"type", "set_rate"}, {"snapshots_per_s", v.snapshots_per_s}};
            } else if constexpr (std::is_same_v<T, Pause>) {
                return {{"type", "pause"}};
            } else {
                return {{"type", "resume"}};
            }
        },
        m);
}

inline std::string serialize(const ClientMessage& m) { return to_json(m).dump(); }

inline json welcome_message(const std::string& role, const std::vector<std::string>& scenarios) {
    return {{"type", "welcome"},
            {"server_version", VIBRAFIN_VERSION},
            {"protocol_version", kProtocolVersion},
            {"role", role},
            {"scenarios", scenarios}};
}

inline json state_message(std::uint64_t tick, const loco::SimState& s, const loco::FinSet& fins,
                          const std::vector<loco::CollisionEvent>& events) {
    json ev = json::array();
    for (const auto& e : events)
        ev.push_back({{"t", e.t}, {"obstacle", e.obstacle}, {"x", e.contact_x}, {"y", e.contact_y}});
    return {{"type", "state"}, {"tick", tick}, {"t", s.t},       {"x", s.x},
            {"y", s.y},        {"theta", s.theta}, {"u", s.u},   {"v", s.v},
            {"r", s.r},        {"fins", io::fins_to_json(fins)}, {"events", ev}};
}

inline json error_message(const std::string& code, const std::string& message) {
    return {{"type", "error"}, {"code", code}, {"message", message}};
}

}  // namespace vibrafin::server
