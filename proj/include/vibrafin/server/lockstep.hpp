#pragma once

// Transport-independent core of the interactive server.
//
// Engine owns the simulation and advances it one fixed tick at a time;
// fin commands are latched and take effect on the next tick. Every
// state-changing command is appended to the command log as
//
//   <tick> <compact JSON client message>\n
//
// where <tick> is the number of physics ticks completed when the command
// was applied (global over the session, not reset by `reset`). Hub maps
// connections to roles and turns inbound frames into outbound frames; it is
// driven from a single thread. replay() rebuilds the last segment of a log
// as a Scenario and runs it through loco::simulate().

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"
#include "vibrafin/server/protocol.hpp"

namespace vibrafin::server {

inline constexpr double kPhysicsDt = 1e-3;

using ScenarioLibrary = std::map<std::string, io::ScenarioFile>;

inline ScenarioLibrary builtin_scenarios() {
    ScenarioLibrary lib;
    const json plumbing = {{"obstacle_layout", "invented plumbing, not measured"}};

    io::ScenarioFile open;
    open.scenario.name = "open_water";
    open.scenario.description = "unbounded water without obstacles";
    open.metadata = {{"obstacle_layout", "none"}};
    lib[open.scenario.name] = open;

    io::ScenarioFile balls;
    balls.scenario.name = "floating_balls";
    balls.scenario.description = "nine floating balls, radius 30 mm, 3x3 grid with 0.18 m pitch ahead of the fish";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) balls.scenario.obstacles.push_back({0.25 + 0.18 * i, -0.18 + 0.18 * j, 0.030});
    balls.metadata = plumbing;
    lib[balls.scenario.name] = balls;

    io::ScenarioFile post;
    post.scenario.name = "measurement_post";
    post.scenario.description = "single post of radius 50 mm, 0.4 m ahead of the fish";
    post.scenario.obstacles.push_back({0.4, 0.0, 0.050});
    post.metadata = plumbing;
    lib[post.scenario.name] = post;
    return lib;
}

inline std::vector<std::string> scenario_names(const ScenarioLibrary& lib) {
    std::vector<std::string> out;
    for (const auto& [name, s] : lib) out.push_back(name);
    return out;
}

inline io::ScenarioFile resolve(const Reset& r, const ScenarioLibrary& lib) {
    io::ScenarioFile s;
    if (r.inline_scenario) {
        s = *r.inline_scenario;
    } else {
        const auto it = lib.find(r.scenario_name);
        if (it == lib.end()) throw ProtocolError("unknown_scenario", "unknown scenario '" + r.scenario_name + "'");
        s = it->second;
    }
    // the session clock always restarts at zero
    s.scenario.initial.t = 0.0;
    return s;
}

class Engine {
public:
    explicit Engine(loco::FishBody body, double dt = kPhysicsDt, std::ostream* log = nullptr)
        : body_(std::move(body)), dt_(dt), log_(log) {
        body_.validate();
    }

    void reset(const io::ScenarioFile& scenario, const Reset& as_logged) {
        scenario_ = scenario;
        sim_.emplace(body_, scenario.scenario.obstacles, dt_, scenario.scenario.initial);
        fins_ = loco::kNoFins;
        record(as_logged);
        if (record_states_) states_.assign(1, sim_->state());
    }

    void set_fins(const loco::FinSet& fins) {
        fins_ = fins;
        record(SetFins{fins});
    }
    void pause() {
        paused_ = true;
        record(Pause{});
    }
    void resume() {
        paused_ = false;
        record(Resume{});
    }
    void set_rate(double r) { record(SetRate{r}); }

    bool has_scenario() const { return sim_.has_value(); }
    bool paused() const { return paused_; }

    std::vector<loco::CollisionEvent> tick() {
        if (!sim_) throw ValidationError("session", "no scenario loaded");
        auto events = sim_->tick(fins_);
        ++ticks_;
        if (record_states_) states_.push_back(sim_->state());
        return events;
    }

    std::uint64_t ticks() const { return ticks_; }
    const loco::SimState& state() const { return sim_->state(); }
    // fins latched for the next tick
    const loco::FinSet& fins() const { return fins_; }
    // fins in effect during the last tick
    const loco::FinSet& applied_fins() const { return sim_->fins(); }
    double dt() const { return dt_; }
    const loco::FishBody& body() const { return body_; }

    // keep every state of the current segment (tests and replay checks)
    void record_states(bool on) { record_states_ = on; }
    const std::vector<loco::SimState>& states() const { return states_; }

private:
    void record(const ClientMessage& m) {
        if (log_) {
            (*log_) << ticks_ << ' ' << serialize(m) << '\n';
            log_->flush();
        }
    }

    loco::FishBody body_;
    double dt_;
    std::ostream* log_;
    std::optional<loco::Simulator> sim_;
    io::ScenarioFile scenario_;
    loco::FinSet fins_ = loco::kNoFins;
    bool paused_ = false;
    std::uint64_t ticks_ = 0;
    bool record_states_ = false;
    std::vector<loco::SimState> states_;
};

using ConnectionId = std::uint64_t;

struct Outbound {
    ConnectionId connection = 0;
    std::string text;
    bool close = false;
    bool state = false;
};

class Hub {
public:
    Hub(Engine& engine, ScenarioLibrary library, const std::string& initial_scenario = "open_water")
        : engine_(engine), library_(std::move(library)) {
        engine_.reset(resolve(Reset{initial_scenario, std::nullopt}, library_), Reset{initial_scenario, std::nullopt});
    }

    std::vector<Outbound> connect(ConnectionId id) {
        Client c;
        if (!controller_) {
            controller_ = id;
            c.controller = true;
        }
        clients_[id] = c;
        return {};
    }

    std::vector<Outbound> disconnect(ConnectionId id) {
        clients_.erase(id);
        if (controller_ && *controller_ == id) {
            controller_.reset();
            if (engine_.fins() != loco::kNoFins) engine_.set_fins(loco::kNoFins);
            if (!engine_.paused()) engine_.pause();
        }
        return {};
    }

    std::vector<Outbound> message(ConnectionId id, const std::string& text) {
        std::vector<Outbound> out;
        auto it = clients_.find(id);
        if (it == clients_.end()) return out;
        Client& c = it->second;
        ClientMessage msg;
        try {
            msg = parse_client_message(text);
        } catch (const ProtocolError& e) {
            out.push_back({id, error_message(e.code(), e.what()).dump(), true});
            return out;
        }

        if (!c.greeted) {
            const auto* hello = std::get_if<Hello>(&msg);
            if (!hello) {
                out.push_back({id, error_message("hello_required", "first message must be hello").dump(), true});
                return out;
            }
            if (hello->protocol_version != kProtocolVersion) {
                out.push_back({id,
                               error_message("version_mismatch", "server speaks protocol version " +
                                                                     std::to_string(kProtocolVersion))
                                   .dump(),
                               true});
                return out;
            }
            c.greeted = true;
            out.push_back({id, welcome_message(c.controller ? "controller" : "observer", scenario_names(library_)).dump()});
            out.push_back({id, snapshot().dump(), false, true});
            if (c.controller && engine_.paused()) engine_.resume();
            return out;
        }
        if (std::holds_alternative<Hello>(msg)) {
            out.push_back({id, error_message("duplicate_hello", "hello already received").dump()});
            return out;
        }
        if (!c.controller) {
            out.push_back({id, error_message("observer", "observers may only send hello").dump()});
            return out;
        }

        if (const auto* r = std::get_if<Reset>(&msg)) {
            io::ScenarioFile s;
            try {
                s = resolve(*r, library_);
            } catch (const ProtocolError& e) {
                out.push_back({id, error_message(e.code(), e.what()).dump()});
                return out;
            }
            engine_.reset(s, *r);
            pending_events_.clear();
            const auto snap = snapshot().dump();
            for (const auto& [cid, cl] : clients_)
                if (cl.greeted) out.push_back({cid, snap, false, true});
        } else if (const auto* f = std::get_if<SetFins>(&msg)) {
            engine_.set_fins(f->fins);
        } else if (const auto* sr = std::get_if<SetRate>(&msg)) {
            rate_ = sr->snapshots_per_s;
            engine_.set_rate(rate_);
        } else if (std::holds_alternative<Pause>(msg)) {
            if (!engine_.paused()) engine_.pause();
        } else if (std::holds_alternative<Resume>(msg)) {
            if (engine_.paused()) engine_.resume();
        }
        return out;
    }

    bool running() const {
        return controller_.has_value() && clients_.at(*controller_).greeted && !engine_.paused() &&
               engine_.has_scenario();
    }

    /// One physics tick (if running) and any snapshot that falls due.
    std::vector<Outbound> advance() {
        std::vector<Outbound> out;
        if (!running()) return out;
        auto events = engine_.tick();
        pending_events_.insert(pending_events_.end(), events.begin(), events.end());
        if (engine_.ticks() >= last_snapshot_tick_ + snapshot_interval()) {
            const auto snap = snapshot().dump();
            for (const auto& [cid, cl] : clients_)
                if (cl.greeted) out.push_back({cid, snap, false, true});
        }
        return out;
    }

    std::uint64_t snapshot_interval() const {
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / (rate_ * engine_.dt()))));
    }

    std::optional<ConnectionId> controller() const { return controller_; }
    Engine& engine() { return engine_; }

private:
    struct Client {
        bool controller = false;
        bool greeted = false;
    };

    json snapshot() {
        last_snapshot_tick_ = engine_.ticks();
        auto m = state_message(engine_.ticks(), engine_.state(), engine_.fins(), pending_events_);
        pending_events_.clear();
        return m;
    }

    Engine& engine_;
    ScenarioLibrary library_;
    std::map<ConnectionId, Client> clients_;
    std::optional<ConnectionId> controller_;
    double rate_ = 30.0;
    std::uint64_t last_snapshot_tick_ = 0;
    std::vector<loco::CollisionEvent> pending_events_;
};

// ---------------------------------------------------------------------------
// Replay

struct LogEntry {
    std::uint64_t tick = 0;
    ClientMessage message;
};

inline std::vector<LogEntry> parse_log(std::istream& in) {
    std::vector<LogEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0)
            throw ValidationError("replay", "line " + std::to_string(line_no) + " lacks a tick field");
        LogEntry e;
        try {
            std::size_t used = 0;
            e.tick = std::stoull(line.substr(0, sp), &used);
            if (used != sp) throw std::invalid_argument("tick");
        } catch (const std::exception&) {
            throw ValidationError("replay", "line " + std::to_string(line_no) + " has a malformed tick");
        }
        e.message = parse_client_message(line.substr(sp + 1));
        if (!out.empty() && e.tick < out.back().tick)
            throw ValidationError("replay", "ticks decrease at line " + std::to_string(line_no));
        out.push_back(std::move(e));
    }
    return out;
}

struct ReplayPlan {
    io::ScenarioFile scenario;  // schedule filled from the fin commands
    std::uint64_t start_tick = 0;
};

/// Builds the offline scenario for the last reset segment of `log`, ending
/// at global tick `end_tick`.
inline ReplayPlan plan_replay(const std::vector<LogEntry>& log, const ScenarioLibrary& library, std::uint64_t end_tick,
                              double dt = kPhysicsDt) {
    std::optional<std::size_t> last_reset;
    for (std::size_t i = 0; i < log.size(); ++i)
        if (std::holds_alternative<Reset>(log[i].message)) last_reset = i;
    if (!last_reset) throw ValidationError("replay", "log contains no reset");

    ReplayPlan plan;
    plan.scenario = resolve(std::get<Reset>(log[*last_reset].message), library);
    plan.start_tick = log[*last_reset].tick;
    if (end_tick < plan.start_tick) throw ValidationError("replay", "end tick precedes the last reset");

    auto& sc = plan.scenario.scenario;
    const std::uint64_t n = end_tick - plan.start_tick;
    sc.dt_s = dt;
    sc.duration_s = static_cast<double>(n) * dt;
    sc.decimation = 1;
    sc.schedule.clear();

    loco::FinSet current = loco::kNoFins;
    std::uint64_t since = 0;
    auto close_interval = [&](std::uint64_t until) {
        if (until > since && current != loco::kNoFins)
            sc.schedule.push_back({static_cast<double>(since) * dt, static_cast<double>(until) * dt, current});
    };
    for (std::size_t i = *last_reset + 1; i < log.size(); ++i) {
        const auto* f = std::get_if<SetFins>(&log[i].message);
        if (!f) continue;
        const std::uint64_t local = std::min(log[i].tick, end_tick) - plan.start_tick;
        close_interval(local);
        current = f->fins;
        since = local;
    }
    close_interval(n);
    return plan;
}

inline loco::Trajectory replay(const std::vector<LogEntry>& log, const ScenarioLibrary& library,
                               const loco::FishBody& body, std::uint64_t end_tick, double dt = kPhysicsDt) {
    const auto plan = plan_replay(log, library, end_tick, dt);
    return loco::simulate(plan.scenario.scenario, body);
}

}  // namespace vibrafin::server
