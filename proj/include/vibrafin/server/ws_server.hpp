#pragma once

// WebSocket transport for the simulation server (Boost.Beast).
//
// Threads: one network thread runs the io_context; one physics thread owns
// the Hub and Engine. They exchange messages only through two queues:
// inbound connection events to the physics thread, outbound frames posted
// back onto the io_context. The physics loop is paced at one tick per dt of
// wall-clock time; pacing never changes the sequence of physics states.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "vibrafin/server/lockstep.hpp"

namespace vibrafin::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8765;
    std::string initial_scenario = "open_water";
    // command log; empty disables logging
    std::string replay_path;
    double dt_s = kPhysicsDt;
};

class WsServer {
public:
    WsServer(loco::FishBody body, ScenarioLibrary library, ServerOptions options)
        : options_(std::move(options)), acceptor_(io_) {
        if (!options_.replay_path.empty()) {
            log_.open(options_.replay_path, std::ios::binary | std::ios::app);
            if (!log_) throw ConfigurationError("replay", "cannot open '" + options_.replay_path + "'");
        }
        engine_ = std::make_unique<Engine>(std::move(body), options_.dt_s, log_.is_open() ? &log_ : nullptr);
        if (!library.count(options_.initial_scenario))
            throw ConfigurationError("scenario", "unknown scenario '" + options_.initial_scenario + "'");
        hub_ = std::make_unique<Hub>(*engine_, std::move(library), options_.initial_scenario);

        const tcp::endpoint ep(asio::ip::make_address(options_.address), options_.port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(asio::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
    }

    ~WsServer() { stop(); }

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    /// Starts the network and physics threads and returns immediately.
    void start() {
        running_ = true;
        do_accept();
        net_thread_ = std::thread([this] { io_.run(); });
        physics_thread_ = std::thread([this] { physics_loop(); });
    }

    void stop() {
        if (!running_.exchange(false)) return;
        inbound_cv_.notify_all();
        if (physics_thread_.joinable()) physics_thread_.join();
        asio::post(io_, [this] {
            beast::error_code ec;
            acceptor_.close(ec);
            for (auto& [id, s] : sessions_) s->force_close();
            sessions_.clear();
        });
        io_.stop();
        if (net_thread_.joinable()) net_thread_.join();
    }

private:
    struct InboundEvent {
        enum class Kind { Connect, Message, Disconnect } kind;
        ConnectionId id;
        std::string text;
    };

    class Session : public std::enable_shared_from_this<Session> {
    public:
        Session(tcp::socket socket, ConnectionId id, WsServer& server)
            : ws_(std::move(socket)), id_(id), server_(server) {}

        void start() {
            ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
                if (ec) return;
                self->server_.push_inbound({InboundEvent::Kind::Connect, self->id_, {}});
                self->do_read();
            });
        }

        // Called on the network thread. A queued but unsent state frame is
        // replaced by a newer one (latest wins).
        void send(std::string text, bool is_state, bool close_after) {
            if (closing_) return;
            if (is_state && !queue_.empty() && queue_.back().is_state && !(writing_ && queue_.size() == 1)) {
                queue_.back().text = std::move(text);
            } else {
                queue_.push_back({std::move(text), is_state, close_after});
            }
            if (!writing_) do_write();
        }

        void force_close() {
            beast::error_code ec;
            beast::get_lowest_layer(ws_).socket().close(ec);
        }

    private:
        struct Frame {
            std::string text;
            bool is_state;
            bool close_after;
        };

        void do_read() {
            ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
                if (ec) {
                    self->server_.push_inbound({InboundEvent::Kind::Disconnect, self->id_, {}});
                    self->server_.forget(self->id_);
                    return;
                }
                std::string text = beast::buffers_to_string(self->buffer_.data());
                self->buffer_.consume(self->buffer_.size());
                self->server_.push_inbound({InboundEvent::Kind::Message, self->id_, std::move(text)});
                self->do_read();
            });
        }

        void do_write() {
            if (queue_.empty()) {
                writing_ = false;
                return;
            }
            writing_ = true;
            ws_.text(true);
            ws_.async_write(asio::buffer(queue_.front().text), [self = shared_from_this()](beast::error_code ec,
                                                                                             std::size_t) {
                if (ec) return;
                const bool close_after = self->queue_.front().close_after;
                self->queue_.pop_front();
                if (close_after) {
                    self->closing_ = true;
                    self->ws_.async_close(websocket::close_code::policy_error, [self](beast::error_code) {});
                    return;
                }
                self->do_write();
            });
        }

        websocket::stream<beast::tcp_stream> ws_;
        ConnectionId id_;
        WsServer& server_;
        beast::flat_buffer buffer_;
        std::deque<Frame> queue_;
        bool writing_ = false;
        bool closing_ = false;
    };

    void do_accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            const ConnectionId id = ++next_id_;
            auto s = std::make_shared<Session>(std::move(socket), id, *this);
            sessions_[id] = s;
            s->start();
            do_accept();
        });
    }

    void forget(ConnectionId id) { sessions_.erase(id); }

    void push_inbound(InboundEvent e) {
        {
            std::lock_guard lock(inbound_mutex_);
            inbound_.push_back(std::move(e));
        }
        inbound_cv_.notify_one();
    }

    void deliver(std::vector<Outbound> frames) {
        if (frames.empty()) return;
        asio::post(io_, [this, frames = std::move(frames)]() mutable {
            for (auto& f : frames) {
                const auto it = sessions_.find(f.connection);
                if (it == sessions_.end()) continue;
                it->second->send(std::move(f.text), f.state, f.close);
            }
        });
    }

    void physics_loop() {
        using clock = std::chrono::steady_clock;
        const auto dt = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(options_.dt_s));
        auto deadline = clock::now();
        while (running_) {
            std::deque<InboundEvent> events;
            {
                std::unique_lock lock(inbound_mutex_);
                if (!hub_->running())
                    inbound_cv_.wait_for(lock, std::chrono::milliseconds(5),
                                         [this] { return !inbound_.empty() || !running_; });
                events.swap(inbound_);
            }
            std::vector<Outbound> out;
            for (auto& e : events) {
                std::vector<Outbound> r;
                switch (e.kind) {
                    case InboundEvent::Kind::Connect: r = hub_->connect(e.id); break;
                    case InboundEvent::Kind::Message: r = hub_->message(e.id, e.text); break;
                    case InboundEvent::Kind::Disconnect: r = hub_->disconnect(e.id); break;
                }
                out.insert(out.end(), r.begin(), r.end());
            }
            if (!hub_->running()) {
                deliver(std::move(out));
                deadline = clock::now();
                continue;
            }
            auto r = hub_->advance();
            out.insert(out.end(), r.begin(), r.end());
            deliver(std::move(out));

            deadline += dt;
            const auto now = clock::now();
            if (deadline > now) {
                std::this_thread::sleep_until(deadline);
            } else if (now - deadline > std::chrono::milliseconds(250)) {
                deadline = now;
            }
        }
    }

    ServerOptions options_;
    asio::io_context io_;
    tcp::acceptor acceptor_;
    std::ofstream log_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<Hub> hub_;
    std::map<ConnectionId, std::shared_ptr<Session>> sessions_;
    std::atomic<ConnectionId> next_id_{0};
    std::mutex inbound_mutex_;
    std::condition_variable inbound_cv_;
    std::deque<InboundEvent> inbound_;
    std::atomic<bool> running_{false};
    std::thread net_thread_;
    std::thread physics_thread_;
};

}  // namespace vibrafin::server
