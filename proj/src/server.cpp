#include "arena/server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <thread>

#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "arena/errors.hpp"

namespace arena {

using nlohmann::json;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

json state_message(const GameState& s) {
  json fighters = json::array();
  json combo = json::array();
  for (int i = 0; i < 2; ++i) {
    const FighterState& f = s.fighters[static_cast<std::size_t>(i)];
    const CharacterSpec& spec = s.rules->characters[static_cast<std::size_t>(i)];
    fighters.push_back({{"side", std::string(to_string(static_cast<Side>(i)))},
                        {"position", f.position},
                        {"health", f.health},
                        {"max_health", spec.max_health},
                        {"facing", std::string(to_string(f.facing))},
                        {"phase", std::string(to_string(f.phase))},
                        {"move", f.current_move >= 0 ? json(spec.moves[static_cast<std::size_t>(f.current_move)].id)
                                                     : json(nullptr)},
                        {"combo_hits_taken", f.combo_hits_taken}});
    combo.push_back(f.combo_hits_taken);
  }
  json projectiles = json::array();
  for (const Projectile& p : s.projectiles)
    projectiles.push_back({{"owner", std::string(to_string(p.owner))}, {"position", p.position}, {"speed", p.speed}});
  return json{{"type", "state"},   {"tick", s.tick},
              {"fighters", fighters}, {"projectiles", projectiles},
              {"timer", s.timer},    {"round_wins", s.round_wins},
              {"combo", combo}};
}

json round_end_message(const RoundResult& r) {
  return json{{"type", "round_end"}, {"winner", std::string(to_string(r.winner))}, {"cause", std::string(to_string(r.cause))}};
}

json match_end_message(const MatchResult& r, const std::string& replay_id) {
  return json{{"type", "match_end"}, {"winner", std::string(to_string(r.winner))}, {"replay_id", replay_id}};
}

json error_message(std::string_view code, std::string_view message) {
  return json{{"type", "error"}, {"code", code}, {"message", message}};
}

namespace {

/// Last-writer-wins input cell shared between the network and engine threads.
class InputCell {
 public:
  void put(Action a) {
    value_.store(0x1000000u | static_cast<std::uint32_t>(a.kind) << 16 | static_cast<std::uint32_t>(a.move) << 8 |
                 static_cast<std::uint32_t>(a.motion));
  }
  std::optional<Action> take() {
    const std::uint32_t v = value_.exchange(0);
    if (!v) return std::nullopt;
    return Action{static_cast<ActionKind>((v >> 16) & 0xFF), static_cast<std::uint8_t>((v >> 8) & 0xFF),
                  static_cast<Motion>(v & 0xFF)};
  }

 private:
  std::atomic<std::uint32_t> value_{0};
};

class RemoteHuman : public Agent {
 public:
  explicit RemoteHuman(InputCell& cell) : cell_(cell) {}
  Action decide(const DecisionContext& ctx) override {
    const auto a = cell_.take();
    if (!a || !ctx.obs.can_act || !is_legal(ctx.state, ctx.side, *a)) return Action::idle();
    return *a;
  }

 private:
  InputCell& cell_;
};

class Dummy : public Agent {
 public:
  Action decide(const DecisionContext&) override { return Action::idle(); }
};

}  // namespace

struct MatchServer::Impl {
  ServeOptions opts;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  int human = 0;

  // per session, touched only on the io thread unless atomic
  std::unique_ptr<websocket::stream<beast::tcp_stream>> ws;
  beast::flat_buffer buffer;
  std::deque<std::string> outbox;
  bool writing = false;
  bool closing = false;
  bool dead = false;
  bool joined = false;
  std::optional<std::string> violation;
  std::atomic<bool> stop_flag{false};
  InputCell input;
  std::thread engine;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> guard;
  SessionResult result;

  void send(json msg) {
    if (dead) return;
    outbox.push_back(msg.dump());
    pump();
  }

  void pump() {
    if (writing || dead) return;
    if (outbox.empty()) {
      if (closing) {
        closing = false;
        ws->async_close(websocket::close_code::normal, [this](beast::error_code) { shutdown(); });
      }
      return;
    }
    writing = true;
    ws->text(true);
    ws->async_write(asio::buffer(outbox.front()), [this](beast::error_code ec, std::size_t) {
      writing = false;
      outbox.pop_front();
      if (ec) {
        dead = true;
        stop_flag = true;
        shutdown();
        return;
      }
      pump();
    });
  }

  void close_after_flush() {
    closing = true;
    pump();
  }

  void shutdown() {
    dead = true;
    if (ws) {
      beast::error_code ec;
      beast::get_lowest_layer(*ws).socket().close(ec);
    }
    if (!engine.joinable()) guard.reset();
  }

  void fail_protocol(const std::string& why) {
    if (violation) return;
    violation = why;
    stop_flag = true;
    send(error_message("protocol_violation", why));
    close_after_flush();
  }

  void on_message(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::parse_error&) {
      fail_protocol("frame is not valid JSON");
      return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
      fail_protocol("message needs a string 'type'");
      return;
    }
    const auto type = msg.at("type").get<std::string>();
    if (type == "join") {
      if (joined) return fail_protocol("duplicate join");
      if (msg.contains("name") && !msg.at("name").is_string()) return fail_protocol("join name must be a string");
      joined = true;
      start_engine();
      return;
    }
    if (type == "input") {
      if (!joined) return fail_protocol("input before join");
      if (!msg.contains("action") || !msg.at("action").is_string())
        return fail_protocol("input needs a string 'action'");
      if (msg.contains("tick") && !msg.at("tick").is_number_integer())
        return fail_protocol("input tick must be an integer");
      const auto id = msg.at("action").get<std::string>();
      const auto a = parse_action(id, opts.config.rules.characters[static_cast<std::size_t>(human)]);
      if (!a) return fail_protocol("unknown action '" + id + "'");
      input.put(*a);
      return;
    }
    fail_protocol("unknown message type '" + type + "'");
  }

  void read_loop() {
    ws->async_read(buffer, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        stop_flag = true;
        if (!violation) shutdown();
        return;
      }
      const std::string text = beast::buffers_to_string(buffer.data());
      buffer.consume(buffer.size());
      on_message(text);
      if (!violation && !dead) read_loop();
    });
  }

  void start_engine() {
    MatchConfig cfg = opts.config;
    std::array<std::unique_ptr<Agent>, 2> agents;
    if (opts.training) {
      cfg.rules.training = true;
      cfg.max_ticks = opts.training_ticks;
      AgentSpec dummy{AgentKind::Human, "training_dummy", json{{"dummy", true}}};
      cfg.agents[static_cast<std::size_t>(1 - human)] = dummy;
      agents[static_cast<std::size_t>(1 - human)] = std::make_unique<Dummy>();
    } else {
      auto made = make_agents(cfg);
      agents[static_cast<std::size_t>(1 - human)] = std::move(made[static_cast<std::size_t>(1 - human)]);
    }
    agents[static_cast<std::size_t>(human)] = std::make_unique<RemoteHuman>(input);
    send(state_message(new_match(std::make_shared<const Ruleset>(cfg.rules), cfg.seed)));

    engine = std::thread([this, cfg, agents = std::move(agents)]() mutable {
      using Clock = std::chrono::steady_clock;
      auto deadline = Clock::now() + std::chrono::milliseconds(opts.tick_ms);
      MatchHooks hooks;
      hooks.should_stop = [this] { return stop_flag.load(); };
      hooks.on_tick = [&](const GameState& s, const std::array<Action, 2>&) {
        asio::post(ioc, [this, m = state_message(s)] { send(m); });
        std::this_thread::sleep_until(deadline);
        deadline += std::chrono::milliseconds(opts.tick_ms);
      };
      hooks.on_round_end = [this](const GameState&, const RoundResult& r) {
        asio::post(ioc, [this, m = round_end_message(r)] { send(m); });
      };
      Replay replay;
      std::optional<std::string> failure;
      try {
        replay = run_match(cfg, std::move(agents), hooks);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      asio::post(ioc, [this, replay = std::move(replay), failure]() mutable { finish(std::move(replay), failure); });
    });
  }

  void finish(Replay replay, const std::optional<std::string>& failure) {
    engine.join();
    if (failure) {
      send(error_message("internal", *failure));
    } else {
      result.replay_id = replay.digest.substr(0, 16);
      result.replay_path = opts.replay_dir / (result.replay_id + ".jsonl");
      save_replay(replay, result.replay_path);
      result.completed = !violation && match_result(replay_states(replay).back()).has_value();
      if (!violation) send(match_end_message(replay.result, result.replay_id));
      result.replay = std::move(replay);
    }
    if (dead) guard.reset();
    else if (!violation) close_after_flush();
  }
};

MatchServer::MatchServer(ServeOptions opts) : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.opts = std::move(opts);
  const auto& agents = m.opts.config.agents;
  const bool left = agents[0].kind == AgentKind::Human, right = agents[1].kind == AgentKind::Human;
  if (left == right) throw ConfigError("serve needs exactly one human side");
  m.human = left ? 0 : 1;
  if (m.opts.tick_ms < 1) throw ConfigError("tick_ms must be >= 1");
  beast::error_code ec;
  const auto addr = asio::ip::make_address(m.opts.address, ec);
  if (ec) throw ConfigError("bad listen address '" + m.opts.address + "'");
  const tcp::endpoint ep{addr, m.opts.port};
  m.acceptor.open(ep.protocol(), ec);
  if (!ec) m.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) m.acceptor.bind(ep, ec);
  if (ec == asio::error::address_in_use || ec == asio::error::access_denied)
    throw PortInUse("port " + std::to_string(m.opts.port) + " is not available: " + ec.message());
  if (ec) throw Error("cannot bind: " + ec.message());
  m.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw PortInUse("cannot listen: " + ec.message());
}

MatchServer::~MatchServer() {
  stop();
  if (impl_->engine.joinable()) impl_->engine.join();
}

std::uint16_t MatchServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void MatchServer::stop() {
  Impl& m = *impl_;
  m.stop_flag = true;
  asio::post(m.ioc, [&m] {
    beast::error_code ec;
    m.acceptor.cancel(ec);
    if (!m.engine.joinable()) m.shutdown();
  });
}

SessionResult MatchServer::serve_one() {
  Impl& m = *impl_;
  m.ioc.restart();
  m.result = {};
  m.outbox.clear();
  m.writing = m.closing = m.dead = m.joined = false;
  m.violation.reset();
  m.stop_flag = false;
  m.guard.emplace(m.ioc.get_executor());
  m.acceptor.async_accept([&m](beast::error_code ec, tcp::socket sock) {
    if (ec) {
      m.guard.reset();
      return;
    }
    m.ws = std::make_unique<websocket::stream<beast::tcp_stream>>(std::move(sock));
    m.ws->async_accept([&m](beast::error_code ec2) {
      if (ec2) {
        m.shutdown();
        return;
      }
      m.read_loop();
    });
  });
  m.ioc.run();
  if (m.engine.joinable()) m.engine.join();
  m.result.error = m.violation;
  m.ws.reset();
  return std::move(m.result);
}

}  // namespace arena
