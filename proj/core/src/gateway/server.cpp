#include "emg/gateway/server.hpp"

#include <atomic>
#include <deque>
#include <fstream>
#include <iostream>
#include <list>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "emg/error.hpp"
#include "emg/gateway/outbox.hpp"
#include "emg/ingest/paced_source.hpp"
#include "emg/ingest/source_spec.hpp"
#include "emg/ingest/stream.hpp"

namespace emg::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

/// Blocks handed from the source thread to the event loop. Bounded; when
/// full the oldest block is dropped (the extractor sees a gap).
class BlockQueue {
 public:
  explicit BlockQueue(std::size_t capacity) : capacity_(capacity) {}
  void push(SampleBlock b) {
    std::lock_guard lock(mu_);
    if (q_.size() >= capacity_) {
      q_.pop_front();
      ++dropped_;
    }
    q_.push_back(std::move(b));
  }
  std::deque<SampleBlock> drain() {
    std::lock_guard lock(mu_);
    std::deque<SampleBlock> out;
    out.swap(q_);
    return out;
  }

 private:
  std::mutex mu_;
  std::deque<SampleBlock> q_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
};

/// Owns the source and the thread reading it.
class Producer {
 public:
  Producer(ingest::OpenedSource opened, double speed, BlockQueue& queue) : queue_(queue) {
    tcp_ = dynamic_cast<ingest::StreamClient*>(opened.source.get());
    info_.sample_rate_hz = opened.source->sample_rate();
    info_.channels = opened.source->channels();
    info_.impedances_ohm = opened.source->impedances();
    if (tcp_) {
      source_ = std::move(opened.source);
    } else {
      source_ = std::make_unique<ingest::PacedSource>(std::move(opened.source), speed);
    }
    thread_ = std::thread([this] {
      SampleBlock b;
      try {
        while (!stop_ && source_->next(b, 100)) queue_.push(b);
      } catch (const std::exception&) {
        failed_ = true;
      }
      done_ = true;
    });
  }
  ~Producer() {
    stop_ = true;
    if (tcp_) tcp_->interrupt();
    if (thread_.joinable()) thread_.join();
  }
  const SourceInfo& info() const { return info_; }
  SourceInfo& info() { return info_; }
  bool done() const { return done_; }

 private:
  BlockQueue& queue_;
  std::unique_ptr<ingest::BlockSource> source_;
  ingest::StreamClient* tcp_ = nullptr;
  SourceInfo info_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> done_{false};
  std::atomic<bool> failed_{false};
  std::thread thread_;
};

class Connection;

}  // namespace

struct GatewayServer::Impl {
  explicit Impl(ServerOptions o);

  void accept_loop();
  void schedule_tick();
  void on_tick();
  void broadcast(const std::vector<Event>& events);
  void handle_command_text(const std::string& text);
  void remove(Connection* c);
  void open_source(const std::string& descriptor);

  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::chrono::steady_clock::time_point next_tick;
  std::unique_ptr<Session> session;
  BlockQueue queue{4000};
  std::unique_ptr<Producer> producer;
  std::list<std::shared_ptr<Connection>> clients;
  std::ofstream log;
};

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, GatewayServer::Impl& server)
      : stream_(std::move(socket)), server_(server), outbox_(server.options.outbox_capacity) {}

  void start() { read_request(); }

  /// false when the client overflowed and is being dropped.
  bool send(const Event& e) {
    if (!ws_ || closing_) return true;
    if (!outbox_.push(e)) {
      closing_ = true;
      auto self = shared_from_this();
      ws_->async_close(websocket::close_reason(websocket::close_code::policy_error, "outbox overflow"),
                       [self](beast::error_code) { self->server_.remove(self.get()); });
      return false;
    }
    flush();
    return true;
  }

  bool is_websocket() const { return ws_ != nullptr; }
  void close() {
    beast::error_code ec;
    if (ws_) {
      beast::get_lowest_layer(*ws_).socket().close(ec);
    } else {
      stream_.socket().close(ec);
    }
  }

 private:
  void read_request() {
    auto self = shared_from_this();
    http::async_read(stream_, buffer_, request_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->server_.remove(self.get());
      self->on_request();
    });
  }

  void on_request() {
    const std::string target(request_.target());
    if (websocket::is_upgrade(request_) && (target == "/ws" || target.rfind("/ws?", 0) == 0)) {
      ws_ = std::make_unique<websocket::stream<beast::tcp_stream>>(std::move(stream_));
      ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_->text(true);
      auto self = shared_from_this();
      ws_->async_accept(request_, [self](beast::error_code ec) {
        if (ec) return self->server_.remove(self.get());
        self->server_.session->set_client_count(self->server_.clients.size());
        self->send(self->server_.session->session_event());
        self->read_message();
      });
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(request_.version());
    res->keep_alive(false);
    res->set(http::field::server, "emg-gateway");
    if (request_.method() == http::verb::get && target == "/state") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->set(http::field::access_control_allow_origin, "*");
      res->body() = server_.session->state_json();
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    auto self = shared_from_this();
    http::async_write(stream_, *res, [self, res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      self->server_.remove(self.get());
    });
  }

  void read_message() {
    auto self = shared_from_this();
    ws_->async_read(in_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->server_.remove(self.get());
      const std::string text = beast::buffers_to_string(self->in_.data());
      self->in_.consume(self->in_.size());
      self->server_.handle_command_text(text);
      self->read_message();
    });
  }

  void flush() {
    if (writing_ || closing_ || outbox_.empty()) return;
    writing_ = true;
    out_ = outbox_.pop()->to_json();
    auto self = shared_from_this();
    ws_->async_write(asio::buffer(out_), [self](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return self->server_.remove(self.get());
      self->flush();
    });
  }

  beast::tcp_stream stream_;
  std::unique_ptr<websocket::stream<beast::tcp_stream>> ws_;
  GatewayServer::Impl& server_;
  beast::flat_buffer buffer_;
  beast::flat_buffer in_;
  http::request<http::string_body> request_;
  ClientOutbox outbox_;
  std::string out_;
  bool writing_ = false;
  bool closing_ = false;
};

std::unique_ptr<RobotLink> make_robot(const ServerOptions& o) {
  if (o.sim) return std::make_unique<RemoteRobot>(*o.sim);
  return std::make_unique<LocalRobot>(o.session.robot);
}

}  // namespace

GatewayServer::Impl::Impl(ServerOptions o)
    : options(std::move(o)),
      acceptor(ioc),
      timer(ioc),
      session(std::make_unique<Session>(options.session, make_robot(options))) {
  const auto addr = asio::ip::make_address(options.listen.host.empty() ? "0.0.0.0" : options.listen.host);
  const tcp::endpoint ep(addr, options.listen.port);
  acceptor.open(ep.protocol());
  acceptor.set_option(asio::socket_base::reuse_address(true));
  acceptor.bind(ep);
  acceptor.listen();
  if (options.event_log) {
    log.open(*options.event_log, std::ios::app);
    if (!log) throw Error("cannot open event log " + options.event_log->string());
  }
  if (options.bundle) session->set_bundle(std::make_shared<model::ModelBundle>(model::load_bundle(*options.bundle)));
  if (options.source) open_source(*options.source);
  if (options.start_decoding && options.bundle) broadcast(session->handle_command(R"({"cmd":"start_session"})"));
}

void GatewayServer::Impl::open_source(const std::string& descriptor) {
  producer.reset();
  queue.drain();
  try {
    auto opened = ingest::open_source(ingest::SourceSpec::parse(descriptor));
    producer = std::make_unique<Producer>(std::move(opened), options.source_speed, queue);
    producer->info().descriptor = descriptor;
    broadcast(session->attach_source(producer->info()));
  } catch (const Error& e) {
    broadcast(session->attach_source(std::nullopt));
    broadcast({session->report_error(std::string("cannot open source: ") + e.what())});
  }
}

void GatewayServer::Impl::accept_loop() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    auto c = std::make_shared<Connection>(std::move(socket), *this);
    clients.push_back(c);
    c->start();
    accept_loop();
  });
}

void GatewayServer::Impl::remove(Connection* c) {
  clients.remove_if([c](const std::shared_ptr<Connection>& p) { return p.get() == c; });
  std::size_t ws = 0;
  for (const auto& p : clients) ws += p->is_websocket() ? 1 : 0;
  session->set_client_count(ws);
}

void GatewayServer::Impl::broadcast(const std::vector<Event>& events) {
  for (const auto& e : events) {
    if (log.is_open()) log << e.to_json() << '\n';
    // copy: a send may remove a client
    const auto targets = clients;
    for (const auto& c : targets) c->send(e);
  }
  if (log.is_open()) log.flush();
}

void GatewayServer::Impl::handle_command_text(const std::string& text) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    broadcast(session->handle_command(line));
    if (auto req = session->take_source_request()) open_source(*req);
  }
}

void GatewayServer::Impl::schedule_tick() {
  next_tick += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / options.session.tick_rate_hz));
  timer.expires_at(next_tick);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    on_tick();
    schedule_tick();
  });
}

void GatewayServer::Impl::on_tick() {
  for (auto& b : queue.drain()) session->feed(b);
  broadcast(session->tick());
}

GatewayServer::GatewayServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

GatewayServer::~GatewayServer() {
  stop();
  impl_->producer.reset();
}

std::uint16_t GatewayServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void GatewayServer::run() {
  impl_->accept_loop();
  impl_->next_tick = std::chrono::steady_clock::now();
  impl_->schedule_tick();
  impl_->ioc.run();
  for (auto& c : impl_->clients) c->close();
  impl_->clients.clear();
}

void GatewayServer::stop() {
  asio::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    impl_->timer.cancel();
    for (auto& c : impl_->clients) c->close();
  });
  impl_->ioc.stop();
}

}  // namespace emg::gateway
