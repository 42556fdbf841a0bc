#pragma once

// WebSocket front end for LiveSession (Boost.Beast, blocking I/O, one thread
// per connection). Session options come from the upgrade request's query:
//   ws://host:port/?variant=L%2BWP&revision=exp1&speed_deg_s=6.4
// Plain HTTP GET /layout?variant=... returns the layout JSON.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "eyetype/config.hpp"
#include "eyetype/session.hpp"

namespace eyetype {

namespace beast = boost::beast;
namespace http = boost::beast::http;
namespace websocket = boost::beast::websocket;
namespace net = boost::asio;
using tcp = boost::asio::ip::tcp;

namespace detail {

inline std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

inline std::map<std::string, std::string> query_params(std::string_view target) {
  std::map<std::string, std::string> out;
  const auto q = target.find('?');
  if (q == std::string_view::npos) return out;
  const std::string query(target.substr(q + 1));
  std::size_t start = 0;
  while (start < query.size()) {
    std::size_t end = query.find('&', start);
    if (end == std::string::npos) end = query.size();
    const std::string part = query.substr(start, end - start);
    const auto eq = part.find('=');
    if (eq != std::string::npos) out[url_decode(part.substr(0, eq))] = url_decode(part.substr(eq + 1));
    start = end + 1;
  }
  return out;
}

}  // namespace detail

class Server {
 public:
  explicit Server(AppConfig config)
      : config_(std::move(config)),
        model_(cached_model(config_.corpus.empty() ? phrase_corpus() : config_.corpus)) {}

  ~Server() { stop(); }

  /// Binds and starts accepting. Port 0 picks a free port; see port().
  void start() {
    const auto addr = net::ip::make_address(config_.service.host);
    acceptor_ = std::make_unique<tcp::acceptor>(ioc_, tcp::endpoint(addr, config_.service.port));
    port_ = acceptor_->local_endpoint().port();
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  unsigned short port() const { return port_; }

  void stop() {
    if (!running_.exchange(false)) return;
    beast::error_code ec;
    {
      // wake the blocking accept
      net::io_context wake_ioc;
      tcp::socket wake(wake_ioc);
      auto host = acceptor_->local_endpoint().address();
      if (host.is_unspecified()) host = net::ip::make_address("127.0.0.1");
      wake.connect(tcp::endpoint(host, port_), ec);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    acceptor_->close(ec);
    {
      std::lock_guard lock(mu_);
      for (auto& s : sockets_)
        if (auto sock = s.lock()) sock->shutdown(tcp::socket::shutdown_both, ec);
    }
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(mu_);
      workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
  }

  /// Layout for the request's query parameters.
  std::shared_ptr<const InterfaceLayout> layout_for(const std::map<std::string, std::string>& q) const {
    Variant variant = config_.service.default_variant;
    Revision revision = config_.service.default_revision;
    LayoutParams params = config_.layout;
    if (auto it = q.find("variant"); it != q.end()) variant = parse_variant(it->second);
    if (auto it = q.find("revision"); it != q.end()) revision = parse_revision(it->second);
    if (auto it = q.find("speed_deg_s"); it != q.end())
      params.move_speed_px_s = speed_px_per_s(std::stod(it->second), config_.screen);
    if (auto it = q.find("speed"); it != q.end()) params.move_speed_px_s = std::stod(it->second);
    return std::make_shared<const InterfaceLayout>(build_layout(variant, revision, config_.screen, params));
  }

 private:
  void accept_loop() {
    while (running_) {
      auto sock = std::make_shared<tcp::socket>(ioc_);
      beast::error_code ec;
      acceptor_->accept(*sock, ec);
      if (ec) {
        if (!running_) return;
        continue;
      }
      std::lock_guard lock(mu_);
      sockets_.push_back(sock);
      workers_.emplace_back([this, sock] { serve(sock); });
    }
  }

  std::string next_session_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "session-%04u", ++session_counter_);
    return buf;
  }

  void serve(std::shared_ptr<tcp::socket> sock) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(*sock, buffer, req, ec);
    if (ec) return;

    std::shared_ptr<const InterfaceLayout> layout;
    std::string bad_request;
    try {
      const auto target = req.target();
      layout = layout_for(detail::query_params(std::string_view(target.data(), target.size())));
    } catch (const std::exception& e) {
      bad_request = e.what();
    }

    if (!websocket::is_upgrade(req)) {
      http::response<http::string_body> res;
      res.version(req.version());
      res.set(http::field::content_type, "application/json");
      res.set(http::field::access_control_allow_origin, "*");
      const std::string target(req.target());
      const auto path = target.substr(0, target.find('?'));
      if (!bad_request.empty()) {
        res.result(http::status::bad_request);
        res.body() = nlohmann::json{{"error", bad_request}}.dump();
      } else if (path == "/layout") {
        res.result(http::status::ok);
        res.body() = to_json(*layout).dump();
      } else {
        res.result(http::status::not_found);
        res.body() = R"({"error":"not found"})";
      }
      res.prepare_payload();
      http::write(*sock, res, ec);
      sock->shutdown(tcp::socket::shutdown_both, ec);
      return;
    }

    websocket::stream<tcp::socket&> ws(*sock);
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    if (!bad_request.empty()) {
      ws.write(net::buffer(nlohmann::json{{"type", "error"}, {"message", bad_request}}.dump()), ec);
      ws.close(websocket::close_code::policy_error, ec);
      return;
    }

    LiveSession session(next_session_id(), layout, model_, config_.service.log_dir);
    for (const auto& m : session.hello()) {
      ws.write(net::buffer(m), ec);
      if (ec) return;
    }
    while (running_) {
      beast::flat_buffer in;
      ws.read(in, ec);
      if (ec) return;
      for (const auto& m : session.handle(beast::buffers_to_string(in.data()))) {
        ws.write(net::buffer(m), ec);
        if (ec) return;
      }
    }
  }

  AppConfig config_;
  std::shared_ptr<const LanguageModel> model_;
  net::io_context ioc_;
  std::unique_ptr<tcp::acceptor> acceptor_;
  unsigned short port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<unsigned> session_counter_{0};
  std::thread accept_thread_;
  std::mutex mu_;
  std::vector<std::weak_ptr<tcp::socket>> sockets_;
  std::vector<std::thread> workers_;
};

}  // namespace eyetype
