#include "fedsel/http_service.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "fedsel/broker.hpp"
#include "fedsel/error.hpp"

namespace fedsel {

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void send_error(httplib::Response& res, int status, std::string_view code,
                std::string_view message) {
  nlohmann::ordered_json j;
  j["code"] = code;
  j["message"] = message;
  res.status = status;
  res.set_content(j.dump(), kJson);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_query: return 400;
    default: return 500;
  }
}

template <typename T>
T parse_param(const httplib::Request& req, const char* name, T fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::invalid_argument,
                std::string("parameter '") + name + "' is not a valid number");
  }
  return value;
}

}  // namespace

void ApiConfig::set_listen_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::invalid_argument, "listen address must be host:port");
  }
  const auto port_text = address.substr(colon + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
      value < 1 || value > 65535) {
    throw Error(ErrorCode::invalid_argument, "port must be in [1, 65535]");
  }
  host = std::string(address.substr(0, colon));
  port = value;
}

struct HttpService::Impl {
  ApiConfig config;
  ActivityLog* log;
  httplib::Server server;
  std::thread thread;

  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const Deployment> current;

  std::mutex reindex_mutex;
  std::function<void()> reindex_observer;

  Impl(ApiConfig c, ActivityLog* l) : config(std::move(c)), log(l) { routes(); }

  std::shared_ptr<const Deployment> snapshot() const {
    std::lock_guard lock(snapshot_mutex);
    return current;
  }

  void install(std::shared_ptr<const Deployment> d) {
    std::lock_guard lock(snapshot_mutex);
    current = std::move(d);
  }

  void routes() {
    server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      search(req, res);
    });
    server.Get("/collections", [this](const httplib::Request&, httplib::Response& res) {
      collections(res);
    });
    server.Post("/admin/reindex", [this](const httplib::Request&, httplib::Response& res) {
      reindex(res);
    });
  }

  void search(const httplib::Request& req, httplib::Response& res) {
    const auto deployment = snapshot();
    if (!deployment) return send_error(res, 503, "service_not_ready", "no index loaded");

    const auto q = req.has_param("q") ? req.get_param_value("q") : std::string();
    if (q.find_first_not_of(" \t\r\n") == std::string::npos) {
      return send_error(res, 400, "invalid_query", "parameter 'q' is required");
    }
    try {
      QueryRequest request;
      request.text = q;
      request.constraints = config.default_constraints;
      request.constraints.max_results =
          parse_param<std::size_t>(req, "n", request.constraints.max_results);
      request.constraints.num_databases =
          parse_param<std::size_t>(req, "k", request.constraints.num_databases);
      request.constraints.ttl_ms = parse_param<std::uint64_t>(req, "ttl_ms", request.constraints.ttl_ms);
      request.constraints.max_price = parse_param<double>(req, "max_price", request.constraints.max_price);
      if (req.has_param("db")) request.target_db = req.get_param_value("db");

      Broker broker(deployment->collections, deployment->directory, log);
      const auto response = broker.respond(request);
      res.status = 200;
      res.set_content(format_response(response), kJson);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    }
  }

  void collections(httplib::Response& res) const {
    const auto deployment = snapshot();
    if (!deployment) return send_error(res, 503, "service_not_ready", "no index loaded");
    const auto& dir = deployment->directory;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& name : dir.matrix().collections()) {
      const auto& profile = dir.profiles().at(name);
      nlohmann::ordered_json e;
      e["name"] = name;
      e["record_count"] = dir.matrix().record_count(name);
      e["df_max"] = dir.matrix().df_max(name);
      e["est_latency_ms"] = profile.est_latency_ms;
      e["price"] = profile.price;
      list.push_back(std::move(e));
    }
    nlohmann::ordered_json body;
    body["collections"] = std::move(list);
    res.status = 200;
    res.set_content(body.dump(), kJson);
  }

  void reindex(httplib::Response& res) {
    std::unique_lock lock(reindex_mutex, std::try_to_lock);
    if (!lock.owns_lock()) {
      return send_error(res, 409, "reindex_in_progress", "another reindex is running");
    }
    std::shared_ptr<const Deployment> fresh;
    try {
      const auto old = snapshot();
      const CoriParams params = old ? old->directory.params() : CoriParams{};
      fresh = build_deployment(config.sources, params);
    } catch (const Error& e) {
      return send_error(res, 500, to_string(e.code()), e.what());
    }
    if (reindex_observer) reindex_observer();
    install(fresh);

    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    for (const auto& name : fresh->collections.names()) {
      nlohmann::ordered_json e;
      e["name"] = name;
      e["record_count"] = fresh->collections.record_count(name);
      counts.push_back(std::move(e));
    }
    nlohmann::ordered_json body;
    body["status"] = "ok";
    body["collections"] = std::move(counts);
    res.status = 200;
    res.set_content(body.dump(), kJson);
  }
};

HttpService::HttpService(ApiConfig config, ActivityLog* log)
    : impl_(std::make_unique<Impl>(std::move(config), log)) {}

HttpService::~HttpService() { stop(); }

void HttpService::install(std::shared_ptr<const Deployment> deployment) {
  impl_->install(std::move(deployment));
}

std::shared_ptr<const Deployment> HttpService::snapshot() const { return impl_->snapshot(); }

int HttpService::start() {
  auto& s = impl_->server;
  int port = impl_->config.port;
  if (port == 0) {
    port = s.bind_to_any_port(impl_->config.host);
  } else if (!s.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::io_error, "cannot bind " + impl_->config.host + ":" +
                                         std::to_string(impl_->config.port));
  }
  impl_->thread = std::thread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  return port;
}

bool HttpService::run() { return impl_->server.listen(impl_->config.host, impl_->config.port); }

void HttpService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpService::set_reindex_observer(std::function<void()> observer) {
  impl_->reindex_observer = std::move(observer);
}

}  // namespace fedsel
