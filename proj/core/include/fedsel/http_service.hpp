#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fedsel/activity_log.hpp"
#include "fedsel/deployment.hpp"
#include "fedsel/directory.hpp"

namespace fedsel {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port in start()
  std::filesystem::path index_path;
  std::vector<CollectionSource> sources;  // used by /admin/reindex
  UtilityConstraints default_constraints;

  /// Parses "host:port". Throws invalid_argument on a malformed address or a
  /// port outside [1, 65535].
  void set_listen_address(std::string_view address);
};

/// HTTP front end over a swappable, immutable Deployment.
///
///   GET  /search?q=&n=&k=&ttl_ms=&max_price=&db=
///   GET  /collections
///   POST /admin/reindex
///
/// Reads never block on a reindex: each request pins the snapshot it started
/// with, and a reindex builds a new Deployment before swapping it in.
class HttpService {
 public:
  explicit HttpService(ApiConfig config, ActivityLog* log = nullptr);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  void install(std::shared_ptr<const Deployment> deployment);
  std::shared_ptr<const Deployment> snapshot() const;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  bool run();
  void stop();

  /// Called during /admin/reindex after the new deployment is built and
  /// before it is swapped in. Test hook.
  void set_reindex_observer(std::function<void()> observer);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fedsel
