#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace segbench::service {

struct ServiceOptions {
  /// Snapshot every session here after each mutation; reload lazily.
  std::optional<std::filesystem::path> persist_dir;
  /// External mask manifests are read from <data_dir>/external/*.json and
  /// exposed as algorithms named after their provider.
  std::optional<std::filesystem::path> data_dir;
  std::chrono::minutes ttl{60};
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct CreateRequest {
  std::string image_png;
  std::optional<std::string> gt_png;
  std::string algorithm;
  std::string params_json;
  std::string image_id;  // selects the mask for external providers
};

/// Transport-independent session logic; every method maps onto one HTTP
/// endpoint. Calls on one session are serialized, distinct sessions run in
/// parallel.
class SessionStore {
 public:
  explicit SessionStore(ServiceOptions options = {});
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  ApiResponse create(const CreateRequest& request);
  ApiResponse add_scribbles(const std::string& id, const std::string& annotation_json);
  ApiResponse refine(const std::string& id);
  ApiResponse undo(const std::string& id);
  ApiResponse mask(const std::string& id);
  ApiResponse metrics(const std::string& id);
  ApiResponse state(const std::string& id);

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t evict_idle();
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "*";
  std::optional<std::filesystem::path> ui_dir;
};

class HttpServer {
 public:
  HttpServer(SessionStore& store, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; returns the bound port or -1.
  int bind();
  /// Serves until stop(); call after bind().
  void run();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace segbench::service
