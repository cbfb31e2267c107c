#include "segbench/service.hpp"

#include <atomic>
#include <cstdio>
#include <iostream>
#include <random>
#include <shared_mutex>
#include <unordered_map>

#include <httplib.h>

#include "json_codec.hpp"
#include "segbench/algorithms.hpp"
#include "segbench/base64.hpp"
#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"
#include "segbench/metrics.hpp"

namespace segbench::service {
namespace {

namespace fs = std::filesystem;
using detail::json;
using SteadyClock = std::chrono::steady_clock;

double unix_now() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::int64_t steady_ticks() {
  return SteadyClock::now().time_since_epoch().count();
}

std::string random_hex(int bytes) {
  static thread_local std::random_device device;
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < bytes; i += 4) {
    std::uint32_t v = device();
    for (int k = 0; k < 4 && i + k < bytes; ++k, v >>= 8) {
      out += digits[(v >> 4) & 15];
      out += digits[v & 15];
    }
  }
  return out;
}

bool valid_id(const std::string& id) {
  if (id.size() != 32) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

ApiResponse json_response(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

ApiResponse not_found(const std::string& id) {
  return error_response(404, "not_found", "no session '" + id + "'");
}

std::string bytes_to_string(const std::vector<std::uint8_t>& bytes) {
  return {bytes.begin(), bytes.end()};
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

struct Session {
  std::string id;
  Raster image;
  std::optional<BinaryMask> gt;
  std::string algorithm;
  AlgorithmKind kind = AlgorithmKind::GraphCut;
  std::string params_json;
  AlgorithmParams params;
  std::string image_id;
  Annotation pool;
  std::vector<BinaryMask> history;
  std::vector<metrics::MetricsSnapshot> metrics;
  double created_at = 0.0;
  double updated_at = 0.0;
  std::vector<std::pair<std::string, double>> requests;
  SteadyClock::time_point last_mutation = SteadyClock::now();

  std::shared_mutex mutex;
  std::atomic<std::int64_t> last_access{steady_ticks()};

  void log(const std::string& endpoint) {
    updated_at = unix_now();
    requests.emplace_back(endpoint, updated_at);
  }
};

}  // namespace

struct SessionStore::Impl {
  ServiceOptions options;
  std::map<std::string, bench::ExternalMaskProvider> providers;
  mutable std::mutex map_mutex;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    if (options.data_dir && fs::is_directory(*options.data_dir / "external")) {
      for (const auto& entry : fs::directory_iterator(*options.data_dir / "external")) {
        if (entry.path().extension() != ".json") continue;
        auto manifest = bench::load_external_manifest(entry.path());
        const std::string name = manifest.provider.empty() ? entry.path().stem().string() : manifest.provider;
        providers.emplace(name, bench::ExternalMaskProvider(std::move(manifest)));
      }
    }
  }

  std::shared_ptr<Session> find(const std::string& id) {
    if (!valid_id(id)) return nullptr;
    std::lock_guard lock(map_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) {
      auto restored = restore(id);
      if (!restored) return nullptr;
      it = sessions.emplace(id, std::move(restored)).first;
    }
    it->second->last_access = steady_ticks();
    return it->second;
  }

  // ---- persistence ---------------------------------------------------------

  void persist(const Session& s) const {
    if (!options.persist_dir) return;
    const fs::path dir = *options.persist_dir / s.id;
    fs::create_directories(dir);
    json metrics_json = json::array();
    for (const auto& m : s.metrics) metrics_json.push_back(detail::to_json(m));
    json requests = json::array();
    for (const auto& [endpoint, at] : s.requests) requests.push_back({{"endpoint", endpoint}, {"at", at}});
    const json meta = {{"id", s.id},
                       {"algorithm", s.algorithm},
                       {"params", s.params_json},
                       {"image_id", s.image_id},
                       {"has_gt", s.gt.has_value()},
                       {"annotation", detail::to_json(s.pool)},
                       {"depth", s.history.size()},
                       {"metrics", std::move(metrics_json)},
                       {"created_at", s.created_at},
                       {"updated_at", s.updated_at},
                       {"requests", std::move(requests)}};
    if (!fs::exists(dir / "image.png")) save_image(s.image, dir / "image.png");
    if (s.gt && !fs::exists(dir / "gt.png")) save_mask(*s.gt, dir / "gt.png");
    for (std::size_t i = 0; i < s.history.size(); ++i) save_mask(s.history[i], dir / ("mask_" + std::to_string(i) + ".png"));
    for (std::size_t i = s.history.size(); fs::exists(dir / ("mask_" + std::to_string(i) + ".png")); ++i) {
      fs::remove(dir / ("mask_" + std::to_string(i) + ".png"));
    }
    const std::string text = meta.dump(2);
    write_file_bytes(dir / "session.json.tmp", as_bytes(text));
    fs::rename(dir / "session.json.tmp", dir / "session.json");
  }

  std::shared_ptr<Session> restore(const std::string& id) {
    if (!options.persist_dir) return nullptr;
    const fs::path dir = *options.persist_dir / id;
    if (!fs::exists(dir / "session.json")) return nullptr;
    try {
      const json meta = detail::parse_json(bytes_to_string(read_file_bytes(dir / "session.json")));
      auto s = std::make_shared<Session>();
      s->id = id;
      s->image = load_image(dir / "image.png");
      if (meta.at("has_gt").get<bool>()) s->gt = load_mask(dir / "gt.png");
      s->algorithm = meta.at("algorithm").get<std::string>();
      s->params_json = meta.at("params").get<std::string>();
      s->params = parse_algorithm_params(s->params_json);
      s->image_id = meta.at("image_id").get<std::string>();
      const auto kind = resolve_algorithm(s->algorithm);
      if (!kind) return nullptr;
      s->kind = *kind;
      s->pool = detail::annotation_from_json(meta.at("annotation"));
      const auto depth = meta.at("depth").get<std::size_t>();
      for (std::size_t i = 0; i < depth; ++i) s->history.push_back(load_mask(dir / ("mask_" + std::to_string(i) + ".png")));
      for (const auto& m : meta.at("metrics")) s->metrics.push_back(detail::metrics_from_json(m));
      s->created_at = meta.at("created_at").get<double>();
      s->updated_at = meta.at("updated_at").get<double>();
      for (const auto& r : meta.at("requests")) {
        s->requests.emplace_back(r.at("endpoint").get<std::string>(), r.at("at").get<double>());
      }
      return s;
    } catch (const std::exception& e) {
      std::cerr << "segbench serve: cannot restore session " << id << ": " << e.what() << "\n";
      return nullptr;
    }
  }

  // ---- algorithms ----------------------------------------------------------

  std::optional<AlgorithmKind> resolve_algorithm(const std::string& name) const {
    if (providers.contains(name)) return AlgorithmKind::External;
    const auto kind = parse_algorithm_kind(name);
    if (kind == AlgorithmKind::External && providers.size() != 1) return std::nullopt;
    return kind;
  }

  const bench::ExternalMaskProvider& provider_for(const Session& s) const {
    if (auto it = providers.find(s.algorithm); it != providers.end()) return it->second;
    return providers.begin()->second;
  }

  BinaryMask segment(const Session& s) const {
    const LabelRaster seeds = rasterize(s.pool, s.image.width(), s.image.height());
    if (is_seed_driven(s.kind)) return make_seeded_segmenter(s.kind, s.params)(s.image, seeds);
    BinaryMask mask = s.kind == AlgorithmKind::External ? provider_for(s).segmenter_for(s.image_id)(s.image)
                                                        : make_automatic_segmenter(s.kind, s.params)(s.image);
    for (const auto& stroke : s.pool.strokes) paint_stroke(mask, stroke);
    return mask;
  }
};

SessionStore::SessionStore(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
SessionStore::~SessionStore() = default;

ApiResponse SessionStore::create(const CreateRequest& request) {
  const auto kind = impl_->resolve_algorithm(request.algorithm);
  if (!kind) {
    std::string known = "naive_otsu, naive_canny, naive_regiongrow, ml_forest, graphcut, grabcut";
    for (const auto& [name, provider] : impl_->providers) known += ", " + name;
    return error_response(422, "unknown_algorithm",
                          "algorithm '" + request.algorithm +
                              "' is neither built in nor a configured external mask provider; available: " + known);
  }
  auto s = std::make_shared<Session>();
  try {
    s->image = decode_png(as_bytes(request.image_png));
  } catch (const Error& e) {
    return error_response(400, "bad_image", e.what());
  }
  if (request.gt_png) {
    try {
      s->gt = decode_mask(as_bytes(*request.gt_png));
    } catch (const Error& e) {
      return error_response(400, "bad_gt", e.what());
    }
    if (s->gt->width() != s->image.width() || s->gt->height() != s->image.height()) {
      return error_response(400, "dimension_mismatch", "ground truth does not match the image dimensions");
    }
  }
  try {
    s->params = parse_algorithm_params(request.params_json);
  } catch (const Error& e) {
    return error_response(400, "bad_params", e.what());
  }
  s->algorithm = request.algorithm;
  s->kind = *kind;
  s->params_json = request.params_json;
  s->image_id = request.image_id;
  if (s->kind == AlgorithmKind::External) {
    try {
      const BinaryMask probe = impl_->provider_for(*s).load(s->image_id);
      if (probe.width() != s->image.width() || probe.height() != s->image.height()) {
        return error_response(400, "dimension_mismatch", "external mask does not match the image dimensions");
      }
    } catch (const Error& e) {
      return error_response(400, "missing_mask", e.what());
    }
  }
  s->created_at = unix_now();
  s->log("create");

  std::lock_guard lock(impl_->map_mutex);
  do {
    s->id = random_hex(16);
  } while (impl_->sessions.contains(s->id));
  impl_->persist(*s);
  impl_->sessions.emplace(s->id, s);
  return json_response(201, {{"id", s->id}, {"width", s->image.width()}, {"height", s->image.height()}});
}

ApiResponse SessionStore::add_scribbles(const std::string& id, const std::string& annotation_json) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  Annotation ann;
  try {
    ann = annotation_from_json(annotation_json);
  } catch (const Error& e) {
    return error_response(400, "bad_annotation", e.what());
  }
  std::unique_lock lock(s->mutex);
  try {
    validate_annotation(ann, s->image.width(), s->image.height());
  } catch (const Error& e) {
    return error_response(400, "out_of_bounds", e.what());
  }
  if (ann.strokes.empty()) return {204, "application/json", ""};
  for (auto& stroke : ann.strokes) s->pool.strokes.push_back(std::move(stroke));
  s->log("scribbles");
  impl_->persist(*s);
  return {204, "application/json", ""};
}

ApiResponse SessionStore::refine(const std::string& id) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  std::unique_lock lock(s->mutex);

  const LabelRaster seeds = rasterize(s->pool, s->image.width(), s->image.height());
  json missing = json::array();
  const SeedNeed need = seed_need(s->kind);
  if (need != SeedNeed::None && !seeds.has_foreground()) missing.push_back("foreground");
  if (need == SeedNeed::Both && !seeds.has_background()) missing.push_back("background");
  if (!missing.empty()) {
    return json_response(409, {{"error", "insufficient_seeds"},
                               {"missing", missing},
                               {"message", s->algorithm + " needs at least one stroke of each listed class"}});
  }

  metrics::Timed<BinaryMask> result;
  try {
    result = metrics::time_block([&] { return impl_->segment(*s); });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingSeedClass || e.code() == ErrorCode::NoSeeds ||
        e.code() == ErrorCode::InsufficientLabels) {
      return json_response(409, {{"error", "insufficient_seeds"}, {"missing", json::array()}, {"message", e.what()}});
    }
    const std::string error_id = random_hex(8);
    std::cerr << "segbench serve: refine failed [" << error_id << "] session " << id << ": " << e.what() << "\n";
    return json_response(500, {{"error", "algorithm_failed"}, {"error_id", error_id}, {"message", e.what()}});
  } catch (const std::exception& e) {
    const std::string error_id = random_hex(8);
    std::cerr << "segbench serve: refine failed [" << error_id << "] session " << id << ": " << e.what() << "\n";
    return json_response(500, {{"error", "algorithm_failed"}, {"error_id", error_id}, {"message", e.what()}});
  }
  BinaryMask mask = std::move(result.value);
  if (mask.width() != s->image.width() || mask.height() != s->image.height()) {
    const std::string error_id = random_hex(8);
    std::cerr << "segbench serve: mask size mismatch [" << error_id << "] session " << id << "\n";
    return json_response(500, {{"error", "algorithm_failed"}, {"error_id", error_id}});
  }

  metrics::MetricsSnapshot snapshot;
  if (s->gt) {
    snapshot.iou = metrics::iou(*s->gt, mask);
    if (s->gt->count() > 0) {
      const auto ab = metrics::alpha_beta(*s->gt, mask);
      snapshot.alpha = ab.alpha;
      snapshot.beta = ab.beta;
    }
  }
  const auto now = SteadyClock::now();
  snapshot.compute_seconds = result.seconds;
  snapshot.interaction_seconds = std::chrono::duration<double>(now - s->last_mutation).count();
  s->last_mutation = now;

  const std::string png = bytes_to_string(encode_mask(mask));
  s->history.push_back(std::move(mask));
  s->metrics.push_back(snapshot);
  s->log("refine");
  impl_->persist(*s);
  return json_response(200, {{"mask", base64_encode(as_bytes(png))},
                             {"width", s->image.width()},
                             {"height", s->image.height()},
                             {"depth", s->history.size()},
                             {"metrics", detail::to_json(snapshot)}});
}

ApiResponse SessionStore::undo(const std::string& id) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  std::unique_lock lock(s->mutex);
  if (s->history.empty()) return error_response(409, "empty_history", "nothing to undo");
  s->history.pop_back();
  s->metrics.pop_back();
  s->log("undo");
  impl_->persist(*s);
  return json_response(200, {{"depth", s->history.size()}});
}

ApiResponse SessionStore::mask(const std::string& id) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  std::shared_lock lock(s->mutex);
  if (s->history.empty()) return error_response(409, "no_mask", "no mask yet; call refine first");
  return {200, "image/png", bytes_to_string(encode_mask(s->history.back()))};
}

ApiResponse SessionStore::metrics(const std::string& id) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  std::shared_lock lock(s->mutex);
  json out = json::array();
  for (const auto& m : s->metrics) out.push_back(detail::to_json(m));
  return json_response(200, out);
}

ApiResponse SessionStore::state(const std::string& id) {
  auto s = impl_->find(id);
  if (!s) return not_found(id);
  std::shared_lock lock(s->mutex);
  json requests = json::array();
  for (const auto& [endpoint, at] : s->requests) requests.push_back({{"endpoint", endpoint}, {"at", at}});
  json params = json::object();
  if (!s->params_json.empty()) params = detail::parse_json(s->params_json);
  return json_response(200, {{"id", s->id},
                             {"width", s->image.width()},
                             {"height", s->image.height()},
                             {"channels", s->image.channels()},
                             {"algorithm", s->algorithm},
                             {"params", std::move(params)},
                             {"image_id", s->image_id},
                             {"has_gt", s->gt.has_value()},
                             {"annotation", detail::to_json(s->pool)},
                             {"depth", s->history.size()},
                             {"created_at", s->created_at},
                             {"updated_at", s->updated_at},
                             {"requests", std::move(requests)}});
}

std::size_t SessionStore::evict_idle() {
  const auto limit = std::chrono::duration_cast<SteadyClock::duration>(impl_->options.ttl).count();
  const auto now = steady_ticks();
  std::lock_guard lock(impl_->map_mutex);
  return std::erase_if(impl_->sessions, [&](const auto& entry) { return now - entry.second->last_access > limit; });
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(impl_->map_mutex);
  return impl_->sessions.size();
}

// ---- HTTP ----------------------------------------------------------------

struct HttpServer::Impl {
  SessionStore& store;
  ServerOptions options;
  httplib::Server server;
  std::atomic<std::int64_t> last_sweep{steady_ticks()};

  Impl(SessionStore& s, ServerOptions o) : store(s), options(std::move(o)) {}

  static void send(httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    if (api.status != 204) res.set_content(api.body, api.content_type);
  }

  ApiResponse create_from_request(const httplib::Request& req) {
    CreateRequest create;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("image")) return error_response(400, "bad_image", "multipart field 'image' is required");
      create.image_png = req.get_file_value("image").content;
      if (req.has_file("gt")) create.gt_png = req.get_file_value("gt").content;
      if (req.has_file("algorithm")) create.algorithm = req.get_file_value("algorithm").content;
      if (req.has_file("params")) create.params_json = req.get_file_value("params").content;
      if (req.has_file("image_id")) create.image_id = req.get_file_value("image_id").content;
    } else {
      json body;
      try {
        body = detail::parse_json(req.body);
        create.image_png = bytes_to_string(base64_decode(body.at("image").get<std::string>()));
        if (body.contains("gt")) create.gt_png = bytes_to_string(base64_decode(body.at("gt").get<std::string>()));
        create.algorithm = body.value("algorithm", std::string{});
        if (body.contains("params")) create.params_json = body.at("params").dump();
        create.image_id = body.value("image_id", std::string{});
      } catch (const std::exception& e) {
        return error_response(400, "bad_request",
                              std::string("expected multipart form data or a JSON body: ") + e.what());
      }
    }
    if (create.algorithm.empty()) create.algorithm = "graphcut";
    return store.create(create);
  }

  void install() {
    server.set_payload_max_length(64u << 20);
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      const auto now = steady_ticks();
      const auto minute = std::chrono::duration_cast<SteadyClock::duration>(std::chrono::minutes(1)).count();
      auto last = last_sweep.load();
      if (now - last > minute && last_sweep.compare_exchange_strong(last, now)) store.evict_idle();
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      const std::string error_id = random_hex(8);
      std::string message = "unknown error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      std::cerr << "segbench serve: internal error [" << error_id << "]: " << message << "\n";
      send(res, json_response(500, {{"error", "internal"}, {"error_id", error_id}}));
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, create_from_request(req));
    });
    server.Post(R"(/sessions/([^/]+)/scribbles)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.add_scribbles(req.matches[1], req.body));
    });
    server.Post(R"(/sessions/([^/]+)/refine)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.refine(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/undo)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.undo(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/mask)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.mask(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.metrics(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, store.state(req.matches[1]));
    });
    if (options.ui_dir) server.set_mount_point("/", options.ui_dir->string());
  }
};

HttpServer::HttpServer(SessionStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {
  impl_->install();
}

HttpServer::~HttpServer() {
  stop();
}

int HttpServer::bind() {
  if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
  return impl_->server.bind_to_port(impl_->options.host, impl_->options.port) ? impl_->options.port : -1;
}

void HttpServer::run() {
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const {
  return impl_->server.is_running();
}

}  // namespace segbench::service
