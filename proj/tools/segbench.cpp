#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"
#include "segbench/service.hpp"

namespace fs = std::filesystem;
using namespace segbench;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kCellFailed = 2;

segbench::service::HttpServer* g_server = nullptr;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void print_table(const bench::RunSummary& summary) {
  std::printf("%-24s %-40s %16s %16s\n", "Algorithm", "Protocol", "Number of Images", "IoU Improvement");
  for (const auto& row : summary.rows) {
    std::printf("%-24s %-40s %16d %16.4f%s\n", row.algorithm_id.c_str(), row.protocol_id.c_str(), row.n_images,
                row.iou_improvement, row.external ? "  (external)" : "");
  }
  if (!summary.failures.empty()) {
    std::printf("%zu of %zu cells failed:\n", summary.failures.size(), summary.total_cells);
    for (const auto& f : summary.failures) {
      std::printf("  %s / %s / %s: %s\n", f.algorithm_id.c_str(), f.protocol_id.c_str(), f.image_id.c_str(),
                  f.error.c_str());
    }
  }
}

int cmd_gen(const std::string& spec_path, const fs::path& out) {
  const bench::SyntheticSpec spec = spec_path.empty() ? bench::SyntheticSpec{} : bench::load_synthetic_spec(spec_path);
  bench::generate_synthetic_dataset(spec, out);
  std::printf("wrote %d image/ground-truth pairs to %s\n", spec.n_images, out.string().c_str());
  return kOk;
}

int cmd_run(const fs::path& config_path, const std::string& out_override, int threads) {
  bench::RunConfig cfg;
  bench::MatrixResult result;
  try {
    cfg = bench::load_run_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads > 0) cfg.threads = threads;
    if (cfg.output_dir.empty()) cfg.output_dir = "results";
    result = bench::run_matrix(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  print_table(result.summary);
  try {
    bench::export_reports(result.records, result.summary, cfg.output_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::EmptyResults ? kCellFailed : kConfigError;
  }
  std::printf("reports written to %s\n", cfg.output_dir.string().c_str());
  return result.summary.failures.empty() ? kOk : kCellFailed;
}

int cmd_eval(const fs::path& gt, const fs::path& pred, const fs::path& out) {
  const auto rows = bench::evaluate_directories(gt, pred);
  write_text(out, bench::eval_csv(rows));
  std::printf("evaluated %zu mask pairs -> %s\n", rows.size(), out.string().c_str());
  return kOk;
}

int cmd_serve(const std::string& host, int port, const std::string& data, const std::string& persist,
              const std::string& cors, const std::string& ui_dir, int ttl_minutes) {
  service::ServiceOptions options;
  if (!data.empty()) options.data_dir = data;
  if (!persist.empty()) options.persist_dir = persist;
  options.ttl = std::chrono::minutes(ttl_minutes);
  service::SessionStore store(options);

  service::ServerOptions server_options;
  server_options.host = host;
  server_options.port = port;
  server_options.cors_origin = cors;
  if (!ui_dir.empty()) server_options.ui_dir = ui_dir;
  service::HttpServer server(store, server_options);
  const int bound = server.bind();
  if (bound < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
    return kConfigError;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::printf("listening on http://%s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  server.run();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive segmentation benchmark"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--spec", spec_path, "Dataset spec JSON (defaults apply when omitted)")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output directory")->required();

  std::string config_path;
  std::string run_out;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run an algorithm x protocol x image matrix");
  run->add_option("--config", config_path, "Run config JSON")->required();
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_option("--threads", threads, "Worker count (SEGBENCH_THREADS still caps it)");

  std::string gt_dir, pred_dir, eval_out;
  auto* eval = app.add_subcommand("eval", "IoU / alpha / beta over mask pairs matched by file name");
  eval->add_option("--gt", gt_dir, "Ground-truth mask directory")->required();
  eval->add_option("--pred", pred_dir, "Predicted mask directory")->required();
  eval->add_option("--out", eval_out, "Output CSV")->required();

  std::string host = "127.0.0.1", data_dir, persist_dir, cors = "*", ui_dir;
  int port = 8080;
  int ttl = 60;
  auto* serve = app.add_subcommand("serve", "Start the interactive session HTTP service");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data", data_dir, "Data directory; external/*.json manifests become algorithms");
  serve->add_option("--persist", persist_dir, "Snapshot sessions to this directory");
  serve->add_option("--cors-origin", cors, "Value of Access-Control-Allow-Origin");
  serve->add_option("--ui-dir", ui_dir, "Serve static UI files from this directory");
  serve->add_option("--ttl-minutes", ttl, "Evict sessions idle for this long")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_gen(spec_path, gen_out);
    if (*run) {
      if (!fs::exists(config_path)) {
        std::fprintf(stderr, "config error: %s not found\n", config_path.c_str());
        return kConfigError;
      }
      return cmd_run(config_path, run_out, threads);
    }
    if (*eval) return cmd_eval(gt_dir, pred_dir, eval_out);
    if (*serve) return cmd_serve(host, port, data_dir, persist_dir, cors, ui_dir, ttl);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  return kOk;
}
