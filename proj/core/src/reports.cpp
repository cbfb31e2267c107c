#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "json_codec.hpp"
#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"
#include "segbench/metrics.hpp"

namespace segbench::bench {
namespace {

using detail::json;

std::string fixed6(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string file_safe(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

json quartiles_json(const Quartiles& q) {
  return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

std::string boxplot_csv(const RunSummary& summary, bool initial) {
  std::string out = "algorithm,min,q1,median,q3,max,protocol\n";
  for (const auto& row : summary.rows) {
    const Quartiles& q = initial ? row.initial : row.refined;
    out += csv_field(row.algorithm_id) + "," + fixed6(q.min) + "," + fixed6(q.q1) + "," + fixed6(q.median) + "," +
           fixed6(q.q3) + "," + fixed6(q.max) + "," + csv_field(row.protocol_id) + "\n";
  }
  return out;
}

std::string alpha_beta_csv(const RunSummary& summary) {
  std::string out = "algorithm,image,alpha,beta,protocol\n";
  for (const auto& p : summary.alpha_beta) {
    out += csv_field(p.algorithm_id) + "," + csv_field(p.image_id) + "," + fixed6(p.alpha) + "," + fixed6(p.beta) +
           "," + csv_field(p.protocol_id) + "\n";
  }
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
  }
}

std::set<std::string> png_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::FileNotFound, "directory not found: " + dir.string());
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") names.insert(entry.path().filename().string());
  }
  return names;
}

}  // namespace

std::string summary_csv(const RunSummary& summary) {
  std::string out =
      "algorithm,n_images,iou_improvement,initial_iou_mean,refined_iou_mean,compute_s_mean,interaction_s_mean,"
      "protocol\n";
  for (const auto& row : summary.rows) {
    out += csv_field(row.algorithm_id) + "," + std::to_string(row.n_images) + "," + fixed6(row.iou_improvement) + "," +
           fixed6(row.initial_iou_mean) + "," + fixed6(row.refined_iou_mean) + "," + fixed6(row.compute_s_mean) + "," +
           fixed6(row.interaction_s_mean) + "," + csv_field(row.protocol_id) + "\n";
  }
  return out;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).at(0) != "algorithm") {
    throw Error(ErrorCode::ParseError, "summary.csv has no header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw Error(ErrorCode::ParseError, "summary.csv row has " + std::to_string(f.size()) + " fields");
    SummaryRow row;
    row.algorithm_id = f[0];
    row.n_images = static_cast<int>(parse_double(f[1]));
    row.iou_improvement = parse_double(f[2]);
    row.initial_iou_mean = parse_double(f[3]);
    row.refined_iou_mean = parse_double(f[4]);
    row.compute_s_mean = parse_double(f[5]);
    row.interaction_s_mean = parse_double(f[6]);
    row.protocol_id = f[7];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_json(const RunSummary& summary) {
  json rows = json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"algorithm", r.algorithm_id},
                    {"protocol", r.protocol_id},
                    {"n_images", r.n_images},
                    {"iou_improvement", r.iou_improvement},
                    {"initial_iou_mean", r.initial_iou_mean},
                    {"refined_iou_mean", r.refined_iou_mean},
                    {"compute_s_mean", r.compute_s_mean},
                    {"interaction_s_mean", r.interaction_s_mean},
                    {"external", r.external},
                    {"initial_iou_quartiles", quartiles_json(r.initial)},
                    {"refined_iou_quartiles", quartiles_json(r.refined)}});
  }
  json points = json::array();
  for (const auto& p : summary.alpha_beta) {
    points.push_back({{"algorithm", p.algorithm_id},
                      {"protocol", p.protocol_id},
                      {"image", p.image_id},
                      {"alpha", p.alpha},
                      {"beta", p.beta}});
  }
  json failures = json::array();
  for (const auto& f : summary.failures) {
    failures.push_back(
        {{"algorithm", f.algorithm_id}, {"protocol", f.protocol_id}, {"image", f.image_id}, {"error", f.error}});
  }
  const json out = {{"rows", std::move(rows)},
                    {"alpha_beta", std::move(points)},
                    {"alpha_beta_definition",
                     "artifact-defined: alpha = |GT union P| / |GT|, beta = |P| / |GT|, on the initial mask"},
                    {"quantile_rule", "linear interpolation between closest ranks, position (n-1)q"},
                    {"total_cells", summary.total_cells},
                    {"failed_cells", summary.failures.size()},
                    {"failures", std::move(failures)}};
  return out.dump(2) + "\n";
}

void export_reports(const std::vector<SessionRecord>& records, const RunSummary& summary, const fs::path& out_dir) {
  if (records.empty()) throw Error(ErrorCode::EmptyResults, "no successful cells; refusing to write empty reports");
  std::error_code ec;
  fs::create_directories(out_dir / "records", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "summary.csv", summary_csv(summary));
  write_text(out_dir / "summary.json", summary_json(summary));
  write_text(out_dir / "boxplot_initial.csv", boxplot_csv(summary, true));
  write_text(out_dir / "boxplot_refined.csv", boxplot_csv(summary, false));
  write_text(out_dir / "alpha_beta.csv", alpha_beta_csv(summary));
  for (const auto& r : records) {
    const std::string name = file_safe(r.algorithm_id) + "__" + file_safe(r.protocol_id) + "__" +
                             file_safe(r.image_id) + ".json";
    write_text(out_dir / "records" / name, record_to_json(r) + "\n");
  }
}

std::vector<EvalRow> evaluate_directories(const fs::path& gt_dir, const fs::path& pred_dir) {
  const auto gt_names = png_names(gt_dir);
  const auto pred_names = png_names(pred_dir);
  for (const auto& name : pred_names) {
    if (!gt_names.contains(name)) throw Error(ErrorCode::MissingMask, "no ground truth for prediction " + name);
  }
  std::vector<EvalRow> rows;
  for (const auto& name : gt_names) {
    if (!pred_names.contains(name)) throw Error(ErrorCode::MissingMask, "no prediction for ground truth " + name);
    const BinaryMask gt = load_mask(gt_dir / name);
    const BinaryMask pred = load_mask(pred_dir / name);
    EvalRow row{name, metrics::iou(gt, pred), std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
    if (gt.count() > 0) {
      const auto ab = metrics::alpha_beta(gt, pred);
      row.alpha = ab.alpha;
      row.beta = ab.beta;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::string out = "file,iou,alpha,beta\n";
  for (const auto& r : rows) {
    out += csv_field(r.file) + "," + fixed6(r.iou) + "," + fixed6(r.alpha) + "," + fixed6(r.beta) + "\n";
  }
  return out;
}

}  // namespace segbench::bench
