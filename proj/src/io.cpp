#include "idks/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "idks/errors.hpp"

namespace idks {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path + "' for fingerprinting");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

std::uint64_t fingerprint_dataset(const LabeledDataset& ds) {
  std::uint64_t h = fnv1a64(ds.xs.data(), ds.xs.size() * sizeof(double));
  const std::uint64_t hl = fnv1a64(ds.labels.data(), ds.labels.size());
  return h ^ (hl + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StateError("cannot open '" + path + "' for writing");
  return out;
}

// shortest round-trip decimal form
void append_double(std::string& s, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  s.append(buf, res.ptr);
}

}  // namespace

void write_scores_csv(std::span<const ScoreRecord> records, const std::string& path) {
  auto out = open_out(path);
  out << "stream_index,normal_score,label,scored_at_step\n";
  std::string line;
  for (const ScoreRecord& r : records) {
    line.clear();
    line += std::to_string(r.stream_index);
    line += ',';
    append_double(line, r.normal_score);
    line += ',';
    if (r.label >= 0) line += std::to_string(int(r.label));
    line += ',';
    line += std::to_string(r.scored_at_step);
    line += '\n';
    out << line;
  }
  if (!out) throw StateError("write failure on '" + path + "'");
}

void write_scores_ndjson(std::span<const ScoreRecord> records, const std::string& path) {
  auto out = open_out(path);
  std::string line;
  for (const ScoreRecord& r : records) {
    line.clear();
    line += "{\"stream_index\":";
    line += std::to_string(r.stream_index);
    line += ",\"normal_score\":";
    append_double(line, r.normal_score);
    if (r.label >= 0) {
      line += ",\"label\":";
      line += std::to_string(int(r.label));
    } else {
      line += ",\"label\":null";
    }
    line += ",\"scored_at_step\":";
    line += std::to_string(r.scored_at_step);
    line += "}\n";
    out << line;
  }
  if (!out) throw StateError("write failure on '" + path + "'");
}

nlohmann::json metrics_to_json(const RunMetrics& metrics, const StreamConfig& cfg) {
  nlohmann::json j{
      {"mode", mode_name(cfg.mode)},
      {"omega", cfg.omega},
      {"step", cfg.step},
      {"psi", cfg.psi},
      {"t", cfg.t},
      {"seed", cfg.seed},
      {"n_instances", metrics.n_instances},
      {"n_updates", metrics.n_updates},
      {"init_seconds", metrics.init_seconds},
      {"total_seconds", metrics.total_seconds},
      {"update_seconds",
       {{"mean", metrics.update_mean_s},
        {"p50", metrics.update_p50_s},
        {"p90", metrics.update_p90_s},
        {"max", metrics.update_max_s}}},
      {"replaced_samples", {{"mean", metrics.replaced_mean}, {"total", metrics.replaced_total}}},
      {"affected_partitionings", {{"mean", metrics.affected_mean}}},
  };
  if (!metrics.warning.empty()) j["warning"] = metrics.warning;
  return j;
}

void write_bench_csv(std::span<const BenchRow> rows, const std::string& path) {
  auto out = open_out(path);
  out << "mode,omega,step,psi,t,seed,kind,mean_update_s,median_update_s,total_s,auc\n";
  std::string line;
  for (const BenchRow& r : rows) {
    line.clear();
    line += mode_name(r.mode);
    line += ',';
    line += std::to_string(r.omega);
    line += ',';
    line += std::to_string(r.step);
    line += ',';
    line += std::to_string(r.psi);
    line += ',';
    line += std::to_string(r.t);
    line += ',';
    if (!r.is_median) line += std::to_string(r.seed);
    line += ',';
    line += r.is_median ? "median" : "run";
    line += ',';
    append_double(line, r.mean_update_s);
    line += ',';
    append_double(line, r.median_update_s);
    line += ',';
    append_double(line, r.total_s);
    line += ',';
    append_double(line, r.auc);
    line += '\n';
    out << line;
  }
  if (!out) throw StateError("write failure on '" + path + "'");
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path) {
  auto out = open_out(path);
  out << "psi,auc,total_s\n";
  std::string line;
  for (const SweepRow& r : rows) {
    line.clear();
    line += std::to_string(r.psi);
    line += ',';
    append_double(line, r.auc);
    line += ',';
    append_double(line, r.total_s);
    line += '\n';
    out << line;
  }
  if (!out) throw StateError("write failure on '" + path + "'");
}

void write_auc_csv(std::span<const AucPoint> points, const std::string& path) {
  auto out = open_out(path);
  out << "T,auc,n_pos,n_neg\n";
  std::string line;
  for (const AucPoint& p : points) {
    line.clear();
    line += std::to_string(p.center);
    line += ',';
    append_double(line, p.auc);
    line += ',';
    line += std::to_string(p.n_pos);
    line += ',';
    line += std::to_string(p.n_neg);
    line += '\n';
    out << line;
  }
  if (!out) throw StateError("write failure on '" + path + "'");
}

void write_text_file(const std::string& text, const std::string& path) {
  auto out = open_out(path);
  out << text;
  if (!out) throw StateError("write failure on '" + path + "'");
}

}  // namespace idks
