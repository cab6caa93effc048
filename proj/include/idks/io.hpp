#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idks/data.hpp"
#include "idks/eval.hpp"
#include "idks/stream.hpp"

namespace idks {

// FNV-1a 64-bit over raw bytes; used as the input fingerprint in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fingerprint_file(const std::string& path);
std::uint64_t fingerprint_dataset(const LabeledDataset& ds);
std::string hex64(std::uint64_t v);

std::string iso8601_utc_now();

// scores CSV: stream_index,normal_score,label,scored_at_step
// (doubles printed in shortest round-trip form; byte-stable across reruns)
void write_scores_csv(std::span<const ScoreRecord> records, const std::string& path);
void write_scores_ndjson(std::span<const ScoreRecord> records, const std::string& path);

nlohmann::json metrics_to_json(const RunMetrics& metrics, const StreamConfig& cfg);

void write_bench_csv(std::span<const BenchRow> rows, const std::string& path);
void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path);

// sliding-AUC series: T,auc,n_pos,n_neg
void write_auc_csv(std::span<const AucPoint> points, const std::string& path);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace idks
