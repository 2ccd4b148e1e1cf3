#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "repoctx/bench.hpp"
#include "repoctx/corpus.hpp"
#include "repoctx/sampler.hpp"

namespace repoctx {

// Process exit statuses. These values are part of the CLI contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitCorpus = 3,
  kExitIo = 4,
  kExitRecord = 5,
  kExitSynth = 6,
  kExitBench = 7,
  kExitRope = 8,
  kExitConfig = 9,
};

struct ResponderSpec {
  std::string kind = "extractive";  // "extractive" | "remote"
  std::string url;
  std::uint64_t timeout_seconds = 60;
  std::string token_env = "REPOCTX_RESPONDER_TOKEN";
};

struct PipelineConfig {
  std::filesystem::path corpus_root;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::string token_counter = "wordpunct";
  std::size_t worker_count = 1;

  IngestLimits ingest;
  ClassifierTables classifier;
  std::string header_prefix = "// FILE: ";

  SamplerConfig sampler;  // sampler.seed is ignored; the pipeline seed is used

  // synth
  ResponderSpec responder;
  std::uint64_t target_tokens = 32768;
  std::size_t samples_per_doc = 1;
  std::string eos_marker = "<|endoftext|>";
  std::filesystem::path templates;  // empty: built-in templates

  // bench-key / buckets
  std::uint64_t bench_max_tokens = 8192;
  std::uint64_t bench_step = 512;
  std::filesystem::path filler_dir;  // empty: synthetic pool
  bench::BucketSpec bucket_spec;     // bucket_spec.seed is ignored; the pipeline seed is used

  // rope-plan
  std::uint64_t rope_start_ctx = 4096;
  std::uint64_t rope_target_ctx = 131072;
  std::uint64_t rope_steps = 500;
  std::uint64_t rope_batch = 32;
  std::size_t rope_head_dim = 128;

  void validate() const;  // throws ConfigError

  // Canonical form; keys in a fixed order so the hash is stable.
  nlohmann::ordered_json to_json() const;
  std::string config_hash() const;
};

// Applies the keys present in j on top of config. Unknown keys throw
// ConfigError so typos do not pass silently.
void apply_config_json(PipelineConfig& config, const nlohmann::json& j);

// Reads a TOML or JSON config file. Format is chosen by extension; files
// with other extensions are tried as JSON first, then TOML.
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json parse_config_text(const std::string& text, bool toml);

// Each run_* returns an ExitCode and writes one line per failure to log.
int run_pack(const PipelineConfig& config, std::ostream& log);
int run_sample(const PipelineConfig& config, const std::filesystem::path& packed_file, std::ostream& log);
int run_stats(const PipelineConfig& config, const std::filesystem::path& packed_file, std::ostream& log);
int run_synth(const PipelineConfig& config, const std::filesystem::path& packed_file, std::ostream& log);
int run_bench_key(const PipelineConfig& config, std::ostream& log);
int run_buckets(const PipelineConfig& config, const std::filesystem::path& samples_file, std::ostream& log);
// Writes rope_plan.json; when out is non-null the plan is also printed there.
int run_rope_plan(const PipelineConfig& config, std::ostream& log, std::ostream* out);

// mode "key": inputs are the task file and a {"task_index","model_output"} file.
// mode "similarity": primary is a {"candidate","reference"} file; secondary unused.
int run_score(const PipelineConfig& config, const std::string& mode, const std::filesystem::path& primary,
              const std::filesystem::path& secondary, std::ostream& log);

// Artifact names written under output_dir.
namespace artifacts {
inline constexpr const char* kPacked = "packed.jsonl";
inline constexpr const char* kPackStats = "pack_stats.json";
inline constexpr const char* kGraphAudit = "graph_audit.jsonl";
inline constexpr const char* kSampled = "sampled.jsonl";
inline constexpr const char* kSampleStats = "sample_stats.json";
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kInstructions = "instructions.jsonl";
inline constexpr const char* kKeyTasks = "key_tasks.jsonl";
inline constexpr const char* kKeyGrid = "key_grid.csv";
inline constexpr const char* kBuckets = "buckets.jsonl";
inline constexpr const char* kRopePlan = "rope_plan.json";
inline constexpr const char* kKeyScores = "key_scores.csv";
inline constexpr const char* kKeyScoreSummary = "key_score_summary.json";
inline constexpr const char* kSimilarityCurve = "similarity_curve.json";
}  // namespace artifacts

}  // namespace repoctx
