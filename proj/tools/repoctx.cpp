// Command-line front end. Exit codes are listed in README.md.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "repoctx/errors.hpp"
#include "repoctx/io.hpp"
#include "repoctx/pipeline.hpp"

namespace fs = std::filesystem;
using namespace repoctx;

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> corpus_root;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> token_counter;
  std::optional<std::size_t> workers;
  std::optional<double> rate;
  std::optional<std::uint64_t> threshold;
  std::optional<std::uint64_t> target_tokens;
  std::optional<std::size_t> samples_per_doc;
  std::optional<std::string> responder;
  std::optional<std::string> responder_url;
  std::optional<std::string> templates;
  std::optional<std::uint64_t> max_tokens;
  std::optional<std::uint64_t> step;
  std::optional<std::string> filler_dir;
  std::optional<std::size_t> cap;
  std::optional<std::uint64_t> start_ctx;
  std::optional<std::uint64_t> target_ctx;

  void apply(PipelineConfig& c) const {
    if (corpus_root) c.corpus_root = *corpus_root;
    if (output_dir) c.output_dir = *output_dir;
    if (seed) c.seed = *seed;
    if (token_counter) c.token_counter = *token_counter;
    if (workers) c.worker_count = *workers;
    if (rate) c.sampler.retention_rate = *rate;
    if (threshold) c.sampler.short_threshold_tokens = *threshold;
    if (target_tokens) c.target_tokens = *target_tokens;
    if (samples_per_doc) c.samples_per_doc = *samples_per_doc;
    if (responder) c.responder.kind = *responder;
    if (responder_url) c.responder.url = *responder_url;
    if (templates) c.templates = *templates;
    if (max_tokens) c.bench_max_tokens = *max_tokens;
    if (step) c.bench_step = *step;
    if (filler_dir) c.filler_dir = *filler_dir;
    if (cap) c.bucket_spec.cap = *cap;
    if (start_ctx) c.rope_start_ctx = *start_ctx;
    if (target_ctx) c.rope_target_ctx = *target_ctx;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repository-level code corpus tooling: packing, sampling, instruction synthesis, benchmarks."};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Overrides o;
  app.add_option("-c,--config", o.config, "TOML or JSON config file; flags override its values");
  app.add_option("-o,--output-dir", o.output_dir, "Directory for artifacts");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--token-counter", o.token_counter, "wordpunct | byteratio:N[/D] | external:PATH");
  app.add_option("-j,--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* pack = app.add_subcommand("pack", "Pack each repository into one document");
  pack->add_option("corpus", o.corpus_root, "Corpus root directory or JSONL manifest");

  std::string input;
  auto* sample = app.add_subcommand("sample", "Downsample short packed documents");
  sample->add_option("packed", input, "Packed JSONL file")->required();
  sample->add_option("--rate", o.rate, "Retention rate for short documents");
  sample->add_option("--threshold", o.threshold, "Short-document threshold in tokens");

  auto* stats = app.add_subcommand("stats", "Corpus statistics for a packed file");
  stats->add_option("packed", input, "Packed JSONL file")->required();

  auto* synth = app.add_subcommand("synth", "Synthesize multiturn instruction samples");
  synth->add_option("packed", input, "Packed JSONL file")->required();
  synth->add_option("--target-tokens", o.target_tokens, "Token budget per sample");
  synth->add_option("--samples-per-doc", o.samples_per_doc, "Samples drawn from each document");
  synth->add_option("--responder", o.responder, "extractive | remote");
  synth->add_option("--responder-url", o.responder_url, "Endpoint for the remote responder");
  synth->add_option("--templates", o.templates, "JSON file of instruction templates");

  auto* bench_key = app.add_subcommand("bench-key", "Generate the key-retrieval grid");
  bench_key->add_option("--max-tokens", o.max_tokens, "Longest sequence length");
  bench_key->add_option("--step", o.step, "Grid step in tokens");
  bench_key->add_option("--filler-dir", o.filler_dir, "Directory of filler code snippets");

  auto* buckets = app.add_subcommand("buckets", "Cap samples per context-length bucket");
  buckets->add_option("samples", input, "JSONL of {id, tokens} or {id, text}")->required();
  buckets->add_option("--cap", o.cap, "Samples kept per bucket");

  auto* rope_plan = app.add_subcommand("rope-plan", "Progressive context-extension schedule");
  rope_plan->add_option("--start", o.start_ctx, "Current context length");
  rope_plan->add_option("--target", o.target_ctx, "Target context length");

  std::string mode = "key";
  std::string secondary;
  auto* score = app.add_subcommand("score", "Score model outputs");
  score->add_option("--mode", mode, "key | similarity")->check(CLI::IsMember({"key", "similarity"}));
  score->add_option("input", input, "Task JSONL (key) or {candidate, reference} JSONL (similarity)")->required();
  score->add_option("outputs", secondary, "{task_index, model_output} JSONL (key mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  PipelineConfig config;
  try {
    if (o.config) config = load_config(*o.config);
    o.apply(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  auto& log = std::cerr;
  if (*pack) return run_pack(config, log);
  if (*sample) return run_sample(config, input, log);
  if (*stats) return run_stats(config, input, log);
  if (*synth) return run_synth(config, input, log);
  if (*bench_key) return run_bench_key(config, log);
  if (*buckets) return run_buckets(config, input, log);
  if (*rope_plan) return run_rope_plan(config, log, &std::cout);
  if (*score) {
    if (mode == "key" && secondary.empty()) {
      std::cerr << "error: score --mode key needs an outputs file\n\n" << score->help();
      return kExitUsage;
    }
    return run_score(config, mode, input, secondary, log);
  }
  std::cerr << app.help();
  return kExitUsage;
}
