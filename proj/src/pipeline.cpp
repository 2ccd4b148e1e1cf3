#include "repoctx/pipeline.hpp"

#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "repoctx/errors.hpp"
#include "repoctx/import_graph.hpp"
#include "repoctx/instr.hpp"
#include "repoctx/io.hpp"
#include "repoctx/packer.hpp"
#include "repoctx/parallel.hpp"
#include "repoctx/rope.hpp"
#include "repoctx/text.hpp"
#include "repoctx/tokens.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace repoctx {

namespace {

template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    body();
    return kExitOk;
  } catch (const RecordError& e) {
    log << "error: malformed record at " << e.what() << "\n";
    return kExitRecord;
  } catch (const IngestError& e) {
    log << "error: " << e.what() << "\n";
    return kExitCorpus;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SynthError& e) {
    log << "error: " << e.what() << "\n";
    return kExitSynth;
  } catch (const BenchError& e) {
    log << "error: " << e.what() << "\n";
    return kExitBench;
  } catch (const RopeError& e) {
    log << "error: " << e.what() << "\n";
    return kExitRope;
  } catch (const PlanError& e) {
    log << "error: " << e.what() << "\n";
    return kExitRope;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CountError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

ArtifactMeta meta_for(const PipelineConfig& config, std::string artifact) {
  return {std::move(artifact), config.seed, config.config_hash()};
}

fs::path out_path(const PipelineConfig& config, const char* name) { return config.output_dir / name; }

// JSON report layout: metadata line, then the payload on one line.
void write_report(AtomicFile& file, const ArtifactMeta& meta, const ordered_json& payload) {
  file.write_line(meta_line(meta));
  file.write_line(payload.dump());
}

std::vector<PackedDocument> read_packed(const fs::path& path) {
  std::vector<PackedDocument> docs;
  read_jsonl(path, [&](const json& j, std::size_t) { docs.push_back(packed_document_from_json(j)); });
  return docs;
}

// Finds the key function in a prompt and runs it: the ideal model answer.
std::string self_check_answer(const std::string& prompt) {
  static constexpr std::string_view kHead = "def key():\n    return ";
  const auto at = prompt.find(kHead);
  if (at == std::string::npos) return {};
  const auto begin = at + kHead.size();
  const auto end = prompt.find('\n', begin);
  return std::to_string(bench::evaluate_expression(std::string_view(prompt).substr(begin, end - begin)));
}

std::string bucket_label(const bench::BucketSpec& spec, std::size_t bucket) {
  const std::string lo = bucket == 0 ? "0" : std::to_string(spec.boundaries[bucket - 1]);
  const std::string hi = bucket < spec.boundaries.size() ? std::to_string(spec.boundaries[bucket]) : "inf";
  return "[" + lo + "," + hi + ")";
}

}  // namespace

int run_pack(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    if (config.corpus_root.empty()) throw IngestError("corpus_root is not set");
    PackOptions options;
    options.header_prefix = config.header_prefix;
    options.counter = TokenCounter::parse(config.token_counter);

    auto repos = scan_corpus(config.corpus_root, config.ingest, config.worker_count, config.classifier);
    if (repos.empty()) throw IngestError("corpus " + config.corpus_root.string() + " contains no usable repositories");
    std::size_t warnings = 0;
    for (const auto& r : repos) warnings += r.ingest_warnings;

    const auto result = pack_corpus(repos, options, config.worker_count);

    AtomicFile packed(out_path(config, artifacts::kPacked));
    packed.write_line(meta_line(meta_for(config, "packed")));
    for (const auto& doc : result.documents) packed.write_line(to_json(doc).dump());

    AtomicFile audit(out_path(config, artifacts::kGraphAudit));
    audit.write_line(meta_line(meta_for(config, "graph_audit")));
    std::size_t removed = 0;
    for (std::size_t i = 0; i < repos.size(); ++i) {
      removed += result.graphs[i].removed_edges.size();
      for (const auto& line : graph_audit_lines(repos[i].id, result.graphs[i])) audit.write_line(line);
    }

    const auto stats = corpus_stats(result.documents);
    AtomicFile stats_file(out_path(config, artifacts::kPackStats));
    write_report(stats_file, meta_for(config, "corpus_stats"), stats.to_json());

    packed.commit();
    audit.commit();
    stats_file.commit();
    log << "packed " << stats.headline() << "\n";
    if (removed) log << "removed " << removed << " import edges to break cycles\n";
    if (warnings) log << "skipped " << warnings << " unreadable or oversized files\n";
  });
}

int run_sample(const PipelineConfig& config, const fs::path& packed_file, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    SamplerConfig sampler = config.sampler;
    sampler.seed = config.seed;
    sampler.validate();

    AtomicFile out(out_path(config, artifacts::kSampled));
    out.write_line(meta_line(meta_for(config, "sampled")));
    CorpusStats before, after;
    read_jsonl(packed_file, [&](const json& j, std::size_t) {
      const auto doc = packed_document_from_json(j);
      before.add(doc);
      if (!should_retain(doc, sampler)) return;
      after.add(doc);
      out.write_line(to_json(doc).dump());
    });

    ordered_json report;
    report["before"] = before.to_json();
    report["after"] = after.to_json();
    AtomicFile stats_file(out_path(config, artifacts::kSampleStats));
    write_report(stats_file, meta_for(config, "sample_stats"), report);

    out.commit();
    stats_file.commit();
    log << "before: " << before.headline() << "\n";
    log << "after:  " << after.headline() << "\n";
  });
}

int run_stats(const PipelineConfig& config, const fs::path& packed_file, std::ostream& log) {
  return guarded(log, [&] {
    CorpusStats stats;
    read_jsonl(packed_file, [&](const json& j, std::size_t) { stats.add(packed_document_from_json(j)); });
    AtomicFile out(out_path(config, artifacts::kStats));
    write_report(out, meta_for(config, "corpus_stats"), stats.to_json());
    out.commit();
    log << stats.headline() << "\n";
  });
}

int run_synth(const PipelineConfig& config, const fs::path& packed_file, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    const auto docs = read_packed(packed_file);

    std::optional<InstructionTemplates> loaded;
    if (!config.templates.empty()) loaded = InstructionTemplates::load(config.templates);

    std::unique_ptr<Responder> responder;
    if (config.responder.kind == "remote") {
      RemoteResponder::Options opts;
      opts.url = config.responder.url;
      opts.timeout = std::chrono::seconds(config.responder.timeout_seconds);
      if (const char* token = std::getenv(config.responder.token_env.c_str())) opts.bearer_token = token;
      responder = std::make_unique<RemoteResponder>(std::move(opts));
    } else {
      responder = std::make_unique<ExtractiveResponder>();
    }

    SynthOptions base;
    base.target_tokens = config.target_tokens;
    base.counter = TokenCounter::parse(config.token_counter);
    if (loaded) base.templates = &*loaded;
    base.eos_marker = config.eos_marker;

    struct Outcome {
      std::string line;
      std::vector<std::string> warnings;
      std::string skipped;
    };
    const std::size_t per_doc = config.samples_per_doc;
    std::vector<Outcome> outcomes(docs.size() * per_doc);
    parallel_for(outcomes.size(), config.worker_count, [&](std::size_t i) {
      const auto& doc = docs[i / per_doc];
      const std::size_t s = i % per_doc;
      SynthOptions options = base;
      options.seed = s == 0 ? config.seed : derive_seed(config.seed, "sample:" + std::to_string(s));
      try {
        auto sample = assemble_sample(doc, *responder, options);
        outcomes[i].line = render_training_record(sample, options.eos_marker).dump();
        outcomes[i].warnings = std::move(sample.warnings);
      } catch (const SynthError& e) {
        outcomes[i].skipped = e.what();
      }
    });

    AtomicFile out(out_path(config, artifacts::kInstructions));
    out.write_line(meta_line(meta_for(config, "instructions")));
    std::size_t written = 0, skipped = 0;
    for (const auto& o : outcomes) {
      for (const auto& w : o.warnings) log << "warning: " << w << "\n";
      if (!o.skipped.empty()) {
        ++skipped;
        log << "skipped: " << o.skipped << "\n";
        continue;
      }
      out.write_line(o.line);
      ++written;
    }
    if (written == 0 && !docs.empty()) throw SynthError("no document yielded an instruction sample");
    out.commit();
    log << "wrote " << written << " samples";
    if (skipped) log << ", skipped " << skipped;
    log << "\n";
  });
}

int run_bench_key(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    const auto counter = TokenCounter::parse(config.token_counter);
    if (counter.kind() == TokenCounter::Kind::External)
      throw ConfigError("bench-key needs a counter that can measure generated prompts");
    const auto pool = config.filler_dir.empty()
                          ? bench::synthetic_filler_pool(config.bench_max_tokens / 16 + 64, config.seed)
                          : bench::load_filler_pool(config.filler_dir);
    const auto tasks = bench::grid_tasks(pool, config.bench_max_tokens, config.bench_step, config.seed, counter,
                                         config.worker_count);
    if (tasks.empty()) throw BenchError("no grid cell can hold the key function");

    std::vector<bool> passed(tasks.size());
    std::size_t failures = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      passed[i] = bench::score_key_retrieval(self_check_answer(tasks[i].prompt), tasks[i].expected_output);
      if (!passed[i]) ++failures;
    }

    AtomicFile task_file(out_path(config, artifacts::kKeyTasks));
    task_file.write_line(meta_line(meta_for(config, "key_tasks")));
    for (const auto& t : tasks) task_file.write_line(t.to_json().dump());
    AtomicFile grid(out_path(config, artifacts::kKeyGrid));
    grid.stream() << "# " << meta_line(meta_for(config, "key_grid_self_check")) << "\n" << bench::grid_csv(tasks, passed);

    if (failures) throw BenchError(std::to_string(failures) + " tasks failed the self-check");
    task_file.commit();
    grid.commit();
    log << "wrote " << tasks.size() << " key-retrieval tasks\n";
  });
}

int run_buckets(const PipelineConfig& config, const fs::path& samples_file, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    bench::BucketSpec spec = config.bucket_spec;
    spec.seed = config.seed;
    spec.validate();
    std::optional<TokenCounter> counter;

    std::vector<bench::BucketSample> samples;
    std::map<std::string, std::uint64_t> tokens_by_id;
    read_jsonl(samples_file, [&](const json& j, std::size_t lineno) {
      const auto& id_field = j.at("id");
      std::string id = id_field.is_string() ? id_field.get<std::string>() : id_field.dump();
      std::uint64_t tokens = 0;
      if (j.contains("tokens")) {
        tokens = j.at("tokens").get<std::uint64_t>();
      } else {
        if (!counter) counter = TokenCounter::parse(config.token_counter);
        tokens = counter->count(j.at("text").get<std::string>(), id);
      }
      if (!tokens_by_id.emplace(id, tokens).second) throw RecordError(lineno, "duplicate id " + id);
      samples.push_back({std::move(id), tokens});
    });

    const auto kept = bench::rebalance_buckets(samples, spec);
    AtomicFile out(out_path(config, artifacts::kBuckets));
    out.write_line(meta_line(meta_for(config, "buckets")));
    for (const auto& id : kept) {
      const auto tokens = tokens_by_id.at(id);
      ordered_json j;
      j["id"] = id;
      j["tokens"] = tokens;
      j["bucket"] = bucket_label(spec, spec.bucket_of(tokens));
      out.write_line(j.dump());
    }
    out.commit();
    log << "kept " << kept.size() << " of " << samples.size() << " samples\n";
  });
}

int run_rope_plan(const PipelineConfig& config, std::ostream& log, std::ostream* out) {
  return guarded(log, [&] {
    rope::RopeParams params;
    params.head_dim = config.rope_head_dim;
    params.validate();
    const auto plan = rope::progressive_plan(config.rope_start_ctx, config.rope_target_ctx, config.rope_steps,
                                             config.rope_batch);
    ordered_json payload;
    payload["start_ctx"] = config.rope_start_ctx;
    payload["target_ctx"] = config.rope_target_ctx;
    payload["head_dim"] = config.rope_head_dim;
    payload["stages"] = plan.to_json()["stages"];
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
      const auto& s = plan.stages[i];
      payload["stages"][i]["slowest_pair_sweep_rad"] =
          rope::slowest_pair_sweep(s.context_len, s.base, config.rope_head_dim);
    }
    AtomicFile file(out_path(config, artifacts::kRopePlan));
    write_report(file, meta_for(config, "rope_plan"), payload);
    file.commit();
    if (out) *out << payload.dump(2) << "\n";
    log << "planned " << plan.stages.size() << " stages\n";
  });
}

int run_score(const PipelineConfig& config, const std::string& mode, const fs::path& primary,
              const fs::path& secondary, std::ostream& log) {
  return guarded(log, [&] {
    if (mode == "key") {
      std::vector<bench::KeyRetrievalTask> tasks;
      read_jsonl(primary, [&](const json& j, std::size_t) { tasks.push_back(bench::KeyRetrievalTask::from_json(j)); });
      std::vector<std::optional<std::string>> outputs(tasks.size());
      read_jsonl(secondary, [&](const json& j, std::size_t lineno) {
        const auto idx = j.at("task_index").get<std::uint64_t>();
        if (idx >= tasks.size()) throw RecordError(lineno, "task_index " + std::to_string(idx) + " out of range");
        if (outputs[idx]) throw RecordError(lineno, "duplicate task_index " + std::to_string(idx));
        outputs[idx] = j.at("model_output").get<std::string>();
      });
      std::vector<bool> passed(tasks.size());
      std::size_t answered = 0, correct = 0;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!outputs[i]) continue;
        ++answered;
        passed[i] = bench::score_key_retrieval(*outputs[i], tasks[i].expected_output);
        if (passed[i]) ++correct;
      }
      AtomicFile grid(out_path(config, artifacts::kKeyScores));
      grid.stream() << "# " << meta_line(meta_for(config, "key_scores")) << "\n" << bench::grid_csv(tasks, passed);
      ordered_json summary;
      summary["tasks"] = tasks.size();
      summary["answered"] = answered;
      summary["passed"] = correct;
      summary["accuracy"] =
          tasks.empty() ? ordered_json(nullptr) : ordered_json(static_cast<double>(correct) / tasks.size());
      AtomicFile summary_file(out_path(config, artifacts::kKeyScoreSummary));
      write_report(summary_file, meta_for(config, "key_score_summary"), summary);
      grid.commit();
      summary_file.commit();
      log << "passed " << correct << " of " << tasks.size() << " tasks";
      if (answered < tasks.size()) log << " (" << tasks.size() - answered << " unanswered)";
      log << "\n";
    } else if (mode == "similarity") {
      const auto counter = TokenCounter::parse(config.token_counter);
      std::vector<double> sims;
      read_jsonl(primary, [&](const json& j, std::size_t) {
        sims.push_back(bench::similarity(j.at("candidate").get<std::string>(), j.at("reference").get<std::string>(),
                                         counter));
      });
      const auto curve = bench::accuracy_at_thresholds(sims);
      ordered_json payload;
      payload["pairs"] = sims.size();
      const auto curve_json = curve.to_json();
      for (const auto& [k, v] : curve_json.items()) payload[k] = v;
      AtomicFile file(out_path(config, artifacts::kSimilarityCurve));
      write_report(file, meta_for(config, "similarity_curve"), payload);
      file.commit();
      log << "scored " << sims.size() << " pairs\n";
    } else {
      throw ConfigError("unknown score mode '" + mode + "' (expected key or similarity)");
    }
  });
}

}  // namespace repoctx
