#include <fstream>
#include <sstream>

#include "repoctx/errors.hpp"
#include "repoctx/pipeline.hpp"
#include "repoctx/text.hpp"
#include "repoctx/tokens.hpp"
#include "toml.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace repoctx {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

std::uint64_t get_u64(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v < 0) bad(key, "must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  bad(key, "expected an integer, got " + j.dump());
}

double get_double(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number, got " + j.dump());
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad(key, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(get_string(e, key));
  return out;
}

const json& get_object(const json& j, const std::string& key) {
  if (!j.is_object()) bad(key, "expected a table");
  return j;
}

template <typename Fn>
void each_key(const json& obj, const std::string& prefix, Fn&& fn) {
  for (const auto& [k, v] : get_object(obj, prefix.empty() ? "<root>" : prefix).items()) {
    fn(k, v, prefix.empty() ? k : prefix + "." + k);
  }
}

void apply_rule(LengthRule& rule, const json& j, const std::string& prefix) {
  each_key(j, prefix, [&](const std::string& k, const json& v, const std::string& path) {
    if (k == "short_threshold_tokens") rule.short_threshold_tokens = get_u64(v, path);
    else if (k == "retention_rate") rule.retention_rate = get_double(v, path);
    else bad(path, "unknown key");
  });
}

}  // namespace

void apply_config_json(PipelineConfig& c, const json& root) {
  each_key(root, "", [&](const std::string& k, const json& v, const std::string& path) {
    if (k == "corpus_root") c.corpus_root = get_string(v, path);
    else if (k == "output_dir") c.output_dir = get_string(v, path);
    else if (k == "seed") c.seed = get_u64(v, path);
    else if (k == "token_counter") c.token_counter = get_string(v, path);
    else if (k == "worker_count" || k == "workers") c.worker_count = get_u64(v, path);
    else if (k == "header_prefix") c.header_prefix = get_string(v, path);
    else if (k == "ingest") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "max_file_bytes") c.ingest.max_file_bytes = get_u64(v2, p2);
        else bad(p2, "unknown key");
      });
    } else if (k == "classifier") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "doc_basename_prefixes") c.classifier.doc_basename_prefixes = get_strings(v2, p2);
        else if (k2 == "doc_extensions") c.classifier.doc_extensions = get_strings(v2, p2);
        else if (k2 == "build_basenames") c.classifier.build_basenames = get_strings(v2, p2);
        else bad(p2, "unknown key");
      });
    } else if (k == "sampler") {
      // Global values first: per-language rules inherit whatever they omit.
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "short_threshold_tokens") c.sampler.short_threshold_tokens = get_u64(v2, p2);
        else if (k2 == "retention_rate") c.sampler.retention_rate = get_double(v2, p2);
        else if (k2 != "per_language") bad(p2, "unknown key");
      });
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "per_language") {
          each_key(v2, p2, [&](const std::string& lang_name, const json& v3, const std::string& p3) {
            auto lang = parse_language(lang_name);
            if (!lang) bad(p3, "unknown language");
            LengthRule rule{c.sampler.short_threshold_tokens, c.sampler.retention_rate};
            if (auto it = c.sampler.per_language.find(*lang); it != c.sampler.per_language.end()) rule = it->second;
            apply_rule(rule, v3, p3);
            c.sampler.per_language[*lang] = rule;
          });
        }
      });
    } else if (k == "responder") {
      if (v.is_string()) {
        c.responder.kind = v.get<std::string>();
        return;
      }
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "kind") c.responder.kind = get_string(v2, p2);
        else if (k2 == "url") c.responder.url = get_string(v2, p2);
        else if (k2 == "timeout_seconds") c.responder.timeout_seconds = get_u64(v2, p2);
        else if (k2 == "token_env") c.responder.token_env = get_string(v2, p2);
        else bad(p2, "unknown key");
      });
    } else if (k == "synth") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "target_tokens") c.target_tokens = get_u64(v2, p2);
        else if (k2 == "samples_per_doc") c.samples_per_doc = get_u64(v2, p2);
        else if (k2 == "eos_marker") c.eos_marker = get_string(v2, p2);
        else if (k2 == "templates") c.templates = get_string(v2, p2);
        else bad(p2, "unknown key");
      });
    } else if (k == "bench") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "max_tokens") c.bench_max_tokens = get_u64(v2, p2);
        else if (k2 == "step") c.bench_step = get_u64(v2, p2);
        else if (k2 == "filler_dir") c.filler_dir = get_string(v2, p2);
        else bad(p2, "unknown key");
      });
    } else if (k == "bucket_spec" || k == "buckets") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "boundaries") {
          if (!v2.is_array()) bad(p2, "expected an array of integers");
          c.bucket_spec.boundaries.clear();
          for (const auto& b : v2) c.bucket_spec.boundaries.push_back(get_u64(b, p2));
        } else if (k2 == "cap") {
          c.bucket_spec.cap = get_u64(v2, p2);
        } else {
          bad(p2, "unknown key");
        }
      });
    } else if (k == "rope") {
      each_key(v, path, [&](const std::string& k2, const json& v2, const std::string& p2) {
        if (k2 == "start_ctx") c.rope_start_ctx = get_u64(v2, p2);
        else if (k2 == "target_ctx") c.rope_target_ctx = get_u64(v2, p2);
        else if (k2 == "steps_per_stage") c.rope_steps = get_u64(v2, p2);
        else if (k2 == "batch_size") c.rope_batch = get_u64(v2, p2);
        else if (k2 == "head_dim") c.rope_head_dim = get_u64(v2, p2);
        else bad(p2, "unknown key");
      });
    } else {
      bad(path, "unknown key");
    }
  });
}

json parse_config_text(const std::string& text, bool toml) {
  if (!toml) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  try {
    auto table = toml::parse(text);
    std::ostringstream ss;
    ss << toml::json_formatter{table};
    return json::parse(ss.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream ss;
    ss << "invalid TOML config: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(ss.str());
  }
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto ext = to_lower(path.extension().string());
  json j;
  if (ext == ".toml") {
    j = parse_config_text(text, true);
  } else if (ext == ".json") {
    j = parse_config_text(text, false);
  } else {
    try {
      j = parse_config_text(text, false);
    } catch (const ConfigError&) {
      j = parse_config_text(text, true);
    }
  }
  PipelineConfig config;
  apply_config_json(config, j);
  return config;
}

void PipelineConfig::validate() const {
  if (worker_count == 0) throw ConfigError("worker_count must be positive");
  if (samples_per_doc == 0) throw ConfigError("samples_per_doc must be positive");
  if (target_tokens == 0) throw ConfigError("target_tokens must be positive");
  if (eos_marker.empty()) throw ConfigError("eos_marker must not be empty");
  if (responder.kind != "extractive" && responder.kind != "remote")
    throw ConfigError("responder must be 'extractive' or 'remote', got '" + responder.kind + "'");
  if (responder.kind == "remote" && responder.url.empty()) throw ConfigError("remote responder needs a url");
  sampler.validate();
  bucket_spec.validate();
  (void)TokenCounter::parse(token_counter);
}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["corpus_root"] = corpus_root.generic_string();
  j["output_dir"] = output_dir.generic_string();
  j["seed"] = seed;
  j["token_counter"] = token_counter;
  j["worker_count"] = worker_count;
  j["header_prefix"] = header_prefix;
  j["ingest"] = {{"max_file_bytes", ingest.max_file_bytes}};
  j["classifier"] = {{"doc_basename_prefixes", classifier.doc_basename_prefixes},
                     {"doc_extensions", classifier.doc_extensions},
                     {"build_basenames", classifier.build_basenames}};
  ordered_json per_lang = ordered_json::object();
  for (const auto& [lang, rule] : sampler.per_language) {
    per_lang[std::string(to_string(lang))] = {{"short_threshold_tokens", rule.short_threshold_tokens},
                                              {"retention_rate", rule.retention_rate}};
  }
  j["sampler"] = {{"short_threshold_tokens", sampler.short_threshold_tokens},
                  {"retention_rate", sampler.retention_rate},
                  {"per_language", per_lang}};
  // The token itself is a secret; only the variable name is hashed.
  j["responder"] = {{"kind", responder.kind},
                    {"url", responder.url},
                    {"timeout_seconds", responder.timeout_seconds},
                    {"token_env", responder.token_env}};
  j["synth"] = {{"target_tokens", target_tokens},
                {"samples_per_doc", samples_per_doc},
                {"eos_marker", eos_marker},
                {"templates", templates.generic_string()}};
  j["bench"] = {{"max_tokens", bench_max_tokens}, {"step", bench_step}, {"filler_dir", filler_dir.generic_string()}};
  j["bucket_spec"] = {{"boundaries", bucket_spec.boundaries}, {"cap", bucket_spec.cap}};
  j["rope"] = {{"start_ctx", rope_start_ctx},
               {"target_ctx", rope_target_ctx},
               {"steps_per_stage", rope_steps},
               {"batch_size", rope_batch},
               {"head_dim", rope_head_dim}};
  return j;
}

std::string PipelineConfig::config_hash() const {
  // Neither field changes artifact contents, so reruns elsewhere or with more
  // workers keep the same hash.
  auto j = to_json();
  j.erase("worker_count");
  j.erase("output_dir");
  return hex64(fnv1a64(j.dump()));
}

}  // namespace repoctx
