#include "repoctx/instr.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "httplib.h"
#include "repoctx/errors.hpp"
#include "repoctx/text.hpp"

namespace repoctx {

std::string_view to_string(Role role) { return role == Role::User ? "user" : "assistant"; }

const InstructionTemplates& InstructionTemplates::defaults() {
  static const InstructionTemplates templates{
      {"Below is the full source of a repository. Read it carefully; the questions that follow refer to it.",
       "The following document contains every file of a software repository. Use it to answer the requests below."},
      {"Show the complete implementation of the {kind} `{qualified_name}` defined in `{file}`.",
       "Find the {kind} `{qualified_name}` in `{file}` and reproduce its source code exactly.",
       "Retrieve the source code of `{qualified_name}` from `{file}`."},
      {"Explain what the {kind} `{qualified_name}` in `{file}` does, using the available documentation.",
       "Describe the purpose and behaviour of `{qualified_name}` from `{file}`."},
      {"The implementation of the {kind} `{qualified_name}` has been removed from `{file}` in the code above. "
       "Using the remaining documentation and code, write the missing implementation.",
       "Implement `{qualified_name}` (a {kind} in `{file}`) so that it fits the surrounding code shown above."}};
  return templates;
}

InstructionTemplates InstructionTemplates::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read templates file " + path.string());
  InstructionTemplates t = defaults();
  try {
    const auto j = nlohmann::json::parse(in);
    auto read = [&](const char* key, std::vector<std::string>& dst) {
      if (!j.contains(key)) return;
      auto v = j.at(key).get<std::vector<std::string>>();
      if (v.empty()) throw ConfigError(std::string("templates.") + key + " must not be empty");
      dst = std::move(v);
    };
    read("context", t.context);
    read("retrieval", t.retrieval);
    read("explanation", t.explanation);
    read("implementation", t.implementation);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad templates file " + path.string() + ": " + e.what());
  }
  return t;
}

std::string fill_template(std::string_view tmpl, const CodeUnit& unit) {
  static const std::map<std::string, std::string CodeUnit::*> kFields{
      {"{name}", &CodeUnit::name}, {"{qualified_name}", &CodeUnit::qualified_name}, {"{file}", &CodeUnit::file_path}};
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string key(tmpl.substr(i, close - i + 1));
        if (auto it = kFields.find(key); it != kFields.end()) {
          out += unit.*(it->second);
          i = close + 1;
          continue;
        }
        if (key == "{kind}") {
          out += to_string(unit.kind);
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string ExtractiveResponder::explain(const CodeUnit& unit, const std::string&) const {
  if (!unit.doc_text.empty()) return unit.doc_text;
  return "`" + unit.qualified_name + "` is a " + std::string(to_string(unit.kind)) + " defined in `" +
         unit.file_path + "` with the signature `" + unit.signature + "`.";
}

RemoteResponder::RemoteResponder(Options options) : options_(std::move(options)) {
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("responder URL needs a scheme: " + options_.url);
  const std::string scheme = options_.url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported responder URL scheme: " + scheme);
  const auto path_start = options_.url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
}

std::string RemoteResponder::explain(const CodeUnit& unit, const std::string& prompt) const {
  httplib::Client client(scheme_host_port_);
  const auto t = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(t, 0);
  client.set_read_timeout(t, 0);
  client.set_write_timeout(t, 0);
  httplib::Headers headers;
  if (!options_.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + options_.bearer_token);
  const std::string body = nlohmann::json{{"prompt", prompt}}.dump();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res)
    throw SynthError("responder request for " + unit.qualified_name + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw SynthError("responder returned HTTP " + std::to_string(res->status) + " for " + unit.qualified_name);
  try {
    return nlohmann::json::parse(res->body).at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SynthError("responder reply for " + unit.qualified_name + " lacks a \"text\" string: " + e.what());
  }
}

std::vector<CodeUnit> sample_units(const std::vector<CodeUnit>& units, std::uint64_t seed) {
  std::vector<std::string> file_order;
  std::map<std::string, std::vector<const CodeUnit*>> by_file;
  for (const auto& u : units) {
    if (u.kind == UnitKind::Class) continue;
    auto [it, inserted] = by_file.try_emplace(u.file_path);
    if (inserted) file_order.push_back(u.file_path);
    it->second.push_back(&u);
  }
  std::vector<CodeUnit> out;
  for (const auto& path : file_order) {
    auto pool = by_file[path];
    Rng rng(derive_seed(seed, "units:" + path));
    const std::size_t take = std::min(kMaxUnitsPerFile, pool.size());
    // Partial Fisher-Yates: the first `take` slots are the draw.
    for (std::size_t k = 0; k < take; ++k) {
      const auto j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
      std::swap(pool[k], pool[j]);
      out.push_back(*pool[k]);
    }
  }
  return out;
}

std::string unit_text(const CodeUnit& unit, const PackedDocument& doc) {
  if (unit.offset > doc.text.size() || unit.length > doc.text.size() - unit.offset)
    throw SynthError("unit " + unit.qualified_name + " lies outside document " + doc.repo_id);
  return doc.text.substr(unit.offset, unit.length);
}

TurnPair make_retrieval_turn(const CodeUnit& unit, const PackedDocument& doc, std::string_view instruction) {
  return {Turn::user(std::string(instruction)), Turn::assistant(unit_text(unit, doc))};
}

TurnPair make_explanation_turn(const CodeUnit& unit, std::string_view code, const Responder& responder,
                               std::string_view instruction) {
  std::string prompt(instruction);
  prompt += "\n\n";
  prompt.append(code);
  return {Turn::user(std::string(instruction)), Turn::assistant(responder.explain(unit, prompt))};
}

ExcludedContext exclude_unit(const CodeUnit& unit, const PackedDocument& doc) {
  const std::string removed = unit_text(unit, doc);
  std::string placeholder = detect_language(unit.file_path) == Language::Python
                                ? "# [implementation of " + unit.qualified_name + " removed]"
                                : "/* [implementation of " + unit.qualified_name + " removed] */";
  ExcludedContext ctx;
  ctx.placeholder_offset = unit.offset;
  ctx.placeholder_length = placeholder.size();
  ctx.text.reserve(doc.text.size() - unit.length + placeholder.size());
  ctx.text.append(doc.text, 0, unit.offset);
  ctx.text += placeholder;
  ctx.text.append(doc.text, unit.offset + unit.length, std::string::npos);
  return ctx;
}

TurnPair make_implementation_turn(const CodeUnit& unit, const PackedDocument& doc, std::string_view instruction) {
  auto ctx = exclude_unit(unit, doc);
  std::string user = std::move(ctx.text);
  user += "\n\n";
  user.append(instruction);
  return {Turn::user(std::move(user)), Turn::assistant(unit_text(unit, doc))};
}

namespace {

const std::string& pick(const std::vector<std::string>& options, Rng& rng) {
  if (options.empty()) throw ConfigError("instruction template set is empty");
  return options[static_cast<std::size_t>(rng.below(options.size()))];
}

std::uint64_t rendered_tokens(const Turn& turn, const SynthOptions& options) {
  std::uint64_t n = options.counter.count(turn.text);
  if (turn.role == Role::Assistant) n += options.counter.count(options.eos_marker);
  return n;
}

}  // namespace

InstructionSample assemble_sample(const PackedDocument& doc, const Responder& responder,
                                  const SynthOptions& options) {
  if (options.target_tokens == 0) throw SynthError("target_tokens must be positive");
  if (options.counter.kind() == TokenCounter::Kind::External)
    throw ConfigError("an external token counter cannot measure generated turns");
  auto units = sample_units(extract_units(doc), options.seed);
  if (units.empty()) throw SynthError("document " + doc.repo_id + " has no functions or methods to ask about");
  Rng order_rng(derive_seed(options.seed, "order:" + doc.repo_id));
  order_rng.shuffle(units);
  Rng template_rng(derive_seed(options.seed, "templates:" + doc.repo_id));
  const auto& templates = *options.templates;

  InstructionSample sample;
  sample.source_repo_id = doc.repo_id;
  sample.target_tokens = options.target_tokens;

  auto push = [&](TurnPair pair) {
    if (sample.turns.empty()) {
      // The opening user turn carries the whole packed document.
      pair.first.text = pick(templates.context, template_rng) + "\n\n" + doc.text + "\n\n" + pair.first.text;
    }
    sample.actual_tokens += rendered_tokens(pair.first, options) + rendered_tokens(pair.second, options);
    sample.turns.push_back(std::move(pair.first));
    sample.turns.push_back(std::move(pair.second));
    return sample.actual_tokens >= options.target_tokens;
  };

  for (const auto& unit : units) {
    if (push(make_retrieval_turn(unit, doc, fill_template(pick(templates.retrieval, template_rng), unit)))) break;
    const std::string explain_instr = fill_template(pick(templates.explanation, template_rng), unit);
    bool done = false;
    try {
      done = push(make_explanation_turn(unit, unit_text(unit, doc), responder, explain_instr));
    } catch (const SynthError& e) {
      sample.warnings.push_back(e.what());
    }
    if (done) break;
    if (push(make_implementation_turn(unit, doc, fill_template(pick(templates.implementation, template_rng), unit))))
      break;
  }
  return sample;
}

nlohmann::ordered_json render_training_record(const InstructionSample& sample, std::string_view eos_marker) {
  nlohmann::ordered_json j;
  j["source_repo_id"] = sample.source_repo_id;
  j["target_tokens"] = sample.target_tokens;
  j["actual_tokens"] = sample.actual_tokens;
  auto& turns = j["turns"] = nlohmann::ordered_json::array();
  for (const auto& t : sample.turns) {
    std::string text = t.text;
    if (t.role == Role::Assistant) text.append(eos_marker);
    turns.push_back({{"role", to_string(t.role)}, {"text", std::move(text)}, {"train_on", t.train_on}});
  }
  return j;
}

InstructionSample parse_training_record(const nlohmann::json& record, std::string_view eos_marker) {
  InstructionSample sample;
  sample.source_repo_id = record.at("source_repo_id").get<std::string>();
  sample.target_tokens = record.at("target_tokens").get<std::uint64_t>();
  sample.actual_tokens = record.at("actual_tokens").get<std::uint64_t>();
  for (const auto& t : record.at("turns")) {
    Turn turn;
    const auto role = t.at("role").get<std::string>();
    if (role == "user") {
      turn.role = Role::User;
    } else if (role == "assistant") {
      turn.role = Role::Assistant;
    } else {
      throw std::invalid_argument("unknown role '" + role + "'");
    }
    turn.text = t.at("text").get<std::string>();
    turn.train_on = t.at("train_on").get<bool>();
    if (turn.role == Role::Assistant) {
      if (!std::string_view(turn.text).ends_with(eos_marker))
        throw std::invalid_argument("assistant turn lacks the end-of-sequence marker");
      turn.text.resize(turn.text.size() - eos_marker.size());
    }
    sample.turns.push_back(std::move(turn));
  }
  return sample;
}

}  // namespace repoctx
