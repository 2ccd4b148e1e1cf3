#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repoctx/packer.hpp"
#include "repoctx/tokens.hpp"
#include "repoctx/units.hpp"

namespace repoctx {

enum class Role { User, Assistant };
std::string_view to_string(Role role);

struct Turn {
  Role role = Role::User;
  std::string text;
  bool train_on = false;  // loss mask: assistant turns only

  static Turn user(std::string text) { return {Role::User, std::move(text), false}; }
  static Turn assistant(std::string text) { return {Role::Assistant, std::move(text), true}; }
  bool operator==(const Turn&) const = default;
};

using TurnPair = std::pair<Turn, Turn>;

struct InstructionSample {
  std::string source_repo_id;
  std::vector<Turn> turns;
  std::uint64_t target_tokens = 0;
  std::uint64_t actual_tokens = 0;
  std::vector<std::string> warnings;  // skipped turns; not serialized

  bool operator==(const InstructionSample& o) const {
    return source_repo_id == o.source_repo_id && turns == o.turns && target_tokens == o.target_tokens &&
           actual_tokens == o.actual_tokens;
  }
};

// Instruction phrasings. Placeholders: {name} {qualified_name} {kind} {file}.
struct InstructionTemplates {
  std::vector<std::string> context;  // preamble of the first user turn
  std::vector<std::string> retrieval;
  std::vector<std::string> explanation;
  std::vector<std::string> implementation;

  static const InstructionTemplates& defaults();
  // JSON object with the four arrays; missing arrays keep the defaults.
  static InstructionTemplates load(const std::filesystem::path& path);
};

std::string fill_template(std::string_view tmpl, const CodeUnit& unit);

// Produces the assistant text for an explanation request.
class Responder {
 public:
  virtual ~Responder() = default;
  // Throws SynthError on failure.
  virtual std::string explain(const CodeUnit& unit, const std::string& prompt) const = 0;
};

// Offline and deterministic: doc_text when present, else a templated summary.
class ExtractiveResponder final : public Responder {
 public:
  std::string explain(const CodeUnit& unit, const std::string& prompt) const override;
};

// POST {"prompt": str} -> {"text": str} over HTTP(S).
class RemoteResponder final : public Responder {
 public:
  struct Options {
    std::string url;  // e.g. http://127.0.0.1:8080/generate
    std::chrono::seconds timeout{60};
    std::string bearer_token;  // empty: no Authorization header
  };
  explicit RemoteResponder(Options options);
  std::string explain(const CodeUnit& unit, const std::string& prompt) const override;

 private:
  Options options_;
  std::string scheme_host_port_;
  std::string path_;
};

// Per file, min(5, n) Function/Method units drawn without replacement.
// Files keep their document order; units within a file keep draw order.
inline constexpr std::size_t kMaxUnitsPerFile = 5;
std::vector<CodeUnit> sample_units(const std::vector<CodeUnit>& units, std::uint64_t seed);

struct SynthOptions {
  std::uint64_t target_tokens = 32768;
  std::uint64_t seed = 0;
  TokenCounter counter = TokenCounter::word_punct();
  const InstructionTemplates* templates = &InstructionTemplates::defaults();
  std::string eos_marker = "<|endoftext|>";
};

std::string unit_text(const CodeUnit& unit, const PackedDocument& doc);

TurnPair make_retrieval_turn(const CodeUnit& unit, const PackedDocument& doc,
                             std::string_view instruction);
// `code` is the unit's source, forwarded to the responder alongside the
// instruction; the user turn itself carries only the instruction.
TurnPair make_explanation_turn(const CodeUnit& unit, std::string_view code, const Responder& responder,
                               std::string_view instruction);
TurnPair make_implementation_turn(const CodeUnit& unit, const PackedDocument& doc,
                                  std::string_view instruction);

// Document text with the unit's span replaced by a placeholder comment.
struct ExcludedContext {
  std::string text;
  std::size_t placeholder_offset = 0;
  std::size_t placeholder_length = 0;
};
ExcludedContext exclude_unit(const CodeUnit& unit, const PackedDocument& doc);

// Throws SynthError when target_tokens == 0 or the document has no units.
InstructionSample assemble_sample(const PackedDocument& doc, const Responder& responder,
                                  const SynthOptions& options);

// Rendered record: {"source_repo_id", "target_tokens", "actual_tokens",
// "turns": [{"role", "text", "train_on"}]}, assistant texts suffixed with eos.
nlohmann::ordered_json render_training_record(const InstructionSample& sample,
                                              std::string_view eos_marker = "<|endoftext|>");
InstructionSample parse_training_record(const nlohmann::json& record,
                                        std::string_view eos_marker = "<|endoftext|>");

}  // namespace repoctx
