#include "repoctx/rope.hpp"

#include <cmath>
#include <string>

#include "repoctx/errors.hpp"

namespace repoctx::rope {

void RopeParams::validate() const {
  if (head_dim == 0 || head_dim % 2 != 0)
    throw RopeError("head_dim must be a positive even integer, got " + std::to_string(head_dim));
  if (!(base > 1.0)) throw RopeError("RoPE base must be > 1");
}

std::vector<double> inverse_frequencies(const RopeParams& params) {
  params.validate();
  const std::size_t half = params.head_dim / 2;
  std::vector<double> f(half);
  const double d = static_cast<double>(params.head_dim);
  for (std::size_t i = 0; i < half; ++i) f[i] = std::pow(params.base, -2.0 * static_cast<double>(i) / d);
  return f;
}

std::vector<double> apply_rotary(std::span<const double> v, std::uint64_t position,
                                 const RopeParams& params) {
  params.validate();
  if (v.size() != params.head_dim)
    throw RopeError("vector length " + std::to_string(v.size()) + " does not match head_dim " +
                    std::to_string(params.head_dim));
  const auto freqs = inverse_frequencies(params);
  std::vector<double> out(v.size());
  const double pos = static_cast<double>(position);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double angle = pos * freqs[i];
    const double c = std::cos(angle), s = std::sin(angle);
    const double x = v[2 * i], y = v[2 * i + 1];
    out[2 * i] = x * c - y * s;
    out[2 * i + 1] = x * s + y * c;
  }
  return out;
}

double relative_score(std::span<const double> q, std::span<const double> k, std::uint64_t m,
                      std::uint64_t n, const RopeParams& params) {
  const auto qr = apply_rotary(q, m, params);
  const auto kr = apply_rotary(k, n, params);
  double dot = 0.0;
  for (std::size_t i = 0; i < qr.size(); ++i) dot += qr[i] * kr[i];
  return dot;
}

double theta_for_context(std::uint64_t context_len) {
  for (std::size_t i = 0; i < kStageContexts.size(); ++i) {
    if (kStageContexts[i] == context_len) return kStageBases[i];
  }
  std::string supported;
  for (auto c : kStageContexts) {
    if (!supported.empty()) supported += ", ";
    supported += std::to_string(c);
  }
  throw RopeError("no RoPE base for context length " + std::to_string(context_len) +
                  " (supported: " + supported + ")");
}

double slowest_pair_sweep(std::uint64_t context_len, double base, std::size_t head_dim) {
  const double d = static_cast<double>(head_dim);
  return static_cast<double>(context_len) * std::pow(base, -(d - 2.0) / d);
}

RopePlan progressive_plan(std::uint64_t start_ctx, std::uint64_t target_ctx,
                          std::uint64_t steps_per_stage, std::uint64_t batch_size) {
  if (start_ctx >= target_ctx)
    throw PlanError("start context " + std::to_string(start_ctx) + " must be below target " +
                    std::to_string(target_ctx));
  if (steps_per_stage == 0 || batch_size == 0) throw PlanError("steps and batch size must be positive");
  std::size_t first = 0;
  while (first < kStageContexts.size() && kStageContexts[first] <= start_ctx) ++first;
  std::size_t last = kStageContexts.size();
  for (std::size_t i = 0; i < kStageContexts.size(); ++i) {
    if (kStageContexts[i] == target_ctx) last = i;
  }
  if (last == kStageContexts.size() || first > last)
    throw PlanError("target context " + std::to_string(target_ctx) +
                    " is not reachable by doubling along the stage grid from " + std::to_string(start_ctx));
  RopePlan plan;
  for (std::size_t i = first; i <= last; ++i)
    plan.stages.push_back({kStageContexts[i], kStageBases[i], steps_per_stage, batch_size, std::nullopt});
  return plan;
}

nlohmann::ordered_json RopePlan::to_json() const {
  nlohmann::ordered_json j;
  auto& arr = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    nlohmann::ordered_json st;
    st["context_len"] = s.context_len;
    st["rope_base"] = s.base;
    st["steps"] = s.steps;
    st["batch_size"] = s.batch_size;
    st["learning_rate"] = s.learning_rate ? nlohmann::ordered_json(*s.learning_rate) : nullptr;
    arr.push_back(std::move(st));
  }
  return j;
}

}  // namespace repoctx::rope
