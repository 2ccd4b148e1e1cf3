#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace repoctx::rope {

struct RopeParams {
  std::size_t head_dim = 128;
  double base = 10000.0;

  void validate() const;  // throws RopeError
};

// f_i = base^(-2i/head_dim), i = 0 .. head_dim/2 - 1.
std::vector<double> inverse_frequencies(const RopeParams& params);

// Rotates each pair (v[2i], v[2i+1]) by position * f_i.
std::vector<double> apply_rotary(std::span<const double> v, std::uint64_t position,
                                 const RopeParams& params);

// <apply_rotary(q, m), apply_rotary(k, n)>
double relative_score(std::span<const double> q, std::span<const double> k, std::uint64_t m,
                      std::uint64_t n, const RopeParams& params);

// Context windows with a tuned base, in doubling order.
inline constexpr std::array<std::uint64_t, 5> kStageContexts{8192, 16384, 32768, 65536, 131072};
inline constexpr std::array<double, 5> kStageBases{100'000.0, 250'000.0, 500'000.0, 2'000'000.0,
                                                   10'000'000.0};

// Throws RopeError listing the supported lengths for anything off the table.
double theta_for_context(std::uint64_t context_len);

// Angle swept by the slowest rotating pair across a full window:
// context_len * base^(-(head_dim-2)/head_dim).
double slowest_pair_sweep(std::uint64_t context_len, double base, std::size_t head_dim);

struct Stage {
  std::uint64_t context_len = 0;
  double base = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t batch_size = 0;
  std::optional<double> learning_rate;  // never invented; left for the caller
};

struct RopePlan {
  std::vector<Stage> stages;
  nlohmann::ordered_json to_json() const;
};

// One stage per doubling from the first table context above start_ctx up to
// target_ctx. Throws PlanError if start >= target or target is off the table.
RopePlan progressive_plan(std::uint64_t start_ctx, std::uint64_t target_ctx,
                          std::uint64_t steps_per_stage = 500, std::uint64_t batch_size = 32);

}  // namespace repoctx::rope
