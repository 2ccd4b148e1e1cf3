#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "repoctx/bench.hpp"
#include "repoctx/errors.hpp"

using namespace repoctx;
using namespace repoctx::bench;

TEST_CASE("expression evaluation") {
  CHECK(evaluate_expression("2 + 3 * 4") == 14);
  CHECK(evaluate_expression("7") == 7);
  CHECK(evaluate_expression("(2 + 3) * 4") == 20);
  CHECK(evaluate_expression("10 - 4 - 3") == 3);
  CHECK(evaluate_expression("10 - (4 - 3)") == 9);
  CHECK(evaluate_expression("-3 * 2") == -6);
  CHECK_THROWS_AS(evaluate_expression("2 +"), BenchError);
  CHECK_THROWS_AS(evaluate_expression("(1"), BenchError);
}

TEST_CASE("generated keys match the independent evaluator") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto key = gen_key_function(seed);
    CHECK(key.expected_output == oracle::to_decimal(oracle::evaluate(key.expression)));
    CHECK(key.source == "def key():\n    return " + key.expression + "\n");
  }
  CHECK(gen_key_function(9).source == gen_key_function(9).source);
}

TEST_CASE("random expressions are not over-parenthesized") {
  // Parentheses are only needed around a sum or difference.
  Rng rng(2);
  for (int i = 0; i < 300; ++i) {
    auto e = random_expression(rng);
    for (std::size_t open = e.find('('); open != std::string::npos; open = e.find('(', open + 1)) {
      int depth = 0;
      bool additive = false;
      for (std::size_t j = open + 1; j < e.size(); ++j) {
        if (e[j] == '(') ++depth;
        if (e[j] == ')' && depth-- == 0) break;
        if (depth == 0 && j + 1 < e.size() && (e[j] == '+' || e[j] == '-') && e[j + 1] == ' ') additive = true;
      }
      CHECK_MESSAGE(additive, e);
    }
  }
}

TEST_CASE("key retrieval task layout") {
  auto pool = synthetic_filler_pool(200, 1);
  auto counter = TokenCounter::word_punct();
  auto key = gen_key_function(3);
  const auto fp = key_footprint(key, counter);

  auto t0 = build_key_retrieval_task(pool, key, 1024, 0, 7, counter);
  CHECK(t0.prompt.starts_with(key.source));
  CHECK(t0.measured_offset_tokens == 0);
  CHECK(t0.prompt.ends_with(std::string(key_query())));

  auto t = build_key_retrieval_task(pool, key, 2048, 1024, 7, counter);
  CHECK(t.measured_offset_tokens >= 1016);
  CHECK(t.measured_offset_tokens <= 1032);
  CHECK(counter.count(t.prompt) == t.measured_sequence_tokens);
  CHECK(t.measured_sequence_tokens + kLengthTolerance >= 2048);
  CHECK(t.measured_sequence_tokens <= 2048 + kLengthTolerance);
  CHECK(oracle::perfect_retriever(t.prompt) == key.expected_output);

  CHECK_THROWS_AS(build_key_retrieval_task(pool, key, fp - 1, 0, 7, counter), BenchError);
  CHECK_THROWS_AS(build_key_retrieval_task(pool, key, 1024, 1024, 7, counter), BenchError);
  std::vector<std::string> tiny{"def a():\n    return 1\n"};
  CHECK_THROWS_AS(build_key_retrieval_task(tiny, key, 4096, 2048, 7, counter), BenchError);
}

TEST_CASE("grid enumeration") {
  auto pool = synthetic_filler_pool(200, 1);
  auto counter = TokenCounter::word_punct();
  auto tasks = grid_tasks(pool, 1024, 512, 11, counter);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
  for (const auto& t : tasks) cells.emplace_back(t.sequence_tokens, t.key_offset_tokens);
  CHECK(cells == std::vector<std::pair<std::uint64_t, std::uint64_t>>{{512, 0}, {1024, 0}, {1024, 512}});

  auto single = grid_tasks(pool, 512, 512, 11, counter);
  CHECK(single.size() == 1);

  const auto fp = key_footprint(gen_key_function(11), counter);
  auto big = grid_tasks(pool, 4096, 512, 11, counter);
  std::size_t expected = 0;
  for (std::uint64_t L = 512; L <= 4096; L += 512) expected += (L - fp) / 512 + 1;
  CHECK(big.size() == expected);
  CHECK(grid_tasks(pool, 4096, 512, 11, counter, 3).size() == expected);
  for (std::size_t i = 0; i < big.size(); ++i)
    CHECK(big[i].prompt == grid_tasks(pool, 4096, 512, 11, counter, 3)[i].prompt);
  CHECK_THROWS_AS(grid_tasks(pool, 256, 512, 1, counter), BenchError);
}

TEST_CASE("task JSON round-trip") {
  auto pool = synthetic_filler_pool(100, 4);
  auto t = build_key_retrieval_task(pool, 1024, 256, 3, TokenCounter::word_punct());
  auto back = KeyRetrievalTask::from_json(nlohmann::json::parse(t.to_json().dump()));
  CHECK(back.prompt == t.prompt);
  CHECK(back.expected_output == t.expected_output);
  CHECK(back.key_offset_tokens == t.key_offset_tokens);
  auto j = t.to_json();
  for (const char* k : {"prompt", "sequence_tokens", "key_offset_tokens", "expected_output"}) CHECK(j.contains(k));
}

TEST_CASE("scoring takes the first integer") {
  CHECK(score_key_retrieval("14", "14"));
  CHECK(score_key_retrieval(">>> print(key())\n14\n", "14"));
  CHECK(score_key_retrieval("The answer is -3.", "-3"));
  CHECK_FALSE(score_key_retrieval("140", "14"));
  CHECK_FALSE(score_key_retrieval("3 then 14", "14"));
  CHECK_FALSE(score_key_retrieval("no digits", "0"));
}

TEST_CASE("grid CSV") {
  std::vector<KeyRetrievalTask> tasks(3);
  tasks[0].sequence_tokens = 512;
  tasks[1].sequence_tokens = 1024;
  tasks[2].sequence_tokens = 1024;
  tasks[2].key_offset_tokens = 512;
  auto csv = grid_csv(tasks, {true, false, true});
  CHECK(csv == "offset_percent,512,1024\n0,1,0\n50,,1\n");
}

TEST_CASE("similarity is the token LCS ratio") {
  auto c = TokenCounter::word_punct();
  CHECK(similarity("a b", "a b c d", c) == doctest::Approx(2.0 / 3.0));
  CHECK(similarity("", "", c) == 1.0);
  CHECK(similarity("x", "", c) == 0.0);
  CHECK(similarity("f(x)", "f(x)", c) == 1.0);
  Rng rng(6);
  const std::string alphabet = "abc ()+";
  for (int i = 0; i < 200; ++i) {
    std::string a, b;
    for (auto n = rng.below(25); n > 0; --n) a += alphabet[rng.below(alphabet.size())];
    for (auto n = rng.below(25); n > 0; --n) b += alphabet[rng.below(alphabet.size())];
    CHECK(similarity(a, b, c) == doctest::Approx(oracle::lcs_similarity(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("threshold curve") {
  std::vector<double> sims{0.55, 0.95};
  auto curve = accuracy_at_thresholds(sims);
  CHECK(curve.thresholds[0] == 0.0);
  CHECK(curve.thresholds[10] == 1.0);
  for (int k = 0; k <= 5; ++k) CHECK(*curve.accuracy[k] == 1.0);
  for (int k = 6; k <= 9; ++k) CHECK(*curve.accuracy[k] == 0.5);
  CHECK(*curve.accuracy[10] == 0.0);
  auto empty = accuracy_at_thresholds({});
  CHECK_FALSE(empty.accuracy[0]);
  CHECK(empty.to_json()["accuracy"][0].is_null());
  std::vector<double> exact{0.7};
  CHECK(*accuracy_at_thresholds(exact).accuracy[7] == 1.0);
}

TEST_CASE("bucket rebalancing") {
  BucketSpec spec;
  CHECK(spec.bucket_of(0) == 0);
  CHECK(spec.bucket_of(2047) == 0);
  CHECK(spec.bucket_of(2048) == 1);
  CHECK(spec.bucket_of(8192) == 3);

  std::vector<BucketSample> samples;
  for (int i = 0; i < 150; ++i) samples.push_back({"a" + std::to_string(i), 100});
  for (int i = 0; i < 40; ++i) samples.push_back({"b" + std::to_string(i), 3000});
  for (int i = 0; i < 100; ++i) samples.push_back({"c" + std::to_string(i), 9000});
  auto kept = rebalance_buckets(samples, spec);
  std::map<char, int> per;
  for (const auto& id : kept) per[id[0]]++;
  CHECK(per['a'] == 100);
  CHECK(per['b'] == 40);
  CHECK(per['c'] == 100);
  CHECK(kept.size() == 240);
  CHECK(rebalance_buckets(samples, spec) == kept);

  spec.boundaries = {10, 5};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
