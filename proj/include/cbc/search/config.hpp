#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace cbc {

struct SearchConfig {
  int population = 50;
  std::int64_t max_evaluations = 10000;
  double max_seconds = 0;  // wall-clock cap; 0 disables
  double crossover_rate = 0.75;
  std::optional<double> mutation_rate;  // unset: 1 / |statements|
  int repair_threshold = 50;
  double covering_bias = 0.8;
  double insert_probability = 1.0 / 3.0;
  std::uint64_t seed = 1;
  int min_length = 2;
  int max_initial_length = 10;
  int max_length = 40;
  int max_object_depth = 3;  // nesting of constructor arguments
};

/// Empty when the config is usable, otherwise what is wrong with it.
std::optional<std::string> validate_config(const SearchConfig& c);

/// Seeded generator with the few draws the search needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(between(0, static_cast<std::int64_t>(n) - 1)); }
  double unit();
  bool chance(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cbc
