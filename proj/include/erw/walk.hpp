#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "erw/model.hpp"
#include "erw/rng.hpp"

namespace erw {

enum class SimMode { Literal, Collapsed };
std::string_view to_string(SimMode mode);

/// Exact P[X_{n+1} = +1 | n, plus_count].
double step_probability(const ModelConfig& model, std::int64_t n, std::int64_t plus_count);

/// Exact Binomial(k, y) draw: inversion from the mode for k <= 1000,
/// Bernoulli sum above.
std::int64_t sample_binomial(Rng& rng, std::int64_t k, double y);

/// Number of marked items among k drawn sequentially without replacement
/// from a population of n holding `marked` marked items.
std::int64_t sample_hypergeometric(Rng& rng, std::int64_t n, std::int64_t marked, std::int64_t k);

struct Checkpoint {
  std::int64_t n = 0;
  std::int64_t s_n = 0;
};

struct Trajectory {
  std::uint64_t replicate_id = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t substream_seed = 0;
  std::int64_t terminal_n = 0;
  std::int64_t terminal_s = 0;
  std::vector<Checkpoint> records;
};

/// Identifies the RNG substream a trajectory runs on.
struct Substream {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_id = 1;
};

/// Runs one walk up to `horizon`, recording S_n at each requested checkpoint
/// (values outside [1, horizon] are rejected). Literal mode keeps the full
/// history and draws explicit indices; Collapsed mode draws the sampled
/// plus-count straight from its conditional law.
Trajectory simulate(const ModelConfig& model, std::int64_t horizon, Substream stream, SimMode mode,
                    std::span<const std::int64_t> checkpoints);

/// {1, 2, 4, ...} up to horizon, plus horizon itself.
std::vector<std::int64_t> dyadic_checkpoints(std::int64_t horizon);

}  // namespace erw
