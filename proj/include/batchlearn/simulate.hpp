#pragma once

// Monte Carlo simulation of the batch, memoryless and full-memory learners.
//
// Randomness is counter based: run r of an ensemble draws from an engine
// seeded by derive_seed(seed, {kRun, r}), so samples do not depend on the
// number of workers or on scheduling.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "batchlearn/overlap.hpp"
#include "batchlearn/random.hpp"

namespace batchlearn {

enum class Algorithm { kBatch, kMemoryless, kFullMemory };
enum class Mode { kQuenched, kAnnealed };

std::string_view to_string(Algorithm a);
std::string_view to_string(Mode m);
Algorithm parse_algorithm(std::string_view s);
Mode parse_mode(std::string_view s);

using WordCount = std::uint64_t;

// Word counts saturate here instead of wrapping.
inline constexpr WordCount kWordCountCap = WordCount{1} << 62;

// The memoryless and full-memory learners draw their hypothesis from all
// n + 1 concepts, the target included.
inline constexpr bool kHypothesisPoolIncludesTarget = true;

// Words until concept i is contradicted: geometric on {1, 2, ...} with
// P(G = k) = p^(k-1) (1 - p), by inversion ceil(log u / log p).
WordCount geometric_elimination(double log_p, Engine& eng);

WordCount simulate_batch(const OverlapVector<double>& p, Engine& eng);
WordCount simulate_memoryless(const OverlapVector<double>& p, Engine& eng);
WordCount simulate_full_memory(const OverlapVector<double>& p, Engine& eng);

WordCount simulate_batch(const OverlapVector<double>& p, Seed seed);
WordCount simulate_memoryless(const OverlapVector<double>& p, Seed seed);
WordCount simulate_full_memory(const OverlapVector<double>& p, Seed seed);

WordCount simulate(Algorithm algorithm, const OverlapVector<double>& p, Engine& eng);

// One run on a fresh vector of n overlaps from `dist`. Overlaps are drawn
// only for the concepts the learner actually visits; the stream consumed per
// visited concept does not depend on n.
WordCount simulate_annealed(Algorithm algorithm, const OverlapDistribution<double>& dist, std::size_t n,
                            Engine& eng);

struct TimeSampleSet {
  Algorithm algorithm;
  Mode mode;
  std::size_t n;
  Seed seed;
  OverlapDistribution<double> dist;
  std::optional<OverlapVector<double>> fixed_p;  // set in quenched mode
  std::vector<WordCount> samples;                // indexed by run
};

// Annealed mode draws a fresh overlap vector for every run from the run's
// own stream, so ensembles at different n with the same seed share their
// random numbers. Quenched mode reuses `fixed_p`, or one vector sampled from
// `dist` on a dedicated stream of `seed`.
TimeSampleSet run_ensemble(Algorithm algorithm, Mode mode, const OverlapDistribution<double>& dist, std::size_t n,
                           std::size_t runs, Seed seed, const std::optional<OverlapVector<double>>& fixed_p = {},
                           unsigned workers = 1);

// Lower nearest-rank (1 - delta)-quantile of the word counts.
WordCount empirical_n_delta(std::span<const WordCount> samples, double delta);
WordCount empirical_n_delta(const TimeSampleSet& samples, double delta);

}  // namespace batchlearn
