#include "batchlearn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "batchlearn/errors.hpp"
#include "batchlearn/parallel.hpp"

namespace batchlearn {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBatch:
      return "batch";
    case Algorithm::kMemoryless:
      return "memoryless";
    case Algorithm::kFullMemory:
      return "full-memory";
  }
  return "?";
}

std::string_view to_string(Mode m) { return m == Mode::kQuenched ? "quenched" : "annealed"; }

Algorithm parse_algorithm(std::string_view s) {
  if (s == "batch") return Algorithm::kBatch;
  if (s == "memoryless") return Algorithm::kMemoryless;
  if (s == "full-memory" || s == "full_memory") return Algorithm::kFullMemory;
  throw DomainError("unknown algorithm '" + std::string(s) + "' (batch, memoryless, full-memory)");
}

Mode parse_mode(std::string_view s) {
  if (s == "quenched") return Mode::kQuenched;
  if (s == "annealed") return Mode::kAnnealed;
  throw DomainError("unknown mode '" + std::string(s) + "' (quenched, annealed)");
}

namespace {

WordCount saturating_add(WordCount a, WordCount b) { return std::min(kWordCountCap, a + b); }

}  // namespace

WordCount geometric_elimination(double log_p, Engine& eng) {
  const double u = uniform_open_zero(eng);
  if (log_p == -std::numeric_limits<double>::infinity()) return 1;
  const double k = std::ceil(std::log(u) / log_p);
  if (!(k < static_cast<double>(kWordCountCap))) return kWordCountCap;
  return std::max<WordCount>(1, static_cast<WordCount>(k));
}

WordCount simulate_batch(const OverlapVector<double>& p, Engine& eng) {
  WordCount last = 0;
  for (double log_p : p.log_overlaps()) last = std::max(last, geometric_elimination(log_p, eng));
  return last;
}

WordCount simulate_memoryless(const OverlapVector<double>& p, Engine& eng) {
  const std::uint64_t pool = p.size() + 1;
  WordCount words = 0;
  for (;;) {
    const std::uint64_t pick = uniform_below(eng, pool);
    if (pick == 0) return words;  // the target is never contradicted
    words = saturating_add(words, geometric_elimination(p.log_overlaps()[static_cast<Eigen::Index>(pick - 1)], eng));
  }
}

WordCount simulate_full_memory(const OverlapVector<double>& p, Engine& eng) {
  const std::size_t n = p.size();
  // The target's position in a uniform visiting order is uniform on
  // {0, ..., n}; the wrong concepts tried before it are a uniform ordered
  // sample without replacement (partial Fisher-Yates).
  const std::uint64_t before_target = uniform_below(eng, n + 1);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  WordCount words = 0;
  for (std::size_t t = 0; t < before_target; ++t) {
    const std::size_t j = t + uniform_below(eng, n - t);
    std::swap(order[t], order[j]);
    words = saturating_add(words, geometric_elimination(p.log_overlaps()[order[t]], eng));
  }
  return words;
}

WordCount simulate(Algorithm algorithm, const OverlapVector<double>& p, Engine& eng) {
  switch (algorithm) {
    case Algorithm::kBatch:
      return simulate_batch(p, eng);
    case Algorithm::kMemoryless:
      return simulate_memoryless(p, eng);
    case Algorithm::kFullMemory:
      return simulate_full_memory(p, eng);
  }
  throw std::logic_error("unreachable");
}

WordCount simulate_annealed(Algorithm algorithm, const OverlapDistribution<double>& dist, std::size_t n,
                            Engine& eng) {
  auto draw_log_overlap = [&] { return std::log1p(-dist.complement_from_uniform(uniform_open_zero(eng))); };
  switch (algorithm) {
    case Algorithm::kBatch: {
      WordCount last = 0;
      for (std::size_t i = 0; i < n; ++i) last = std::max(last, geometric_elimination(draw_log_overlap(), eng));
      return last;
    }
    case Algorithm::kMemoryless: {
      // Overlaps are drawn on first visit and kept for revisits.
      std::vector<double> log_p(n, 1.0);
      WordCount words = 0;
      for (;;) {
        const std::uint64_t pick = uniform_below(eng, n + 1);
        if (pick == 0) return words;
        double& lp = log_p[pick - 1];
        if (lp > 0.0) lp = draw_log_overlap();
        words = saturating_add(words, geometric_elimination(lp, eng));
      }
    }
    case Algorithm::kFullMemory: {
      // Every concept is visited at most once, so each visit sees a fresh overlap.
      const std::uint64_t before_target = uniform_below(eng, n + 1);
      WordCount words = 0;
      for (std::uint64_t t = 0; t < before_target; ++t) {
        words = saturating_add(words, geometric_elimination(draw_log_overlap(), eng));
      }
      return words;
    }
  }
  throw std::logic_error("unreachable");
}

WordCount simulate_batch(const OverlapVector<double>& p, Seed seed) {
  Engine eng = make_engine(seed);
  return simulate_batch(p, eng);
}

WordCount simulate_memoryless(const OverlapVector<double>& p, Seed seed) {
  Engine eng = make_engine(seed);
  return simulate_memoryless(p, eng);
}

WordCount simulate_full_memory(const OverlapVector<double>& p, Seed seed) {
  Engine eng = make_engine(seed);
  return simulate_full_memory(p, eng);
}

TimeSampleSet run_ensemble(Algorithm algorithm, Mode mode, const OverlapDistribution<double>& dist, std::size_t n,
                           std::size_t runs, Seed seed, const std::optional<OverlapVector<double>>& fixed_p,
                           unsigned workers) {
  if (runs == 0) throw DomainError("run_ensemble: runs must be >= 1");
  TimeSampleSet out{algorithm, mode, n, seed, dist, std::nullopt, std::vector<WordCount>(runs)};
  if (mode == Mode::kQuenched) {
    if (fixed_p) {
      out.fixed_p = *fixed_p;
    } else {
      out.fixed_p = sample_overlaps(dist, n, derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kQuenchedVector)}));
    }
    out.n = out.fixed_p->size();
  }

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (runs + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(runs, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) {
      Engine eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kRun), r}));
      if (mode == Mode::kQuenched) {
        out.samples[r] = simulate(algorithm, *out.fixed_p, eng);
      } else {
        out.samples[r] = simulate_annealed(algorithm, dist, n, eng);
      }
    }
  });
  return out;
}

WordCount empirical_n_delta(std::span<const WordCount> samples, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("empirical_n_delta: delta must lie in (0, 1)");
  if (samples.empty()) throw DomainError("empirical_n_delta: no samples");
  std::vector<WordCount> sorted(samples.begin(), samples.end());
  const double size = static_cast<double>(sorted.size());
  // Nearest rank ceil((1 - delta) N); the slack absorbs rounding of (1 - delta) N.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * size - 1e-9 * size));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

WordCount empirical_n_delta(const TimeSampleSet& samples, double delta) {
  return empirical_n_delta(std::span<const WordCount>(samples.samples), delta);
}

}  // namespace batchlearn
