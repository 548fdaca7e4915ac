#pragma once

// Parameter sweeps and theorem-level verification reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "batchlearn/overlap.hpp"
#include "batchlearn/random.hpp"
#include "batchlearn/simulate.hpp"
#include "batchlearn/stats.hpp"

namespace batchlearn {

using NGrid = std::vector<std::uint64_t>;

// 2^lo, 2^(lo+1), ..., 2^hi.
NGrid powers_of_two(unsigned lo, unsigned hi);

struct SweepSpec {
  Algorithm algorithm = Algorithm::kBatch;
  Mode mode = Mode::kAnnealed;
  double beta = 0.0;
  double support_max = 1.0;
  NGrid n_grid = powers_of_two(6, 13);
  std::size_t runs_per_n = 1000;
  double delta = 0.1;
  Seed seed = 1;
  Statistic statistic = Statistic::median();

  // Grid strictly increasing with >= 4 points, runs >= 100, and no sample
  // mean where the expectation does not exist (annealed, beta <= 0).
  void validate() const;
};

struct SweepRow {
  std::uint64_t n;
  std::string statistic;
  double value;
  double ci_lo;
  double ci_hi;
};

struct Check {
  std::string name;
  double measured;
  std::string threshold;  // human-readable band, e.g. "[0.92, 1.08]" or "< 1"
  bool pass;
};

struct SweepReport {
  std::string name;
  std::string command;  // reproduces the report byte for byte
  std::vector<SweepRow> rows;
  std::optional<PowerFit> fit;
  std::vector<Check> checks;

  bool passed() const;
  // n,statistic,value,ci_lo,ci_hi
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

Check check_within(std::string name, double measured, double lo, double hi);
Check check_below(std::string name, double measured, double bound);

nlohmann::json to_json(const OverlapDistribution<double>& dist);
OverlapDistribution<double> distribution_from_json(const nlohmann::json& j);

SweepReport run_sweep(const SweepSpec& spec, unsigned workers = 1);

// n^(1/(1+beta)) min_i q_i for `runs` independent vectors of size n.
std::vector<double> sample_scaled_minima(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs,
                                         Seed seed, unsigned workers = 1);

// int_0^inf exp(-x^(1+beta)) dx by quadrature.
double min_overlap_limit(double beta);

SweepReport min_overlap_sweep(const OverlapDistribution<double>& dist, const NGrid& n_grid, std::size_t runs,
                              Seed seed, unsigned workers = 1);

// KS distance between the law of n^(1/(1+beta)) min q and 1 - exp(-x^(1+beta)).
double weibull_limit_check(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs, Seed seed,
                           unsigned workers = 1);
SweepReport weibull_report(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs, Seed seed,
                           unsigned workers = 1);

SweepReport stable_sum_sweep(const OverlapDistribution<double>& dist, const NGrid& n_grid, std::size_t runs,
                             Seed seed, unsigned workers = 1);

// Median over `vectors` sampled overlap vectors of the exact batch N_Delta.
SweepReport verify_batchthm(double beta, double delta, const NGrid& n_grid, std::size_t vectors, Seed seed,
                            unsigned workers = 1);

// Annealed empirical N_Delta of the memoryless or full-memory learner.
SweepReport verify_mainprev(Algorithm algorithm, double beta, double delta, const NGrid& n_grid, std::size_t runs,
                            Seed seed, unsigned workers = 1);

SweepReport compare_algorithms(double beta, double delta, const NGrid& n_grid, std::size_t runs, Seed seed,
                               unsigned workers = 1);

// Annealed expected time over n^(1/(1+beta)) against the t1 constant, plus
// agreement of the two annealed evaluations for n <= 40.
SweepReport verify_t1(double beta, const NGrid& n_grid, double tol);

// -T2(n) / (n ln n) and (-T2(n) - n ln n) / n for the uniform family.
SweepReport verify_alpha1(const NGrid& n_grid, double tol);

}  // namespace batchlearn
