// batchlab: command-line front end for the batch-learning laboratory.
//
//   batchlab sample   --beta 1 --n 8 --seed 3
//   batchlab exact    --p "[0.5, 0.3333]" --delta 0.1 --trace trace.csv
//   batchlab zeta     --mode zeta --beta 0 --s 2
//   batchlab simulate --alg memoryless --mode annealed --beta 1 --n 256 --runs 2000
//   batchlab sweep    --alg batch --beta 1 --n-grid 64,128,256,512 --runs 1000 --format csv
//   batchlab verify   --suite batchthm --beta 0
//   batchlab compare  --beta 1
//
// Any flag may also come from --config FILE (TOML, or JSON when the name ends
// in .json); flags given on the command line win. `verify` exits 0 on pass
// and 2 on fail.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "batchlearn/errors.hpp"
#include "batchlearn/exact.hpp"
#include "batchlearn/lab.hpp"
#include "batchlearn/simulate.hpp"
#include "batchlearn/zeta.hpp"

using namespace batchlearn;
using nlohmann::json;

namespace {

constexpr int kExitFail = 2;

// Reads nested JSON objects as CLI11 config sections.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConfigError("writing JSON config is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_text(v));
      } else {
        item.inputs.push_back(scalar_text(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct Common {
  double beta = 0.0;
  double support_max = 1.0;
  std::uint64_t n = 0;
  std::size_t runs = 0;
  Seed seed = 1;
  double delta = 0.1;
  double tol = 1e-10;
  std::string out;
  std::string format = "json";
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--beta", c.beta, "Overlap exponent beta > -1")->capture_default_str();
  cmd->add_option("--support-max", c.support_max, "Support bound a of q = 1 - p, in (0, 1]")->capture_default_str();
  cmd->add_option("--n", c.n, "Number of wrong concepts");
  cmd->add_option("--runs", c.runs, "Monte Carlo runs (or overlap vectors)");
  cmd->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  cmd->add_option("--delta", c.delta, "Failure probability Delta in (0, 1)")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Absolute tolerance for series")->capture_default_str();
  cmd->add_option("--out", c.out, "Write output to PATH instead of stdout");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads (results do not depend on it)")->capture_default_str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

OverlapVector<double> parse_overlap_array(const std::string& text) {
  const auto j = json::parse(text);
  if (!j.is_array()) throw DomainError("--p must be a JSON array of overlaps");
  const auto values = j.get<std::vector<double>>();
  return OverlapVector<double>::from_overlaps(std::span<const double>(values));
}

std::size_t runs_or(const Common& c, std::size_t fallback) { return c.runs == 0 ? fallback : c.runs; }

std::string report_text(const SweepReport& report, const Common& c) {
  return c.format == "csv" ? report.to_csv() : dump(report.to_json());
}

int finish_report(const SweepReport& report, const Common& c) {
  emit(report_text(report, c), c.out);
  for (const auto& check : report.checks) {
    std::cerr << (check.pass ? "PASS " : "FAIL ") << check.name << ": " << check.measured << " vs " << check.threshold
              << "\n";
  }
  return report.passed() ? EXIT_SUCCESS : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch, memoryless and full-memory concept learning laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or JSON file supplying any flag");
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string arg = argv[i];
    const std::string next = argv[i + 1];
    if (arg == "--config" && next.size() > 5 && next.ends_with(".json")) {
      app.config_formatter(std::make_shared<JsonConfig>());
    }
  }

  // sample
  Common sample_opts;
  auto* sample = app.add_subcommand("sample", "Draw one overlap vector");
  add_common(sample, sample_opts);

  // exact
  Common exact_opts;
  std::string exact_p;
  std::string exact_trace;
  std::uint64_t exact_max_terms = kDefaultMaxTerms;
  auto* exact = app.add_subcommand("exact", "Exact batch-learning time for one overlap vector");
  add_common(exact, exact_opts);
  exact->add_option("--p", exact_p, "Overlap vector as a JSON array");
  exact->add_option("--trace", exact_trace, "Write k,l_k,lower_k,upper_k rows to PATH ('-' for stdout)");
  exact->add_option("--max-terms", exact_max_terms, "Series term cap")->capture_default_str();

  // zeta
  Common zeta_opts;
  std::string zeta_mode = "zeta";
  double zeta_s = 2.0;
  std::vector<std::uint64_t> zeta_ns;
  auto* zeta_cmd = app.add_subcommand("zeta", "Moment zeta function and annealed times");
  add_common(zeta_cmd, zeta_opts);
  zeta_cmd->add_option("--mode", zeta_mode, "What to evaluate")
      ->check(CLI::IsMember({"zeta", "annealed", "t2", "t1-constant"}))
      ->capture_default_str();
  zeta_cmd->add_option("--s", zeta_s, "Argument s of the moment zeta function")->capture_default_str();
  zeta_cmd->add_option("--n-grid", zeta_ns, "Several n for annealed curves")->delimiter(',');

  // simulate
  Common sim_opts;
  std::string sim_alg = "batch";
  std::string sim_mode = "annealed";
  std::string sim_p;
  std::string sim_samples;
  bool sim_delta_given = false;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one learner");
  add_common(simulate_cmd, sim_opts);
  simulate_cmd->add_option("--alg", sim_alg, "batch, memoryless or full-memory")->capture_default_str();
  simulate_cmd->add_option("--mode", sim_mode, "quenched or annealed")->capture_default_str();
  simulate_cmd->add_option("--p", sim_p, "Fixed overlap vector (quenched) as a JSON array");
  simulate_cmd->add_option("--samples", sim_samples, "Also write run,words CSV to PATH");

  // sweep
  Common sweep_opts;
  SweepSpec spec;
  std::string sweep_alg = "batch";
  std::string sweep_mode = "annealed";
  std::string sweep_stat = "median";
  std::vector<std::uint64_t> sweep_grid;
  auto* sweep = app.add_subcommand("sweep", "Statistic of the learning time over a grid of n");
  add_common(sweep, sweep_opts);
  sweep->add_option("--alg", sweep_alg)->capture_default_str();
  sweep->add_option("--mode", sweep_mode)->capture_default_str();
  sweep->add_option("--statistic", sweep_stat, "mean, median, quantile(q) or trimmed_mean(f)")->capture_default_str();
  sweep->add_option("--n-grid", sweep_grid, "Comma-separated n values")->delimiter(',');

  // verify
  Common verify_opts;
  std::string suite;
  std::string verify_alg = "memoryless";
  std::vector<std::uint64_t> verify_grid;
  auto* verify = app.add_subcommand("verify", "Run one theorem-level check; exit 0 on pass, 2 on fail");
  add_common(verify, verify_opts);
  verify->add_option("--suite", suite, "Which check")
      ->required()
      ->check(CLI::IsMember({"batchthm", "mainprev", "expmin", "weibull", "allstab", "t1", "alpha1"}));
  verify->add_option("--alg", verify_alg, "Learner for mainprev")->capture_default_str();
  verify->add_option("--n-grid", verify_grid, "Comma-separated n values")->delimiter(',');

  // compare
  Common compare_opts;
  std::vector<std::uint64_t> compare_grid;
  auto* compare = app.add_subcommand("compare", "N_delta of the three learners side by side");
  add_common(compare, compare_opts);
  compare->add_option("--n-grid", compare_grid, "Comma-separated n values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  sim_delta_given = simulate_cmd->count("--delta") > 0;

  try {
    if (*sample) {
      const auto& c = sample_opts;
      if (c.n == 0) throw DomainError("sample: --n must be >= 1");
      const auto dist = make_power_overlap(c.beta, c.support_max);
      const auto p = sample_overlaps(dist, c.n, c.seed);
      if (c.format == "csv") {
        std::string text = "i,p,q\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
          const auto idx = static_cast<Eigen::Index>(i);
          text += std::to_string(i) + "," + json(1.0 - p.complements()[idx]).dump() + "," +
                  json(p.complements()[idx]).dump() + "\n";
        }
        emit(text, c.out);
      } else {
        json j{{"distribution", to_json(dist)}, {"n", c.n}, {"seed", c.seed}, {"overlaps", p.to_std()}};
        emit(dump(j), c.out);
      }
      return EXIT_SUCCESS;
    }

    if (*exact) {
      const auto& c = exact_opts;
      OverlapVector<double> p;
      if (!exact_p.empty()) {
        p = parse_overlap_array(exact_p);
      } else {
        if (c.n == 0) throw DomainError("exact: give --p or --n (with --beta, --support-max, --seed)");
        p = sample_overlaps(make_power_overlap(c.beta, c.support_max), c.n, c.seed);
      }
      const auto t = expected_time(p, c.tol, exact_max_terms);
      const auto bounds = sum_bounds(p);
      json j{{"expected_time", t.expected_time}, {"truncation_k", t.truncation_k},
             {"tail_bound", t.tail_bound},       {"convention_offset", t.convention_offset},
             {"lower", bounds.lower},            {"upper", bounds.upper},
             {"n_delta", n_delta(p, c.delta)},   {"n", p.size()}};
      emit(dump(j), c.out);
      if (!exact_trace.empty()) {
        std::string text = "k,l_k,lower_k,upper_k\n";
        for (std::uint64_t k = 0; k <= t.truncation_k; ++k) {
          const auto b = not_learned_bounds(p, k);
          text += std::to_string(k) + "," + json(learned_probability(p, k)).dump() + "," + json(b.lower).dump() +
                  "," + json(b.upper).dump() + "\n";
        }
        emit(text, exact_trace);
      }
      return EXIT_SUCCESS;
    }

    if (*zeta_cmd) {
      const auto& c = zeta_opts;
      json j;
      if (zeta_mode == "t1-constant") {
        j = {{"beta", c.beta}, {"value", t1_constant(c.beta, c.beta + 1.0)}};
      } else {
        const auto dist = make_power_overlap(c.beta, c.support_max);
        if (zeta_mode == "zeta") {
          const auto z = zeta(dist, zeta_s, c.tol);
          j = {{"distribution", to_json(dist)},
               {"s", zeta_s},
               {"value", z.value},
               {"terms_summed", z.terms_summed},
               {"tail_bound", z.tail_bound}};
        } else {
          std::vector<std::uint64_t> ns = zeta_ns;
          if (ns.empty()) ns.push_back(c.n);
          if (zeta_mode == "annealed") {
            const auto curve = annealed_time_curve(dist, ns, c.tol);
            json entries = json::array();
            for (const auto& e : curve.entries) entries.push_back({{"n", e.n}, {"value", e.value}});
            j = {{"distribution", to_json(dist)},
                 {"convention_offset", curve.convention_offset},
                 {"entries", entries},
                 {"value", curve.entries.back().value},
                 {"tail_bound", c.tol}};
          } else {
            json entries = json::array();
            for (auto n : ns) entries.push_back({{"n", n}, {"value", t2_remainder(dist, n, c.tol)}});
            j = {{"distribution", to_json(dist)},
                 {"entries", entries},
                 {"value", entries.back()["value"]},
                 {"tail_bound", c.tol}};
          }
        }
      }
      emit(dump(j), c.out);
      return EXIT_SUCCESS;
    }

    if (*simulate_cmd) {
      const auto& c = sim_opts;
      const auto algorithm = parse_algorithm(sim_alg);
      const auto mode = parse_mode(sim_mode);
      const auto dist = make_power_overlap(c.beta, c.support_max);
      std::optional<OverlapVector<double>> fixed;
      if (!sim_p.empty()) {
        if (mode != Mode::kQuenched) throw DomainError("--p only applies to --mode quenched");
        fixed = parse_overlap_array(sim_p);
      } else if (c.n == 0) {
        throw DomainError("simulate: give --n (or --p in quenched mode)");
      }
      const auto set = run_ensemble(algorithm, mode, dist, c.n, runs_or(c, 10000), c.seed, fixed, c.workers);
      std::string raw = "run,words\n";
      for (std::size_t r = 0; r < set.samples.size(); ++r) {
        raw += std::to_string(r) + "," + std::to_string(set.samples[r]) + "\n";
      }
      if (c.format == "csv") {
        emit(raw, c.out);
        return EXIT_SUCCESS;
      }
      const std::vector<double> xs(set.samples.begin(), set.samples.end());
      json j{{"algorithm", to_string(algorithm)},
             {"mode", to_string(mode)},
             {"n", set.n},
             {"runs", set.samples.size()},
             {"seed", c.seed},
             {"distribution", to_json(dist)},
             {"median", median(xs)},
             {"min", *std::min_element(xs.begin(), xs.end())},
             {"max", *std::max_element(xs.begin(), xs.end())}};
      // A sample mean is only reported where the expectation exists.
      if (mode == Mode::kQuenched || c.beta > 0.0) j["mean"] = mean(xs);
      if (set.fixed_p) j["p"] = set.fixed_p->to_std();
      if (sim_delta_given) {
        j["delta"] = c.delta;
        j["n_delta"] = empirical_n_delta(set, c.delta);
      }
      emit(dump(j), c.out);
      if (!sim_samples.empty()) emit(raw, sim_samples);
      return EXIT_SUCCESS;
    }

    if (*sweep) {
      const auto& c = sweep_opts;
      spec.algorithm = parse_algorithm(sweep_alg);
      spec.mode = parse_mode(sweep_mode);
      spec.beta = c.beta;
      spec.support_max = c.support_max;
      if (!sweep_grid.empty()) spec.n_grid = sweep_grid;
      spec.runs_per_n = runs_or(c, 1000);
      spec.delta = c.delta;
      spec.seed = c.seed;
      spec.statistic = Statistic::parse(sweep_stat);
      const auto report = run_sweep(spec, c.workers);
      emit(report_text(report, c), c.out);
      return EXIT_SUCCESS;
    }

    if (*verify) {
      const auto& c = verify_opts;
      const bool tol_given = verify->count("--tol") > 0;
      auto grid_or = [&](NGrid fallback) { return verify_grid.empty() ? fallback : verify_grid; };
      SweepReport report;
      if (suite == "batchthm") {
        report = verify_batchthm(c.beta, c.delta, grid_or(powers_of_two(8, 13)), runs_or(c, 400), c.seed, c.workers);
      } else if (suite == "mainprev") {
        report = verify_mainprev(parse_algorithm(verify_alg), c.beta, c.delta, grid_or(powers_of_two(6, 11)),
                                 runs_or(c, 2000), c.seed, c.workers);
      } else if (suite == "expmin") {
        report = min_overlap_sweep(make_power_overlap(c.beta, 1.0), grid_or({100, 1000, 10000}), runs_or(c, 100000),
                                   c.seed, c.workers);
      } else if (suite == "weibull") {
        report = weibull_report(make_power_overlap(c.beta, 1.0), c.n == 0 ? 10000 : c.n, runs_or(c, 100000), c.seed,
                                c.workers);
      } else if (suite == "allstab") {
        report = stable_sum_sweep(make_power_overlap(c.beta, 1.0), grid_or(powers_of_two(10, 16)), runs_or(c, 1000),
                                  c.seed, c.workers);
      } else if (suite == "t1") {
        const double beta = verify->count("--beta") > 0 ? c.beta : 1.0;
        report = verify_t1(beta, grid_or({10000, 100000, 1000000}), tol_given ? c.tol : 1e-8);
      } else {
        report = verify_alpha1(grid_or(powers_of_two(14, 16)), tol_given ? c.tol : 1e-6);
      }
      return finish_report(report, c);
    }

    if (*compare) {
      const auto& c = compare_opts;
      const auto grid = compare_grid.empty() ? powers_of_two(8, 13) : compare_grid;
      const auto report = compare_algorithms(c.beta, c.delta, grid, runs_or(c, 40000), c.seed, c.workers);
      return finish_report(report, c);
    }
  } catch (const std::exception& e) {
    std::cerr << "batchlab: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
