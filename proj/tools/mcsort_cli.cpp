// mcsort: run and time the sorting algorithms, or print cost-model
// predictions.
//
//   mcsort sort --algo pr4,gsd --n 8M,32M --p 4,8 --reps 4 --format paper
//   mcsort model --algo gsd --n 32M --p 8
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcsort/mcsort.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kUsage = 2;

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = item.find(',', start);
      const auto piece = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

struct SortArgs {
  std::vector<std::string> algos;
  std::vector<std::string> sizes;
  std::vector<std::string> ps{"1"};
  std::uint64_t seed = 1;
  std::size_t reps = 4;
  std::size_t warmup = 0;
  std::string dist = "uniform32";
  std::string format = "paper";
  std::optional<double> omega;
  double epsilon = 0.5;
  double rho = 1.0;
  std::string oversampling = "alg";
  double g_over_G = 5.0;
};

struct ModelArgs {
  std::string algo;
  std::string size;
  std::size_t p = 1;
  double g_over_G = 5.0;
  std::optional<double> omega;
  bool low_order = false;
};

int run_sort(const SortArgs& args) {
  using namespace mcsort;
  using namespace mcsort::bench;

  const auto dist = parse_distribution(args.dist);
  if (!dist) throw ConfigError("unknown distribution '" + args.dist + "'");
  const auto format = parse_format(args.format);
  if (!format) throw ConfigError("unknown format '" + args.format + "'");

  std::vector<Algorithm> algos;
  for (const auto& a : split_list(args.algos)) {
    const auto algo = parse_algorithm(a);
    if (!algo) throw ConfigError("unknown algorithm '" + a + "'");
    algos.push_back(*algo);
  }
  std::vector<std::uint64_t> sizes;
  for (const auto& s : split_list(args.sizes)) {
    const auto n = parse_size(s);
    if (!n) throw ConfigError("bad size '" + s + "'");
    sizes.push_back(*n);
  }
  std::vector<std::size_t> ps;
  for (const auto& s : split_list(args.ps)) {
    const auto p = parse_size(s);
    if (!p || *p == 0 || s.back() == 'M' || s.back() == 'm') throw ConfigError("bad worker count '" + s + "'");
    ps.push_back(static_cast<std::size_t>(*p));
  }

  // Reject bad (algo, p) pairs before any timing starts.
  for (auto algo : algos) {
    for (auto p : ps) validate(SortConfig{algo, algo == Algorithm::sr4 ? 1 : p, {}});
  }

  std::vector<RunRecord> records;
  for (auto n : sizes) {
    auto serial = run_experiment({SortConfig{Algorithm::sr4, 1, {}}, n, *dist, args.seed, args.reps, args.warmup,
                                  args.g_over_G});
    records.insert(records.end(), serial.records.begin(), serial.records.end());
    for (auto algo : algos) {
      if (algo == Algorithm::sr4) continue;
      for (auto p : ps) {
        SortConfig cfg{algo, p, {}};
        cfg.sampling.omega = args.omega;
        cfg.sampling.epsilon = args.epsilon;
        cfg.sampling.rho = args.rho;
        cfg.sampling.seed = args.seed;
        if (algo == Algorithm::ger || algo == Algorithm::gvr) {
          if (args.oversampling == "bound") {
            cfg.sampling.oversampling = static_cast<std::size_t>(mbsp::min_oversampling(
                static_cast<double>(n), static_cast<double>(p), args.epsilon, args.rho));
          } else if (args.oversampling != "alg") {
            const auto s = parse_size(args.oversampling);
            if (!s || *s == 0) throw ConfigError("bad --oversampling '" + args.oversampling + "'");
            cfg.sampling.oversampling = static_cast<std::size_t>(*s);
          }
        }
        auto ex = run_experiment({cfg, n, *dist, args.seed, args.reps, args.warmup, args.g_over_G});
        records.insert(records.end(), ex.records.begin(), ex.records.end());
      }
    }
  }

  const std::string table = emit_table(records, *format);
  if (records.empty()) {
    std::cerr << "warning: no records, table is empty\n";
    return kOk;
  }
  if (*format == TableFormat::paper) {
    std::cout << "# dist=" << args.dist << " seed=" << args.seed << " reps=" << args.reps
              << " warmup=" << args.warmup << " logical_cores=" << records.front().logical_cores
              << " physical_cores=" << records.front().physical_cores << '\n';
  }
  std::cout << table;
  return kOk;
}

int run_model(const ModelArgs& args) {
  using namespace mcsort;
  const auto model = mbsp::model_for(args.algo);
  if (!model) throw ConfigError("no cost model for '" + args.algo + "'");
  const auto n = bench::parse_size(args.size);
  if (!n) throw ConfigError("bad size '" + args.size + "'");
  if (args.p == 0) throw ConfigError("p must be at least 1");

  const double nd = static_cast<double>(*n), pd = static_cast<double>(args.p);
  const auto params = mbsp::MbspParams::simplified(pd, 1.0, args.g_over_G);
  mbsp::CostEstimate est;
  if (*model == mbsp::Model::gsd) {
    est = mbsp::cost_gsd(nd, pd, 1.0, args.omega.value_or(mbsp::model_default_omega(nd)), args.g_over_G,
                         args.low_order);
  } else {
    est = mbsp::estimate(*model, nd, pd, 1.0, args.g_over_G, args.omega);
  }
  const double serial = mbsp::cost_sr4(nd, params.g, params.G).total;

  std::printf("algo=%s n=%llu p=%zu\n", args.algo.c_str(), static_cast<unsigned long long>(*n), args.p);
  std::printf("mbsp p=%g l=%g g=%g m=%g L=%g G=%g M=%s\n", params.p, params.l, params.g, params.m, params.L,
              params.G, "inf");
  for (const auto& t : est.terms) std::printf("  %-17s %.6g G\n", t.name.c_str(), t.value);
  std::printf("  %-17s %.6g G\n", "total", est.total);
  if (est.n_max) std::printf("n_max=%.6g\n", *est.n_max);
  std::printf("predicted_speedup=%.4f\n", *model == mbsp::Model::sr4 ? 1.0 : serial / est.total);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicore integer sorting toolkit"};
  app.require_subcommand(1);

  SortArgs sort_args;
  auto* sort = app.add_subcommand("sort", "Run, verify and time sorting algorithms");
  sort->add_option("--algo", sort_args.algos, "sr4|pr4|pr2|btn|oet|gsd|gvr|ger, comma separated")->required();
  sort->add_option("--n", sort_args.sizes, "key counts; 8M, 32M, 128M mean 8192000, ...")->required();
  sort->add_option("--p", sort_args.ps, "worker counts, comma separated");
  sort->add_option("--seed", sort_args.seed, "input and sampling seed");
  sort->add_option("--reps", sort_args.reps, "timed repetitions")->check(CLI::PositiveNumber);
  sort->add_option("--warmup", sort_args.warmup, "discarded runs before timing");
  sort->add_option("--dist", sort_args.dist, "uniform32|duplicates-heavy|sorted|reversed|constant");
  sort->add_option("--format", sort_args.format, "paper|csv");
  sort->add_option("--omega", sort_args.omega, "oversampling parameter w_n");
  sort->add_option("--epsilon", sort_args.epsilon, "balance slack for --oversampling bound");
  sort->add_option("--rho", sort_args.rho, "failure exponent for --oversampling bound");
  sort->add_option("--oversampling", sort_args.oversampling, "GER/GVR s: alg, bound, or an integer");
  sort->add_option("--g-over-G", sort_args.g_over_G, "slow/fast memory cost ratio for predictions");

  ModelArgs model_args;
  auto* model = app.add_subcommand("model", "Print MBSP cost breakdown and predicted speedup");
  model->add_option("--algo", model_args.algo, "sr4|pr4|pr2|btn|oet|gsd|ger")->required();
  model->add_option("--n", model_args.size, "key count")->required();
  model->add_option("--p", model_args.p, "worker count");
  model->add_option("--g-over-G", model_args.g_over_G, "g/G ratio");
  model->add_option("--omega", model_args.omega, "w_n for gsd/ger");
  model->add_flag("--low-order", model_args.low_order, "include gsd low-order terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (sort->parsed()) return run_sort(sort_args);
    return run_model(model_args);
  } catch (const mcsort::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const mcsort::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
