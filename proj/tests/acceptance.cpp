// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and not tuned at run time.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gmmk/encoding.hpp"
#include "gmmk/gcws.hpp"
#include "gmmk/kernels.hpp"
#include "gmmk/linear.hpp"
#include "gmmk/parallel.hpp"
#include "gmmk/random.hpp"
#include "gmmk/vectors.hpp"
#include "test_support.hpp"

using namespace gmmk;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string source_path(const std::string& rel) { return std::string(GMMK_SOURCE_DIR) + "/" + rel; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double sigma(double q, double k) { return std::sqrt(q * (1.0 - q) / k); }

// ---------------------------------------------------------------------------

Outcome transformation_golden() {
  const auto t = transform(SparseVector::from_dense(std::vector<double>{-4, 6}));
  const bool ok = t.dim() == 4 && t.to_dense() == std::vector<double>{0, 4, 6, 0};
  return {ok, "transform([-4, 6]) -> [0 4 6 0]"};
}

Outcome reduction_identities() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> dims(1, 50);
  std::uniform_real_distribution<double> par(0.1, 5.0);
  double worst_ulp = 0.0;
  int violations = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const std::size_t dim = dims(rng);
    const auto u = transform(testing::random_signed(rng, dim));
    const auto v = transform(testing::random_signed(rng, dim));
    const double lam = par(rng), p = par(rng), g = par(rng);

    const double base = gmm(u, v);
    const double eg = evaluate(KernelSpec::egmm(lam), u, v);
    worst_ulp = std::max({worst_ulp, testing::ulp_distance(evaluate(KernelSpec::pgmm(1.0), u, v), base),
                          testing::ulp_distance(evaluate(KernelSpec::ggmm(1.0), u, v), base),
                          testing::ulp_distance(evaluate(KernelSpec::epggmm(lam, 1.0, 1.0), u, v), eg)});

    for (const auto& spec : testing::all_min_max_specs(lam, p, g)) {
      const double k = evaluate(spec, u, v);
      const double lo = spec.lambda_e() ? std::exp(-lam) : 0.0;
      if (k != evaluate(spec, v, u) || !(k >= lo && k <= 1.0)) ++violations;
    }
  }
  return {worst_ulp <= 1.0 && violations == 0,
          "1000 pairs, worst reduction distance " + fmt("%.0f", worst_ulp) +
              " ulp, symmetry/range violations " + std::to_string(violations)};
}

// Gram matrices of all eight families on one 20-record set.
struct GramArtifacts {
  std::vector<std::vector<double>> values;
  std::vector<std::string> text;
};

GramArtifacts oracle_grams(unsigned threads, double* worst) {
  std::mt19937_64 rng(2002);
  const auto ds = testing::random_dataset(rng, 20, 30);
  GramArtifacts art;
  *worst = 0.0;
  for (const auto& spec : testing::all_min_max_specs(2.0, 0.5, 3.0)) {
    const auto g = gram(ds, spec, GramOptions{7, threads});
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 20; ++j) {
        const double want =
            testing::dense_kernel(spec, ds[i].vector.to_dense(), ds[j].vector.to_dense());
        *worst = std::max(*worst, testing::relative_error(g(i, j), want));
      }
    }
    art.values.push_back(g.values);
    art.text.push_back(write_precomputed(g));
  }
  return art;
}

Outcome oracle_equivalence(const GramArtifacts& art, double worst) {
  return {worst <= 1e-12 && art.values.size() == 8,
          "8 families x 20x20, worst relative error " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

Outcome scale_invariance() {
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const auto u = testing::random_signed(rng, 40), v = testing::random_signed(rng, 40);
    for (const auto& spec : testing::all_min_max_specs(4.0, 0.6, 2.5)) {
      const double k = evaluate(spec, u, v);
      for (double c : {1e-3, 1.0, 1e3}) {
        worst = std::max(worst, testing::relative_error(evaluate(spec, u.scaled(c), v.scaled(c)), k));
      }
    }
  }
  return {worst <= 1e-12, "100 pairs x 8 families x c in {1e-3,1,1e3}, worst relative change " +
                              fmt("%.2e", worst) + " (tol 1e-12)"};
}

Outcome resemblance_limit() {
  std::mt19937_64 rng(4004);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const auto u = testing::random_nonnegative(rng, 40, 0.4, 0.5, 2.0);
    const auto v = testing::random_nonnegative(rng, 40, 0.4, 0.5, 2.0);
    const auto du = u.to_dense(), dv = v.to_dense();
    double both = 0, any = 0;
    for (std::size_t i = 0; i < du.size(); ++i) {
      both += du[i] != 0 && dv[i] != 0;
      any += du[i] != 0 || dv[i] != 0;
    }
    worst = std::max(worst, std::abs(evaluate(KernelSpec::pgmm(1e-3), u, v) - both / any));
  }
  return {worst <= 1e-2, "100 nonnegative pairs, worst |pGMM(p=1e-3) - resemblance| " +
                             fmt("%.2e", worst) + " (tol 1e-2)"};
}

// Twenty pairs: the hand pair first, then correlated random pairs.
std::vector<std::pair<TransformedVector, TransformedVector>> estimation_pairs() {
  std::vector<std::pair<TransformedVector, TransformedVector>> pairs;
  pairs.emplace_back(transform(SparseVector::from_dense(std::vector<double>{-4, 6})),
                     transform(SparseVector::from_dense(std::vector<double>{3, 2})));
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> jitter(0.3, 1.7), coin(0.0, 1.0);
  while (pairs.size() < 20) {
    const auto base = testing::random_signed(rng, 25, 0.6);
    auto other = base.to_dense();
    for (auto& w : other) {
      w *= jitter(rng);
      if (coin(rng) < 0.1) w = -w;
    }
    pairs.emplace_back(transform(base), transform(SparseVector::from_dense(other)));
  }
  return pairs;
}

// Exact-pair estimates for every (p, pair), computed in parallel over pairs.
std::vector<double> collision_estimates(unsigned threads) {
  const auto pairs = estimation_pairs();
  const std::vector<double> powers{0.25, 1.0, 2.0};
  std::vector<double> est(powers.size() * pairs.size());
  parallel_for(est.size(), threads, [&](std::size_t t) {
    const double p = powers[t / pairs.size()];
    const auto& [u, v] = pairs[t % pairs.size()];
    const std::uint64_t seed = 60000 + t;
    est[t] = estimate_pgmm(sketch(u, p, seed, 10000), sketch(v, p, seed, 10000), MatchMode::exact_pair);
  });
  return est;
}

Outcome collision_probability(const std::vector<double>& est) {
  const auto pairs = estimation_pairs();
  const std::vector<double> powers{0.25, 1.0, 2.0};
  bool ok = true;
  std::string detail = "k=1e4, 4 sigma:";
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    int inside = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double q = pgmm(pairs[i].first, pairs[i].second, powers[pi]);
      if (std::abs(est[pi * pairs.size() + i] - q) <= 4.0 * sigma(q, 1e4)) ++inside;
    }
    ok = ok && inside >= 19;
    detail += " p=" + fmt("%g", powers[pi]) + " " + std::to_string(inside) + "/20";
  }
  const double hand = est[pairs.size()];  // p = 1, pair 0
  detail += ", hand pair p=1 " + fmt("%.5f", hand) + " vs 2/13";
  return {ok, detail};
}

Outcome integer_gamma_hashing() {
  std::mt19937_64 rng(7007);
  constexpr std::size_t k = 100000;
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  int inside = 0, total = 0;
  double worst_z = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    const auto base = testing::random_signed(rng, 12, 0.7);
    auto other = base.to_dense();
    for (auto& w : other) w *= jitter(rng);
    const auto u = transform(base), v = transform(SparseVector::from_dense(other));
    const double g = gmm(u, v);
    for (std::size_t gamma : {2u, 3u}) {
      const std::uint64_t seed = 70000 + 10 * pair + gamma;
      const double est = estimate_ggmm(gamma_sketch(u, gamma, seed, k), gamma_sketch(v, gamma, seed, k));
      const double q = std::pow(g, static_cast<double>(gamma));
      const double z = std::abs(est - q) / sigma(q, k);
      worst_z = std::max(worst_z, z);
      inside += z <= 4.0;
      ++total;
    }
  }
  return {inside == total, "10 pairs x gamma in {2,3}, k=1e5: " + std::to_string(inside) + "/" +
                               std::to_string(total) + " within 4 sigma, worst " +
                               fmt("%.2f", worst_z) + " sigma"};
}

Outcome encoding_fidelity() {
  std::mt19937_64 rng(8008);
  int exact = 0;
  double lossy_sum = 0.0, lossless_sum = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::size_t dim = 20 + pair;  // 2*dim <= 2^9
    const auto u = transform(testing::random_signed(rng, dim));
    const auto v = transform(testing::random_signed(rng, dim));
    const auto su = sketch(u, 1.0, 80000 + pair, 512), sv = sketch(v, 1.0, 80000 + pair, 512);
    const double lossless = dot_estimate(encode(su, 9), encode(sv, 9));
    exact += lossless == estimate_pgmm(su, sv, MatchMode::index_only);
    lossless_sum += lossless;
    lossy_sum += dot_estimate(encode(su, 2), encode(sv, 2));
  }
  return {exact == 100 && lossy_sum > lossless_sum,
          "lossless b=9 equals index-only on " + std::to_string(exact) +
              "/100; mean estimate b=2 " + fmt("%.4f", lossy_sum / 100) + " > lossless " +
              fmt("%.4f", lossless_sum / 100)};
}

Outcome stream_statistics() {
  constexpr int n = 100000;
  double sum = 0.0;
  std::array<int, 10> bins{};
  for (int j = 1; j <= n; ++j) {
    const auto r = derive_randoms(9009, j, 1);
    sum += r.r;
    ++bins[static_cast<int>(r.beta * 10)];
  }
  const double mean = sum / n;
  const int worst_bin = *std::max_element(bins.begin(), bins.end(), [](int a, int b) {
    return std::abs(a - 10000) < std::abs(b - 10000);
  });
  const bool ok = std::abs(mean - 2.0) <= 0.018 &&
                  std::all_of(bins.begin(), bins.end(), [](int b) { return std::abs(b - 10000) <= 500; });
  return {ok, "mean r " + fmt("%.5f", mean) + " (2 +/- 0.018), most uneven beta bin " +
                  std::to_string(worst_bin) + " (10000 +/- 500)"};
}

struct PipelineArtifacts {
  double raw_accuracy = 0.0;
  std::vector<double> hashed_accuracy;  // per p
  std::vector<std::string> encoded_train;
  std::vector<std::vector<std::vector<double>>> weights;
};

PipelineArtifacts pipeline(unsigned threads) {
  const auto train_set = read_dataset_file(source_path("data/synthetic_train.txt"));
  const auto test_set =
      read_dataset_file(source_path("data/synthetic_test.txt"), ParseOptions{train_set.dim(), false});
  const TrainOptions learner{1.0, 300, 1, threads};

  PipelineArtifacts art;
  const auto raw = train(train_set, learner);
  art.raw_accuracy = evaluate_accuracy(raw, test_set);
  for (double p : {0.25, 1.0}) {
    const EncodeOptions enc{p, 424242, 1024, 8, threads};
    const auto etrain = encode_dataset(train_set, enc);
    const auto etest = encode_dataset(test_set, enc);
    const auto model = train(etrain, learner);
    art.hashed_accuracy.push_back(evaluate_accuracy(model, etest));
    art.encoded_train.push_back(write_dataset(etrain));
    art.weights.push_back(model.weights);
  }
  return art;
}

Outcome end_to_end(const PipelineArtifacts& art) {
  const double best = *std::max_element(art.hashed_accuracy.begin(), art.hashed_accuracy.end());
  return {best - art.raw_accuracy >= 0.05,
          "test accuracy raw " + fmt("%.4f", art.raw_accuracy) + ", hashed p=0.25 " +
              fmt("%.4f", art.hashed_accuracy[0]) + ", p=1 " + fmt("%.4f", art.hashed_accuracy[1]) +
              " (need best - raw >= 0.05)"};
}

Outcome format_interop() {
  const auto dir = fs::temp_directory_path() / "gmmk_acceptance";
  fs::create_directories(dir);
  const auto out = (dir / "five.kernel").string();
  std::ostringstream sout, serr;
  const int code = cli::run({"gram", "--in", source_path("tests/golden/five_records.txt"), "--kernel",
                             "gmm", "--out", out},
                            sout, serr);
  const bool same = code == 0 && slurp(out) == slurp(source_path("tests/golden/five_records_gmm.kernel"));
  fs::remove_all(dir);
  return {same, "gmm kernel file for 5 records vs hand-built golden file, byte-for-byte"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("[%s] %2d %-34s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  double worst1 = 0.0, worst8 = 0.0;
  GramArtifacts grams1, grams8;
  std::vector<double> est1, est8;
  PipelineArtifacts pipe1, pipe8;

  report(1, "transformation golden case", transformation_golden);
  report(2, "kernel reduction identities", reduction_identities);
  report(3, "brute-force oracle equivalence", [&] {
    grams1 = oracle_grams(1, &worst1);
    return oracle_equivalence(grams1, worst1);
  });
  report(4, "scale invariance", scale_invariance);
  report(5, "resemblance limit", resemblance_limit);
  report(6, "collision probability (exact pair)", [&] {
    est1 = collision_estimates(1);
    return collision_probability(est1);
  });
  report(7, "integer-gamma hashing", integer_gamma_hashing);
  report(8, "encoding fidelity", encoding_fidelity);
  report(9, "gamma/uniform stream statistics", stream_statistics);
  report(10, "end-to-end hashed pipeline", [&] {
    pipe1 = pipeline(1);
    return end_to_end(pipe1);
  });
  report(11, "precomputed-kernel format", format_interop);
  report(12, "determinism under parallelism", [&] {
    grams8 = oracle_grams(8, &worst8);
    est8 = collision_estimates(8);
    pipe8 = pipeline(8);
    const bool g = grams1.values == grams8.values && grams1.text == grams8.text;
    const bool e = !est1.empty() && std::memcmp(est1.data(), est8.data(), est1.size() * sizeof(double)) == 0;
    const bool p = pipe1.encoded_train == pipe8.encoded_train && pipe1.weights == pipe8.weights &&
                   pipe1.raw_accuracy == pipe8.raw_accuracy &&
                   pipe1.hashed_accuracy == pipe8.hashed_accuracy;
    return Outcome{g && e && p, std::string("threads 1 vs 8: gram ") + (g ? "identical" : "DIFFER") +
                                    ", estimates " + (e ? "identical" : "DIFFER") + ", pipeline " +
                                    (p ? "identical" : "DIFFER")};
  });

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
