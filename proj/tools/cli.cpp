#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "gmmk/encoding.hpp"
#include "gmmk/error.hpp"
#include "gmmk/gcws.hpp"
#include "gmmk/kernels.hpp"
#include "gmmk/linear.hpp"
#include "gmmk/parallel.hpp"
#include "gmmk/synthetic.hpp"
#include "gmmk/vectors.hpp"

namespace gmmk::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string in, out, model, test;
  std::string sketch_a, sketch_b;
  std::string kernel = "gmm";
  std::optional<double> lambda_e, p, gamma;
  std::optional<std::uint64_t> seed;
  std::size_t k = 0;
  unsigned b = 8;
  std::size_t gamma_replicas = 0;
  std::string mode = "exact";
  std::size_t record_a = 1, record_b = 1;
  double C = 1.0;
  std::size_t epochs = 200;
  unsigned threads = 1;
  std::size_t block_rows = 64;
  std::optional<std::size_t> dim;
  bool lenient = false;
  SyntheticOptions synth;
  std::string out_test;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << text;
  if (!f) throw DataError("write failed for '" + path + "'");
}

LabeledDataset load(const RunConfig& cfg, const std::string& path) {
  return parse_dataset(read_file(path), ParseOptions{cfg.dim, cfg.lenient});
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw UsageError(cfg.command + " requires --seed");
  return *cfg.seed;
}

double require_p(const RunConfig& cfg) {
  if (!cfg.p) throw UsageError(cfg.command + " requires --p");
  if (!(*cfg.p > 0.0)) throw UsageError("--p must be positive");
  return *cfg.p;
}

// Tab-separated key=value echo of every setting that shaped the output.
class Report {
 public:
  explicit Report(const RunConfig& cfg) { add("command", cfg.command); }

  Report& add(const std::string& key, const std::string& value) {
    if (!line_.empty()) line_ += '\t';
    line_ += key + '=' + value;
    return *this;
  }
  Report& add(const std::string& key, double value) { return add(key, format_shortest(value)); }
  Report& add(const std::string& key, std::size_t value) { return add(key, std::to_string(value)); }
  Report& add(const std::string& key, std::uint64_t value, int) {
    return add(key, std::to_string(value));
  }

  void print(std::ostream& out) const { out << line_ << '\n'; }

 private:
  std::string line_;
};

KernelSpec spec_from(const RunConfig& cfg) {
  return KernelSpec(parse_family(cfg.kernel), cfg.lambda_e, cfg.p, cfg.gamma);
}

void cmd_transform(const RunConfig& cfg, std::ostream& out) {
  const auto ds = load(cfg, cfg.in);
  std::vector<LabeledRecord> records;
  records.reserve(ds.size());
  for (const auto& rec : ds.records()) {
    const auto t = transform(rec.vector);
    records.push_back({rec.label, SparseVector(t.dim(), {t.entries().begin(), t.entries().end()})});
  }
  write_output(cfg.out, write_dataset(LabeledDataset(2 * ds.dim(), std::move(records))), out);
}

void cmd_gram(const RunConfig& cfg, std::ostream& out) {
  const auto spec = spec_from(cfg);
  const auto ds = load(cfg, cfg.in);
  const auto g = gram(ds, spec, GramOptions{cfg.block_rows, cfg.threads});
  write_output(cfg.out, write_precomputed(g), out);
}

void cmd_hash(const RunConfig& cfg, std::ostream& out) {
  const auto seed = require_seed(cfg);
  if (cfg.k == 0) throw UsageError("hash requires --k");
  const auto ds = load(cfg, cfg.in);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (ds[r].vector.empty()) {
      throw DataError("record " + std::to_string(r + 1) + " is all zero and cannot be hashed");
    }
  }
  std::vector<std::string> blocks(ds.size());
  if (cfg.gamma_replicas > 0) {
    if (cfg.p && *cfg.p != 1.0) throw UsageError("--gamma hashing is defined for p = 1 only");
    parallel_for(ds.size(), cfg.threads, [&](std::size_t r) {
      blocks[r] = write_sketch(gamma_sketch(transform(ds[r].vector), cfg.gamma_replicas, seed, cfg.k));
    });
  } else {
    const double p = require_p(cfg);
    parallel_for(ds.size(), cfg.threads, [&](std::size_t r) {
      blocks[r] = write_sketch(sketch(transform(ds[r].vector), p, seed, cfg.k));
    });
  }
  std::string text;
  for (const auto& b : blocks) text += b;
  write_output(cfg.out, text, out);
}

void cmd_encode(const RunConfig& cfg, std::ostream& out) {
  EncodeOptions opts{require_p(cfg), require_seed(cfg), cfg.k, cfg.b, cfg.threads};
  if (cfg.k == 0) throw UsageError("encode requires --k");
  const auto ds = load(cfg, cfg.in);
  const auto encoded = encode_dataset(ds, opts);
  write_output(cfg.out, write_dataset(encoded), out);
  if (cfg.out != "-") {
    Report(cfg)
        .add("in", cfg.in)
        .add("out", cfg.out)
        .add("p", opts.p)
        .add("seed", opts.seed, 0)
        .add("k", opts.k)
        .add("b", std::size_t{opts.b})
        .add("threads", std::size_t{cfg.threads})
        .add("records", encoded.size())
        .add("dim", encoded.dim())
        .print(out);
  }
}

template <typename Sketch>
const Sketch& pick(const std::vector<Sketch>& blocks, std::size_t record, const std::string& path) {
  if (record == 0 || record > blocks.size()) {
    throw DataError("'" + path + "' has " + std::to_string(blocks.size()) + " block(s); record " +
                    std::to_string(record) + " requested");
  }
  return blocks[record - 1];
}

void cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  const auto text_a = read_file(cfg.sketch_a);
  const auto text_b = read_file(cfg.sketch_b);
  Report report(cfg);
  report.add("a", cfg.sketch_a).add("b", cfg.sketch_b);
  report.add("record_a", cfg.record_a).add("record_b", cfg.record_b);
  if (is_gamma_sketch_text(text_a) || is_gamma_sketch_text(text_b)) {
    const auto a = parse_gamma_sketches(text_a);
    const auto b = parse_gamma_sketches(text_b);
    const double est = estimate_ggmm(pick(a, cfg.record_a, cfg.sketch_a), pick(b, cfg.record_b, cfg.sketch_b));
    report.add("mode", "gamma").add("estimate", est);
  } else {
    MatchMode mode;
    if (cfg.mode == "exact") {
      mode = MatchMode::exact_pair;
    } else if (cfg.mode == "index") {
      mode = MatchMode::index_only;
    } else {
      throw UsageError("--mode must be 'exact' or 'index'");
    }
    const auto a = parse_hash_sketches(text_a);
    const auto b = parse_hash_sketches(text_b);
    const double est =
        estimate_pgmm(pick(a, cfg.record_a, cfg.sketch_a), pick(b, cfg.record_b, cfg.sketch_b), mode);
    report.add("mode", cfg.mode).add("estimate", est);
  }
  report.print(out);
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  const TrainOptions opts{cfg.C, cfg.epochs, require_seed(cfg), cfg.threads};
  const auto ds = load(cfg, cfg.in);
  TrainTrace trace;
  const auto model = train(ds, opts, &trace);
  if (!cfg.model.empty()) write_output(cfg.model, write_model(model), out);

  Report report(cfg);
  report.add("in", cfg.in)
      .add("model", cfg.model)
      .add("C", cfg.C)
      .add("epochs", cfg.epochs)
      .add("seed", opts.seed, 0)
      .add("threads", std::size_t{cfg.threads})
      .add("records", ds.size())
      .add("dim", ds.dim())
      .add("classes", model.num_classes())
      .add("train_accuracy", evaluate_accuracy(model, ds));
  if (!cfg.test.empty()) {
    const auto test = parse_dataset(read_file(cfg.test), ParseOptions{ds.dim(), cfg.lenient});
    report.add("test", cfg.test).add("test_accuracy", evaluate_accuracy(model, test));
  }
  report.print(out);
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const auto model = parse_model(read_file(cfg.model));
  const auto ds = parse_dataset(read_file(cfg.in), ParseOptions{model.dim, cfg.lenient});
  Report(cfg)
      .add("model", cfg.model)
      .add("in", cfg.in)
      .add("C", model.C)
      .add("classes", model.num_classes())
      .add("records", ds.size())
      .add("dim", ds.dim())
      .add("accuracy", evaluate_accuracy(model, ds))
      .print(out);
}

void cmd_synth(const RunConfig& cfg, std::ostream& out) {
  auto opts = cfg.synth;
  opts.seed = require_seed(cfg);
  write_output(cfg.out, write_dataset(make_synthetic(opts, 0)), out);
  if (!cfg.out_test.empty()) write_output(cfg.out_test, write_dataset(make_synthetic(opts, 1)), out);
}

void add_input(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--in", cfg.in, "Input dataset (sparse label idx:val lines)")->required();
  sub->add_option("--dim", cfg.dim, "Pin the dataset dimension");
  sub->add_flag("--lenient", cfg.lenient, "Skip blank and '#' comment lines");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Tunable min-max kernels, consistent weighted sampling and hashed features", "gmmk"};
  app.require_subcommand(1);

  auto* transform_cmd = app.add_subcommand("transform", "Split signed features into nonnegative pairs");
  add_input(transform_cmd, cfg);
  transform_cmd->add_option("--out", cfg.out, "Output dataset, '-' for stdout")->required();

  auto* gram_cmd = app.add_subcommand("gram", "Write a precomputed-kernel matrix");
  add_input(gram_cmd, cfg);
  gram_cmd->add_option("--out", cfg.out, "Output file, '-' for stdout")->required();
  gram_cmd->add_option("--kernel", cfg.kernel,
                       "linear|rbf|gmm|egmm|pgmm|ggmm|pggmm|epgmm|eggmm|epggmm")
      ->required();
  gram_cmd->add_option("--lambda-e", cfg.lambda_e, "Exponential rate");
  gram_cmd->add_option("--p", cfg.p, "Power on mins and maxes");
  gram_cmd->add_option("--gamma", cfg.gamma, "Power on the ratio");
  gram_cmd->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));
  gram_cmd->add_option("--block-rows", cfg.block_rows)->check(CLI::PositiveNumber);

  auto* hash_cmd = app.add_subcommand("hash", "Write GCWS sketches, one block per record");
  add_input(hash_cmd, cfg);
  hash_cmd->add_option("--out", cfg.out, "Sketch file, '-' for stdout")->required();
  hash_cmd->add_option("--p", cfg.p, "Power parameter");
  hash_cmd->add_option("--seed", cfg.seed, "Master seed")->required();
  hash_cmd->add_option("--k", cfg.k, "Samples per record")->required()->check(CLI::PositiveNumber);
  hash_cmd->add_option("--gamma", cfg.gamma_replicas, "Integer gamma: replicas per sample")
      ->check(CLI::PositiveNumber);
  hash_cmd->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));

  auto* encode_cmd = app.add_subcommand("encode", "Hash and b-bit encode a dataset");
  add_input(encode_cmd, cfg);
  encode_cmd->add_option("--out", cfg.out, "Encoded dataset, '-' for stdout")->required();
  encode_cmd->add_option("--p", cfg.p, "Power parameter")->required();
  encode_cmd->add_option("--seed", cfg.seed, "Master seed")->required();
  encode_cmd->add_option("--k", cfg.k, "Hashes per record")->required()->check(CLI::PositiveNumber);
  encode_cmd->add_option("--b", cfg.b, "Bits kept per hash")->check(CLI::Range(1u, 32u));
  encode_cmd->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a kernel value from two sketch files");
  estimate_cmd->add_option("sketch_a", cfg.sketch_a)->required();
  estimate_cmd->add_option("sketch_b", cfg.sketch_b)->required();
  estimate_cmd->add_option("--mode", cfg.mode, "exact: match (i*, t*); index: match i* only");
  estimate_cmd->add_option("--record-a", cfg.record_a, "1-based block in sketch_a")
      ->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--record-b", cfg.record_b, "1-based block in sketch_b")
      ->check(CLI::PositiveNumber);

  auto* train_cmd = app.add_subcommand("train", "Fit the one-vs-rest logistic model");
  add_input(train_cmd, cfg);
  train_cmd->add_option("--model", cfg.model, "Model output path");
  train_cmd->add_option("--test", cfg.test, "Held-out dataset to score");
  train_cmd->add_option("--C", cfg.C, "Inverse regularization")->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", cfg.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", cfg.seed, "Master seed")->required();
  train_cmd->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));

  auto* eval_cmd = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval_cmd->add_option("--model", cfg.model)->required();
  eval_cmd->add_option("--in", cfg.in)->required();
  eval_cmd->add_flag("--lenient", cfg.lenient);

  auto* synth_cmd = app.add_subcommand("synth", "Generate the signed prototype dataset");
  synth_cmd->add_option("--out", cfg.out, "Training split")->required();
  synth_cmd->add_option("--out-test", cfg.out_test, "Test split");
  synth_cmd->add_option("--seed", cfg.seed)->required();
  synth_cmd->add_option("--records", cfg.synth.records)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dim", cfg.synth.dim)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--classes", cfg.synth.classes)->check(CLI::Range(2, 1000));
  synth_cmd->add_option("--prototypes", cfg.synth.prototypes)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--flip", cfg.synth.flip_probability)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--drop", cfg.synth.drop_probability)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--jitter", cfg.synth.jitter)->check(CLI::NonNegativeNumber);

  std::vector<const char*> argv{"gmmk"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*transform_cmd) {
      cfg.command = "transform";
      cmd_transform(cfg, out);
    } else if (*gram_cmd) {
      cfg.command = "gram";
      cmd_gram(cfg, out);
    } else if (*hash_cmd) {
      cfg.command = "hash";
      cmd_hash(cfg, out);
    } else if (*encode_cmd) {
      cfg.command = "encode";
      cmd_encode(cfg, out);
    } else if (*estimate_cmd) {
      cfg.command = "estimate";
      cmd_estimate(cfg, out);
    } else if (*train_cmd) {
      cfg.command = "train";
      cmd_train(cfg, out);
    } else if (*eval_cmd) {
      cfg.command = "eval";
      cmd_eval(cfg, out);
    } else if (*synth_cmd) {
      cfg.command = "synth";
      cmd_synth(cfg, out);
    }
  } catch (const Error& e) {
    static constexpr const char* kinds[] = {"", "usage", "data", "numeric"};
    err << "error: " << kinds[e.exit_code()] << ": " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: data: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gmmk::cli
