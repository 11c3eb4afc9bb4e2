// auxlearn command line: synthesizes/curates datasets, trains the three
// experiment configurations (binary, aux_cce, aux_wcce), evaluates
// checkpoints, and reruns the whole comparison suite deterministically.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "auxlearn/checkpoint.hpp"
#include "auxlearn/curation.hpp"
#include "auxlearn/dataset_io.hpp"
#include "auxlearn/errors.hpp"
#include "auxlearn/loss.hpp"
#include "auxlearn/manifest.hpp"
#include "auxlearn/metrics.hpp"
#include "auxlearn/model.hpp"
#include "auxlearn/seeding.hpp"
#include "auxlearn/synthetic.hpp"
#include "auxlearn/types.hpp"

namespace fs = std::filesystem;
using namespace auxlearn;

namespace {

// ---------------------------------------------------------------------------
// Logging (stderr). Command results always go to stdout regardless of level.

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("AUXLEARN_LOG");
    if (env == nullptr) return LogLevel::Info;
    const std::string value = env;
    if (value == "quiet") return LogLevel::Quiet;
    if (value == "info") return LogLevel::Info;
    if (value == "debug") return LogLevel::Debug;
    std::cerr << "warning: unknown AUXLEARN_LOG value '" << value
              << "' (expected quiet|info|debug), using info\n";
    return LogLevel::Info;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::Info) std::cerr << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::Debug) std::cerr << message << "\n";
}

// ---------------------------------------------------------------------------
// Small formatting / file helpers.

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text_file(const fs::path& path, const std::string& content) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string weights_line(const ClassWeights& weights) {
  std::string line = "class weights: [";
  for (int c = 0; c < weights.num_classes(); ++c) {
    if (c > 0) line += ", ";
    line += format_fixed_truncated(weights.positive[c], 9);
  }
  return line + "]";
}

std::string counts_line(const std::vector<std::string>& names,
                        const std::vector<long>& train,
                        const std::vector<long>& test) {
  std::string line = "class counts (train/test):";
  for (std::size_t c = 0; c < names.size(); ++c) {
    line += (c == 0 ? " " : ", ") + names[c] + " " + std::to_string(train[c]) +
            "/" + std::to_string(test[c]);
  }
  return line;
}

// ---------------------------------------------------------------------------
// Dataset + manifest pairs. The two files describe the same rows in the same
// order; every command checks the alignment before using them.

struct LoadedData {
  Dataset data;
  DatasetManifest manifest;
};

void check_aligned(const LoadedData& d) {
  if (d.data.examples.size() != d.manifest.records.size()) {
    throw std::invalid_argument(
        "dataset and manifest disagree on the number of rows (" +
        std::to_string(d.data.examples.size()) + " vs " +
        std::to_string(d.manifest.records.size()) + ")");
  }
  if (d.data.class_names != d.manifest.class_names) {
    throw std::invalid_argument("dataset and manifest disagree on class names");
  }
  for (std::size_t i = 0; i < d.data.examples.size(); ++i) {
    if (d.data.examples[i].label != d.manifest.records[i].class_label) {
      throw std::invalid_argument("dataset and manifest disagree on the label of row " +
                                  std::to_string(i + 1));
    }
  }
}

LoadedData load_pair(const fs::path& data_path, const fs::path& manifest_path) {
  LoadedData d{read_dataset(data_path), read_manifest(manifest_path)};
  check_aligned(d);
  return d;
}

// Indices (into original) of an order-preserving record subset.
std::vector<std::size_t> subset_indices(const DatasetManifest& original,
                                        const DatasetManifest& subset) {
  std::vector<std::size_t> indices;
  indices.reserve(subset.records.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < original.records.size() && j < subset.records.size(); ++i) {
    const ManifestRecord& a = original.records[i];
    const ManifestRecord& b = subset.records[j];
    if (a.example_id == b.example_id && a.class_label == b.class_label &&
        a.split == b.split && a.source_synset == b.source_synset) {
      indices.push_back(i);
      ++j;
    }
  }
  if (j != subset.records.size()) {
    throw std::logic_error("internal error: subsampled manifest is not a subset");
  }
  return indices;
}

LoadedData select_rows(const LoadedData& in, const std::vector<std::size_t>& indices) {
  LoadedData out;
  out.data.class_names = in.data.class_names;
  out.manifest.class_names = in.manifest.class_names;
  out.data.examples.reserve(indices.size());
  out.manifest.records.reserve(indices.size());
  for (std::size_t i : indices) {
    out.data.examples.push_back(in.data.examples[i]);
    out.manifest.records.push_back(in.manifest.records[i]);
  }
  return out;
}

int find_class_index(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == name) return static_cast<int>(c);
  }
  return -1;
}

// Removes one class and renumbers the remaining labels.
LoadedData drop_class(const LoadedData& in, int drop_label) {
  LoadedData out;
  for (int c = 0; c < in.data.num_classes(); ++c) {
    if (c != drop_label) out.data.class_names.push_back(in.data.class_names[c]);
  }
  out.manifest.class_names = out.data.class_names;
  for (std::size_t i = 0; i < in.data.examples.size(); ++i) {
    const int label = in.data.examples[i].label;
    if (label == drop_label) continue;
    const int remapped = label > drop_label ? label - 1 : label;
    LabeledExample example = in.data.examples[i];
    example.label = remapped;
    out.data.examples.push_back(std::move(example));
    ManifestRecord record = in.manifest.records[i];
    record.class_label = remapped;
    out.manifest.records.push_back(std::move(record));
  }
  return out;
}

std::vector<LabeledExample> split_examples(const LoadedData& d, Split split) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < d.manifest.records.size(); ++i) {
    if (d.manifest.records[i].split == split) out.push_back(d.data.examples[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment kinds and data preparation.

enum class Kind { Binary, AuxCce, AuxWcce };

const std::string kAuxiliaryName = "others";

Kind kind_from_string(const std::string& name) {
  if (name == "binary") return Kind::Binary;
  if (name == "aux_cce") return Kind::AuxCce;
  if (name == "aux_wcce") return Kind::AuxWcce;
  throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

LossKind default_loss(Kind kind) {
  return kind == Kind::AuxWcce ? LossKind::Wcce : LossKind::Cce;
}

// binary: drop the auxiliary class and require exactly two known classes.
// aux kinds: require the auxiliary class; optionally subsample each split to
// the requested class ratio.
LoadedData prepare_data(const LoadedData& in, Kind kind,
                        const std::optional<Vector>& ratio,
                        std::uint64_t ratio_seed) {
  const int aux = find_class_index(in.data.class_names, kAuxiliaryName);
  if (kind == Kind::Binary) {
    if (ratio) {
      throw std::invalid_argument("the binary kind does not take a class ratio");
    }
    LoadedData out = aux >= 0 ? drop_class(in, aux) : in;
    if (out.data.num_classes() != 2) {
      throw std::invalid_argument("the binary kind needs exactly two known classes, got " +
                                  std::to_string(out.data.num_classes()));
    }
    return out;
  }
  if (aux < 0) {
    throw std::invalid_argument("auxiliary kinds need a class named '" +
                                kAuxiliaryName + "'");
  }
  if (!ratio) return in;
  const DatasetManifest enforced = enforce_ratio(in.manifest, *ratio, ratio_seed);
  return select_rows(in, subset_indices(in.manifest, enforced));
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation shared by synth-data, train, reproduce.

struct SynthParams {
  std::vector<long> counts{1000, 1000, 8750};
  std::vector<std::string> names;  // empty -> derived defaults
  double blob_radius = 0.6;
  double blob_stddev = 0.06;
  double ring_radius = 0.85;
  double ring_stddev = 0.05;
  double uniform_fraction = 0.3;
  double train_fraction = 0.8;
};

std::vector<std::string> default_class_names(std::size_t num_classes) {
  if (num_classes == 3) return {"cat", "dog", kAuxiliaryName};
  std::vector<std::string> names;
  for (std::size_t c = 0; c + 1 < num_classes; ++c) {
    names.push_back("known" + std::to_string(c));
  }
  names.push_back(kAuxiliaryName);
  return names;
}

LoadedData make_synthetic(const SynthParams& p, std::uint64_t seed) {
  if (p.counts.size() < 2) {
    throw std::invalid_argument("synthetic data needs at least two classes "
                                "(one known class plus '" + kAuxiliaryName + "')");
  }
  std::vector<std::string> names =
      p.names.empty() ? default_class_names(p.counts.size()) : p.names;
  if (names.size() != p.counts.size()) {
    throw std::invalid_argument("got " + std::to_string(p.counts.size()) +
                                " class counts but " + std::to_string(names.size()) +
                                " class names");
  }
  if (names.back() != kAuxiliaryName) {
    throw std::invalid_argument("the last synthetic class is the auxiliary one and "
                                "must be named '" + kAuxiliaryName + "'");
  }

  SyntheticSpec spec;
  spec.feature_dim = 2;
  const int known = static_cast<int>(p.counts.size()) - 1;
  const std::vector<Vector> centers = blob_circle_centers(known, 2, p.blob_radius);
  for (int c = 0; c < known; ++c) {
    BlobClassSpec blob;
    blob.name = names[static_cast<std::size_t>(c)];
    blob.center = centers[static_cast<std::size_t>(c)];
    blob.stddev = p.blob_stddev;
    blob.count = p.counts[static_cast<std::size_t>(c)];
    spec.known.push_back(std::move(blob));
  }
  spec.others.name = names.back();
  spec.others.count = p.counts.back();
  spec.others.uniform_fraction = p.uniform_fraction;
  spec.others.ring_radius = p.ring_radius;
  spec.others.ring_stddev = p.ring_stddev;

  SyntheticDataset generated =
      generate_synthetic_dataset(spec, derive_seed(seed, "data"));
  LoadedData out{std::move(generated.data), std::move(generated.manifest)};
  out.manifest = assign_split(out.manifest, p.train_fraction, derive_seed(seed, "split"));
  check_aligned(out);
  return out;
}

// ---------------------------------------------------------------------------
// Training and evaluation of one experiment.

struct ExperimentSpec {
  std::string label;
  Kind kind = Kind::AuxWcce;
  LossKind loss = LossKind::Wcce;
  std::vector<int> hidden{32};
  Activation activation = Activation::Tanh;
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  double epsilon = 1e-7;
  std::optional<Vector> ratio;
  std::uint64_t seed = 2020;
};

struct ExperimentOutcome {
  LoadedData prepared;
  MlpModel model;
  TrainReport train_report;
  std::optional<ClassWeights> weights;
  std::vector<long> train_counts;
  std::string train_log;
  // Test-split evaluation:
  ConfusionMatrix matrix;
  ClassReport report;
  double mean_loss = 0.0;
  long evaluated = 0;
};

double mean_loss_over(const MlpModel& model, const std::vector<LabeledExample>& examples,
                      LossKind loss, const ClassWeights* weights, double epsilon) {
  const LossConfig cfg{epsilon};
  double total = 0.0;
  for (const LabeledExample& example : examples) {
    const Vector p = forward(model, example.features);
    const Vector y = one_hot(example.label, model.num_classes());
    total += loss == LossKind::Wcce ? wcce_loss(p, y, *weights, cfg)
                                    : cce_loss(p, y, cfg);
  }
  return total / static_cast<double>(examples.size());
}

ExperimentOutcome run_experiment(const LoadedData& source, const ExperimentSpec& spec) {
  ExperimentOutcome out;
  out.prepared = prepare_data(source, spec.kind, spec.ratio,
                              derive_seed(spec.seed, "ratio." + spec.label));
  const std::vector<LabeledExample> train_set = split_examples(out.prepared, Split::Train);
  const std::vector<LabeledExample> test_set = split_examples(out.prepared, Split::Test);
  if (train_set.empty()) {
    throw std::invalid_argument("experiment '" + spec.label + "': empty training split");
  }
  out.train_counts = out.prepared.manifest.class_counts(Split::Train);

  TrainConfig cfg;
  cfg.learning_rate = spec.learning_rate;
  cfg.epochs = spec.epochs;
  cfg.batch_size = spec.batch_size;
  cfg.seed = derive_seed(spec.seed, "shuffle." + spec.label);
  cfg.loss_kind = spec.loss;
  cfg.loss.epsilon = spec.epsilon;
  if (spec.loss == LossKind::Wcce) {
    Vector counts(out.prepared.data.num_classes());
    for (int c = 0; c < counts.size(); ++c) {
      counts[c] = static_cast<double>(out.train_counts[static_cast<std::size_t>(c)]);
    }
    out.weights = compute_class_weights(counts);
    cfg.class_weights = out.weights;
  }

  std::vector<int> dims;
  dims.push_back(out.prepared.data.feature_dim());
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(out.prepared.data.num_classes());
  out.model = init_model(dims, spec.activation,
                         derive_seed(spec.seed, "init." + spec.label));
  out.train_report = train(out.model, train_set, cfg);

  // Deterministic training log: configuration header plus one line per epoch.
  std::string log;
  log += "experiment " + spec.label + "\n";
  log += "loss " + std::string(spec.loss == LossKind::Wcce ? "wcce" : "cce") + "\n";
  log += "classes " + join(out.prepared.data.class_names, ",") + "\n";
  {
    std::string counts = "train counts ";
    for (std::size_t c = 0; c < out.train_counts.size(); ++c) {
      if (c > 0) counts += ",";
      counts += std::to_string(out.train_counts[c]);
    }
    log += counts + "\n";
  }
  if (out.weights) log += weights_line(*out.weights) + "\n";
  log += "layer dims";
  for (int d : dims) log += " " + std::to_string(d);
  log += "\n";
  log += "learning rate " + shortest(spec.learning_rate) + "\n";
  log += "batch size " + std::to_string(spec.batch_size) + "\n";
  for (std::size_t e = 0; e < out.train_report.epoch_loss.size(); ++e) {
    log += "epoch " + std::to_string(e + 1) + " loss " +
           shortest(out.train_report.epoch_loss[e]) + "\n";
  }
  out.train_log = log;

  if (!test_set.empty()) {
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(test_set.size());
    predicted.reserve(test_set.size());
    for (const LabeledExample& example : test_set) {
      truth.push_back(example.label);
      predicted.push_back(predict(out.model, example.features));
    }
    out.matrix = confusion_matrix(truth, predicted, out.prepared.data.class_names);
    out.report = class_report(out.matrix);
    out.mean_loss = mean_loss_over(out.model, test_set, spec.loss,
                                   out.weights ? &*out.weights : nullptr, spec.epsilon);
    out.evaluated = static_cast<long>(test_set.size());
  }
  return out;
}

std::string baseline_line(const std::vector<long>& counts) {
  std::vector<long long> wide(counts.begin(), counts.end());
  const double baseline = majority_baseline(wide);
  return "majority baseline: " + format_fixed(baseline, 5) + " (" +
         format_percent_truncated(baseline, 2) + ")";
}

// ---------------------------------------------------------------------------
// Subcommand options and implementations.

struct CurateOptions {
  std::string config;
  std::string mapping;
  std::string exclude_dogs;
  std::string exclude_cats;
  std::string class_name = "others";
  double train_fraction = 0.8;
  std::uint64_t seed = 2020;
  std::string out_dir = "out";
};

int cmd_curate(const CurateOptions& opt) {
  if (opt.mapping.empty()) {
    throw std::invalid_argument("missing required option --mapping");
  }
  log_info("parsing synset mapping " + opt.mapping);
  const std::vector<SynsetEntry> entries = read_synset_mapping(opt.mapping);

  ExclusionList exclusions;
  if (!opt.exclude_dogs.empty()) {
    exclusions.dog_breed_names = read_exclusion_file(opt.exclude_dogs);
  }
  if (!opt.exclude_cats.empty()) {
    exclusions.cat_breed_names = read_exclusion_file(opt.exclude_cats);
  }
  const ExclusionResult excluded = build_exclusion_set(entries, exclusions);

  DatasetManifest manifest;
  manifest.class_names = {opt.class_name};
  for (const SynsetEntry& entry : entries) {
    if (excluded.synset_ids.count(entry.synset_id) != 0) continue;
    ManifestRecord record;
    record.example_id = entry.synset_id;
    record.class_label = 0;
    record.source_synset = entry.synset_id;
    record.split = Split::Train;
    manifest.records.push_back(std::move(record));
  }
  if (manifest.records.empty()) {
    throw std::invalid_argument("every synset was excluded; nothing to curate");
  }
  manifest = assign_split(manifest, opt.train_fraction, derive_seed(opt.seed, "curate.split"));

  const fs::path out_path = fs::path(opt.out_dir) / "curated_manifest.csv";
  ensure_parent(out_path);
  write_manifest(manifest, out_path);

  std::cout << "synsets parsed: " << entries.size() << "\n";
  std::cout << "classes excluded: " << excluded.synset_ids.size() << "\n";
  std::cout << "classes retained: " << manifest.records.size() << "\n";
  if (!excluded.unmatched_names.empty()) {
    std::cout << "warning: unmatched exclusion names: "
              << join(excluded.unmatched_names, ", ") << "\n";
  }
  std::cout << counts_line(manifest.class_names, manifest.class_counts(Split::Train),
                           manifest.class_counts(Split::Test))
            << "\n";
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

struct SynthOptions {
  std::string config;
  SynthParams params;
  std::uint64_t seed = 2020;
  std::string out_dir = "out";
};

int cmd_synth_data(const SynthOptions& opt) {
  log_info("generating synthetic corpus");
  const LoadedData d = make_synthetic(opt.params, opt.seed);
  const fs::path data_path = fs::path(opt.out_dir) / "synthetic.ds";
  const fs::path manifest_path = fs::path(opt.out_dir) / "manifest.csv";
  ensure_parent(data_path);
  write_dataset(d.data, data_path);
  write_manifest(d.manifest, manifest_path);

  std::cout << "generated " << d.data.examples.size() << " examples (dim "
            << d.data.feature_dim() << ", classes "
            << join(d.data.class_names, ", ") << ")\n";
  std::cout << counts_line(d.data.class_names, d.manifest.class_counts(Split::Train),
                           d.manifest.class_counts(Split::Test))
            << "\n";
  std::cout << "wrote " << data_path.string() << "\n";
  std::cout << "wrote " << manifest_path.string() << "\n";
  return 0;
}

struct TrainOptions {
  std::string config;
  std::string data;
  std::string manifest;
  std::vector<long> synthetic_counts;
  double train_fraction = 0.8;
  std::string kind = "aux_wcce";
  std::string loss;  // empty -> kind default
  std::vector<int> hidden{32};
  std::string activation = "tanh";
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  double epsilon = 1e-7;
  std::vector<double> ratio;
  std::uint64_t seed = 2020;
  std::string out_dir = "out";
  std::string label;  // empty -> kind
};

ExperimentSpec to_spec(const TrainOptions& opt) {
  ExperimentSpec spec;
  spec.kind = kind_from_string(opt.kind);
  spec.label = opt.label.empty() ? opt.kind : opt.label;
  if (opt.loss.empty()) {
    spec.loss = default_loss(spec.kind);
  } else if (opt.loss == "cce") {
    spec.loss = LossKind::Cce;
  } else if (opt.loss == "wcce") {
    spec.loss = LossKind::Wcce;
  } else {
    throw std::invalid_argument("unknown loss '" + opt.loss + "'");
  }
  spec.hidden = opt.hidden;
  if (opt.activation == "tanh") {
    spec.activation = Activation::Tanh;
  } else if (opt.activation == "relu") {
    spec.activation = Activation::Relu;
  } else {
    throw std::invalid_argument("unknown activation '" + opt.activation + "'");
  }
  spec.learning_rate = opt.learning_rate;
  spec.epochs = opt.epochs;
  spec.batch_size = opt.batch_size;
  spec.epsilon = opt.epsilon;
  if (!opt.ratio.empty()) {
    Vector ratio(static_cast<Eigen::Index>(opt.ratio.size()));
    for (std::size_t i = 0; i < opt.ratio.size(); ++i) {
      ratio[static_cast<Eigen::Index>(i)] = opt.ratio[i];
    }
    spec.ratio = ratio;
  }
  spec.seed = opt.seed;
  return spec;
}

LoadedData load_train_source(const TrainOptions& opt, const fs::path& out_dir) {
  if (!opt.synthetic_counts.empty()) {
    SynthParams params;
    params.counts = opt.synthetic_counts;
    params.train_fraction = opt.train_fraction;
    const LoadedData d = make_synthetic(params, opt.seed);
    const fs::path data_path = out_dir / "data" / "synthetic.ds";
    const fs::path manifest_path = out_dir / "data" / "manifest.csv";
    ensure_parent(data_path);
    write_dataset(d.data, data_path);
    write_manifest(d.manifest, manifest_path);
    std::cout << "wrote " << data_path.string() << "\n";
    std::cout << "wrote " << manifest_path.string() << "\n";
    return d;
  }
  if (opt.data.empty() || opt.manifest.empty()) {
    throw std::invalid_argument(
        "provide either --data and --manifest or --synthetic-counts");
  }
  return load_pair(opt.data, opt.manifest);
}

int cmd_train(const TrainOptions& opt) {
  const ExperimentSpec spec = to_spec(opt);
  const fs::path out_dir(opt.out_dir);
  const LoadedData source = load_train_source(opt, out_dir);
  log_info("training experiment '" + spec.label + "'");
  const ExperimentOutcome outcome = run_experiment(source, spec);

  const fs::path checkpoint_path = out_dir / "model.ckpt";
  const fs::path log_path = out_dir / "train_log.txt";
  ensure_parent(checkpoint_path);
  save_model(outcome.model, checkpoint_path);
  write_text_file(log_path, outcome.train_log);

  std::cout << "training examples: " << split_examples(outcome.prepared, Split::Train).size()
            << "\n";
  std::cout << counts_line(outcome.prepared.data.class_names, outcome.train_counts,
                           outcome.prepared.manifest.class_counts(Split::Test))
            << "\n";
  if (outcome.weights) std::cout << weights_line(*outcome.weights) << "\n";
  if (!outcome.train_report.epoch_loss.empty()) {
    std::cout << "final epoch loss: "
              << format_fixed(outcome.train_report.epoch_loss.back(), 5) << "\n";
    for (std::size_t e = 0; e < outcome.train_report.epoch_loss.size(); ++e) {
      log_debug("epoch " + std::to_string(e + 1) + " loss " +
                shortest(outcome.train_report.epoch_loss[e]));
    }
  }
  std::cout << "wrote " << checkpoint_path.string() << "\n";
  std::cout << "wrote " << log_path.string() << "\n";
  return 0;
}

struct EvaluateOptions {
  std::string config;
  std::string checkpoint;
  std::string data;
  std::string manifest;
  std::string split = "test";
  std::string loss = "cce";
  double epsilon = 1e-7;
  std::string label = "model";
  std::string out_dir = "out";
};

int cmd_evaluate(const EvaluateOptions& opt) {
  if (opt.checkpoint.empty() || opt.data.empty() || opt.manifest.empty()) {
    throw std::invalid_argument(
        "missing required options --checkpoint, --data, and --manifest");
  }
  const MlpModel model = load_model(opt.checkpoint);
  LoadedData d = load_pair(opt.data, opt.manifest);

  // A checkpoint with one class fewer than the dataset is a binary model;
  // evaluate it on the known classes only.
  if (model.num_classes() != d.data.num_classes()) {
    const int aux = find_class_index(d.data.class_names, kAuxiliaryName);
    if (aux >= 0 && model.num_classes() == d.data.num_classes() - 1) {
      d = drop_class(d, aux);
    } else {
      throw std::invalid_argument("checkpoint has " + std::to_string(model.num_classes()) +
                                  " classes but the dataset has " +
                                  std::to_string(d.data.num_classes()));
    }
  }
  if (!d.data.examples.empty() && model.input_dim() != d.data.feature_dim()) {
    throw std::invalid_argument("checkpoint expects " + std::to_string(model.input_dim()) +
                                " features but the dataset has " +
                                std::to_string(d.data.feature_dim()));
  }

  const Split split = split_from_string(opt.split);
  const std::vector<LabeledExample> examples = split_examples(d, split);
  if (examples.empty()) {
    throw std::invalid_argument("the " + opt.split + " split is empty");
  }

  if (opt.loss != "cce" && opt.loss != "wcce") {
    throw std::invalid_argument("unknown loss '" + opt.loss + "'");
  }
  LossKind loss = LossKind::Cce;
  std::optional<ClassWeights> weights;
  if (opt.loss == "wcce") {
    loss = LossKind::Wcce;
    const std::vector<long> train_counts = d.manifest.class_counts(Split::Train);
    Vector counts(d.data.num_classes());
    for (int c = 0; c < counts.size(); ++c) {
      counts[c] = static_cast<double>(train_counts[static_cast<std::size_t>(c)]);
    }
    weights = compute_class_weights(counts);  // rejects empty classes
  } else if (opt.loss != "cce") {
    throw std::invalid_argument("unknown loss '" + opt.loss + "'");
  }

  std::vector<int> truth;
  std::vector<int> predicted;
  truth.reserve(examples.size());
  predicted.reserve(examples.size());
  for (const LabeledExample& example : examples) {
    truth.push_back(example.label);
    predicted.push_back(predict(model, example.features));
  }
  const ConfusionMatrix matrix = confusion_matrix(truth, predicted, d.data.class_names);
  const ClassReport report = class_report(matrix);
  const double mean_loss =
      mean_loss_over(model, examples, loss, weights ? &*weights : nullptr, opt.epsilon);

  std::vector<ExperimentReport> reports;
  reports.push_back({opt.label, report, matrix, mean_loss});
  const fs::path text_path = fs::path(opt.out_dir) / "report.txt";
  const fs::path csv_path = fs::path(opt.out_dir) / "report.csv";
  write_text_file(text_path, render_report_text(reports));
  write_text_file(csv_path, render_report_csv(reports));

  std::vector<long> split_counts(d.data.class_names.size(), 0);
  for (const ManifestRecord& record : d.manifest.records) {
    if (record.split == split) ++split_counts[static_cast<std::size_t>(record.class_label)];
  }

  std::cout << "examples evaluated: " << examples.size() << "\n";
  std::cout << "accuracy: " << format_fixed(report.accuracy, 5) << "\n";
  std::cout << "loss: " << format_fixed(mean_loss, 5) << "\n";
  std::cout << baseline_line(split_counts) << "\n";
  std::cout << "wrote " << text_path.string() << "\n";
  std::cout << "wrote " << csv_path.string() << "\n";
  return 0;
}

struct ReproduceOptions {
  std::string config;
  SynthParams params;
  std::vector<double> ratio{1.0, 1.0, 8.75};
  std::vector<int> hidden{32};
  std::string activation = "tanh";
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  double epsilon = 1e-7;
  std::uint64_t seed = 2020;
  std::string out_dir = "out";
  bool sequential = false;
};

int cmd_reproduce(const ReproduceOptions& opt) {
  const fs::path out_dir(opt.out_dir);
  log_info("generating synthetic corpus");
  const LoadedData source = make_synthetic(opt.params, opt.seed);
  const fs::path data_path = out_dir / "data" / "synthetic.ds";
  const fs::path manifest_path = out_dir / "data" / "manifest.csv";
  ensure_parent(data_path);
  write_dataset(source.data, data_path);
  write_manifest(source.manifest, manifest_path);

  Vector ratio(static_cast<Eigen::Index>(opt.ratio.size()));
  for (std::size_t i = 0; i < opt.ratio.size(); ++i) {
    ratio[static_cast<Eigen::Index>(i)] = opt.ratio[i];
  }

  const std::vector<std::pair<std::string, Kind>> runs = {
      {"binary", Kind::Binary}, {"aux_cce", Kind::AuxCce}, {"aux_wcce", Kind::AuxWcce}};

  auto make_spec = [&](const std::pair<std::string, Kind>& run) {
    ExperimentSpec spec;
    spec.label = run.first;
    spec.kind = run.second;
    spec.loss = default_loss(run.second);
    spec.hidden = opt.hidden;
    spec.activation = opt.activation == "relu" ? Activation::Relu : Activation::Tanh;
    if (opt.activation != "relu" && opt.activation != "tanh") {
      throw std::invalid_argument("unknown activation '" + opt.activation + "'");
    }
    spec.learning_rate = opt.learning_rate;
    spec.epochs = opt.epochs;
    spec.batch_size = opt.batch_size;
    spec.epsilon = opt.epsilon;
    if (run.second != Kind::Binary && ratio.size() > 0) spec.ratio = ratio;
    spec.seed = opt.seed;
    return spec;
  };

  log_info(std::string("running 3 experiments ") +
           (opt.sequential ? "sequentially" : "concurrently"));
  std::vector<std::future<ExperimentOutcome>> futures;
  std::vector<ExperimentOutcome> outcomes(runs.size());
  std::vector<std::string> errors(runs.size());
  if (opt.sequential) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      try {
        outcomes[i] = run_experiment(source, make_spec(runs[i]));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        return run_experiment(source, make_spec(runs[i]));
      }));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      try {
        outcomes[i] = futures[i].get();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  }

  // Preserve whatever finished, in the fixed merge order.
  bool failed = false;
  std::vector<ExperimentReport> reports;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: experiment '" << runs[i].first << "' failed: " << errors[i]
                << "\n";
      failed = true;
      continue;
    }
    const ExperimentOutcome& outcome = outcomes[i];
    ensure_parent(out_dir / runs[i].first / "model.ckpt");
    save_model(outcome.model, out_dir / runs[i].first / "model.ckpt");
    write_text_file(out_dir / runs[i].first / "train_log.txt", outcome.train_log);
    reports.push_back({runs[i].first, outcome.report, outcome.matrix, outcome.mean_loss});
    std::cout << "[" << runs[i].first << "] test accuracy "
              << format_fixed(outcome.report.accuracy, 5) << "  test loss "
              << format_fixed(outcome.mean_loss, 5) << "\n";
  }
  if (!reports.empty()) {
    const fs::path text_path = out_dir / "report.txt";
    const fs::path csv_path = out_dir / "report.csv";
    write_text_file(text_path, render_report_text(reports));
    write_text_file(csv_path, render_report_csv(reports));
    std::cout << baseline_line(source.manifest.class_counts(Split::Test)) << "\n";
    std::cout << "wrote " << text_path.string() << "\n";
    std::cout << "wrote " << csv_path.string() << "\n";
  }
  if (failed) throw std::runtime_error("one or more experiments failed");
  return 0;
}

// ---------------------------------------------------------------------------
// Config files.  Every subcommand accepts --config FILE with one key=value
// pair per line; keys are the long option names without the leading dashes.
// Blank lines and lines starting with '#' are ignored.  File values only fill
// in options absent from the command line, so explicit flags always win.

using ConfigSetters = std::map<std::string, std::function<void(const std::string&)>>;

std::string trim_copy(const std::string& text) {
  const std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

template <typename T>
T parse_config_number(const std::string& text) {
  T value{};
  const char* const begin = text.data();
  const char* const end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("invalid numeric value '" + text + "'");
  }
  return value;
}

void parse_config_value(const std::string& text, std::string& dest) { dest = text; }

void parse_config_value(const std::string& text, bool& dest) {
  if (text == "true" || text == "1") {
    dest = true;
  } else if (text == "false" || text == "0") {
    dest = false;
  } else {
    throw std::invalid_argument("invalid boolean value '" + text +
                                "' (expected true or false)");
  }
}

void parse_config_value(const std::string& text, int& dest) {
  dest = parse_config_number<int>(text);
}

void parse_config_value(const std::string& text, long& dest) {
  dest = parse_config_number<long>(text);
}

void parse_config_value(const std::string& text, std::uint64_t& dest) {
  dest = parse_config_number<std::uint64_t>(text);
}

void parse_config_value(const std::string& text, double& dest) {
  dest = parse_config_number<double>(text);
}

template <typename T>
void parse_config_value(const std::string& text, std::vector<T>& dest) {
  std::vector<T> parsed;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::size_t length =
        comma == std::string::npos ? std::string::npos : comma - start;
    T value{};
    parse_config_value(trim_copy(text.substr(start, length)), value);
    parsed.push_back(std::move(value));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  dest = std::move(parsed);
}

template <typename T>
void bind_config(ConfigSetters& setters, const std::string& key, T& dest) {
  setters.emplace(key, [&dest](const std::string& text) { parse_config_value(text, dest); });
}

void apply_config_file(const CLI::App& cmd, const ConfigSetters& setters,
                       const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim_copy(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument(path + " line " + std::to_string(line_number) +
                                  ": expected key=value");
    }
    const std::string key = trim_copy(stripped.substr(0, eq));
    const std::string value = trim_copy(stripped.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument(path + " line " + std::to_string(line_number) +
                                  ": unknown key '" + key + "'");
    }
    if (cmd.count("--" + key) > 0) continue;  // the command line wins
    try {
      it->second(value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + " line " + std::to_string(line_number) +
                                  ", key '" + key + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Option wiring.

void add_synth_params(CLI::App* cmd, SynthParams& params) {
  cmd->add_option("--counts", params.counts,
                  "Per-class example counts; the last class is the auxiliary one")
      ->delimiter(',');
  cmd->add_option("--names", params.names,
                  "Class names matching --counts (default: cat,dog,others)")
      ->delimiter(',');
  cmd->add_option("--blob-radius", params.blob_radius,
                  "Distance of the known-class blob centers from the origin");
  cmd->add_option("--blob-stddev", params.blob_stddev,
                  "Standard deviation of the known-class blobs");
  cmd->add_option("--ring-radius", params.ring_radius,
                  "Radius of the auxiliary-class ring component");
  cmd->add_option("--ring-stddev", params.ring_stddev,
                  "Radial standard deviation of the auxiliary-class ring");
  cmd->add_option("--uniform-fraction", params.uniform_fraction,
                  "Fraction of auxiliary examples drawn uniformly from [-1,1]^2");
  cmd->add_option("--train-fraction", params.train_fraction,
                  "Per-class fraction of examples assigned to the train split");
}

void bind_synth_params(ConfigSetters& setters, SynthParams& params) {
  bind_config(setters, "counts", params.counts);
  bind_config(setters, "names", params.names);
  bind_config(setters, "blob-radius", params.blob_radius);
  bind_config(setters, "blob-stddev", params.blob_stddev);
  bind_config(setters, "ring-radius", params.ring_radius);
  bind_config(setters, "ring-stddev", params.ring_stddev);
  bind_config(setters, "uniform-fraction", params.uniform_fraction);
  bind_config(setters, "train-fraction", params.train_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auxlearn: auxiliary-class training experiments on a desk-scale corpus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "auxlearn 0.1.0");

  CurateOptions curate;
  ConfigSetters curate_cfg;
  CLI::App* curate_cmd = app.add_subcommand(
      "curate", "Build an auxiliary-class manifest from a synset mapping");
  curate_cmd->add_option("--config", curate.config,
                         "Key=value config file; command-line flags win");
  curate_cmd->add_option("--mapping", curate.mapping, "Synset mapping file");
  curate_cmd->add_option("--exclude-dogs", curate.exclude_dogs,
                         "File of dash-separated dog breed names to exclude");
  curate_cmd->add_option("--exclude-cats", curate.exclude_cats,
                         "File of cat breed names to exclude (default: built-in list)");
  curate_cmd->add_option("--class-name", curate.class_name,
                         "Class name for the curated records");
  curate_cmd->add_option("--train-fraction", curate.train_fraction,
                         "Fraction assigned to the train split");
  curate_cmd->add_option("--seed", curate.seed, "Top-level random seed");
  curate_cmd->add_option("--out-dir", curate.out_dir, "Output directory");
  bind_config(curate_cfg, "mapping", curate.mapping);
  bind_config(curate_cfg, "exclude-dogs", curate.exclude_dogs);
  bind_config(curate_cfg, "exclude-cats", curate.exclude_cats);
  bind_config(curate_cfg, "class-name", curate.class_name);
  bind_config(curate_cfg, "train-fraction", curate.train_fraction);
  bind_config(curate_cfg, "seed", curate.seed);
  bind_config(curate_cfg, "out-dir", curate.out_dir);
  curate_cmd->callback([&] {
    apply_config_file(*curate_cmd, curate_cfg, curate.config);
    cmd_curate(curate);
  });

  SynthOptions synth;
  ConfigSetters synth_cfg;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth-data", "Generate the synthetic blob/ring corpus with a manifest");
  synth_cmd->add_option("--config", synth.config,
                        "Key=value config file; command-line flags win");
  add_synth_params(synth_cmd, synth.params);
  synth_cmd->add_option("--seed", synth.seed, "Top-level random seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");
  bind_synth_params(synth_cfg, synth.params);
  bind_config(synth_cfg, "seed", synth.seed);
  bind_config(synth_cfg, "out-dir", synth.out_dir);
  synth_cmd->callback([&] {
    apply_config_file(*synth_cmd, synth_cfg, synth.config);
    cmd_synth_data(synth);
  });

  TrainOptions train_opt;
  ConfigSetters train_cfg;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one experiment configuration");
  train_cmd->add_option("--config", train_opt.config,
                        "Key=value config file; command-line flags win");
  train_cmd->add_option("--data", train_opt.data, "Dataset file");
  train_cmd->add_option("--manifest", train_opt.manifest, "Manifest file");
  train_cmd->add_option("--synthetic-counts", train_opt.synthetic_counts,
                        "Generate a synthetic corpus with these per-class counts "
                        "instead of reading --data/--manifest")
      ->delimiter(',');
  train_cmd->add_option("--train-fraction", train_opt.train_fraction,
                        "Train fraction for --synthetic-counts");
  train_cmd->add_option("--kind", train_opt.kind, "Experiment kind")
      ->check(CLI::IsMember({"binary", "aux_cce", "aux_wcce"}));
  train_cmd->add_option("--loss", train_opt.loss, "Loss function (default from --kind)")
      ->check(CLI::IsMember({"cce", "wcce"}));
  train_cmd->add_option("--hidden", train_opt.hidden, "Hidden layer sizes")
      ->delimiter(',');
  train_cmd->add_option("--activation", train_opt.activation, "Hidden activation")
      ->check(CLI::IsMember({"tanh", "relu"}));
  train_cmd->add_option("--lr", train_opt.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", train_opt.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", train_opt.batch_size, "Minibatch size");
  train_cmd->add_option("--epsilon", train_opt.epsilon, "Loss log stabilizer");
  train_cmd->add_option("--ratio", train_opt.ratio,
                        "Per-class ratio to enforce on both splits (aux kinds only)")
      ->delimiter(',');
  train_cmd->add_option("--seed", train_opt.seed, "Top-level random seed");
  train_cmd->add_option("--out-dir", train_opt.out_dir, "Output directory");
  train_cmd->add_option("--label", train_opt.label, "Experiment label (default: kind)");
  bind_config(train_cfg, "data", train_opt.data);
  bind_config(train_cfg, "manifest", train_opt.manifest);
  bind_config(train_cfg, "synthetic-counts", train_opt.synthetic_counts);
  bind_config(train_cfg, "train-fraction", train_opt.train_fraction);
  bind_config(train_cfg, "kind", train_opt.kind);
  bind_config(train_cfg, "loss", train_opt.loss);
  bind_config(train_cfg, "hidden", train_opt.hidden);
  bind_config(train_cfg, "activation", train_opt.activation);
  bind_config(train_cfg, "lr", train_opt.learning_rate);
  bind_config(train_cfg, "epochs", train_opt.epochs);
  bind_config(train_cfg, "batch-size", train_opt.batch_size);
  bind_config(train_cfg, "epsilon", train_opt.epsilon);
  bind_config(train_cfg, "ratio", train_opt.ratio);
  bind_config(train_cfg, "seed", train_opt.seed);
  bind_config(train_cfg, "out-dir", train_opt.out_dir);
  bind_config(train_cfg, "label", train_opt.label);
  train_cmd->callback([&] {
    apply_config_file(*train_cmd, train_cfg, train_opt.config);
    cmd_train(train_opt);
  });

  EvaluateOptions evaluate;
  ConfigSetters evaluate_cfg;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset split");
  evaluate_cmd->add_option("--config", evaluate.config,
                           "Key=value config file; command-line flags win");
  evaluate_cmd->add_option("--checkpoint", evaluate.checkpoint, "Model checkpoint");
  evaluate_cmd->add_option("--data", evaluate.data, "Dataset file");
  evaluate_cmd->add_option("--manifest", evaluate.manifest, "Manifest file");
  evaluate_cmd->add_option("--split", evaluate.split, "Split to evaluate")
      ->check(CLI::IsMember({"train", "test"}));
  evaluate_cmd->add_option("--loss", evaluate.loss,
                           "Loss to report (wcce derives weights from train counts)")
      ->check(CLI::IsMember({"cce", "wcce"}));
  evaluate_cmd->add_option("--epsilon", evaluate.epsilon, "Loss log stabilizer");
  evaluate_cmd->add_option("--label", evaluate.label, "Experiment label in reports");
  evaluate_cmd->add_option("--out-dir", evaluate.out_dir, "Output directory");
  bind_config(evaluate_cfg, "checkpoint", evaluate.checkpoint);
  bind_config(evaluate_cfg, "data", evaluate.data);
  bind_config(evaluate_cfg, "manifest", evaluate.manifest);
  bind_config(evaluate_cfg, "split", evaluate.split);
  bind_config(evaluate_cfg, "loss", evaluate.loss);
  bind_config(evaluate_cfg, "epsilon", evaluate.epsilon);
  bind_config(evaluate_cfg, "label", evaluate.label);
  bind_config(evaluate_cfg, "out-dir", evaluate.out_dir);
  evaluate_cmd->callback([&] {
    apply_config_file(*evaluate_cmd, evaluate_cfg, evaluate.config);
    cmd_evaluate(evaluate);
  });

  ReproduceOptions reproduce;
  ConfigSetters reproduce_cfg;
  CLI::App* reproduce_cmd = app.add_subcommand(
      "reproduce",
      "Generate the synthetic corpus and run the binary/aux_cce/aux_wcce comparison");
  reproduce_cmd->add_option("--config", reproduce.config,
                            "Key=value config file; command-line flags win");
  add_synth_params(reproduce_cmd, reproduce.params);
  reproduce_cmd->add_option("--ratio", reproduce.ratio,
                            "Per-class ratio enforced for the aux experiments")
      ->delimiter(',');
  reproduce_cmd->add_option("--hidden", reproduce.hidden, "Hidden layer sizes")
      ->delimiter(',');
  reproduce_cmd->add_option("--activation", reproduce.activation, "Hidden activation")
      ->check(CLI::IsMember({"tanh", "relu"}));
  reproduce_cmd->add_option("--lr", reproduce.learning_rate, "Learning rate");
  reproduce_cmd->add_option("--epochs", reproduce.epochs, "Training epochs");
  reproduce_cmd->add_option("--batch-size", reproduce.batch_size, "Minibatch size");
  reproduce_cmd->add_option("--epsilon", reproduce.epsilon, "Loss log stabilizer");
  reproduce_cmd->add_option("--seed", reproduce.seed, "Top-level random seed");
  reproduce_cmd->add_option("--out-dir", reproduce.out_dir, "Output directory");
  reproduce_cmd->add_flag("--sequential", reproduce.sequential,
                          "Run the three experiments one after another");
  bind_synth_params(reproduce_cfg, reproduce.params);
  bind_config(reproduce_cfg, "ratio", reproduce.ratio);
  bind_config(reproduce_cfg, "hidden", reproduce.hidden);
  bind_config(reproduce_cfg, "activation", reproduce.activation);
  bind_config(reproduce_cfg, "lr", reproduce.learning_rate);
  bind_config(reproduce_cfg, "epochs", reproduce.epochs);
  bind_config(reproduce_cfg, "batch-size", reproduce.batch_size);
  bind_config(reproduce_cfg, "epsilon", reproduce.epsilon);
  bind_config(reproduce_cfg, "seed", reproduce.seed);
  bind_config(reproduce_cfg, "out-dir", reproduce.out_dir);
  bind_config(reproduce_cfg, "sequential", reproduce.sequential);
  reproduce_cmd->callback([&] {
    apply_config_file(*reproduce_cmd, reproduce_cfg, reproduce.config);
    cmd_reproduce(reproduce);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
