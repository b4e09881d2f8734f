// Copyright 2026 The Clozekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "clozekit/cbtio.h"
#include "clozekit/checkpoint.h"
#include "clozekit/config.h"
#include "clozekit/dataset.h"
#include "clozekit/ensemble.h"
#include "clozekit/error.h"
#include "clozekit/evaluation.h"
#include "clozekit/random.h"
#include "clozekit/resources.h"
#include "clozekit/training.h"
#include "clozekit/vocab.h"

namespace clozekit::cli {
namespace {

namespace fs = std::filesystem;

// Seeds for the per-example unknown-word assignment, one stream per use.
std::uint64_t EncodeSeed(std::uint64_t seed, std::string_view purpose) {
  return MixSeed(seed, purpose);
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> ReadLines(const fs::path& path) {
  const std::string text = ReadFile(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(line.substr(first));
  }
  return lines;
}

SplitFractions ParseSplits(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    double v = 0.0;
    const char* b = text.data() + pos;
    const char* e = text.data() + end;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
      throw ValidationError("--splits expects three comma-separated fractions, got '" + text + "'");
    }
    values.push_back(v);
    pos = end + 1;
  }
  if (values.size() != 3) {
    throw ValidationError("--splits expects three comma-separated fractions, got '" + text + "'");
  }
  return {values[0], values[1], values[2]};
}

WordType ParseType(const std::string& name) {
  const auto type = ParseWordTypeName(name);
  if (!type || *type == WordType::kOther) {
    throw ValidationError("--type must be ne or cn, got '" + name + "'");
  }
  return *type;
}

void AppendOrTruncate(const fs::path& path, bool append, const std::string& text) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  out.close();
  if (out.fail()) throw IoError("cannot write " + path.string());
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string books;
  std::string type;
  std::size_t window = kDefaultWindow;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
  std::string splits = "0.8,0.1,0.1";
  std::string blocklist;
  std::string out;
  std::string tags;
  std::string nouns;
  std::string stopwords;
  std::string honorifics;
  std::string markers;
};

int Generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  DatasetOptions options;
  options.type = ParseType(a.type);
  options.generation.window = a.window;
  options.generation.stride = a.stride;
  options.generation.seed = a.seed;
  options.fractions = ParseSplits(a.splits);
  if (!a.blocklist.empty()) options.blocklist = ReadLines(a.blocklist);
  if (a.window == 0) throw ValidationError("--window must be >= 1");
  if (a.stride == 0) throw ValidationError("--stride must be >= 1");

  IngestOptions ingest;
  if (!a.markers.empty()) ingest.markers = BoilerplateMarkers::FromFile(a.markers);
  IngestResult corpus = IngestBooks(a.books, ingest);
  for (const auto& e : corpus.errors) {
    err << "warning: skipped " << e.file.string() << ": " << e.message << "\n";
  }
  if (corpus.books.empty()) throw EmptyCorpusError("no readable books in " + a.books);

  std::unique_ptr<Tagger> tagger;
  if (!a.tags.empty()) {
    tagger = std::make_unique<PretaggedTagger>(PretaggedTagger::FromDirectory(a.tags));
  } else {
    TaggerConfig config = TaggerConfig::FromFiles(a.nouns, a.stopwords, a.honorifics);
    config.Validate();
    tagger = std::make_unique<HeuristicTagger>(std::move(config));
  }

  const Dataset dataset = BuildDataset(std::move(corpus.books), *tagger, options);
  WriteDataset(a.out, dataset, options.type);
  std::vector<std::pair<std::string, DatasetStats>> rows;
  for (Split s : kAllSplits) rows.emplace_back(SplitFileName(options.type, s), ComputeStats(dataset[s]));
  out << FormatStatsTable(rows);
  out << "examined " << dataset.total.examined << ", emitted " << dataset.total.emitted
      << ", skipped (no repeat) " << dataset.total.skipped_no_repeat << ", skipped (small pool) "
      << dataset.total.skipped_small_pool << "\n";
  return kExitOk;
}

// --- stats / validate ---------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> data;
  std::size_t window = kDefaultWindow;
  bool tsv = false;
};

int Stats(const StatsArgs& a, std::ostream& out) {
  std::vector<std::pair<std::string, DatasetStats>> rows;
  for (const auto& path : a.data) {
    ReadOptions options;
    options.window = a.window;
    rows.emplace_back(fs::path(path).filename().string(),
                      ComputeStats(ReadExamples(path, options)));
  }
  if (!a.tsv) {
    out << FormatStatsTable(rows);
    return kExitOk;
  }
  out << "dataset\tqueries\tmax_options\tavg_options\tavg_tokens\tvocab_size\n";
  for (const auto& [name, s] : rows) {
    out << name << '\t' << s.n_queries << '\t' << s.max_options << '\t'
        << FormatDouble(s.avg_options) << '\t' << FormatDouble(s.avg_tokens) << '\t'
        << s.vocab_size << '\n';
  }
  return kExitOk;
}

struct ValidateArgs {
  std::string data;
  std::size_t window = kDefaultWindow;
  bool no_answer = false;
};

int Validate(const ValidateArgs& a, std::ostream& out) {
  ReadOptions options;
  options.window = a.window;
  options.require_answer = !a.no_answer;
  const ValidationReport report = ValidateFile(a.data, options);
  for (const auto& v : report.violations) {
    out << a.data << ":" << v.line << ": example " << v.example_index << ": " << v.message << "\n";
  }
  out << "accepted " << report.accepted << ", violations " << report.violations.size() << "\n";
  return report.clean() ? kExitOk : kExitValidation;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string train;
  std::string valid;
  std::string config;
  std::string out;
  std::string resume;
  std::string log;
  std::size_t window = kDefaultWindow;
};

int TrainCommand(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const KeyValueConfig file = a.config.empty() ? KeyValueConfig() : KeyValueConfig::Load(a.config);
  const TrainConfig config = ReadTrainConfig(file);
  ModelConfig model_config = ReadModelSettings(file);

  ReadOptions read;
  read.window = a.window;
  const auto train_examples = ReadExamples(a.train, read);
  const auto valid_examples = ReadExamples(a.valid, read);

  std::optional<Model> model;
  Vocabulary vocab;
  std::optional<TrainingState> resume;
  if (!a.resume.empty()) {
    Checkpoint ck = LoadCheckpoint(a.resume);
    model_config.vocab_size = ck.model.config().vocab_size;
    if (!a.config.empty() && !(model_config == ck.model.config())) {
      throw ValidationError("model settings in " + a.config + " differ from checkpoint " +
                            a.resume);
    }
    resume = ImportTrainingState(ck.model, ck.extras);
    model.emplace(std::move(ck.model));
    vocab = std::move(ck.vocab);
  } else {
    vocab = BuildVocab(train_examples, config.vocab_cap);
    model_config.vocab_size = vocab.size();
    model.emplace(model_config);
    model->Initialize(MixSeed(config.seed, "init"));
  }

  const auto train = EncodeAll(train_examples, vocab, EncodeSeed(config.seed, "train"));
  // Same stream as `evaluate`, so its report on the validation file matches
  // the accuracies logged here.
  const auto valid = EncodeAll(valid_examples, vocab, EncodeSeed(config.seed, "eval"));

  const fs::path out_path = a.out;
  const fs::path log_path = a.log.empty() ? fs::path(a.out + ".log") : fs::path(a.log);
  const fs::path losses_path = a.out + ".losses";
  const bool append = resume.has_value();
  AppendOrTruncate(log_path, append, append ? "" : "step\ttrain_loss\tvalid_accuracy\twall_seconds\n");

  std::map<std::string, std::string> metadata;
  for (const auto& [k, v] : file.entries()) metadata["config." + k] = v;
  metadata["seed"] = std::to_string(config.seed);

  TrainOptions options;
  options.resume = resume ? &*resume : nullptr;
  options.on_evaluation = [&](const TrainLogEntry& entry, bool is_best) {
    const std::string line = FormatLogEntry(entry) + "\n";
    AppendOrTruncate(log_path, true, line);
    out << line << std::flush;
    if (is_best) {
      auto meta = metadata;
      meta["valid_accuracy"] = FormatDouble(entry.valid_accuracy);
      meta["step"] = std::to_string(entry.step);
      SaveCheckpoint(out_path, *model, vocab, meta);
    }
  };
  options.on_divergence = [&](const Model& m) {
    const fs::path diag = a.out + ".diverged";
    SaveCheckpoint(diag, m, vocab, metadata);
    err << "error: training diverged; model at the failing step saved to " << diag.string()
        << "\n";
  };

  const std::size_t first_step = resume ? resume->steps : 0;
  const TrainResult result = Train(*model, train, valid, config, options);

  std::string losses;
  for (std::size_t i = 0; i < result.step_losses.size(); ++i) {
    losses += std::to_string(first_step + i + 1) + "\t" + FormatDouble(result.step_losses[i]) + "\n";
  }
  AppendOrTruncate(losses_path, append, losses);
  SaveCheckpoint(a.out + ".last", *model, vocab, metadata,
                 ExportTrainingState(*model, result.final_state));

  out << "best validation accuracy " << Fixed(100.0 * result.best_accuracy, 2) << "% at evaluation "
      << result.best_evaluation + 1 << (result.stopped_early ? " (stopped early)" : "") << "\n";
  return kExitOk;
}

// --- evaluate / select-ensemble ---------------------------------------------

struct MemberOutput {
  std::vector<Prediction> predictions;
  std::vector<EncodedExample> encoded;
};

// Predictions of one checkpoint. Without an explicit seed the training seed
// recorded in the checkpoint is used. When `reference` is given, candidate
// ids are replaced by the reference encoding's ids: candidate order comes
// from the example itself, so positions agree even when vocabularies differ.
MemberOutput PredictWithCheckpoint(const fs::path& path, const std::vector<ClozeExample>& examples,
                                   std::optional<std::uint64_t> seed, std::size_t batch_size,
                                   const std::vector<EncodedExample>* reference) {
  const Checkpoint ck = LoadCheckpoint(path);
  if (!seed) {
    KeyValueConfig meta;
    if (const auto it = ck.metadata.find("seed"); it != ck.metadata.end()) meta.Set("seed", it->second);
    seed = meta.GetUint64("seed", 1);
  }
  MemberOutput result;
  result.encoded = EncodeAll(examples, ck.vocab, EncodeSeed(*seed, "eval"));
  result.predictions = PredictAll(ck.model, result.encoded, batch_size);
  if (reference) {
    for (std::size_t i = 0; i < result.predictions.size(); ++i) {
      result.predictions[i].candidates = (*reference)[i].candidates;
    }
  }
  return result;
}

struct EvaluateArgs {
  std::string model;
  std::string ensemble;
  std::string data;
  std::string predictions;
  std::string name;
  std::size_t window = kDefaultWindow;
  std::optional<std::uint64_t> seed;
  std::size_t batch_size = 64;
  bool tsv = false;
};

int Evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.model.empty() == a.ensemble.empty()) {
    throw ValidationError("pass exactly one of --model and --ensemble");
  }
  std::vector<std::string> members;
  if (!a.model.empty()) {
    members.push_back(a.model);
  } else {
    const EnsembleSpec spec = EnsembleSpec::Load(a.ensemble);
    // Relative member paths are taken relative to the ensemble file.
    for (const auto& m : spec.members) {
      const fs::path p(m);
      members.push_back(p.is_absolute() ? m : (fs::path(a.ensemble).parent_path() / p).string());
    }
  }

  ReadOptions read;
  read.window = a.window;
  const auto examples = ReadExamples(a.data, read);
  std::vector<MemberOutput> outputs;
  for (const auto& m : members) {
    outputs.push_back(PredictWithCheckpoint(m, examples, a.seed, a.batch_size,
                                            outputs.empty() ? nullptr : &outputs.front().encoded));
  }
  std::vector<Prediction> predictions;
  if (outputs.size() == 1) {
    predictions = std::move(outputs.front().predictions);
  } else {
    std::vector<const std::vector<Prediction>*> lists;
    for (const auto& o : outputs) lists.push_back(&o.predictions);
    predictions = AverageAll(lists);
  }

  const auto records = MakeRecords(predictions, examples);
  std::vector<bool> correct;
  for (const auto& r : records) correct.push_back(r.correct);
  EvalReport report =
      MakeReport(a.name.empty() ? fs::path(a.data).filename().string() : a.name, correct, examples);
  double chance = 0.0;
  for (const auto& ex : examples) chance += 1.0 / static_cast<double>(ex.candidates.size());
  if (!examples.empty()) chance /= static_cast<double>(examples.size());
  report.comparisons.push_back({"random", chance});
  report.comparisons.push_back({"most_frequent", MostFrequentCandidateAccuracy(examples)});
  out << (a.tsv ? report.FormatTsv() : report.Format());
  if (!a.predictions.empty()) WritePredictions(a.predictions, records);
  return kExitOk;
}

struct SelectArgs {
  std::vector<std::string> models;
  std::string valid;
  std::string out;
  std::size_t window = kDefaultWindow;
  std::optional<std::uint64_t> seed;
  std::size_t batch_size = 64;
};

int SelectEnsemble(const SelectArgs& a, std::ostream& out) {
  ReadOptions read;
  read.window = a.window;
  const auto examples = ReadExamples(a.valid, read);
  std::vector<ModelPredictions> candidates;
  std::vector<EncodedExample> reference;
  for (const auto& m : a.models) {
    MemberOutput o = PredictWithCheckpoint(m, examples, a.seed, a.batch_size,
                                           candidates.empty() ? nullptr : &reference);
    if (candidates.empty()) reference = std::move(o.encoded);
    candidates.push_back({m, std::move(o.predictions)});
  }
  const SelectionResult result = GreedySelect(candidates, AnswerIndices(reference));
  out << "model\tsingle_accuracy\tensemble_accuracy\tkept\n";
  for (const auto& t : result.trials) {
    out << t.name << '\t' << Fixed(100.0 * t.single_accuracy, 2) << '\t'
        << Fixed(100.0 * t.ensemble_accuracy, 2) << '\t' << (t.kept ? "yes" : "no") << '\n';
  }
  result.spec.Save(a.out);
  out << "selected " << result.spec.members.size() << " of " << candidates.size()
      << " models, validation accuracy " << Fixed(100.0 * result.spec.validation_accuracy, 2)
      << "%\n";
  return kExitOk;
}

// --- export-errors / union-accuracy -----------------------------------------

struct ExportArgs {
  std::string predictions;
  std::string data;
  std::size_t n = 50;
  std::uint64_t seed = 0;
  std::string questions;
  std::string key;
  std::size_t window = kDefaultWindow;
};

int ExportErrorsCommand(const ExportArgs& a, std::ostream& out, std::ostream& err) {
  ReadOptions read;
  read.window = a.window;
  const auto examples = ReadExamples(a.data, read);
  const auto records = ReadPredictions(a.predictions);
  if (records.size() != examples.size()) {
    throw ValidationError(a.predictions + " has " + std::to_string(records.size()) +
                          " predictions for " + std::to_string(examples.size()) + " examples");
  }
  const fs::path questions = a.questions.empty() ? fs::path(a.predictions + ".questions.txt")
                                                 : fs::path(a.questions);
  const fs::path key = a.key.empty() ? fs::path(a.predictions + ".key.txt") : fs::path(a.key);
  const ExportResult result = ExportErrors(records, examples, a.n, a.seed, questions, key);
  if (result.short_of_request) {
    err << "warning: only " << result.available << " incorrectly answered examples; exporting all\n";
  }
  out << "exported " << result.exported.size() << " questions to " << questions.string()
      << ", answer key in " << key.string() << "\n";
  return kExitOk;
}

struct UnionArgs {
  std::string a;
  std::string b;
  std::string data;
  std::size_t window = kDefaultWindow;
};

double RecordAccuracy(const std::vector<PredictionRecord>& records) {
  if (records.empty()) return 0.0;
  const auto correct = std::count_if(records.begin(), records.end(),
                                     [](const PredictionRecord& r) { return r.correct; });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

int UnionAccuracyCommand(const UnionArgs& a, std::ostream& out) {
  const auto ra = ReadPredictions(a.a);
  const auto rb = ReadPredictions(a.b);
  if (!a.data.empty()) {
    ReadOptions read;
    read.window = a.window;
    const std::size_t n = ReadExamples(a.data, read).size();
    if (ra.size() != n || rb.size() != n) {
      throw ValidationError("prediction files do not cover the " + std::to_string(n) +
                            " examples of " + a.data);
    }
  }
  const double u = UnionAccuracy(ra, rb);
  out << "accuracy_a\t" << FormatDouble(RecordAccuracy(ra)) << "\n";
  out << "accuracy_b\t" << FormatDouble(RecordAccuracy(rb)) << "\n";
  out << "union_accuracy\t" << FormatDouble(u) << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cloze dataset generation and attention-sum reader training", "clozekit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build train/valid/test cloze files from books");
  generate->add_option("--books", gen.books, "Directory of plain-text books")
      ->required()
      ->check(CLI::ExistingDirectory);
  generate->add_option("--type", gen.type, "Answer word type: ne or cn")->required();
  generate->add_option("--window", gen.window, "Context sentences per question")
      ->capture_default_str();
  generate->add_option("--stride", gen.stride, "Sentence step between questions")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed for the split and candidate draws")
      ->capture_default_str();
  generate->add_option("--splits", gen.splits, "Train,valid,test fractions of books")
      ->capture_default_str();
  generate->add_option("--blocklist", gen.blocklist, "Titles to exclude, one per line")
      ->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--tags", gen.tags, "Directory of <book_id>.tags files from an external tagger")
      ->check(CLI::ExistingDirectory);
  generate->add_option("--nouns", gen.nouns, "Common-noun lexicon")->check(CLI::ExistingFile);
  generate->add_option("--stopwords", gen.stopwords, "Stopword list")->check(CLI::ExistingFile);
  generate->add_option("--honorifics", gen.honorifics, "Honorific list")->check(CLI::ExistingFile);
  generate->add_option("--markers", gen.markers, "Boilerplate start/end markers")
      ->check(CLI::ExistingFile);

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Dataset statistics table");
  stats->add_option("--data", st.data, "Cloze files")->required()->check(CLI::ExistingFile);
  stats->add_option("--window", st.window, "Context lines per example, 0 for any")
      ->capture_default_str();
  stats->add_flag("--tsv", st.tsv, "Tab-separated output");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check every example of a cloze file");
  validate->add_option("--data", va.data, "Cloze file")->required()->check(CLI::ExistingFile);
  validate->add_option("--window", va.window, "Context lines per example, 0 for any")
      ->capture_default_str();
  validate->add_flag("--no-answer", va.no_answer, "Accept an empty answer field");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train an attention-sum reader");
  train->add_option("--train", tr.train, "Training cloze file")->required()->check(CLI::ExistingFile);
  train->add_option("--valid", tr.valid, "Validation cloze file")->required()->check(CLI::ExistingFile);
  train->add_option("--config", tr.config, "key=value settings")->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "Best checkpoint path")->required();
  train->add_option("--resume", tr.resume, "Continue from a .last checkpoint")
      ->check(CLI::ExistingFile);
  train->add_option("--log", tr.log, "Evaluation log (default <out>.log)");
  train->add_option("--window", tr.window, "Context lines per example, 0 for any")
      ->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy report for a model or an ensemble");
  auto* model_opt = evaluate->add_option("--model", ev.model, "Checkpoint")->check(CLI::ExistingFile);
  auto* ens_opt =
      evaluate->add_option("--ensemble", ev.ensemble, "Ensemble spec")->check(CLI::ExistingFile);
  model_opt->excludes(ens_opt);
  evaluate->add_option("--data", ev.data, "Cloze file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", ev.predictions, "Write per-example predictions here");
  evaluate->add_option("--name", ev.name, "Dataset label in the report");
  evaluate->add_option("--window", ev.window, "Context lines per example, 0 for any")
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed,
                       "Seed for unknown-word assignment (default: the training seed)");
  evaluate->add_option("--batch-size", ev.batch_size, "Examples per forward pass")
      ->capture_default_str();
  evaluate->add_flag("--tsv", ev.tsv, "Tab-separated output");

  SelectArgs se;
  auto* select = app.add_subcommand("select-ensemble", "Greedy ensemble selection on validation data");
  select->add_option("--models", se.models, "Candidate checkpoints")
      ->required()
      ->check(CLI::ExistingFile);
  select->add_option("--valid", se.valid, "Validation cloze file")->required()->check(CLI::ExistingFile);
  select->add_option("--out", se.out, "Ensemble spec to write")->required();
  select->add_option("--window", se.window, "Context lines per example, 0 for any")
      ->capture_default_str();
  select->add_option("--seed", se.seed,
                     "Seed for unknown-word assignment (default: each training seed)");
  select->add_option("--batch-size", se.batch_size, "Examples per forward pass")
      ->capture_default_str();

  ExportArgs ex;
  auto* export_errors =
      app.add_subcommand("export-errors", "Sample wrongly answered questions for a human study");
  export_errors->add_option("--predictions", ex.predictions, "Predictions file")
      ->required()
      ->check(CLI::ExistingFile);
  export_errors->add_option("--data", ex.data, "Cloze file the predictions refer to")
      ->required()
      ->check(CLI::ExistingFile);
  export_errors->add_option("--n", ex.n, "Questions to export")->capture_default_str();
  export_errors->add_option("--seed", ex.seed, "Sampling seed")->capture_default_str();
  export_errors->add_option("--questions", ex.questions, "Question file (answers withheld)");
  export_errors->add_option("--key", ex.key, "Answer key file");
  export_errors->add_option("--window", ex.window, "Context lines per example, 0 for any")
      ->capture_default_str();

  UnionArgs un;
  auto* union_acc =
      app.add_subcommand("union-accuracy", "Fraction answered correctly by either source");
  union_acc->add_option("--predictions-a", un.a, "First predictions file")
      ->required()
      ->check(CLI::ExistingFile);
  union_acc->add_option("--predictions-b", un.b, "Second predictions file")
      ->required()
      ->check(CLI::ExistingFile);
  union_acc->add_option("--data", un.data, "Cloze file, to check coverage")->check(CLI::ExistingFile);
  union_acc->add_option("--window", un.window, "Context lines per example, 0 for any")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*generate) return Generate(gen, out, err);
    if (*stats) return Stats(st, out);
    if (*validate) return Validate(va, out);
    if (*train) return TrainCommand(tr, out, err);
    if (*evaluate) return Evaluate(ev, out);
    if (*select) return SelectEnsemble(se, out);
    if (*export_errors) return ExportErrorsCommand(ex, out, err);
    if (*union_acc) return UnionAccuracyCommand(un, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const EmptyCorpusError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace clozekit::cli
