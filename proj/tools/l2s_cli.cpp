// Command line front end: train, test, bench, gen.
//
// Exit codes: 0 ok, 2 usage error, 3 data error, 4 model error.

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "l2s/l2s.hpp"

using namespace l2s;

namespace {

struct CommonFlags {
  std::string task = "seq";
  std::string data;
  std::string model_path;
  uint64_t seed = 1;
  bool counters = false;
  int label_column = -1;
  std::string neighbor = "0:w,-1:w,1:w";
  std::string affix;
  int markov_order = 1;
  double false_negative_loss = 5.0;
  std::string relations_path;
};

struct TrainFlags {
  std::string algorithm = "lols";
  std::string rollin = "auto";
  std::string rollout = "auto";
  double passes = 1.0;
  double subsample = 1.0;
  double interpolation = 1e-8;
  double rollout_mix_prob = 0.5;
  int collapse = 0;
  bool no_cache = false;
  bool update_per_example = false;
  uint32_t bits = 18;
  double learning_rate = 0.5;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool need_model) {
  cmd->add_option("--task", f.task, "Task: seq, bio, detect, entrel or dep")
      ->default_val("seq")
      ->check(CLI::IsMember({"seq", "bio", "detect", "entrel", "dep"}));
  cmd->add_option("--data", f.data, "Input corpus path")->required();
  auto* m = cmd->add_option("--model", f.model_path, "Model file path");
  if (need_model) m->required();
  cmd->add_option("--seed", f.seed, "Random seed")->default_val(1);
  cmd->add_flag("--counters", f.counters, "Print the instrumentation counters");
  cmd->add_option("--label-column", f.label_column,
                  "Gold label column, negative counts from the end")
      ->default_val(-1);
  cmd->add_option("--neighbor", f.neighbor, "Neighbor feature templates, e.g. -1:w,1:w")
      ->default_val("0:w,-1:w,1:w");
  cmd->add_option("--affix", f.affix, "Affix templates, e.g. -2w,+2w")->default_val("");
  cmd->add_option("--markov-order", f.markov_order,
                  "Previous predictions used as features (seq/bio)")
      ->default_val(1);
  cmd->add_option("--fnl", f.false_negative_loss, "False negative loss (detect)")
      ->default_val(5.0);
  cmd->add_option("--relations", f.relations_path, "Relation constraint table (entrel)");
}

void add_trainer_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--algorithm", f.algorithm, "Learning algorithm: dagger, searn or lols")
      ->default_val("lols")
      ->check(CLI::IsMember({"dagger", "searn", "lols"}));
  cmd->add_option("--rollin", f.rollin, "Rollin policy: learned or mix")
      ->default_val("auto")
      ->check(CLI::IsMember({"auto", "learned", "mix"}));
  cmd->add_option("--rollout", f.rollout, "Rollout policy: ref, learned, mix or none")
      ->default_val("auto")
      ->check(CLI::IsMember({"auto", "ref", "learned", "mix", "none"}));
  cmd->add_option("--passes", f.passes, "Training passes; below 1 subsamples one pass")
      ->default_val(1.0);
  cmd->add_option("--subsample", f.subsample, "Keep rate for deviation positions")
      ->default_val(1.0);
  cmd->add_option("--interpolation", f.interpolation, "Reference decay rate beta")
      ->default_val(1e-8);
  cmd->add_option("--rollout-mix-prob", f.rollout_mix_prob,
                  "P(reference) per deviation under mixed rollouts")
      ->default_val(0.5);
  cmd->add_option("--collapse", f.collapse, "Rollout collapse horizon, 0 disables")
      ->default_val(0);
  cmd->add_flag("--no-cache", f.no_cache, "Disable prediction memoization");
  cmd->add_flag("--update-per-example", f.update_per_example,
                "Batch updates until each example finishes");
  cmd->add_option("--bits", f.bits, "Feature hash bits")->default_val(18);
  cmd->add_option("--learning-rate", f.learning_rate, "AdaGrad learning rate")
      ->default_val(0.5);
}

TrainerConfig resolve_trainer_config(const TrainFlags& f, uint64_t seed) {
  TrainerConfig cfg;
  cfg.algorithm = f.algorithm == "dagger" ? Algorithm::Dagger
                  : f.algorithm == "searn" ? Algorithm::Searn
                                           : Algorithm::Lols;
  std::string rollin = f.rollin;
  if (rollin == "auto") rollin = cfg.algorithm == Algorithm::Lols ? "learned" : "mix";
  std::string rollout = f.rollout;
  if (rollout == "auto") rollout = cfg.algorithm == Algorithm::Dagger ? "none" : "mix";

  cfg.rollin_source = rollin == "mix" ? RollinSource::Mix : RollinSource::Learned;
  cfg.rollout_source = rollout == "ref"       ? RolloutSource::Reference
                       : rollout == "learned" ? RolloutSource::Learned
                       : rollout == "none"    ? RolloutSource::None
                                              : RolloutSource::Mix;
  cfg.interpolation = f.interpolation;
  cfg.rollout_mix_prob = f.rollout_mix_prob;
  if (f.collapse > 0) cfg.collapse_h = f.collapse;
  cfg.subsample = f.subsample;
  cfg.passes = f.passes;
  cfg.update_per_example = f.update_per_example;
  cfg.cache_enabled = !f.no_cache;
  cfg.seed = seed;
  validate_config(cfg);
  return cfg;
}

std::string algorithm_name(const TrainerConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Dagger: return "dagger";
    case Algorithm::Searn: return "searn";
    case Algorithm::Lols: return "lols";
  }
  return "?";
}

void echo_config(std::ostream& out, const CommonFlags& c, const TrainerConfig& cfg,
                 uint32_t bits, double eta) {
  out << "task=" << c.task << '\n'
      << "algorithm=" << algorithm_name(cfg) << '\n'
      << "rollin=" << (cfg.rollin_source == RollinSource::Mix ? "mix" : "learned") << '\n'
      << "rollout="
      << (cfg.rollout_source == RolloutSource::Reference ? "ref"
          : cfg.rollout_source == RolloutSource::Learned ? "learned"
          : cfg.rollout_source == RolloutSource::None    ? "none"
                                                         : "mix")
      << '\n'
      << "passes=" << cfg.passes << '\n'
      << "subsample=" << cfg.subsample << '\n'
      << "interpolation=" << cfg.interpolation << '\n'
      << "rollout_mix_prob=" << cfg.rollout_mix_prob << '\n'
      << "collapse=" << (cfg.collapse_h ? *cfg.collapse_h : 0) << '\n'
      << "cache=" << (cfg.cache_enabled ? 1 : 0) << '\n'
      << "update_per_example=" << (cfg.update_per_example ? 1 : 0) << '\n'
      << "bits=" << bits << '\n'
      << "eta=" << eta << '\n'
      << "seed=" << cfg.seed << '\n';
}

TemplateSpec build_templates(const CommonFlags& c) {
  TemplateSpec spec;
  parse_neighbor_spec(c.neighbor, spec);
  parse_affix_spec(c.affix, spec);
  return spec;
}

// Feature templates must never read the gold label column.
void check_template_columns(const TemplateSpec& spec, int ncols, int label_column) {
  int lc = label_column < 0 ? ncols + label_column : label_column;
  for (const auto& nb : spec.neighbors)
    if (static_cast<int>(nb.column) >= ncols || static_cast<int>(nb.column) == lc)
      throw ConfigError("template namespace '" + nb.ns + "' reads column " +
                        std::to_string(nb.column) + ", which is missing or the label column");
  for (const auto& af : spec.affixes)
    if (static_cast<int>(af.column) >= ncols || static_cast<int>(af.column) == lc)
      throw ConfigError("affix namespace '" + af.ns + "' reads column " +
                        std::to_string(af.column) + ", which is missing or the label column");
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const std::string& out_path, const SynthConfig& cfg) {
  LabelDict labels;
  auto corpus = gen_markov_corpus(cfg, labels);
  write_conll(out_path, corpus);
  std::cout << "sentences=" << corpus.size() << '\n'
            << "tokens=" << corpus.size() * static_cast<size_t>(cfg.length) << '\n'
            << "labels=" << labels.size() << '\n'
            << "out=" << out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct SeqWorld {
  LabelDict labels;
  std::vector<Sentence> corpus;
  SequenceTaskConfig cfg;
  std::unique_ptr<BioInventory> bio;

  void init(const CommonFlags& c, uint32_t bits, bool bio_constraint) {
    corpus = read_conll(c.data, c.label_column, labels);
    if (corpus.empty()) throw DataError("corpus is empty: " + c.data);
    check_template_columns(build_templates(c), static_cast<int>(corpus[0].tokens[0].columns.size()),
                           c.label_column);
    cfg.markov_order = c.markov_order;
    cfg.templates = build_templates(c);
    cfg.bits = bits;
    cfg.labels = &labels;
    if (bio_constraint) {
      bio = std::make_unique<BioInventory>(labels);
      const BioInventory* inv = bio.get();
      cfg.constraint = [inv](int prev) { return bio_valid_labels(prev, *inv); };
    }
  }
};

struct ErWorld {
  LabelDict entity_types;
  LabelDict relation_types;
  RelationConstraintTable table;
  std::vector<ErRecord> records;
  ErTaskConfig cfg;

  void init(const CommonFlags& c, uint32_t bits) {
    if (c.relations_path.empty())
      throw ConfigError("--task entrel needs --relations TABLE");
    records = read_er_jsonl(c.data, entity_types, relation_types);
    table = RelationConstraintTable::load(c.relations_path, entity_types, relation_types);
    table.num_entity_types = entity_types.size();
    cfg.bits = bits;
    cfg.entity_types = &entity_types;
    cfg.relation_types = &relation_types;
    cfg.table = &table;
  }

  // entity and relation names share the model label table, prefixed apart
  LabelDict combined_labels() const {
    LabelDict combined;
    for (const auto& name : entity_types.names) combined.intern("E:" + name);
    for (const auto& name : relation_types.names) combined.intern("R:" + name);
    return combined;
  }
};

LabelDict dep_action_labels() {
  LabelDict labels;
  labels.intern("shift");
  labels.intern("right");
  labels.intern("left");
  return labels;
}

int cmd_train(const CommonFlags& c, const TrainFlags& tf) {
  TrainerConfig cfg = resolve_trainer_config(tf, c.seed);
  auto started = std::chrono::steady_clock::now();

  TrainStats stats;
  LabelDict model_labels;
  std::unique_ptr<LinearCSModel> model;

  if (c.task == "seq" || c.task == "bio") {
    SeqWorld world;
    world.init(c, tf.bits, c.task == "bio");
    model = std::make_unique<LinearCSModel>(tf.bits, world.labels.size(), tf.learning_rate);
    model_labels = world.labels;
    auto make_run = [&world](const Sentence& sent) {
      return [&world, &sent](Session& s) { run_sequence(s, sent, world.cfg); };
    };
    stats = train_corpus(world.corpus, make_run, true, *model, cfg);
  } else if (c.task == "detect") {
    SeqWorld world;
    world.init(c, tf.bits, false);
    DetectionTaskConfig dcfg;
    dcfg.templates = world.cfg.templates;
    dcfg.bits = tf.bits;
    dcfg.labels = &world.labels;
    dcfg.false_negative_loss = c.false_negative_loss;
    dcfg.label_values();  // validate up front
    model = std::make_unique<LinearCSModel>(tf.bits, world.labels.size(), tf.learning_rate);
    model_labels = world.labels;
    auto make_run = [&dcfg](const Sentence& sent) {
      return [&dcfg, &sent](Session& s) { run_detection(s, sent, dcfg); };
    };
    stats = train_corpus(world.corpus, make_run, false, *model, cfg);
  } else if (c.task == "entrel") {
    ErWorld world;
    world.init(c, tf.bits);
    model = std::make_unique<LinearCSModel>(tf.bits, world.cfg.num_actions(), tf.learning_rate);
    model_labels = world.combined_labels();
    auto make_run = [&world](const ErRecord& rec) {
      return [&world, &rec](Session& s) { run_entity_relation(s, rec, world.cfg); };
    };
    stats = train_corpus(world.records, make_run, true, *model, cfg);
  } else if (c.task == "dep") {
    auto all = read_dep_corpus(c.data);
    std::vector<DepSentence> projective;
    for (auto& sent : all) {
      if (is_projective(sent.gold_heads))
        projective.push_back(std::move(sent));
      else
        std::cerr << "warning: skipping non-projective sentence\n";
    }
    if (projective.empty()) throw DataError("no projective sentences in " + c.data);
    model = std::make_unique<LinearCSModel>(tf.bits, kNumDepActions, tf.learning_rate);
    model_labels = dep_action_labels();
    DepTaskConfig dcfg;
    dcfg.bits = tf.bits;
    auto make_run = [dcfg](const DepSentence& sent) {
      return [dcfg, &sent](Session& s) { run_dep_parser(s, sent, dcfg); };
    };
    stats = train_corpus(projective, make_run, false, *model, cfg);
  } else {
    throw ConfigError("unknown task: " + c.task);
  }

  if (c.model_path.empty()) throw ConfigError("train needs --model OUT");
  save_model(*model, model_labels, c.model_path);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  echo_config(std::cout, c, cfg, tf.bits, tf.learning_rate);
  std::cout << "examples=" << stats.examples_seen << '\n'
            << "epochs=" << stats.epochs << '\n'
            << "rollin_loss=" << stats.rollin_loss << '\n'
            << "last_epoch_rollin_loss=" << stats.last_epoch_rollin_loss << '\n'
            << "model=" << c.model_path << '\n'
            << "model_hash=" << std::hex << fnv_file_hash(c.model_path) << std::dec << '\n';
  if (c.counters) std::cout << stats.counters;
  std::cout << "train_time_s=" << std::fixed << std::setprecision(3) << wall << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// test

// Decode sentences [0,n) across workers; results land by index, so the output
// is identical at any thread count.
template <typename DecodeFn>
void decode_indexed(size_t n, int threads, DecodeFn&& decode) {
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) decode(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) decode(i);
    });
  for (auto& t : pool) t.join();
}

int cmd_test(const CommonFlags& c, const std::string& output_path, const std::string& metric,
             int decode_threads) {
  LoadedModel lm = load_model(c.model_path);
  auto started = std::chrono::steady_clock::now();
  Counters counters;
  size_t tokens = 0;
  std::ostringstream report;

  std::ofstream preds;
  if (!output_path.empty()) {
    preds.open(output_path);
    if (!preds) throw DataError("cannot write predictions: " + output_path);
  }

  if (c.task == "seq" || c.task == "bio" || c.task == "detect") {
    LabelDict labels = lm.labels;
    auto corpus = read_conll(c.data, c.label_column, labels);
    if (labels.size() > lm.model.num_actions)
      throw ModelError("corpus has " + std::to_string(labels.size()) +
                       " labels but the model was trained with " +
                       std::to_string(lm.model.num_actions) +
                       "; label tables do not match");
    if (!corpus.empty())
      check_template_columns(build_templates(c),
                             static_cast<int>(corpus[0].tokens[0].columns.size()),
                             c.label_column);

    SequenceTaskConfig scfg;
    scfg.markov_order = c.markov_order;
    scfg.templates = build_templates(c);
    scfg.bits = lm.model.bits;
    scfg.labels = &labels;
    std::unique_ptr<BioInventory> bio;
    if (c.task == "bio") {
      bio = std::make_unique<BioInventory>(labels);
      const BioInventory* inv = bio.get();
      scfg.constraint = [inv](int prev) { return bio_valid_labels(prev, *inv); };
    }
    DetectionTaskConfig dcfg;
    dcfg.templates = scfg.templates;
    dcfg.bits = lm.model.bits;
    dcfg.labels = &labels;
    dcfg.false_negative_loss = c.false_negative_loss;

    std::vector<std::vector<int>> outputs(corpus.size());
    std::vector<int> max_preds(corpus.size(), 0);  // detection's per-sentence output
    std::vector<double> losses(corpus.size(), 0.0);
    std::vector<Counters> per_sent(corpus.size());
    decode_indexed(corpus.size(), decode_threads, [&](size_t i) {
      if (c.task == "detect")
        losses[i] = test_decode(
            [&](Session& s) { max_preds[i] = run_detection(s, corpus[i], dcfg); }, lm.model,
            &per_sent[i]);
      else
        losses[i] = test_decode(
            [&](Session& s) { outputs[i] = run_sequence(s, corpus[i], scfg); }, lm.model,
            &per_sent[i]);
    });
    for (size_t i = 0; i < corpus.size(); ++i) {
      counters += per_sent[i];
      tokens += corpus[i].size();
    }

    double total_loss = 0.0;
    for (double l : losses) total_loss += l;
    report << "sentences=" << corpus.size() << '\n' << "tokens=" << tokens << '\n';
    report << "loss_total=" << total_loss << '\n';

    if (c.task != "detect") {
      long correct = 0;
      for (size_t i = 0; i < corpus.size(); ++i)
        for (size_t t = 0; t < corpus[i].size(); ++t)
          correct += outputs[i][t] == corpus[i].gold_labels[t];
      report << "hamming_accuracy=" << std::setprecision(6) << std::fixed
             << static_cast<double>(correct) / tokens << '\n';
    }
    if (c.task == "bio") {
      std::vector<std::vector<std::string>> pred_names(corpus.size()), gold_names(corpus.size());
      for (size_t i = 0; i < corpus.size(); ++i)
        for (size_t t = 0; t < corpus[i].size(); ++t) {
          pred_names[i].push_back(labels.names[outputs[i][t]]);
          gold_names[i].push_back(labels.names[corpus[i].gold_labels[t]]);
        }
      PRF prf = span_f1(pred_names, gold_names,
                        metric == "micro" ? Averaging::Micro : Averaging::Macro);
      report << "span_f1=" << prf.f1 << '\n'
             << "span_precision=" << prf.precision << '\n'
             << "span_recall=" << prf.recall << '\n'
             << "span_averaging=" << metric << '\n';
    }
    if (c.task == "detect") {
      long hits = 0;
      for (double l : losses) hits += l == 0.0;
      report << "loss_mean=" << std::setprecision(6) << std::fixed
             << total_loss / corpus.size() << '\n'
             << "detect_accuracy=" << static_cast<double>(hits) / corpus.size() << '\n';
    }
    if (preds.is_open()) {
      // input columns plus the prediction appended, gold kept in place; for
      // detection the sentence-level max prediction repeats on every token
      for (size_t i = 0; i < corpus.size(); ++i) {
        for (size_t t = 0; t < corpus[i].size(); ++t) {
          for (const auto& col : corpus[i].tokens[t].columns) preds << col << ' ';
          preds << (c.task == "detect" ? std::to_string(max_preds[i])
                                       : labels.names[outputs[i][t]])
                << '\n';
        }
        preds << '\n';
      }
    }
  } else if (c.task == "entrel") {
    if (c.relations_path.empty()) throw ConfigError("--task entrel needs --relations TABLE");
    // reconstruct the two dictionaries from the prefixed model label table
    LabelDict entity_types, relation_types;
    for (const auto& name : lm.labels.names) {
      if (name.rfind("E:", 0) == 0)
        entity_types.intern(name.substr(2));
      else if (name.rfind("R:", 0) == 0)
        relation_types.intern(name.substr(2));
      else
        throw ModelError("model label table is not an entrel table (saw '" + name + "')");
    }
    int known_entities = entity_types.size();
    int known_relations = relation_types.size();
    auto records = read_er_jsonl(c.data, entity_types, relation_types);
    if (entity_types.size() > known_entities || relation_types.size() > known_relations)
      throw ModelError("corpus types missing from the model label table");
    RelationConstraintTable table =
        RelationConstraintTable::load(c.relations_path, entity_types, relation_types);
    table.num_entity_types = entity_types.size();
    if (entity_types.size() > known_entities || relation_types.size() > known_relations)
      throw ModelError("relation table types missing from the model label table");

    ErTaskConfig ecfg;
    ecfg.bits = lm.model.bits;
    ecfg.entity_types = &entity_types;
    ecfg.relation_types = &relation_types;
    ecfg.table = &table;

    std::vector<ErOutput> outputs(records.size());
    std::vector<Counters> per_rec(records.size());
    decode_indexed(records.size(), decode_threads, [&](size_t i) {
      test_decode([&](Session& s) { outputs[i] = run_entity_relation(s, records[i], ecfg); },
                  lm.model, &per_rec[i]);
    });

    std::vector<std::vector<int>> pred_types(records.size()), gold_types(records.size());
    std::vector<std::vector<RelationInstance>> pred_rels(records.size()),
        gold_rels(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
      counters += per_rec[i];
      tokens += records[i].entities.size();
      for (size_t n = 0; n < records[i].entities.size(); ++n) {
        pred_types[i].push_back(outputs[i].entity_types[n]);
        gold_types[i].push_back(records[i].entities[n].gold_type);
      }
      for (const auto& [pair, rel] : outputs[i].relation_types) {
        pred_rels[i].push_back({pair.first, pair.second, rel});
        gold_rels[i].push_back(
            {pair.first, pair.second,
             records[i].gold_relation(pair.first, pair.second, table.none_id)});
      }
    }
    PRF ent = micro_f1_entities(pred_types, gold_types);
    PRF rel = micro_f1_relations(pred_rels, gold_rels, table.none_id);
    report << "records=" << records.size() << '\n'
           << "entities=" << tokens << '\n'
           << std::setprecision(6) << std::fixed
           << "entity_f1=" << ent.f1 << '\n'
           << "relation_f1=" << rel.f1 << '\n'
           << "relation_precision=" << rel.precision << '\n'
           << "relation_recall=" << rel.recall << '\n';

    if (preds.is_open()) {
      for (size_t i = 0; i < records.size(); ++i) {
        nlohmann::json j;
        j["entities"] = nlohmann::json::array();
        for (size_t n = 0; n < records[i].entities.size(); ++n)
          j["entities"].push_back({{"span", records[i].entities[n].span},
                                   {"gold_type", entity_types.names[gold_types[i][n]]},
                                   {"type", entity_types.names[pred_types[i][n]]}});
        j["relations"] = nlohmann::json::array();
        for (const auto& r : pred_rels[i])
          if (r.type != table.none_id)
            j["relations"].push_back({{"arg1", r.arg1},
                                      {"arg2", r.arg2},
                                      {"gold_type",
                                       relation_types.names[records[i].gold_relation(
                                           r.arg1, r.arg2, table.none_id)]},
                                      {"type", relation_types.names[r.type]}});
        preds << j.dump() << '\n';
      }
    }
  } else if (c.task == "dep") {
    if (lm.model.num_actions != kNumDepActions)
      throw ModelError("model was not trained for the dep task");
    auto all = read_dep_corpus(c.data);
    std::vector<DepSentence> corpus;
    for (auto& sent : all)
      if (is_projective(sent.gold_heads)) corpus.push_back(std::move(sent));
    if (corpus.empty()) throw DataError("no projective sentences in " + c.data);

    DepTaskConfig dcfg;
    dcfg.bits = lm.model.bits;
    std::vector<std::vector<int>> heads(corpus.size());
    std::vector<Counters> per_sent(corpus.size());
    decode_indexed(corpus.size(), decode_threads, [&](size_t i) {
      test_decode([&](Session& s) { heads[i] = run_dep_parser(s, corpus[i], dcfg); }, lm.model,
                  &per_sent[i]);
    });

    long correct = 0;
    for (size_t i = 0; i < corpus.size(); ++i) {
      counters += per_sent[i];
      tokens += corpus[i].words.size() - 1;
      for (size_t w = 1; w < corpus[i].words.size(); ++w)
        correct += heads[i][w] == corpus[i].gold_heads[w];
    }
    report << "sentences=" << corpus.size() << '\n'
           << "tokens=" << tokens << '\n'
           << std::setprecision(6) << std::fixed
           << "uas=" << static_cast<double>(correct) / tokens << '\n';

    if (preds.is_open()) {
      for (size_t i = 0; i < corpus.size(); ++i) {
        for (size_t w = 1; w < corpus[i].words.size(); ++w)
          preds << corpus[i].words[w] << ' ' << corpus[i].gold_heads[w] << ' ' << heads[i][w]
                << '\n';
        preds << '\n';
      }
    }
  } else {
    throw ConfigError("unknown task: " + c.task);
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cout << report.str();
  if (c.counters) std::cout << counters;
  std::cout << "decode_threads=" << decode_threads << '\n';
  std::cout << "test_time_s=" << std::fixed << std::setprecision(3) << wall << '\n'
            << "tokens_per_s=" << std::setprecision(0)
            << (wall > 0 ? static_cast<double>(tokens) / wall : 0.0) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const CommonFlags& c, const TrainFlags& tf, const std::string& eval_path) {
  if (c.task != "seq" && c.task != "bio")
    throw ConfigError("bench compares collapse settings, which need a sequence task");
  TrainerConfig cfg = resolve_trainer_config(tf, c.seed);
  if (cfg.rollout_source == RolloutSource::None)
    throw ConfigError("bench needs rollouts; dagger gains nothing from these optimizations");

  SeqWorld train_world;
  train_world.init(c, tf.bits, c.task == "bio");

  CommonFlags eval_flags = c;
  eval_flags.data = eval_path.empty() ? c.data : eval_path;
  SeqWorld eval_world;
  {
    // share the training label dictionary so ids line up
    eval_world.labels = train_world.labels;
    eval_world.corpus = read_conll(eval_flags.data, c.label_column, eval_world.labels);
    if (eval_world.labels.size() > train_world.labels.size())
      throw DataError("evaluation corpus has labels unseen in training");
    eval_world.cfg = train_world.cfg;
    eval_world.cfg.labels = &eval_world.labels;
    if (c.task == "bio") {
      eval_world.bio = std::make_unique<BioInventory>(eval_world.labels);
      const BioInventory* inv = eval_world.bio.get();
      eval_world.cfg.constraint = [inv](int prev) { return bio_valid_labels(prev, *inv); };
    }
  }

  auto make_run = [&train_world](const Sentence& sent) {
    return [&train_world, &sent](Session& s) { run_sequence(s, sent, train_world.cfg); };
  };
  auto fresh_model = [&]() {
    return LinearCSModel(tf.bits, train_world.labels.size(), tf.learning_rate);
  };
  auto evaluate = [&](const LinearCSModel& model) {
    long correct = 0, total = 0;
    for (const auto& sent : eval_world.corpus) {
      std::vector<int> out;
      test_decode([&](Session& s) { out = run_sequence(s, sent, eval_world.cfg); }, model);
      for (size_t t = 0; t < out.size(); ++t) {
        correct += out[t] == sent.gold_labels[t];
        ++total;
      }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  };

  echo_config(std::cout, c, cfg, tf.bits, tf.learning_rate);
  auto rows = run_bench(train_world.corpus, make_run, true, fresh_model, evaluate, cfg);
  for (const auto& row : rows) {
    std::cout << "row=" << row.name << " time_s=" << std::fixed << std::setprecision(3)
              << row.train_seconds << " policy_calls=" << row.counters.policy_calls
              << " memo_hits=" << row.counters.memo_hits
              << " rollout_steps=" << row.counters.rollout_steps
              << " cs_examples=" << row.counters.cs_examples << " accuracy=" << std::setprecision(6)
              << row.metric << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning-to-search structured prediction"};
  app.require_subcommand(1);

  CommonFlags train_common, test_common, bench_common;
  TrainFlags train_flags, bench_flags;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic Markov-chain corpus");
  std::string gen_out;
  SynthConfig gen_cfg;
  gen->add_option("--out", gen_out, "Output corpus path")->required();
  gen->add_option("--k", gen_cfg.k, "Label count")->default_val(5);
  gen->add_option("--length", gen_cfg.length, "Tokens per sentence")->default_val(20);
  gen->add_option("--num", gen_cfg.num_sentences, "Sentence count")->default_val(100);
  gen->add_option("--noise", gen_cfg.emission_noise, "Emission noise rate")->default_val(0.3);
  gen->add_option("--trans", gen_cfg.trans_prob, "P(next = cur+1 mod k)")->default_val(0.8);
  gen->add_option("--seed", gen_cfg.seed, "Random seed")->default_val(1);

  auto* train = app.add_subcommand("train", "Train a model");
  add_common_flags(train, train_common, true);
  add_trainer_flags(train, train_flags);

  auto* test = app.add_subcommand("test", "Decode a corpus and report metrics");
  add_common_flags(test, test_common, true);
  std::string output_path, metric = "macro";
  int decode_threads = 1;
  test->add_option("--output", output_path, "Write predictions here");
  test->add_option("--metric", metric, "Span averaging: macro or micro")
      ->default_val("macro")
      ->check(CLI::IsMember({"macro", "micro"}));
  test->add_option("--decode-threads", decode_threads, "Concurrent decode workers")
      ->default_val(1);

  auto* bench = app.add_subcommand("bench", "Compare the optimization settings");
  add_common_flags(bench, bench_common, false);
  add_trainer_flags(bench, bench_flags);
  std::string eval_path;
  bench->add_option("--eval", eval_path, "Held-out corpus (defaults to --data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_out, gen_cfg);
    if (train->parsed()) return cmd_train(train_common, train_flags);
    if (test->parsed()) return cmd_test(test_common, output_path, metric, decode_threads);
    if (bench->parsed()) return cmd_bench(bench_common, bench_flags, eval_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
