#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "l2s/conll.hpp"
#include "l2s/error.hpp"
#include "l2s/feature_vector.hpp"
#include "l2s/session.hpp"

namespace l2s {

constexpr const char* kNoneRelation = "none";

struct ErEntity {
  std::string span;
  int gold_type = -1;
};

struct ErRecord {
  std::vector<ErEntity> entities;
  // gold relation per ordered pair (n < m, 0-based); pairs not present in the
  // input are gold "none"
  std::map<std::pair<int, int>, int> gold_relations;

  int gold_relation(int n, int m, int none_id) const {
    auto it = gold_relations.find({n, m});
    return it == gold_relations.end() ? none_id : it->second;
  }
};

// One JSON object per line:
//   {"entities": [{"span": ..., "gold_type": ...}],
//    "relations": [{"arg1": ..., "arg2": ..., "gold_type": ...}]}
inline std::vector<ErRecord> read_er_jsonl(const std::string& path, LabelDict& entity_types,
                                           LabelDict& relation_types) {
  relation_types.intern(kNoneRelation);  // id 0, so the fallback action is "none"
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<ErRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ErRecord rec;
    try {
      for (const auto& ent : j.at("entities"))
        rec.entities.push_back(
            {ent.at("span").get<std::string>(),
             entity_types.intern(ent.at("gold_type").get<std::string>())});
      if (j.contains("relations"))
        for (const auto& rel : j.at("relations")) {
          int a = rel.at("arg1").get<int>();
          int b = rel.at("arg2").get<int>();
          if (a >= b || a < 0 || b >= static_cast<int>(rec.entities.size()))
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": relation args must satisfy 0 <= arg1 < arg2 < #entities");
          rec.gold_relations[{a, b}] =
              relation_types.intern(rel.at("gold_type").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (rec.entities.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": record has no entities");
    records.push_back(std::move(rec));
  }
  return records;
}

// (arg1 type, arg2 type) -> permitted relation types. "none" is always
// permitted, for every pair.
struct RelationConstraintTable {
  std::map<std::pair<int, int>, std::set<int>> pairs;
  int none_id = 0;
  int num_entity_types = 0;

  // Text config, one line per entry: RELATION ARG1_TYPE ARG2_TYPE
  static RelationConstraintTable load(const std::string& path, LabelDict& entity_types,
                                      LabelDict& relation_types) {
    relation_types.intern(kNoneRelation);
    std::ifstream in(path);
    if (!in) throw DataError("cannot open relation table: " + path);
    RelationConstraintTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ss(line);
      std::string rel, t1, t2;
      if (!(ss >> rel)) continue;  // blank line
      if (rel[0] == '#') continue;
      if (!(ss >> t1 >> t2))
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": want RELATION ARG1_TYPE ARG2_TYPE");
      table.pairs[{entity_types.intern(t1), entity_types.intern(t2)}].insert(
          relation_types.intern(rel));
    }
    table.num_entity_types = entity_types.size();
    return table;
  }
};

inline std::vector<int> find_valid_relations(int t1, int t2,
                                             const RelationConstraintTable& table) {
  if (t1 < 0 || t1 >= table.num_entity_types)
    throw ConfigError("entity type " + std::to_string(t1) + " unknown to the relation table");
  if (t2 < 0 || t2 >= table.num_entity_types)
    throw ConfigError("entity type " + std::to_string(t2) + " unknown to the relation table");
  std::vector<int> valid{table.none_id};
  auto it = table.pairs.find({t1, t2});
  if (it != table.pairs.end())
    for (int r : it->second)
      if (r != table.none_id) valid.push_back(r);
  std::sort(valid.begin(), valid.end());
  return valid;
}

// Entity typing then pairwise relation typing over one action space: entity
// type i is action i, relation r is action num_entity_types + r.
struct ErTaskConfig {
  uint32_t bits = 18;
  const LabelDict* entity_types = nullptr;
  const LabelDict* relation_types = nullptr;
  const RelationConstraintTable* table = nullptr;

  int entity_action(int type) const { return type; }
  int relation_action(int rel) const { return entity_types->size() + rel; }
  int num_actions() const { return entity_types->size() + relation_types->size(); }
};

struct ErOutput {
  std::vector<int> entity_types;
  std::map<std::pair<int, int>, int> relation_types;
};

namespace detail {

inline FeatureVector er_entity_features(const ErRecord& rec, int n, const ErTaskConfig& cfg) {
  FeatureVector fv(cfg.bits);
  const std::string& span = rec.entities[n].span;
  std::istringstream ss(span);
  std::string word;
  while (ss >> word) fv.add("e", "w=" + word);
  fv.add("e", "full=" + span);
  fv.add("b", "bias");
  return fv;
}

inline FeatureVector er_relation_features(const ErRecord& rec, int n, int m, int tn, int tm,
                                          const ErTaskConfig& cfg) {
  FeatureVector fv(cfg.bits);
  {
    std::istringstream ss(rec.entities[n].span);
    std::string word;
    while (ss >> word) fv.add("r1", "w=" + word);
  }
  {
    std::istringstream ss(rec.entities[m].span);
    std::string word;
    while (ss >> word) fv.add("r2", "w=" + word);
  }
  fv.add("rt", "t1=" + cfg.entity_types->names.at(tn) + "|t2=" + cfg.entity_types->names.at(tm));
  fv.add("rd", "gap=" + std::to_string(m - n));
  fv.add("b", "bias");
  return fv;
}

}  // namespace detail

// Phase 1 assigns a type to each entity; phase 2 predicts a relation for
// every ordered pair n < m, constrained by the *predicted* argument types and
// conditioned on their tags. Relation tags follow K*(n+1)+m for 1-based n,m.
inline ErOutput run_entity_relation(Session& session, const ErRecord& rec,
                                    const ErTaskConfig& cfg) {
  const int K = static_cast<int>(rec.entities.size());
  ErOutput out;
  out.entity_types.resize(K, -1);

  std::vector<int> entity_actions(cfg.entity_types->size());
  for (size_t i = 0; i < entity_actions.size(); ++i)
    entity_actions[i] = cfg.entity_action(static_cast<int>(i));

  for (int n = 0; n < K; ++n) {
    PredictRequest req;
    req.features = detail::er_entity_features(rec, n, cfg);
    req.ref = cfg.entity_action(rec.entities[n].gold_type);
    req.tag = n + 1;
    req.allowed = entity_actions;
    out.entity_types[n] = session.predict(req);
    session.declare_loss(out.entity_types[n] == rec.entities[n].gold_type ? 0.0 : 1.0);
  }

  for (int n = 0; n < K - 1; ++n) {
    for (int m = n + 1; m < K; ++m) {
      std::vector<int> valid =
          find_valid_relations(out.entity_types[n], out.entity_types[m], *cfg.table);
      std::vector<int> allowed(valid.size());
      for (size_t i = 0; i < valid.size(); ++i) allowed[i] = cfg.relation_action(valid[i]);
      int gold = rec.gold_relation(n, m, cfg.table->none_id);

      PredictRequest req;
      req.features = detail::er_relation_features(rec, n, m, out.entity_types[n],
                                                  out.entity_types[m], cfg);
      req.ref = cfg.relation_action(gold);
      req.tag = K * (n + 2) + m + 1;  // K*(n+1)+m in 1-based entity indices
      req.condition_tags = {n + 1, m + 1};
      req.allowed = std::move(allowed);
      int rel = session.predict(req) - cfg.relation_action(0);
      out.relation_types[{n, m}] = rel;
      session.declare_loss(rel == gold ? 0.0 : 1.0);
    }
  }
  return out;
}

}  // namespace l2s
