#pragma once

// Precision@k and the three-mode experiment runner.
//
//   before:  retrieve with the preprocessed source space as-is
//   after:   fit on train pairs, map the source space, retrieve test queries
//   ceiling: fit on train and test pairs, map, retrieve test queries

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "lexalign/alignment.hpp"
#include "lexalign/concept_dataset.hpp"
#include "lexalign/config.hpp"
#include "lexalign/embedding_store.hpp"
#include "lexalign/retrieval.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

using GoldMap = std::unordered_map<std::string, std::string>;

/// Number of results whose gold target appears among the first k ranked
/// entries. A list shorter than k counts as covering what it holds.
inline std::size_t count_hits(const std::vector<RetrievalResult>& results, const GoldMap& gold, std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
  std::size_t hits = 0;
  for (const auto& r : results) {
    const auto it = gold.find(r.query_id);
    if (it == gold.end()) throw ValidationError("no gold target for query '" + r.query_id + "'");
    const std::size_t depth = std::min(k, r.ranked.size());
    for (std::size_t i = 0; i < depth; ++i)
      if (r.ranked[i].target_id == it->second) {
        ++hits;
        break;
      }
  }
  return hits;
}

inline double precision_at_k(const std::vector<RetrievalResult>& results, const GoldMap& gold, std::size_t k) {
  if (results.empty()) throw ValidationError("precision@k over an empty result set");
  return static_cast<double>(count_hits(results, gold, k)) / static_cast<double>(results.size());
}

/// Gold map where every query's gold target is the query id itself.
inline GoldMap shared_id_gold(const std::vector<std::string>& ids) {
  GoldMap g;
  for (const auto& id : ids) g.emplace(id, id);
  return g;
}

inline GoldMap parse_gold(std::string_view content) {
  GoldMap g;
  const auto lines = text::lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = text::split(lines[i], '\t');
    if (f.size() != 2 || f[0].empty() || f[1].empty()) throw FormatError(i + 1, "expected \"query_id\\ttarget_id\"");
    if (!g.emplace(std::string(f[0]), std::string(f[1])).second)
      throw FormatError(i + 1, "duplicate gold entry for '" + std::string(f[0]) + "'");
  }
  return g;
}

struct EvalEntry {
  std::string source_language;
  std::string target_language;
  Strategy strategy = Strategy::vanilla;
  Mode mode = Mode::before;
  Slice category = Slice::all;
  std::size_t k = 1;
  std::size_t hits = 0;
  std::size_t n_queries = 0;
  double precision = 0.0;  // hits / n_queries
  std::string config_hash;
};

struct EvalReport {
  std::string config_hash;
  std::vector<EvalEntry> entries;
};

struct ExperimentInputs {
  EmbeddingSpace source;
  EmbeddingSpace target;
  SeedDictionary dictionary;
  std::optional<ConceptTable> table;
  std::optional<GoldMap> gold;
};

inline ExperimentInputs load_inputs(const ExperimentConfig& cfg) {
  ExperimentInputs in{load_space(cfg.source_path, std::nullopt, cfg.resolved_source_language()),
                      load_space(cfg.target_path, std::nullopt, cfg.resolved_target_language()),
                      load_dictionary(cfg.dictionary_path), std::nullopt, std::nullopt};
  if (!cfg.table_path.empty()) in.table = load_table(cfg.table_path);
  if (!cfg.gold_path.empty()) in.gold = parse_gold(text::read_file(cfg.gold_path));
  return in;
}

namespace detail {

inline std::vector<std::size_t> rows_of(const EmbeddingSpace& s, const std::vector<std::string>& ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) rows.push_back(s.index_of(id));
  return rows;
}

inline std::vector<RetrievalResult> run_mode(const ExperimentConfig& cfg, Mode mode, const EmbeddingSpace& source,
                                             const EmbeddingSpace& target, const SeedDictionary& dict,
                                             const GoldMap& gold, std::size_t top, std::size_t threads) {
  EmbeddingSpace queries = source;
  if (mode != Mode::before) {
    const std::vector<Role> roles =
        mode == Mode::after ? std::vector<Role>{Role::train} : std::vector<Role>{Role::train, Role::test};
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto& id : dict.ids(roles)) pairs.emplace_back(id, gold.at(id));
    const auto map = procrustes_fit_pairs(source, target, pairs);
    queries = apply_map(map, source, threads);
  }
  const auto query_ids = (mode == Mode::ceiling && cfg.ceiling_all_queries) ? dict.ids({Role::train, Role::test})
                                                                            : dict.ids({Role::test});
  RetrievalOptions opt;
  opt.threads = threads;
  opt.block_size = cfg.block_size;
  if (cfg.neighborhood_full) {
    opt.query_rows = rows_of(queries, query_ids);
    return retrieve(queries, target, std::min(top, target.size()), cfg.method, cfg.csls_k, opt);
  }
  // Neighbourhoods and candidates restricted to the evaluated concepts.
  std::vector<std::string> gold_ids;
  std::set<std::string> seen;
  for (const auto& q : query_ids)
    if (seen.insert(gold.at(q)).second) gold_ids.push_back(gold.at(q));
  const auto qs = queries.subset(rows_of(queries, query_ids));
  const auto ts = target.subset(rows_of(target, gold_ids));
  return retrieve(qs, ts, std::min(top, ts.size()), cfg.method, cfg.csls_k, opt);
}

}  // namespace detail

/// Run every configured mode over preloaded inputs.
inline EvalReport run_experiment(const ExperimentConfig& cfg, const ExperimentInputs& in) {
  if (cfg.modes.empty()) throw ValidationError("no modes configured");
  if (cfg.ks.empty()) throw ValidationError("no k values configured");
  for (std::size_t k : cfg.ks)
    if (k < 1) throw ValidationError("k values must be at least 1");
  const auto categories = cfg.resolved_categories();
  for (Slice c : categories)
    if (c != Slice::all && !in.table) throw ValidationError("category '" + std::string(to_string(c)) + "' requires a concept table");
  in.dictionary.validate();

  const std::size_t threads = resolve_threads(static_cast<long>(cfg.threads));
  const auto source = normalize_space(in.source, cfg.preprocessing);
  const auto target = normalize_space(in.target, cfg.preprocessing);
  const auto test_ids = in.dictionary.ids({Role::test});
  if (test_ids.empty()) throw ValidationError("dictionary has no test entries");
  const GoldMap gold = in.gold ? *in.gold : shared_id_gold(in.dictionary.ids({Role::train, Role::test}));
  for (const auto& id : in.dictionary.ids({Role::train, Role::test})) {
    (void)source.index_of(id);
    const auto it = gold.find(id);
    if (it == gold.end()) throw ValidationError("no gold target for '" + id + "'");
    (void)target.index_of(it->second);
  }

  std::unordered_map<std::string, Category> category_of;
  if (in.table)
    for (const auto& r : in.table->records()) category_of.emplace(r.synset_id, r.category);
  auto category_members = [&](const std::vector<RetrievalResult>& results, Category c) {
    std::vector<RetrievalResult> out;
    for (const auto& r : results) {
      const auto it = category_of.find(r.query_id);
      if (it == category_of.end()) throw ValidationError("query '" + r.query_id + "' missing from concept table");
      if (it->second == c) out.push_back(r);
    }
    return out;
  };

  const std::size_t top = *std::max_element(cfg.ks.begin(), cfg.ks.end());
  std::vector<std::size_t> ks = cfg.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  EvalReport report{config_hash(cfg), {}};
  for (Mode mode : cfg.modes) {
    const auto results = detail::run_mode(cfg, mode, source, target, in.dictionary, gold, top, threads);
    for (Slice slice : categories) {
      std::vector<RetrievalResult> subset;
      switch (slice) {
        case Slice::all: subset = results; break;
        case Slice::abstract: subset = category_members(results, Category::abstract); break;
        case Slice::physical: subset = category_members(results, Category::physical); break;
        case Slice::physical_downsampled: {
          const auto physical = category_members(results, Category::physical);
          const auto abstract_count = category_members(results, Category::abstract).size();
          subset = downsample_category(physical, abstract_count, cfg.seed);
          break;
        }
      }
      if (subset.empty())
        throw ValidationError("category '" + std::string(to_string(slice)) + "' has no queries");
      for (std::size_t k : ks) {
        EvalEntry e;
        e.source_language = source.language();
        e.target_language = target.language();
        e.strategy = cfg.strategy;
        e.mode = mode;
        e.category = slice;
        e.k = k;
        e.hits = count_hits(subset, gold, k);
        e.n_queries = subset.size();
        e.precision = static_cast<double>(e.hits) / static_cast<double>(e.n_queries);
        e.config_hash = report.config_hash;
        report.entries.push_back(std::move(e));
      }
    }
  }
  return report;
}

inline EvalReport run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, load_inputs(cfg)); }

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { json, csv, markdown };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

namespace detail {

inline std::string render_json(const EvalReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"source_language", e.source_language},
                       {"target_language", e.target_language},
                       {"strategy", to_string(e.strategy)},
                       {"mode", to_string(e.mode)},
                       {"category", to_string(e.category)},
                       {"k", e.k},
                       {"hits", e.hits},
                       {"n_queries", e.n_queries},
                       {"precision", e.precision},
                       {"config_hash", e.config_hash}});
  }
  const nlohmann::json doc = {{"config_hash", report.config_hash}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

inline std::string render_csv(const EvalReport& report) {
  std::string out = "source_language,target_language,strategy,mode,category,k,precision,hits,n_queries,config_hash\n";
  for (const auto& e : report.entries) {
    out += e.source_language + "," + e.target_language + "," + std::string(to_string(e.strategy)) + "," +
           std::string(to_string(e.mode)) + "," + std::string(to_string(e.category)) + "," + std::to_string(e.k) +
           "," + text::format_fixed(e.precision, 6) + "," + std::to_string(e.hits) + "," +
           std::to_string(e.n_queries) + "," + e.config_hash + "\n";
  }
  return out;
}

// One table per (source, target, strategy): rows are k, columns mode/category,
// cells P@k in percent.
inline std::string render_markdown(const EvalReport& report) {
  using Group = std::tuple<std::string, std::string, std::string>;
  std::vector<Group> groups;
  std::map<Group, std::vector<std::string>> columns;
  std::map<Group, std::vector<std::size_t>> rows;
  std::map<std::tuple<Group, std::string, std::size_t>, double> cell;
  for (const auto& e : report.entries) {
    Group g{e.source_language, e.target_language, std::string(to_string(e.strategy))};
    if (!columns.contains(g)) groups.push_back(g);
    const std::string col = std::string(to_string(e.mode)) + "/" + std::string(to_string(e.category));
    auto& cols = columns[g];
    if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    auto& ks = rows[g];
    if (std::find(ks.begin(), ks.end(), e.k) == ks.end()) ks.push_back(e.k);
    cell[{g, col, e.k}] = e.precision;
  }
  std::string out;
  if (groups.empty()) return "_no entries_\n";
  for (const auto& g : groups) {
    if (!out.empty()) out += "\n";
    out += "### " + std::get<0>(g) + " -> " + std::get<1>(g) + " (" + std::get<2>(g) + ")\n\n";
    const auto& cols = columns[g];
    auto ks = rows[g];
    std::sort(ks.begin(), ks.end());
    out += "| P@k |";
    for (const auto& c : cols) out += " " + c + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) out += "---:|";
    out += "\n";
    for (std::size_t k : ks) {
      out += "| P@" + std::to_string(k) + " |";
      for (const auto& c : cols) {
        const auto it = cell.find({g, c, k});
        out += " " + (it == cell.end() ? std::string("-") : text::format_fixed(100.0 * it->second, 2)) + " |";
      }
      out += "\n";
    }
  }
  out += "\nconfig_hash: " + report.config_hash + "\n";
  return out;
}

}  // namespace detail

inline std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return detail::render_json(report);
    case ReportFormat::csv: return detail::render_csv(report);
    case ReportFormat::markdown: return detail::render_markdown(report);
  }
  return {};
}

}  // namespace lexalign
