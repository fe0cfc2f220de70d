#pragma once

// Experiment configuration: a key-value text file.
//
//   # comment
//   source          = fr.cvec          (required; relative to the config file)
//   target          = en.cvec          (required)
//   dictionary      = fr_en.dict.tsv   (required; "synset_id\trole")
//   table           = concepts.tsv     (optional; enables category slices)
//   gold            = gold.tsv         (optional; "query_id\ttarget_id", default: same id)
//   source_language = fr               (default: from the source file name)
//   target_language = en               (default: from the target file name)
//   strategy        = vanilla | prompt                        (default vanilla)
//   modes           = before,after,ceiling                    (default all three)
//   categories      = all,abstract,physical,physical_downsampled
//                                      (default: all four with a table, else all)
//   k               = 1,5,10,30
//   method          = csls | nn                                (default csls)
//   csls_k          = 10
//   preprocessing   = unit | center_then_unit | none           (default unit)
//   seed            = 0                (down-sampling seed)
//   neighborhood    = full | test      (CSLS neighbourhoods over full vocabularies or test concepts only)
//   ceiling_queries = test | all       (ceiling retrieves test queries, or train+test)
//   threads         = 0                (0: LEXALIGN_THREADS or hardware; not part of the hash)
//   block_size      = 1024             (not part of the hash)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexalign/embedding_store.hpp"
#include "lexalign/error.hpp"
#include "lexalign/hash.hpp"
#include "lexalign/retrieval.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

enum class Mode { before, after, ceiling };
enum class Strategy { vanilla, prompt };
enum class Slice { all, abstract, physical, physical_downsampled };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::before: return "before";
    case Mode::after: return "after";
    case Mode::ceiling: return "ceiling";
  }
  return "before";
}
inline Mode parse_mode(std::string_view s) {
  if (s == "before") return Mode::before;
  if (s == "after") return Mode::after;
  if (s == "ceiling") return Mode::ceiling;
  throw ValidationError("unknown mode '" + std::string(s) + "'");
}

inline std::string_view to_string(Strategy s) { return s == Strategy::vanilla ? "vanilla" : "prompt"; }
inline Strategy parse_strategy(std::string_view s) {
  if (s == "vanilla") return Strategy::vanilla;
  if (s == "prompt") return Strategy::prompt;
  throw ValidationError("unknown strategy '" + std::string(s) + "'");
}

inline std::string_view to_string(Slice c) {
  switch (c) {
    case Slice::all: return "all";
    case Slice::abstract: return "abstract";
    case Slice::physical: return "physical";
    case Slice::physical_downsampled: return "physical_downsampled";
  }
  return "all";
}
inline Slice parse_slice(std::string_view s) {
  if (s == "all") return Slice::all;
  if (s == "abstract") return Slice::abstract;
  if (s == "physical") return Slice::physical;
  if (s == "physical_downsampled") return Slice::physical_downsampled;
  throw ValidationError("unknown category '" + std::string(s) + "'");
}

struct ExperimentConfig {
  std::string source_path;
  std::string target_path;
  std::string dictionary_path;
  std::string table_path;  // empty: none
  std::string gold_path;   // empty: shared ids
  std::string source_language;
  std::string target_language;
  Strategy strategy = Strategy::vanilla;
  std::vector<Mode> modes{Mode::before, Mode::after, Mode::ceiling};
  std::vector<Slice> categories;  // empty: resolved from table presence
  std::vector<std::size_t> ks{1, 5, 10, 30};
  Method method = Method::csls;
  std::size_t csls_k = kDefaultCslsK;
  Preprocessing preprocessing = Preprocessing::unit;
  std::uint64_t seed = 0;
  bool neighborhood_full = true;
  bool ceiling_all_queries = false;
  std::size_t threads = 0;
  std::size_t block_size = 1024;

  std::vector<Slice> resolved_categories() const {
    if (!categories.empty()) return categories;
    if (table_path.empty()) return {Slice::all};
    return {Slice::all, Slice::abstract, Slice::physical, Slice::physical_downsampled};
  }
  std::string resolved_source_language() const {
    return source_language.empty() ? language_from_path(source_path) : source_language;
  }
  std::string resolved_target_language() const {
    return target_language.empty() ? language_from_path(target_path) : target_language;
  }
};

namespace detail {

template <typename T, typename Fn>
std::string join(const std::vector<T>& xs, Fn&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

inline std::uint64_t parse_unsigned(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  if (!text::parse_count(v, out)) throw ValidationError("config key '" + std::string(key) + "': expected a non-negative integer");
  return out;
}

}  // namespace detail

/// Parse config text. Relative paths are resolved against `base_dir`.
inline ExperimentConfig parse_config(std::string_view content, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  const auto lines = text::lines(content);
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.lexically_normal().string();
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError(lineno, "expected \"key = value\"");
    const std::string key(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    if (!seen.emplace(key, lineno).second) throw FormatError(lineno, "duplicate key '" + key + "'");
    auto list = [&] {
      std::vector<std::string_view> out;
      for (auto item : text::split(value, ','))
        if (auto t = text::trim(item); !t.empty()) out.push_back(t);
      if (out.empty()) throw FormatError(lineno, "empty list for '" + key + "'");
      return out;
    };
    try {
      if (key == "source") cfg.source_path = resolve(value);
      else if (key == "target") cfg.target_path = resolve(value);
      else if (key == "dictionary") cfg.dictionary_path = resolve(value);
      else if (key == "table") cfg.table_path = resolve(value);
      else if (key == "gold") cfg.gold_path = resolve(value);
      else if (key == "source_language") cfg.source_language = std::string(value);
      else if (key == "target_language") cfg.target_language = std::string(value);
      else if (key == "strategy") cfg.strategy = parse_strategy(value);
      else if (key == "modes") {
        cfg.modes.clear();
        for (auto m : list()) cfg.modes.push_back(parse_mode(m));
      } else if (key == "categories") {
        cfg.categories.clear();
        for (auto c : list()) cfg.categories.push_back(parse_slice(c));
      } else if (key == "k") {
        cfg.ks.clear();
        for (auto k : list()) cfg.ks.push_back(detail::parse_unsigned(key, k));
      } else if (key == "method") cfg.method = parse_method(value);
      else if (key == "csls_k") cfg.csls_k = detail::parse_unsigned(key, value);
      else if (key == "preprocessing") cfg.preprocessing = parse_preprocessing(value);
      else if (key == "seed") cfg.seed = detail::parse_unsigned(key, value);
      else if (key == "neighborhood") {
        if (value != "full" && value != "test") throw ValidationError("neighborhood must be full or test");
        cfg.neighborhood_full = value == "full";
      } else if (key == "ceiling_queries") {
        if (value != "test" && value != "all") throw ValidationError("ceiling_queries must be test or all");
        cfg.ceiling_all_queries = value == "all";
      } else if (key == "threads") cfg.threads = detail::parse_unsigned(key, value);
      else if (key == "block_size") cfg.block_size = detail::parse_unsigned(key, value);
      else throw ValidationError("unknown key '" + key + "'");
    } catch (const FormatError&) {
      throw;
    } catch (const ValidationError& e) {
      throw FormatError(lineno, e.what());
    }
  }
  for (const auto& [key, ptr] : {std::pair{"source", &cfg.source_path}, std::pair{"target", &cfg.target_path},
                                 std::pair{"dictionary", &cfg.dictionary_path}})
    if (ptr->empty()) throw ValidationError(std::string("config is missing required key '") + key + "'");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config(text::read_file(path), std::filesystem::path(path).parent_path());
}

/// Sorted "key=value" lines with every default resolved. Thread count and
/// block size are excluded: they never change results.
inline std::string canonical_config(const ExperimentConfig& c) {
  std::vector<std::size_t> ks = c.ks;
  std::map<std::string, std::string> kv{
      {"source", c.source_path},
      {"target", c.target_path},
      {"dictionary", c.dictionary_path},
      {"table", c.table_path},
      {"gold", c.gold_path},
      {"source_language", c.resolved_source_language()},
      {"target_language", c.resolved_target_language()},
      {"strategy", std::string(to_string(c.strategy))},
      {"modes", detail::join(c.modes, [](Mode m) { return std::string(to_string(m)); })},
      {"categories", detail::join(c.resolved_categories(), [](Slice s) { return std::string(to_string(s)); })},
      {"k", detail::join(ks, [](std::size_t k) { return std::to_string(k); })},
      {"method", std::string(to_string(c.method))},
      {"csls_k", std::to_string(c.csls_k)},
      {"preprocessing", std::string(to_string(c.preprocessing))},
      {"seed", std::to_string(c.seed)},
      {"neighborhood", c.neighborhood_full ? "full" : "test"},
      {"ceiling_queries", c.ceiling_all_queries ? "all" : "test"},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

inline std::string config_hash(const ExperimentConfig& c) { return sha256_hex(canonical_config(c)); }

/// Hash of an arbitrary flag set, canonicalised as sorted "key=value" lines.
inline std::string flags_hash(const std::map<std::string, std::string>& flags) {
  std::string out;
  for (const auto& [k, v] : flags) out += k + "=" + v + "\n";
  return sha256_hex(out);
}

}  // namespace lexalign
