#pragma once

// Parallel concept tables built from per-language WordNet exports, seed
// dictionaries, and the dataset analyses (identical forms, sense/frequency
// statistics).
//
// Export format (one file per language, TSV, '#' lines ignored):
//   synset_id \t depth \t category \t lemma1|lemma2|... [\t sense_count \t frequency]
// The optional trailing columns carry annotations ("-" when absent).
//
// Table format (TSV with header):
//   synset_id \t depth \t category \t sense_count \t frequency \t <lang> ...
//
// Dictionary format (TSV, no header):
//   synset_id \t train|test

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "lexalign/error.hpp"
#include "lexalign/rng.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

enum class Category { abstract, physical };

inline std::string_view to_string(Category c) { return c == Category::abstract ? "abstract" : "physical"; }

inline std::optional<Category> try_parse_category(std::string_view s) {
  if (s == "abstract") return Category::abstract;
  if (s == "physical") return Category::physical;
  return std::nullopt;
}

/// Approximate abstract/physical label from a WordNet lexicographer file name
/// ("noun.artifact" -> physical). This is a heuristic, not a ground-truth
/// labeling; noun.Tops and unknown names yield nullopt.
inline std::optional<Category> category_from_lexfile(std::string_view lexfile) {
  static const std::set<std::string_view> physical = {
      "noun.animal", "noun.artifact", "noun.body",   "noun.food",     "noun.object",
      "noun.person", "noun.plant",    "noun.substance", "noun.location"};
  static const std::set<std::string_view> abstract = {
      "noun.act",      "noun.attribute", "noun.cognition", "noun.communication", "noun.event",
      "noun.feeling",  "noun.motive",    "noun.phenomenon", "noun.possession",   "noun.process",
      "noun.quantity", "noun.relation",  "noun.shape",     "noun.state",         "noun.time",
      "noun.group"};
  if (physical.contains(lexfile)) return Category::physical;
  if (abstract.contains(lexfile)) return Category::abstract;
  return std::nullopt;
}

struct ConceptRecord {
  std::string synset_id;
  int depth = 0;
  Category category = Category::abstract;
  std::map<std::string, std::string> forms;  // language -> first lemma
  std::optional<long long> sense_count;
  std::optional<long long> frequency;

  const std::string& form(const std::string& language) const {
    const auto it = forms.find(language);
    if (it == forms.end())
      throw ValidationError("concept '" + synset_id + "' has no form for language '" + language + "'");
    return it->second;
  }
};

class ConceptTable {
 public:
  ConceptTable(std::vector<std::string> languages, std::vector<ConceptRecord> records)
      : languages_(std::move(languages)), records_(std::move(records)) {
    std::sort(languages_.begin(), languages_.end());
    if (std::adjacent_find(languages_.begin(), languages_.end()) != languages_.end())
      throw ValidationError("duplicate language in concept table");
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
      if (r.synset_id.empty()) throw ValidationError("empty synset id in concept table");
      if (!seen.insert(r.synset_id).second) throw ValidationError("duplicate synset id '" + r.synset_id + "'");
      if (r.depth < 0) throw ValidationError("negative depth for '" + r.synset_id + "'");
      if (r.sense_count && *r.sense_count < 1) throw ValidationError("sense count must be positive for '" + r.synset_id + "'");
      if (r.frequency && *r.frequency < 0) throw ValidationError("negative frequency for '" + r.synset_id + "'");
      for (const auto& lang : languages_) (void)r.form(lang);
    }
  }

  const std::vector<std::string>& languages() const noexcept { return languages_; }
  const std::vector<ConceptRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool has_language(std::string_view lang) const {
    return std::find(languages_.begin(), languages_.end(), lang) != languages_.end();
  }

 private:
  std::vector<std::string> languages_;
  std::vector<ConceptRecord> records_;
};

// ---------------------------------------------------------------------------
// WordNet exports and table construction

struct ExportRow {
  std::string synset_id;
  int depth = 0;
  Category category = Category::abstract;
  std::vector<std::string> lemmas;  // frequency order
  std::optional<long long> sense_count;
  std::optional<long long> frequency;
};

struct WordnetExport {
  std::string language;
  std::vector<ExportRow> rows;
};

namespace detail {

inline std::optional<long long> parse_optional_count(std::string_view s, std::size_t line, const char* what) {
  if (s == "-" || s.empty()) return std::nullopt;
  long long v = 0;
  if (!text::parse_int(s, v) || v < 0) throw FormatError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Parse one language's export. With `lexfile_categories` the category column
/// may hold a lexicographer file name resolved by category_from_lexfile.
inline WordnetExport parse_export(std::string_view content, std::string language, bool lexfile_categories = false) {
  WordnetExport out{std::move(language), {}};
  std::unordered_set<std::string> seen;
  const auto lines = text::lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 4 && f.size() != 6) throw FormatError(lineno, "expected 4 or 6 tab-separated fields");
    ExportRow row;
    row.synset_id = std::string(f[0]);
    if (row.synset_id.empty()) throw FormatError(lineno, "empty synset id");
    long long depth = 0;
    if (!text::parse_int(f[1], depth) || depth < 0) throw FormatError(lineno, "invalid depth '" + std::string(f[1]) + "'");
    row.depth = static_cast<int>(depth);
    auto cat = try_parse_category(f[2]);
    if (!cat && lexfile_categories) cat = category_from_lexfile(f[2]);
    if (!cat) throw FormatError(lineno, "unknown category '" + std::string(f[2]) + "'");
    row.category = *cat;
    for (auto lemma : text::split(f[3], '|'))
      if (!lemma.empty()) row.lemmas.emplace_back(lemma);
    if (row.lemmas.empty()) throw FormatError(lineno, "no lemma for synset '" + row.synset_id + "'");
    if (f.size() == 6) {
      row.sense_count = detail::parse_optional_count(f[4], lineno, "sense count");
      row.frequency = detail::parse_optional_count(f[5], lineno, "frequency");
      if (row.sense_count && *row.sense_count == 0) throw FormatError(lineno, "sense count must be positive");
    }
    if (!seen.insert(row.synset_id).second)
      throw FormatError(lineno, "synset '" + row.synset_id + "' listed twice in " + out.language + " export");
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline WordnetExport load_export(const std::string& path, std::string language, bool lexfile_categories = false) {
  return parse_export(text::read_file(path), std::move(language), lexfile_categories);
}

/// Language whose export supplies depth, category, annotations and the
/// deduplication key: English when requested, otherwise the smallest code.
inline std::string reference_language(const std::vector<std::string>& languages) {
  if (std::find(languages.begin(), languages.end(), "en") != languages.end()) return "en";
  return *std::min_element(languages.begin(), languages.end());
}

/// Parallel concept table: synsets present in every requested language whose
/// depth exceeds `max_filtered_depth` (root counted as depth 0), with
/// duplicates on the reference language's first lemma removed (lowest synset
/// id kept). Records are ordered by synset id.
inline ConceptTable build_table(const std::vector<WordnetExport>& exports, std::vector<std::string> languages,
                                int max_filtered_depth = 5) {
  if (languages.empty()) throw ValidationError("no languages requested");
  std::sort(languages.begin(), languages.end());
  languages.erase(std::unique(languages.begin(), languages.end()), languages.end());

  std::map<std::string, std::unordered_map<std::string, const ExportRow*>> by_lang;
  for (const auto& ex : exports) {
    if (std::find(languages.begin(), languages.end(), ex.language) == languages.end()) continue;
    auto [it, fresh] = by_lang.try_emplace(ex.language);
    if (!fresh) throw ValidationError("more than one export for language '" + ex.language + "'");
    for (const auto& row : ex.rows)
      if (!it->second.emplace(row.synset_id, &row).second)
        throw ValidationError("synset '" + row.synset_id + "' listed twice in " + ex.language + " export");
  }
  for (const auto& lang : languages)
    if (!by_lang.contains(lang)) throw ValidationError("missing export for language '" + lang + "'");

  const std::string ref = reference_language(languages);
  std::vector<const ExportRow*> candidates;
  for (const auto& [id, row] : by_lang.at(ref)) {
    if (row->depth <= max_filtered_depth) continue;
    bool everywhere = true;
    for (const auto& lang : languages) everywhere = everywhere && by_lang.at(lang).contains(id);
    if (everywhere) candidates.push_back(row);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const ExportRow* a, const ExportRow* b) { return a->synset_id < b->synset_id; });

  std::unordered_set<std::string> used_forms;
  std::vector<ConceptRecord> records;
  for (const ExportRow* row : candidates) {
    if (!used_forms.insert(row->lemmas.front()).second) continue;
    ConceptRecord rec;
    rec.synset_id = row->synset_id;
    rec.depth = row->depth;
    rec.category = row->category;
    rec.sense_count = row->sense_count;
    rec.frequency = row->frequency;
    for (const auto& lang : languages) rec.forms[lang] = by_lang.at(lang).at(row->synset_id)->lemmas.front();
    records.push_back(std::move(rec));
  }
  return ConceptTable(std::move(languages), std::move(records));
}

inline std::string serialize_table(const ConceptTable& table) {
  std::string out = "synset_id\tdepth\tcategory\tsense_count\tfrequency";
  for (const auto& lang : table.languages()) out += "\t" + lang;
  out += '\n';
  for (const auto& r : table.records()) {
    out += r.synset_id + "\t" + std::to_string(r.depth) + "\t" + std::string(to_string(r.category)) + "\t";
    out += (r.sense_count ? std::to_string(*r.sense_count) : "-") + "\t";
    out += r.frequency ? std::to_string(*r.frequency) : "-";
    for (const auto& lang : table.languages()) out += "\t" + r.form(lang);
    out += '\n';
  }
  return out;
}

inline ConceptTable parse_table(std::string_view content) {
  const auto lines = text::lines(content);
  if (lines.empty()) throw FormatError(1, "empty concept table");
  const auto header = text::split(lines[0], '\t');
  static constexpr std::array<std::string_view, 5> fixed = {"synset_id", "depth", "category", "sense_count", "frequency"};
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw FormatError(1, "malformed concept table header");
  std::vector<std::string> languages(header.begin() + 5, header.end());
  std::vector<ConceptRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto f = text::split(lines[i], '\t');
    if (f.size() != header.size()) throw FormatError(lineno, "wrong number of columns");
    ConceptRecord r;
    r.synset_id = std::string(f[0]);
    long long depth = 0;
    if (!text::parse_int(f[1], depth) || depth < 0) throw FormatError(lineno, "invalid depth");
    r.depth = static_cast<int>(depth);
    const auto cat = try_parse_category(f[2]);
    if (!cat) throw FormatError(lineno, "unknown category '" + std::string(f[2]) + "'");
    r.category = *cat;
    r.sense_count = detail::parse_optional_count(f[3], lineno, "sense count");
    r.frequency = detail::parse_optional_count(f[4], lineno, "frequency");
    for (std::size_t c = 0; c < languages.size(); ++c) r.forms[languages[c]] = std::string(f[5 + c]);
    records.push_back(std::move(r));
  }
  return ConceptTable(std::move(languages), std::move(records));
}

inline ConceptTable load_table(const std::string& path) { return parse_table(text::read_file(path)); }
inline void save_table(const ConceptTable& t, const std::string& path) { text::write_file(path, serialize_table(t)); }

// ---------------------------------------------------------------------------
// Seed dictionaries

enum class Role { train, test };

inline std::string_view to_string(Role r) { return r == Role::train ? "train" : "test"; }

inline Role parse_role(std::string_view s) {
  if (s == "train") return Role::train;
  if (s == "test") return Role::test;
  throw ValidationError("unknown role '" + std::string(s) + "'");
}

struct DictionaryEntry {
  std::string synset_id;
  Role role = Role::train;
  friend bool operator==(const DictionaryEntry&, const DictionaryEntry&) = default;
};

struct SeedDictionary {
  std::string source_language;
  std::string target_language;
  std::vector<DictionaryEntry> entries;

  /// Ids whose role is in `roles`, in dictionary order.
  std::vector<std::string> ids(const std::vector<Role>& roles) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (std::find(roles.begin(), roles.end(), e.role) != roles.end()) out.push_back(e.synset_id);
    return out;
  }

  void validate() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& e : entries)
      if (!seen.insert(e.synset_id).second)
        throw ValidationError("synset '" + e.synset_id + "' appears twice in seed dictionary");
  }
};

inline std::string serialize_dictionary(const SeedDictionary& d) {
  std::string out;
  for (const auto& e : d.entries) out += e.synset_id + "\t" + std::string(to_string(e.role)) + "\n";
  return out;
}

inline SeedDictionary parse_dictionary(std::string_view content) {
  SeedDictionary d;
  const auto lines = text::lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = text::split(lines[i], '\t');
    if (f.size() != 2 || f[0].empty()) throw FormatError(i + 1, "expected \"synset_id\\trole\"");
    if (f[1] != "train" && f[1] != "test") throw FormatError(i + 1, "unknown role '" + std::string(f[1]) + "'");
    d.entries.push_back({std::string(f[0]), parse_role(f[1])});
  }
  d.validate();
  return d;
}

inline SeedDictionary load_dictionary(const std::string& path) { return parse_dictionary(text::read_file(path)); }
inline void save_dictionary(const SeedDictionary& d, const std::string& path) {
  text::write_file(path, serialize_dictionary(d));
}

/// Sample `train_per_category` abstract and as many physical records as the
/// training seed; everything else is test. Entries follow table order.
inline SeedDictionary split_table(const ConceptTable& table, std::size_t train_per_category, std::uint64_t rng_seed,
                                  std::string source_language = {}, std::string target_language = {}) {
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < table.size(); ++i)
    members[static_cast<std::size_t>(table.records()[i].category)].push_back(i);

  std::vector<bool> train(table.size(), false);
  Rng rng(rng_seed);
  for (const Category c : {Category::abstract, Category::physical}) {
    const auto& pool = members[static_cast<std::size_t>(c)];
    if (pool.size() < train_per_category)
      throw ValidationError("category " + std::string(to_string(c)) + " has " + std::to_string(pool.size()) +
                            " records, fewer than " + std::to_string(train_per_category) + " requested for training");
    for (std::size_t pos : sample_positions(pool.size(), train_per_category, rng)) train[pool[pos]] = true;
  }

  SeedDictionary d{std::move(source_language), std::move(target_language), {}};
  d.entries.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    d.entries.push_back({table.records()[i].synset_id, train[i] ? Role::train : Role::test});
  return d;
}

/// Uniform sample of `target_count` items without replacement; survivors keep
/// their original relative order.
template <typename T>
std::vector<T> downsample_category(std::span<const T> items, std::size_t target_count, std::uint64_t rng_seed) {
  if (target_count > items.size())
    throw ValidationError("cannot down-sample " + std::to_string(items.size()) + " records to " +
                          std::to_string(target_count));
  Rng rng(rng_seed);
  auto picks = sample_positions(items.size(), target_count, rng);
  std::sort(picks.begin(), picks.end());
  std::vector<T> out;
  out.reserve(picks.size());
  for (std::size_t p : picks) out.push_back(items[p]);
  return out;
}

template <typename T>
std::vector<T> downsample_category(const std::vector<T>& items, std::size_t target_count, std::uint64_t rng_seed) {
  return downsample_category(std::span<const T>(items), target_count, rng_seed);
}

// ---------------------------------------------------------------------------
// Analyses

/// NFC-normalized, case-folded UTF-8.
inline std::string fold_form(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u = nfc->normalize(u, status);
  u.foldCase(U_FOLD_CASE_DEFAULT);
  u = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw ValidationError("cannot normalize form '" + std::string(s) + "'");
  std::string out;
  u.toUTF8String(out);
  return out;
}

struct FormRatio {
  std::size_t identical = 0;
  std::size_t total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(identical) / static_cast<double>(total); }
};

/// Share of records whose `lang` form equals the `reference` form after NFC
/// normalization and case folding.
inline FormRatio identical_form_ratio(const ConceptTable& table, const std::string& lang, const std::string& reference) {
  for (const auto* code : {&lang, &reference})
    if (!table.has_language(*code)) throw ValidationError("language '" + *code + "' not in concept table");
  FormRatio r{0, table.size()};
  for (const auto& rec : table.records())
    if (lang == reference || fold_form(rec.form(lang)) == fold_form(rec.form(reference))) ++r.identical;
  return r;
}

struct FieldStats {
  std::size_t count = 0;     // records contributing
  std::size_t excluded = 0;  // records lacking the field
  std::optional<double> mean;
  std::optional<long long> median;  // lower middle for even counts
};

struct CategoryStats {
  Category category = Category::abstract;
  std::size_t records = 0;
  FieldStats senses;
  FieldStats frequency;
};

namespace detail {

inline FieldStats summarize(std::vector<long long> values, std::size_t excluded) {
  FieldStats s;
  s.count = values.size();
  s.excluded = excluded;
  if (values.empty()) return s;
  long double sum = 0;
  for (long long v : values) sum += static_cast<long double>(v);
  s.mean = static_cast<double>(sum / static_cast<long double>(values.size()));
  std::sort(values.begin(), values.end());
  s.median = values[(values.size() - 1) / 2];
  return s;
}

}  // namespace detail

/// Sense-count and frequency statistics per category (abstract first).
inline std::array<CategoryStats, 2> category_stats(const ConceptTable& table) {
  std::array<CategoryStats, 2> out;
  for (const Category c : {Category::abstract, Category::physical}) {
    std::vector<long long> senses;
    std::vector<long long> freq;
    std::size_t n = 0;
    std::size_t miss_s = 0;
    std::size_t miss_f = 0;
    for (const auto& r : table.records()) {
      if (r.category != c) continue;
      ++n;
      if (r.sense_count) senses.push_back(*r.sense_count); else ++miss_s;
      if (r.frequency) freq.push_back(*r.frequency); else ++miss_f;
    }
    auto& s = out[static_cast<std::size_t>(c)];
    s.category = c;
    s.records = n;
    s.senses = detail::summarize(std::move(senses), miss_s);
    s.frequency = detail::summarize(std::move(freq), miss_f);
  }
  return out;
}

}  // namespace lexalign
