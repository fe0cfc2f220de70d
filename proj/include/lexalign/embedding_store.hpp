#pragma once

// Concept-embedding spaces and the ".cvec" text format:
//
//   <n> <d>\n
//   <concept_id>\t<surface_form>\t<v1> <v2> ... <vd>\n      (n times)
//
// Components are written with 9 significant digits. No other whitespace is
// allowed and the file must end with a newline.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexalign/error.hpp"
#include "lexalign/matrix.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

enum class Preprocessing { none, unit, center_then_unit };

inline std::string_view to_string(Preprocessing p) {
  switch (p) {
    case Preprocessing::none: return "none";
    case Preprocessing::unit: return "unit";
    case Preprocessing::center_then_unit: return "center_then_unit";
  }
  return "none";
}

inline Preprocessing parse_preprocessing(std::string_view s) {
  if (s == "none") return Preprocessing::none;
  if (s == "unit") return Preprocessing::unit;
  if (s == "center_then_unit") return Preprocessing::center_then_unit;
  throw ValidationError("unknown preprocessing scheme '" + std::string(s) + "'");
}

inline constexpr double kUnitNormTolerance = 1e-6;

/// Language-tagged vocabulary of concept ids with one dense vector per id.
/// Immutable once constructed; the constructor enforces every invariant.
class EmbeddingSpace {
 public:
  EmbeddingSpace(std::string language, std::vector<std::string> ids, std::vector<std::string> forms,
                 Matrix vectors, Preprocessing preprocessing = Preprocessing::none)
      : language_(std::move(language)),
        ids_(std::move(ids)),
        forms_(std::move(forms)),
        vectors_(std::move(vectors)),
        preprocessing_(preprocessing) {
    validate();
  }

  const std::string& language() const noexcept { return language_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<std::string>& forms() const noexcept { return forms_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  Preprocessing preprocessing() const noexcept { return preprocessing_; }
  bool normalized() const noexcept { return preprocessing_ != Preprocessing::none; }

  std::span<const double> vector(std::size_t row) const noexcept { return vectors_.row(row); }

  std::optional<std::size_t> find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Row index of `id`, or ValidationError naming the space's language.
  std::size_t index_of(std::string_view id) const {
    if (auto r = find(id)) return *r;
    throw ValidationError("concept id '" + std::string(id) + "' not found in " + language_ + " space");
  }

  /// Same ids and forms with replacement vectors.
  EmbeddingSpace with_vectors(Matrix vectors, Preprocessing preprocessing) const {
    return EmbeddingSpace(language_, ids_, forms_, std::move(vectors), preprocessing);
  }

  /// Space restricted to the given rows, in the given order.
  EmbeddingSpace subset(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    std::vector<std::string> forms;
    Matrix m(rows.size(), dim());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::size_t r = rows[k];
      if (r >= size()) throw ValidationError("subset row out of range");
      ids.push_back(ids_[r]);
      forms.push_back(forms_[r]);
      std::copy(vectors_.row(r).begin(), vectors_.row(r).end(), m.row(k).begin());
    }
    return EmbeddingSpace(language_, std::move(ids), std::move(forms), std::move(m), preprocessing_);
  }

 private:
  void validate() {
    const std::size_t n = ids_.size();
    if (n == 0) throw ValidationError("embedding space must contain at least one concept");
    if (vectors_.cols() == 0) throw ValidationError("embedding dimension must be at least 1");
    if (forms_.size() != n || vectors_.rows() != n)
      throw ValidationError("ids, forms and vector rows differ in length");
    index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& id = ids_[i];
      if (id.empty() || id.find_first_of(" \t\n\r") != std::string::npos)
        throw ValidationError("invalid concept id '" + id + "' (empty or contains whitespace)");
      if (forms_[i].empty() || forms_[i].find_first_of("\t\n\r") != std::string::npos)
        throw ValidationError("invalid surface form for concept '" + id + "'");
      if (!index_.emplace(id, i).second) throw ValidationError("duplicate concept id '" + id + "'");
    }
    for (double x : vectors_.data())
      if (!std::isfinite(x)) throw ValidationError("non-finite vector entry");
    if (preprocessing_ != Preprocessing::none) {
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(norm2(vectors_.row(i)) - 1.0) > kUnitNormTolerance)
          throw ValidationError("concept '" + ids_[i] + "' is not unit-normalized");
    }
  }

  std::string language_;
  std::vector<std::string> ids_;
  std::vector<std::string> forms_;
  Matrix vectors_;
  Preprocessing preprocessing_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Language code implied by a path: the file stem up to the first '.' or '_'
/// ("data/fr_prompt.cvec" -> "fr").
inline std::string language_from_path(const std::string& path) {
  std::string stem = std::filesystem::path(path).filename().string();
  const auto cut = stem.find_first_of("._");
  if (cut != std::string::npos && cut > 0) stem.resize(cut);
  return stem;
}

/// Parse .cvec content. Errors carry the 1-based line number.
inline EmbeddingSpace parse_space(std::string_view content, std::string language,
                                  std::optional<std::size_t> expected_dim = std::nullopt) {
  if (content.empty()) throw FormatError(1, "empty file");
  if (content.back() != '\n') throw FormatError(text::lines(content).size(), "missing trailing newline");
  const auto lines = text::lines(content);
  const auto header = text::split(lines[0], ' ');
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  if (header.size() != 2 || !text::parse_count(header[0], n) || !text::parse_count(header[1], d))
    throw FormatError(1, "malformed header, expected \"<n> <d>\"");
  if (n == 0 || d == 0) throw FormatError(1, "header declares an empty space");
  if (expected_dim && d != *expected_dim)
    throw FormatError(1, "dimension " + std::to_string(d) + " does not match expected " +
                             std::to_string(*expected_dim));
  if (lines.size() - 1 != n)
    throw FormatError(std::min<std::size_t>(lines.size(), n + 1) + 1,
                      "header declares " + std::to_string(n) + " rows but file has " +
                          std::to_string(lines.size() - 1));

  std::vector<std::string> ids;
  std::vector<std::string> forms;
  Matrix m(n, d);
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t lineno = r + 2;
    const auto fields = text::split(lines[r + 1], '\t');
    if (fields.size() != 3) throw FormatError(lineno, "expected 3 tab-separated fields");
    const auto id = fields[0];
    if (id.empty() || id.find_first_of(" \r") != std::string_view::npos)
      throw FormatError(lineno, "invalid concept id");
    if (fields[1].empty() || fields[1].find('\r') != std::string_view::npos)
      throw FormatError(lineno, "invalid surface form");
    if (!seen.emplace(id, lineno).second)
      throw FormatError(lineno, "duplicate concept id '" + std::string(id) + "'");
    const auto values = text::split(fields[2], ' ');
    if (values.size() != d)
      throw FormatError(lineno, "dimension mismatch: expected " + std::to_string(d) + " values, found " +
                                    std::to_string(values.size()));
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      if (!text::parse_real(values[c], v))
        throw FormatError(lineno, "malformed value '" + std::string(values[c]) + "'");
      if (!std::isfinite(v)) throw FormatError(lineno, "non-finite value '" + std::string(values[c]) + "'");
      m(r, c) = v;
    }
    ids.emplace_back(id);
    forms.emplace_back(fields[1]);
  }
  return EmbeddingSpace(std::move(language), std::move(ids), std::move(forms), std::move(m));
}

/// Load a .cvec file. Language defaults to the one implied by the file name.
inline EmbeddingSpace load_space(const std::string& path, std::optional<std::size_t> expected_dim = std::nullopt,
                                 std::optional<std::string> language = std::nullopt) {
  const std::string content = text::read_file(path);
  return parse_space(content, language ? *language : language_from_path(path), expected_dim);
}

inline std::string serialize_space(const EmbeddingSpace& space) {
  std::string out = std::to_string(space.size()) + " " + std::to_string(space.dim()) + "\n";
  for (std::size_t r = 0; r < space.size(); ++r) {
    out += space.ids()[r];
    out += '\t';
    out += space.forms()[r];
    out += '\t';
    const auto v = space.vector(r);
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (c) out += ' ';
      out += text::format_real(v[c]);
    }
    out += '\n';
  }
  return out;
}

inline void save_space(const EmbeddingSpace& space, const std::string& path) {
  text::write_file(path, serialize_space(space));
}

/// unit: rows scaled to unit L2 norm. center_then_unit: column means removed
/// first. none: vectors copied unchanged. Zero rows are rejected by id.
inline EmbeddingSpace normalize_space(const EmbeddingSpace& space, Preprocessing scheme) {
  Matrix m = space.vectors();
  if (scheme == Preprocessing::none) return space.with_vectors(std::move(m), Preprocessing::none);
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (scheme == Preprocessing::center_then_unit) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) mean[c] += m(r, c);
    for (double& x : mean) x /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) m(r, c) -= mean[c];
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto row = m.row(r);
    const double nr = norm2(row);
    if (nr == 0.0 || !std::isfinite(nr))
      throw ValidationError("zero-norm vector for concept '" + space.ids()[r] + "'");
    for (double& x : row) x /= nr;
  }
  return space.with_vectors(std::move(m), scheme);
}

}  // namespace lexalign
