#pragma once

// Orthogonal Procrustes alignment between two embedding spaces.
//
// Shape convention: paired vectors are treated as d-dimensional columns.
// With X (source) and Y (target) the d x m matrices whose i-th columns are
// the i-th dictionary pair, the cross-covariance M = Y·Xᵀ is d x d and the
// minimiser of ||W·X - Y||_F over orthogonal W is U·Vᵀ where M = U·Σ·Vᵀ.
//
// Map file (".omap"):
//   <d> <source_lang> <target_lang> <preprocessing>\n
//   d lines of d space-separated values (9 significant digits)

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexalign/concept_dataset.hpp"
#include "lexalign/embedding_store.hpp"
#include "lexalign/error.hpp"
#include "lexalign/matrix.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/svd.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

/// Relative cut below which a singular value of M counts as degenerate.
inline constexpr double kRankTolerance = 1e-10;

struct OrthogonalMap {
  Matrix matrix;  // d x d, acts on column vectors: y = W·x
  std::string source_language;
  std::string target_language;
  std::size_t seed_size = 0;  // 0 when unknown (e.g. read from file)
  Preprocessing preprocessing = Preprocessing::unit;
  std::size_t degenerate_directions = 0;  // singular values < kRankTolerance·σ_max at fit time

  std::size_t dim() const noexcept { return matrix.rows(); }
};

struct ProcrustesSolution {
  Matrix w;
  std::size_t degenerate_directions = 0;
};

/// Orthogonal W minimising Σ_i ||W·x_i - y_i||² where x_i / y_i are the i-th
/// rows of `source_rows` / `target_rows` (both m x d).
inline ProcrustesSolution orthogonal_procrustes(const Matrix& source_rows, const Matrix& target_rows) {
  if (source_rows.rows() != target_rows.rows() || source_rows.cols() != target_rows.cols())
    throw ValidationError("paired matrices differ in shape");
  if (source_rows.rows() == 0) throw ValidationError("no dictionary pairs selected");
  const std::size_t d = source_rows.cols();
  const std::size_t m = source_rows.rows();

  Matrix cross(d, d);  // Y·Xᵀ, accumulated pair by pair in dictionary order
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = source_rows.row(i);
    const auto y = target_rows.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      const double ya = y[a];
      auto out = cross.row(a);
      for (std::size_t b = 0; b < d; ++b) out[b] += ya * x[b];
    }
  }

  const Svd svd = jacobi_svd(cross);
  ProcrustesSolution sol{multiply(svd.u, svd.v.transposed()), 0};
  const double cut = kRankTolerance * svd.sigma.front();
  for (double s : svd.sigma)
    if (s < cut || s == 0.0) ++sol.degenerate_directions;
  return sol;
}

/// Fit on explicit (source_id, target_id) pairs, in the given order.
inline OrthogonalMap procrustes_fit_pairs(const EmbeddingSpace& source, const EmbeddingSpace& target,
                                          const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (source.dim() != target.dim())
    throw ValidationError("dimension mismatch: source d=" + std::to_string(source.dim()) +
                          ", target d=" + std::to_string(target.dim()));
  if (pairs.empty()) throw ValidationError("no dictionary pairs with the selected roles");
  const std::size_t d = source.dim();
  Matrix xs(pairs.size(), d);
  Matrix ys(pairs.size(), d);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto sx = source.vector(source.index_of(pairs[i].first));
    const auto ty = target.vector(target.index_of(pairs[i].second));
    std::copy(sx.begin(), sx.end(), xs.row(i).begin());
    std::copy(ty.begin(), ty.end(), ys.row(i).begin());
  }
  auto sol = orthogonal_procrustes(xs, ys);
  return OrthogonalMap{std::move(sol.w), source.language(), target.language(), pairs.size(),
                       source.preprocessing(), sol.degenerate_directions};
}

/// Fit on the dictionary pairs whose role is in `roles`, in dictionary order.
/// A pair is the same synset id in both spaces. The map records the source
/// space's preprocessing scheme.
inline OrthogonalMap procrustes_fit(const EmbeddingSpace& source, const EmbeddingSpace& target,
                                    const SeedDictionary& dict, const std::vector<Role>& roles) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (auto& id : dict.ids(roles)) pairs.emplace_back(id, id);
  return procrustes_fit_pairs(source, target, pairs);
}

/// Replace every vector x with W·x. Rows are processed independently.
inline EmbeddingSpace apply_map(const OrthogonalMap& map, const EmbeddingSpace& space, std::size_t threads = 1) {
  const std::size_t d = map.dim();
  if (space.dim() != d)
    throw ValidationError("dimension mismatch: map d=" + std::to_string(d) + ", space d=" + std::to_string(space.dim()));
  Matrix out(space.size(), d);
  parallel_for(space.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto x = space.vector(r);
      auto y = out.row(r);
      for (std::size_t i = 0; i < d; ++i) y[i] = dot(map.matrix.row(i), x);
    }
  });
  return space.with_vectors(std::move(out), space.preprocessing());
}

inline std::string serialize_map(const OrthogonalMap& map) {
  std::string out = std::to_string(map.dim()) + " " + map.source_language + " " + map.target_language + " " +
                    std::string(to_string(map.preprocessing)) + "\n";
  for (std::size_t i = 0; i < map.dim(); ++i) {
    const auto row = map.matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += text::format_real(row[j]);
    }
    out += '\n';
  }
  return out;
}

/// Orthogonality accepted on load; 9-digit text cannot hold 1e-8.
inline constexpr double kLoadedMapTolerance = 1e-6;

inline OrthogonalMap parse_map(std::string_view content) {
  if (content.empty()) throw FormatError(1, "empty map file");
  if (content.back() != '\n') throw FormatError(text::lines(content).size(), "missing trailing newline");
  const auto lines = text::lines(content);
  const auto header = text::split(lines[0], ' ');
  std::uint64_t d = 0;
  if (header.size() != 4 || !text::parse_count(header[0], d) || d == 0 || header[1].empty() || header[2].empty())
    throw FormatError(1, "malformed header, expected \"<d> <source_lang> <target_lang> <preprocessing>\"");
  OrthogonalMap map;
  map.source_language = std::string(header[1]);
  map.target_language = std::string(header[2]);
  try {
    map.preprocessing = parse_preprocessing(header[3]);
  } catch (const ValidationError& e) {
    throw FormatError(1, e.what());
  }
  if (lines.size() != d + 1)
    throw FormatError(std::min<std::size_t>(lines.size(), d + 1) + 1, "expected " + std::to_string(d) + " matrix rows");
  map.matrix = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto vals = text::split(lines[i + 1], ' ');
    if (vals.size() != d) throw FormatError(i + 2, "expected " + std::to_string(d) + " values");
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (!text::parse_real(vals[j], v) || !std::isfinite(v))
        throw FormatError(i + 2, "invalid value '" + std::string(vals[j]) + "'");
      map.matrix(i, j) = v;
    }
  }
  if (orthogonality_error(map.matrix) > kLoadedMapTolerance) throw ValidationError("map matrix is not orthogonal");
  return map;
}

inline void save_map(const OrthogonalMap& map, const std::string& path) { text::write_file(path, serialize_map(map)); }
inline OrthogonalMap load_map(const std::string& path) { return parse_map(text::read_file(path)); }

}  // namespace lexalign
