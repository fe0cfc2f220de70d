#pragma once

// Test-only helpers: random data, independent oracles, planted datasets.
// Nothing here calls into the SVD or retrieval code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "lexalign/concept_dataset.hpp"
#include "lexalign/embedding_store.hpp"
#include "lexalign/matrix.hpp"
#include "lexalign/retrieval.hpp"
#include "lexalign/rng.hpp"

namespace lexalign::fixture {

inline Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

/// Random orthogonal matrix: Gram-Schmidt on the columns of a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t d, Rng& rng) {
  Matrix a = gaussian(d, d, rng);
  Matrix q(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = a(i, j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < j; ++p) {
        double c = 0.0;
        for (std::size_t i = 0; i < d; ++i) c += q(i, p) * v[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= c * q(i, p);
      }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (std::size_t i = 0; i < d; ++i) q(i, j) = v[i] / n;
  }
  return q;
}

/// rows of `m` mapped by `w` (each row x -> w·x)
inline Matrix map_rows(const Matrix& w, const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * m(r, j);
      out(r, i) = s;
    }
  return out;
}

/// ||W·xᵢ - yᵢ|| summed over paired rows, as a Frobenius norm.
inline double procrustes_objective(const Matrix& w, const Matrix& xs, const Matrix& ys) {
  const Matrix mapped = map_rows(w, xs);
  double s = 0.0;
  for (std::size_t i = 0; i < mapped.data().size(); ++i) {
    const double d = mapped.data()[i] - ys.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::vector<std::string> make_ids(std::size_t n, const std::string& prefix) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix.c_str(), i);
    ids.emplace_back(buf);
  }
  return ids;
}

inline EmbeddingSpace space_from(const Matrix& m, const std::string& language = "xx", const std::string& prefix = "c") {
  auto ids = make_ids(m.rows(), prefix);
  auto forms = ids;
  for (auto& f : forms) f = "form " + f;
  return EmbeddingSpace(language, std::move(ids), std::move(forms), m);
}

inline EmbeddingSpace random_space(std::size_t n, std::size_t d, Rng& rng, const std::string& language = "xx") {
  return space_from(gaussian(n, d, rng), language);
}

// Brute-force retrieval oracles --------------------------------------------

inline double oracle_cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i];
  for (std::size_t i = 0; i < a.size(); ++i) aa += a[i] * a[i];
  for (std::size_t i = 0; i < b.size(); ++i) bb += b[i] * b[i];
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

struct OracleHit {
  std::size_t index;
  double score;
};

/// Full sort of `scores` (descending, index ascending on ties), first k kept.
inline std::vector<OracleHit> oracle_rank(const std::vector<double>& scores, std::size_t k) {
  std::vector<OracleHit> all;
  for (std::size_t j = 0; j < scores.size(); ++j) all.push_back({j, scores[j]});
  std::stable_sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) { return a.score > b.score; });
  all.resize(k);
  return all;
}

inline std::vector<std::vector<double>> oracle_cosine_matrix(const EmbeddingSpace& q, const EmbeddingSpace& t) {
  std::vector<std::vector<double>> s(q.size(), std::vector<double>(t.size()));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) s[i][j] = oracle_cosine(q.vector(i), t.vector(j));
  return s;
}

inline double oracle_top_mean(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end(), std::greater<double>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return s / static_cast<double>(k);
}

/// CSLS score matrix computed from the full cosine matrix.
inline std::vector<std::vector<double>> oracle_csls_matrix(const EmbeddingSpace& q, const EmbeddingSpace& t,
                                                           std::size_t csls_k) {
  const auto cos = oracle_cosine_matrix(q, t);
  std::vector<double> r_t(q.size()), r_s(t.size());
  for (std::size_t i = 0; i < q.size(); ++i) r_t[i] = oracle_top_mean(cos[i], csls_k);
  for (std::size_t j = 0; j < t.size(); ++j) {
    std::vector<double> col(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) col[i] = cos[i][j];
    r_s[j] = oracle_top_mean(col, csls_k);
  }
  auto out = cos;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) out[i][j] = 2.0 * cos[i][j] - r_t[i] - r_s[j];
  return out;
}

// Planted bilingual dataset -------------------------------------------------

struct PlantedData {
  EmbeddingSpace source;
  EmbeddingSpace target;
  ConceptTable table;
  Matrix rotation;
};

/// `concepts` shared concepts with Gaussian source vectors and target vectors
/// exactly R·x, plus `distractors` extra random target-only vectors. Concepts
/// alternate abstract/physical.
inline PlantedData make_planted(std::size_t concepts, std::size_t d, std::size_t distractors, std::uint64_t seed,
                                const std::string& src_lang = "fr", const std::string& tgt_lang = "en") {
  Rng rng(seed);
  const Matrix r = random_orthogonal(d, rng);
  const Matrix x = gaussian(concepts, d, rng);
  const Matrix y = map_rows(r, x);
  Matrix yt(concepts + distractors, d);
  for (std::size_t i = 0; i < concepts; ++i) std::copy(y.row(i).begin(), y.row(i).end(), yt.row(i).begin());
  for (std::size_t i = 0; i < distractors; ++i)
    for (std::size_t c = 0; c < d; ++c) yt(concepts + i, c) = rng.normal();

  auto ids = make_ids(concepts, "syn");
  std::vector<std::string> src_forms, tgt_forms;
  for (std::size_t i = 0; i < concepts; ++i) {
    src_forms.push_back(src_lang + "_w" + std::to_string(i));
    tgt_forms.push_back(tgt_lang + "_w" + std::to_string(i));
  }
  auto tgt_ids = ids;
  for (const auto& id : make_ids(distractors, "distractor")) {
    tgt_ids.push_back(id);
    tgt_forms.push_back("d_" + id);
  }
  std::vector<ConceptRecord> records;
  for (std::size_t i = 0; i < concepts; ++i) {
    ConceptRecord rec;
    rec.synset_id = ids[i];
    rec.depth = 7;
    rec.category = i % 2 == 0 ? Category::abstract : Category::physical;
    rec.forms[src_lang] = src_forms[i];
    rec.forms[tgt_lang] = tgt_forms[i];
    records.push_back(std::move(rec));
  }
  return PlantedData{EmbeddingSpace(src_lang, ids, src_forms, x),
                     EmbeddingSpace(tgt_lang, tgt_ids, tgt_forms, yt),
                     ConceptTable({src_lang, tgt_lang}, std::move(records)), r};
}

// Hub fixture ---------------------------------------------------------------

// Hub h = e0; query i = e0 + a·e(1+i); its match t_i = q_i + b·e(1+n+i).
// For 1+a²+b² > (1+a²)² the hub is every query's cosine nearest neighbour.
struct HubFixture {
  EmbeddingSpace queries;
  EmbeddingSpace targets;  // row 0 is the hub, row 1+i matches query i
};

inline HubFixture hub_fixture(std::size_t n, double a, double b, Rng& rng) {
  const std::size_t d = 1 + 2 * n;
  Matrix q(n, d), t(n + 1, d);
  t(0, 0) = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    q(i, 0) = 1.0;
    q(i, 1 + i) = a;
    t(1 + i, 0) = 1.0;
    t(1 + i, 1 + i) = a;
    t(1 + i, 1 + n + i) = b;
  }
  const Matrix r = random_orthogonal(d, rng);  // rotation changes nothing but the coordinates
  std::vector<std::string> qids, tids{"hub"};
  for (std::size_t i = 0; i < n; ++i) {
    qids.push_back("c" + std::to_string(i));
    tids.push_back("c" + std::to_string(i));
  }
  return {EmbeddingSpace("q", qids, qids, map_rows(r, q)), EmbeddingSpace("t", tids, tids, map_rows(r, t))};
}

// Ranked lists with a planted gold rank -------------------------------------

// Result for `query` whose gold target sits at 1-based `rank` (0: absent).
inline RetrievalResult ranked_at(const std::string& query, std::size_t rank, std::size_t length = 30) {
  RetrievalResult r;
  r.query_id = query;
  for (std::size_t i = 1; i <= length; ++i)
    r.ranked.push_back({i == rank ? query : "other" + std::to_string(i), i - 1, 1.0 / static_cast<double>(i)});
  return r;
}

inline std::vector<RetrievalResult> with_ranks(const std::vector<std::size_t>& ranks) {
  std::vector<RetrievalResult> out;
  for (std::size_t i = 0; i < ranks.size(); ++i) out.push_back(ranked_at("q" + std::to_string(i), ranks[i]));
  return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lexalign_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lexalign::fixture
