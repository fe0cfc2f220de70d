#pragma once

// Cosine nearest-neighbour and CSLS retrieval.
//
//   csls(x, y) = 2·cos(x, y) - r_T(x) - r_S(y)
//
// r_T(x): mean cosine of query x with its csls_k nearest targets.
// r_S(y): mean cosine of target y with its csls_k nearest queries, taken over
//         the whole query space (batch semantics), including when only a
//         subset of queries is ranked.
//
// Ties are broken by ascending target index. Similarities are computed with a
// fixed summation order, so blocking and thread count never change results.
//
// Results file (TSV, no header): query_id \t rank \t target_id \t score

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexalign/embedding_store.hpp"
#include "lexalign/error.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

enum class Method { nn, csls };

inline std::string_view to_string(Method m) { return m == Method::nn ? "nn" : "csls"; }

inline Method parse_method(std::string_view s) {
  if (s == "nn" || s == "cosine") return Method::nn;
  if (s == "csls") return Method::csls;
  throw ValidationError("unknown retrieval method '" + std::string(s) + "'");
}

inline constexpr std::size_t kDefaultCslsK = 10;

struct Ranked {
  std::string target_id;
  std::size_t target_index = 0;
  double score = 0.0;
};

struct RetrievalResult {
  std::string query_id;
  std::vector<Ranked> ranked;  // best first
  Method method = Method::nn;
  std::size_t csls_k = 0;
};

struct RetrievalOptions {
  std::size_t threads = 1;
  std::size_t block_size = 1024;          // targets per similarity tile
  std::vector<std::size_t> query_rows;    // rows of the query space to rank; empty = all
};

namespace detail {

struct Candidate {
  double score;
  std::size_t index;
};

// a ranks ahead of b
inline bool ahead(const Candidate& a, const Candidate& b) noexcept {
  return a.score > b.score || (a.score == b.score && a.index < b.index);
}

/// Keeps the k best candidates; the heap top is the weakest kept one.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void offer(double score, std::size_t index) {
    const Candidate c{score, index};
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), ahead);
    } else if (ahead(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ahead);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), ahead);
    }
  }

  /// Best first. Leaves the accumulator empty.
  std::vector<Candidate> take() {
    std::sort_heap(heap_.begin(), heap_.end(), ahead);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

inline std::vector<double> row_norms(const EmbeddingSpace& s, const char* role) {
  std::vector<double> n(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    n[i] = norm2(s.vector(i));
    if (n[i] == 0.0) throw ValidationError(std::string("zero-norm ") + role + " vector for concept '" + s.ids()[i] + "'");
  }
  return n;
}

inline double cosine(std::span<const double> a, double na, std::span<const double> b, double nb) noexcept {
  return dot(a, b) / (na * nb);
}

/// Mean of the `k` largest values in `values`, summed largest first.
inline double mean_of_top(std::vector<double>& values, std::size_t k) {
  std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(),
                    std::greater<double>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += values[i];
  return s / static_cast<double>(k);
}

struct Prepared {
  std::vector<double> qnorm;
  std::vector<double> tnorm;
  std::vector<std::size_t> rows;
};

inline Prepared prepare(const EmbeddingSpace& queries, const EmbeddingSpace& targets, std::size_t k,
                        const RetrievalOptions& opt) {
  if (queries.dim() != targets.dim())
    throw ValidationError("dimension mismatch: queries d=" + std::to_string(queries.dim()) +
                          ", targets d=" + std::to_string(targets.dim()));
  if (k < 1 || k > targets.size())
    throw ValidationError("k=" + std::to_string(k) + " out of range [1, " + std::to_string(targets.size()) + "]");
  if (opt.block_size == 0) throw ValidationError("block size must be positive");
  Prepared p{row_norms(queries, "query"), row_norms(targets, "target"), opt.query_rows};
  if (p.rows.empty()) {
    p.rows.resize(queries.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i) p.rows[i] = i;
  }
  for (std::size_t r : p.rows)
    if (r >= queries.size()) throw ValidationError("query row out of range");
  return p;
}

inline constexpr std::size_t kQueryTile = 16;

/// Cosines of the queries rows[first, last) against all targets, written
/// row-major into `out` ((last - first) x targets). Target blocks form the
/// outer loop so each block is reused across the query tile.
inline void similarity_tile(const EmbeddingSpace& queries, const EmbeddingSpace& targets, const Prepared& p,
                            std::size_t first, std::size_t last, std::size_t block, std::vector<double>& out) {
  const std::size_t m = targets.size();
  out.resize((last - first) * m);
  for (std::size_t b = 0; b < m; b += block) {
    const std::size_t e = std::min(m, b + block);
    for (std::size_t n = first; n < last; ++n) {
      const std::size_t qi = p.rows[n];
      const auto q = queries.vector(qi);
      double* row = out.data() + (n - first) * m;
      for (std::size_t j = b; j < e; ++j) row[j] = cosine(q, p.qnorm[qi], targets.vector(j), p.tnorm[j]);
    }
  }
}

inline RetrievalResult to_result(const EmbeddingSpace& queries, const EmbeddingSpace& targets, std::size_t qi,
                                 std::vector<Candidate> best, Method method, std::size_t csls_k) {
  RetrievalResult r{queries.ids()[qi], {}, method, csls_k};
  r.ranked.reserve(best.size());
  for (const auto& c : best) r.ranked.push_back({targets.ids()[c.index], c.index, c.score});
  return r;
}

}  // namespace detail

/// Top-k targets by cosine similarity for each selected query.
inline std::vector<RetrievalResult> cosine_topk(const EmbeddingSpace& queries, const EmbeddingSpace& targets,
                                                std::size_t k, const RetrievalOptions& opt = {}) {
  const auto p = detail::prepare(queries, targets, k, opt);
  std::vector<RetrievalResult> out(p.rows.size());
  parallel_for(p.rows.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
    const std::size_t m = targets.size();
    std::vector<double> sims;
    for (std::size_t t0 = begin; t0 < end; t0 += detail::kQueryTile) {
      const std::size_t t1 = std::min(end, t0 + detail::kQueryTile);
      detail::similarity_tile(queries, targets, p, t0, t1, opt.block_size, sims);
      for (std::size_t n = t0; n < t1; ++n) {
        const double* row = sims.data() + (n - t0) * m;
        detail::TopK top(k);
        for (std::size_t j = 0; j < m; ++j) top.offer(row[j], j);
        out[n] = detail::to_result(queries, targets, p.rows[n], top.take(), Method::nn, 0);
      }
    }
  });
  return out;
}

/// r_S: for every target, the mean cosine with its csls_k nearest queries.
inline std::vector<double> target_hubness(const EmbeddingSpace& queries, const EmbeddingSpace& targets,
                                          std::size_t csls_k, std::size_t threads = 1) {
  const auto qn = detail::row_norms(queries, "query");
  const auto tn = detail::row_norms(targets, "target");
  std::vector<double> r(targets.size());
  parallel_for(targets.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sims(queries.size());
    for (std::size_t j = begin; j < end; ++j) {
      const auto t = targets.vector(j);
      for (std::size_t i = 0; i < queries.size(); ++i) sims[i] = detail::cosine(queries.vector(i), qn[i], t, tn[j]);
      r[j] = detail::mean_of_top(sims, csls_k);
    }
  });
  return r;
}

/// Top-k targets by CSLS score for each selected query.
inline std::vector<RetrievalResult> csls_topk(const EmbeddingSpace& queries, const EmbeddingSpace& targets,
                                              std::size_t k, std::size_t csls_k = kDefaultCslsK,
                                              const RetrievalOptions& opt = {}) {
  const auto p = detail::prepare(queries, targets, k, opt);
  if (csls_k < 1 || csls_k > targets.size() || csls_k > queries.size())
    throw ValidationError("csls_k=" + std::to_string(csls_k) + " out of range [1, " +
                          std::to_string(std::min(targets.size(), queries.size())) + "]");
  const auto r_s = target_hubness(queries, targets, csls_k, opt.threads);
  std::vector<RetrievalResult> out(p.rows.size());
  parallel_for(p.rows.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
    const std::size_t m = targets.size();
    std::vector<double> sims;
    std::vector<double> scratch;
    for (std::size_t t0 = begin; t0 < end; t0 += detail::kQueryTile) {
      const std::size_t t1 = std::min(end, t0 + detail::kQueryTile);
      detail::similarity_tile(queries, targets, p, t0, t1, opt.block_size, sims);
      for (std::size_t n = t0; n < t1; ++n) {
        const double* row = sims.data() + (n - t0) * m;
        scratch.assign(row, row + m);
        const double r_t = detail::mean_of_top(scratch, csls_k);
        detail::TopK top(k);
        for (std::size_t j = 0; j < m; ++j) top.offer(2.0 * row[j] - r_t - r_s[j], j);
        out[n] = detail::to_result(queries, targets, p.rows[n], top.take(), Method::csls, csls_k);
      }
    }
  });
  return out;
}

inline std::vector<RetrievalResult> retrieve(const EmbeddingSpace& queries, const EmbeddingSpace& targets,
                                             std::size_t k, Method method, std::size_t csls_k = kDefaultCslsK,
                                             const RetrievalOptions& opt = {}) {
  return method == Method::nn ? cosine_topk(queries, targets, k, opt) : csls_topk(queries, targets, k, csls_k, opt);
}

inline std::string serialize_results(const std::vector<RetrievalResult>& results) {
  std::string out;
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.ranked.size(); ++i)
      out += r.query_id + "\t" + std::to_string(i + 1) + "\t" + r.ranked[i].target_id + "\t" +
             text::format_fixed(r.ranked[i].score, 6) + "\n";
  return out;
}

inline void save_results(const std::vector<RetrievalResult>& results, const std::string& path) {
  text::write_file(path, serialize_results(results));
}

/// Parse a results file. Rows of one query must be contiguous with ranks 1..k.
inline std::vector<RetrievalResult> parse_results(std::string_view content) {
  std::vector<RetrievalResult> out;
  const auto lines = text::lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = text::split(lines[i], '\t');
    if (f.size() != 4) throw FormatError(i + 1, "expected \"query_id\\trank\\ttarget_id\\tscore\"");
    long long rank = 0;
    double score = 0.0;
    if (!text::parse_int(f[1], rank) || rank < 1) throw FormatError(i + 1, "invalid rank");
    if (!text::parse_real(f[3], score) || !std::isfinite(score)) throw FormatError(i + 1, "invalid score");
    if (rank == 1) {
      out.push_back({std::string(f[0]), {}, Method::nn, 0});
    } else if (out.empty() || out.back().query_id != f[0] ||
               out.back().ranked.size() + 1 != static_cast<std::size_t>(rank)) {
      throw FormatError(i + 1, "ranks must be contiguous per query starting at 1");
    }
    out.back().ranked.push_back({std::string(f[2]), 0, score});
  }
  return out;
}

inline std::vector<RetrievalResult> load_results(const std::string& path) { return parse_results(text::read_file(path)); }

}  // namespace lexalign
