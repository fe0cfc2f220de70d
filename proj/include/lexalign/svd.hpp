#pragma once

// Full SVD of a square matrix by one-sided (Hestenes) Jacobi rotations.
// Single-threaded and free of data-dependent scheduling, so identical input
// gives bitwise-identical output.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lexalign/error.hpp"
#include "lexalign/matrix.hpp"

namespace lexalign {

struct Svd {
  Matrix u;                   // columns are left singular vectors
  std::vector<double> sigma;  // descending
  Matrix v;                   // columns are right singular vectors
};

namespace detail {

inline void rotate_rows(std::span<double> a, std::span<double> b, double c, double s) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    a[i] = c * x - s * y;
    b[i] = s * x + c * y;
  }
}

// Project `x` off every row of `basis` (two passes of modified Gram-Schmidt).
inline void project_out(std::span<double> x, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * q[i];
    }
  }
}

}  // namespace detail

/// A = U·diag(sigma)·Vᵀ with singular values sorted descending. For each
/// singular pair the signs are fixed so the largest-magnitude entry of the U
/// column is positive (first such entry on ties). Directions belonging to
/// numerically zero singular values are completed deterministically from the
/// standard basis so U stays orthogonal.
inline Svd jacobi_svd(const Matrix& a, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw ValidationError("jacobi_svd expects a non-empty square matrix");
  for (double x : a.data())
    if (!std::isfinite(x)) throw ValidationError("jacobi_svd: non-finite matrix entry");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double tol = static_cast<double>(n) * eps;
  // Columns this small are roundoff; rotating them against each other never settles.
  const double negligible = std::pow(eps * frobenius(a), 2);

  // g holds the columns of A·V as rows; vt holds the columns of V as rows.
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  std::vector<std::vector<double>> vt(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    vt[i][i] = 1.0;
    for (std::size_t j = 0; j < n; ++j) g[j][i] = a(i, j);
  }

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(g[p], g[p]);
        const double beta = dot(g[q], g[q]);
        const double gamma = dot(g[p], g[q]);
        if (alpha <= negligible || beta <= negligible) continue;
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        detail::rotate_rows(g[p], g[q], c, s);
        detail::rotate_rows(vt[p], vt[q], c, s);
      }
    }
  }
  if (!converged) throw NumericError("jacobi_svd did not converge");

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) sig[j] = norm2(g[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  const double sigma_max = sig[order[0]];
  const double zero_cut = sigma_max * tol;

  std::vector<std::vector<double>> ucols;  // accepted orthonormal columns
  std::vector<std::vector<double>> uslot(n);
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    if (sig[j] <= zero_cut || sig[j] == 0.0) {
      missing.push_back(k);
      continue;
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = g[j][i] / sig[j];
    detail::project_out(u, ucols);
    const double nu = norm2(u);
    if (nu < 0.5) {
      missing.push_back(k);
      continue;
    }
    for (double& x : u) x /= nu;
    ucols.push_back(u);
    uslot[k] = std::move(u);
  }
  std::size_t next_basis = 0;
  for (std::size_t k : missing) {
    for (;; ++next_basis) {
      if (next_basis >= n) throw NumericError("jacobi_svd: basis completion failed");
      std::vector<double> e(n, 0.0);
      e[next_basis] = 1.0;
      detail::project_out(e, ucols);
      const double ne = norm2(e);
      if (ne > 1.0 / (2.0 * std::sqrt(static_cast<double>(n)))) {
        for (double& x : e) x /= ne;
        ucols.push_back(e);
        uslot[k] = std::move(e);
        ++next_basis;
        break;
      }
    }
  }

  Svd out{Matrix(n, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    const auto& u = uslot[k];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
    const double sign = u[arg] < 0.0 ? -1.0 : 1.0;
    out.sigma[k] = sig[j];
    for (std::size_t i = 0; i < n; ++i) {
      out.u(i, k) = sign * u[i];
      out.v(i, k) = sign * vt[j][i];
    }
  }
  return out;
}

}  // namespace lexalign
