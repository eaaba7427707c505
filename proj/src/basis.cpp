#include "crkbs/basis.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "crkbs/errors.hpp"

namespace crkbs {

BasisSelection select_basis(const Eigen::MatrixXd& G, double pivot_threshold) {
  if (!(pivot_threshold >= 0.0) || !std::isfinite(pivot_threshold)) {
    throw ContractError("pivot threshold must be finite and nonnegative");
  }
  if (!G.allFinite()) {
    throw DomainError("feature matrix contains non-finite values");
  }
  const Eigen::Index n = G.rows();
  const Eigen::Index m = G.cols();

  Eigen::MatrixXd A = G;
  std::vector<Eigen::Index> rowp(n), colp(m);
  std::iota(rowp.begin(), rowp.end(), 0);
  std::iota(colp.begin(), colp.end(), 0);

  BasisSelection sel;
  sel.pivot_threshold = pivot_threshold;

  const Eigen::Index kmax = std::min(n, m);
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < kmax; ++k) {
    // Largest remaining entry; strict comparison keeps the first candidate
    // in scan order on ties.
    Eigen::Index pi = k, pj = k;
    double best = -1.0;
    for (Eigen::Index i = k; i < n; ++i) {
      for (Eigen::Index j = k; j < m; ++j) {
        double mag = std::abs(A(rowp[i], colp[j]));
        if (mag > best) {
          best = mag;
          pi = i;
          pj = j;
        }
      }
    }
    if (k == 0) {
      sel.first_pivot = best;
      if (best == 0.0) break;
    } else if (best < pivot_threshold * sel.first_pivot || best == 0.0) {
      break;
    }
    std::swap(rowp[k], rowp[pi]);
    std::swap(colp[k], colp[pj]);
    const double piv = A(rowp[k], colp[k]);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double mult = A(rowp[i], colp[k]) / piv;
      A(rowp[i], colp[k]) = mult;
      for (Eigen::Index j = k + 1; j < m; ++j) {
        A(rowp[i], colp[j]) -= mult * A(rowp[k], colp[j]);
      }
    }
    r = k + 1;
  }

  sel.row_indices.reserve(r);
  sel.col_indices.reserve(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    sel.row_indices.push_back(static_cast<int>(rowp[k]));
    sel.col_indices.push_back(static_cast<int>(colp[k]));
  }
  sel.khat.resize(r, r);
  sel.lu.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      sel.khat(i, j) = G(rowp[i], colp[j]);
      sel.lu(i, j) = A(rowp[i], colp[j]);
    }
  }
  return sel;
}

Eigen::VectorXd interpolation_coefficients(const BasisSelection& sel,
                                           const Eigen::VectorXd& values_at_rows) {
  const Eigen::Index r = sel.rank();
  if (values_at_rows.size() != r) {
    throw ContractError("expected " + std::to_string(r) +
                        " values at the pivot rows, got " +
                        std::to_string(values_at_rows.size()));
  }
  // Forward substitution with the unit lower factor, then back substitution.
  Eigen::VectorXd z = values_at_rows;
  for (Eigen::Index i = 1; i < r; ++i) {
    for (Eigen::Index k = 0; k < i; ++k) {
      z[i] -= sel.lu(i, k) * z[k];
    }
  }
  Eigen::VectorXd c(r);
  for (Eigen::Index i = r - 1; i >= 0; --i) {
    double acc = z[i];
    for (Eigen::Index k = i + 1; k < r; ++k) {
      acc -= sel.lu(i, k) * c[k];
    }
    c[i] = acc / sel.lu(i, i);
  }
  return c;
}

Reexpression reexpress(const BasisSelection& sel,
                       const Eigen::MatrixXd& full_columns,
                       const Eigen::VectorXd& values) {
  const Eigen::Index r = sel.rank();
  if (full_columns.cols() != r) {
    throw ContractError("selected-column matrix width does not match rank");
  }
  if (full_columns.rows() != values.size()) {
    throw ContractError("value vector length does not match sample size");
  }
  Reexpression out;
  if (r == 0) {
    double vmax = values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
    if (vmax > 0.0) {
      throw InfeasibleError(
          "basis is empty but the target values are nonzero (max magnitude " +
          std::to_string(vmax) + ")");
    }
    out.coeffs.resize(0);
    out.residual = 0.0;
    return out;
  }
  Eigen::VectorXd at_rows(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    at_rows[i] = values[sel.row_indices[static_cast<std::size_t>(i)]];
  }
  out.coeffs = interpolation_coefficients(sel, at_rows);
  out.residual = (values - full_columns * out.coeffs).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace crkbs
