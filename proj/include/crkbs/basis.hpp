#pragma once

#include <Eigen/Dense>
#include <vector>

namespace crkbs {

// Result of Gaussian elimination with complete pivoting on a feature matrix.
// row_indices / col_indices are the pivot positions in the order they were
// chosen; khat is the square subblock G(row_indices, col_indices). `lu`
// stores the elimination factors of khat (unit lower triangle below the
// diagonal, upper triangle on and above) so interpolation solves reuse the
// factorization instead of refactoring.
struct BasisSelection {
  std::vector<int> row_indices;
  std::vector<int> col_indices;
  Eigen::MatrixXd khat;
  Eigen::MatrixXd lu;
  double pivot_threshold = 0.0;
  double first_pivot = 0.0;

  int rank() const { return static_cast<int>(row_indices.size()); }
};

// Runs complete pivoting on G and stops when the next pivot magnitude drops
// below pivot_threshold * |first pivot| (or the matrix is exhausted). Ties
// in pivot magnitude resolve to the first candidate in scan order, so the
// selection is deterministic. A zero matrix yields rank 0.
BasisSelection select_basis(const Eigen::MatrixXd& G, double pivot_threshold);

// Solves khat * c = values_at_rows using the stored factors. `values_at_rows`
// must list the target values at row_indices, in selection order.
Eigen::VectorXd interpolation_coefficients(const BasisSelection& sel,
                                           const Eigen::VectorXd& values_at_rows);

// Re-expresses a function known on all rows of the sample in the selected
// basis: solves for c on the pivot rows, then checks the reconstruction
// max_i |values[i] - (G_selected_cols * c)[i]| <= tol * max(1, max_i |values[i]|)
// on every row. `full_columns` is the N x rank matrix of the selected
// columns on the whole sample. Throws InfeasibleError when the basis is
// empty but the values are not, and returns the residual for the caller's
// tolerance check otherwise.
struct Reexpression {
  Eigen::VectorXd coeffs;
  double residual = 0.0;
};
Reexpression reexpress(const BasisSelection& sel,
                       const Eigen::MatrixXd& full_columns,
                       const Eigen::VectorXd& values);

}  // namespace crkbs
