#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wecure/graph.hpp"

namespace wecure {

/// The four energies share one linear system and differ only in (lambda, gamma):
///   LDMM   (0, 1)            WNLL   (0, |P|/|S|)
///   CURE   (lambda, 1)       WeCURE (lambda, |P|/|S|)
enum class Method { LDMM, WNLL, CURE, WeCURE };

std::string_view to_string(Method m) noexcept;
/// Case-insensitive; throws InvalidArgument on unknown names.
Method parse_method(std::string_view name);

/// Known values g on the labeled vertex set S.
struct Observations {
    std::vector<Index> vertices;
    std::vector<double> values;
};

struct RecoveryParams {
    Method method = Method::WeCURE;
    double lambda = 1.0;
    std::optional<double> gamma;        // |P|/|S| when unset
    double cg_tol = 1e-6;
    std::optional<Index> cg_max_iters;  // 10 * |U| when unset
};

struct Coefficients {
    double lambda = 0.0;
    double gamma = 1.0;
};

/// Resolves the method's (lambda, gamma) pair for a graph of n vertices with m labeled.
Coefficients effective_coefficients(const RecoveryParams& params, Index n, Index m);

/// The Euler-Lagrange system over the unlabeled vertices U = P \ S:
///
///   A = L_UU + gamma * diag(DW)_U + lambda * (L^T D L)_UU
///   b = W_US g + gamma * W_SU^T g - lambda * (L^T D L [0; g])_U
///
/// with D = diag(1 on U, gamma on S) and DW_i = sum_{j in S} w_ij. A is kept in
/// factored form (the columns of L over U plus a diagonal shift); the biharmonic
/// part is far denser than L, so it is only materialized on request.
class AssembledSystem {
public:
    Index size() const noexcept { return static_cast<Index>(unknowns_.size()); }
    Index graph_size() const noexcept { return n_; }
    /// Global ids of U, ascending. Position in this list is the local index.
    const std::vector<Index>& unknowns() const noexcept { return unknowns_; }
    /// Global ids of S in the order the observations were given.
    const std::vector<Index>& labeled() const noexcept { return labeled_; }
    Coefficients coefficients() const noexcept { return coeffs_; }

    /// Right-hand side for the observations used at assembly.
    const Eigen::VectorXd& rhs() const noexcept { return rhs_; }
    /// Right-hand side for other values on the same labeled set; A is unchanged.
    Eigen::VectorXd rhs_for(std::span<const double> values) const;

    /// A * v.
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    /// Explicit A, exactly symmetric.
    SparseMatrix matrix() const;

    /// Full vector over P: `values` on S, `solution` on U.
    Eigen::VectorXd scatter(std::span<const double> values, const Eigen::VectorXd& solution) const;

private:
    friend AssembledSystem assemble_system(const SparseWeightGraph&, const Observations&, const RecoveryParams&);

    Index n_ = 0;
    Coefficients coeffs_;
    std::vector<Index> unknowns_;
    std::vector<Index> labeled_;
    SparseMatrix lap_u_;    // L[:, U], n x |U|
    SparseMatrix lap_u_t_;  // its transpose
    SparseMatrix lap_s_;    // L[:, S], n x |S|
    SparseMatrix lap_uu_;   // L[U, U]
    SparseMatrix w_us_;     // W[U, S]
    SparseMatrix w_su_;     // W[S, U]
    Eigen::VectorXd d_;      // D diagonal over P
    Eigen::VectorXd shift_;  // gamma * DW over U
    Eigen::VectorXd rhs_;
};

/// Throws SingularSystem when a connected component holds no labeled vertex,
/// InvalidArgument on malformed observations.
AssembledSystem assemble_system(const SparseWeightGraph& graph, const Observations& obs,
                                const RecoveryParams& params);

struct CgResult {
    Eigen::VectorXd solution;
    Index iterations = 0;
    double relative_residual = 0.0;
};

/// Unpreconditioned conjugate gradients from a zero start, stopping once the
/// true residual satisfies |Av - b| <= tol |b|. Throws NonConvergence.
CgResult solve_cg(const AssembledSystem& sys, const Eigen::VectorXd& rhs, double tol, Index max_iters);
CgResult solve_cg(const AssembledSystem& sys, double tol, Index max_iters);

struct DenseSolution {
    Eigen::VectorXd solution;
    double min_eigenvalue = 0.0;
};

/// Dense LDL^T solve of the explicit system, for verification. Limited to
/// |U| <= 2000; throws SingularSystem when a pivot drops below 1e-14 |A|.
DenseSolution solve_dense_oracle(const AssembledSystem& sys);
DenseSolution solve_dense_oracle(const AssembledSystem& sys, const Eigen::VectorXd& rhs);

/// Solves an assembled system for the given labeled values and returns the full
/// vector over P. The values are shifted by their mid-range before the solve and
/// shifted back after, so constant data is reproduced exactly.
Eigen::VectorXd recover(const AssembledSystem& sys, std::span<const double> values, const RecoveryParams& params);

/// Assemble and solve in one go.
Eigen::VectorXd recover(const SparseWeightGraph& graph, const Observations& obs, const RecoveryParams& params);

}  // namespace wecure
