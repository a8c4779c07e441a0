#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "wecure/solver.hpp"

namespace wecure {

namespace {

using Triplet = Eigen::Triplet<double, Index>;

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::VectorXd gather(const Eigen::VectorXd& full, const std::vector<Index>& ids) {
    Eigen::VectorXd out(static_cast<Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) out[static_cast<Index>(k)] = full[ids[k]];
    return out;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::LDMM: return "ldmm";
        case Method::WNLL: return "wnll";
        case Method::CURE: return "cure";
        case Method::WeCURE: return "wecure";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Method m : {Method::LDMM, Method::WNLL, Method::CURE, Method::WeCURE}) {
        if (lower == to_string(m)) return m;
    }
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected ldmm|wnll|cure|wecure)");
}

Coefficients effective_coefficients(const RecoveryParams& params, Index n, Index m) {
    if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
        throw InvalidArgument("lambda must be a finite nonnegative number");
    }
    if (params.gamma && !(*params.gamma > 0.0 && std::isfinite(*params.gamma))) {
        throw InvalidArgument("gamma must be a finite positive number");
    }
    const double weighted = params.gamma.value_or(m > 0 ? static_cast<double>(n) / static_cast<double>(m) : 1.0);
    switch (params.method) {
        case Method::LDMM: return {0.0, 1.0};
        case Method::WNLL: return {0.0, weighted};
        case Method::CURE: return {params.lambda, 1.0};
        case Method::WeCURE: return {params.lambda, weighted};
    }
    return {};
}

AssembledSystem assemble_system(const SparseWeightGraph& graph, const Observations& obs, const RecoveryParams& params) {
    const Index n = graph.size();
    const Index m = static_cast<Index>(obs.vertices.size());
    if (m == 0) throw InvalidArgument("assemble_system: the labeled set is empty");
    if (obs.values.size() != obs.vertices.size()) {
        throw InvalidArgument("assemble_system: " + std::to_string(obs.values.size()) + " values for " +
                              std::to_string(m) + " labeled vertices");
    }

    // local_of[v] >= 0: position in U; < 0: -(position in S) - 1.
    std::vector<Index> local_of(static_cast<std::size_t>(n), 0);
    for (Index k = 0; k < m; ++k) {
        const Index v = obs.vertices[static_cast<std::size_t>(k)];
        if (v < 0 || v >= n) throw InvalidArgument("assemble_system: labeled vertex " + std::to_string(v) + " out of range");
        if (local_of[static_cast<std::size_t>(v)] < 0) {
            throw InvalidArgument("assemble_system: vertex " + std::to_string(v) + " labeled twice");
        }
        if (!std::isfinite(obs.values[static_cast<std::size_t>(k)])) {
            throw InvalidArgument("assemble_system: non-finite value at vertex " + std::to_string(v));
        }
        local_of[static_cast<std::size_t>(v)] = -k - 1;
    }

    AssembledSystem sys;
    sys.n_ = n;
    sys.coeffs_ = effective_coefficients(params, n, m);
    sys.labeled_ = obs.vertices;
    for (Index v = 0; v < n; ++v) {
        if (local_of[static_cast<std::size_t>(v)] == 0) {
            local_of[static_cast<std::size_t>(v)] = static_cast<Index>(sys.unknowns_.size());
            sys.unknowns_.push_back(v);
        }
    }
    const Index nu = sys.size();

    // Every component needs an anchor, otherwise A has a null vector.
    const std::vector<Index> comp = connected_components(graph);
    std::vector<char> anchored(static_cast<std::size_t>(n), 0);
    for (Index v : obs.vertices) anchored[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])] = 1;
    for (Index v = 0; v < n; ++v) {
        if (!anchored[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])]) {
            throw SingularSystem(v, "assemble_system: vertex " + std::to_string(v) +
                                        " lies in a connected component without labeled vertices");
        }
    }

    const double gamma = sys.coeffs_.gamma;
    const SparseMatrix lap = assemble_laplacian_matrix(graph);
    std::vector<Triplet> t_u, t_s, t_uu, t_us, t_su;
    t_u.reserve(static_cast<std::size_t>(lap.nonZeros()));
    sys.shift_ = Eigen::VectorXd::Zero(nu);
    for (Index i = 0; i < n; ++i) {
        const Index li = local_of[static_cast<std::size_t>(i)];
        for (SparseMatrix::InnerIterator it(lap, i); it; ++it) {
            const Index lj = local_of[static_cast<std::size_t>(it.col())];
            if (lj >= 0) {
                t_u.emplace_back(i, lj, it.value());
                if (li >= 0) t_uu.emplace_back(li, lj, it.value());
                else t_su.emplace_back(-li - 1, lj, -it.value());
            } else {
                t_s.emplace_back(i, -lj - 1, it.value());
                if (li >= 0) t_us.emplace_back(li, -lj - 1, -it.value());
            }
        }
    }
    sys.lap_u_ = from_triplets(n, nu, t_u);
    sys.lap_u_t_ = sys.lap_u_.transpose();
    sys.lap_s_ = from_triplets(n, m, t_s);
    sys.lap_uu_ = from_triplets(nu, nu, t_uu);
    sys.w_us_ = from_triplets(nu, m, t_us);
    sys.w_su_ = from_triplets(m, nu, t_su);

    for (Index li = 0; li < nu; ++li) {
        double dw = 0.0;
        for (SparseMatrix::InnerIterator it(sys.w_us_, li); it; ++it) dw += it.value();
        sys.shift_[li] = gamma * dw;
    }
    sys.d_ = Eigen::VectorXd::Ones(n);
    for (Index v : obs.vertices) sys.d_[v] = gamma;

    sys.rhs_ = sys.rhs_for(obs.values);
    return sys;
}

Eigen::VectorXd AssembledSystem::rhs_for(std::span<const double> values) const {
    if (static_cast<Index>(values.size()) != static_cast<Index>(labeled_.size())) {
        throw InvalidArgument("rhs_for: expected one value per labeled vertex");
    }
    const Eigen::Map<const Eigen::VectorXd> g(values.data(), static_cast<Index>(values.size()));
    Eigen::VectorXd b = w_us_ * g;
    b += coeffs_.gamma * (w_su_.transpose() * g);
    if (coeffs_.lambda != 0.0) {
        const Eigen::VectorXd lg = lap_s_ * g;
        b -= coeffs_.lambda * (lap_u_t_ * d_.cwiseProduct(lg));
    }
    return b;
}

Eigen::VectorXd AssembledSystem::apply(const Eigen::VectorXd& v) const {
    if (v.size() != size()) throw InvalidArgument("AssembledSystem::apply: length mismatch");
    const Eigen::VectorXd lv = lap_u_ * v;
    Eigen::VectorXd out = gather(lv, unknowns_) + shift_.cwiseProduct(v);
    if (coeffs_.lambda != 0.0) out += coeffs_.lambda * (lap_u_t_ * d_.cwiseProduct(lv));
    return out;
}

SparseMatrix AssembledSystem::matrix() const {
    SparseMatrix a = lap_uu_;
    SparseMatrix diag(size(), size());
    diag.reserve(Eigen::VectorXi::Constant(size(), 1));
    for (Index i = 0; i < size(); ++i) diag.insert(i, i) = shift_[i];
    a += diag;
    if (coeffs_.lambda != 0.0) {
        const SparseMatrix scaled = d_.asDiagonal() * lap_u_;
        SparseMatrix bih = lap_u_t_ * scaled;
        a += coeffs_.lambda * bih;
    }
    SparseMatrix at = a.transpose();
    return 0.5 * (a + at);
}

Eigen::VectorXd AssembledSystem::scatter(std::span<const double> values, const Eigen::VectorXd& solution) const {
    if (values.size() != labeled_.size() || solution.size() != size()) {
        throw InvalidArgument("scatter: length mismatch");
    }
    Eigen::VectorXd full(n_);
    for (std::size_t k = 0; k < labeled_.size(); ++k) full[labeled_[k]] = values[k];
    for (std::size_t k = 0; k < unknowns_.size(); ++k) full[unknowns_[k]] = solution[static_cast<Index>(k)];
    return full;
}

CgResult solve_cg(const AssembledSystem& sys, const Eigen::VectorXd& rhs, double tol, Index max_iters) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_cg: tolerance must be positive");
    if (max_iters < 1) throw InvalidArgument("solve_cg: max_iters must be positive");
    if (rhs.size() != sys.size()) throw InvalidArgument("solve_cg: right-hand side length mismatch");

    CgResult res;
    res.solution = Eigen::VectorXd::Zero(sys.size());
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) return res;

    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    double rs = r.squaredNorm();
    const double target = tol * bnorm;
    double rel = 1.0;

    for (Index it = 1; it <= max_iters; ++it) {
        const Eigen::VectorXd ap = sys.apply(p);
        const double curvature = p.dot(ap);
        if (!(curvature > 0.0)) {
            throw SingularSystem(-1, "solve_cg: matrix is not positive definite (p^T A p = " +
                                         std::to_string(curvature) + ")");
        }
        const double alpha = rs / curvature;
        res.solution += alpha * p;
        r -= alpha * ap;
        double rs_new = r.squaredNorm();
        rel = std::sqrt(rs_new) / bnorm;

        if (std::sqrt(rs_new) <= target) {
            // The recurrence drifts from the true residual; confirm before returning.
            r = rhs - sys.apply(res.solution);
            rs_new = r.squaredNorm();
            rel = std::sqrt(rs_new) / bnorm;
            if (std::sqrt(rs_new) <= target) {
                res.iterations = it;
                res.relative_residual = rel;
                return res;
            }
            p = r;
            rs = rs_new;
            continue;
        }
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    throw NonConvergence(rel, max_iters,
                         "solve_cg: no convergence after " + std::to_string(max_iters) +
                             " iterations (relative residual " + std::to_string(rel) + ")");
}

CgResult solve_cg(const AssembledSystem& sys, double tol, Index max_iters) {
    return solve_cg(sys, sys.rhs(), tol, max_iters);
}

DenseSolution solve_dense_oracle(const AssembledSystem& sys, const Eigen::VectorXd& rhs) {
    if (sys.size() > 2000) throw InvalidArgument("solve_dense_oracle: system larger than 2000 unknowns");
    if (rhs.size() != sys.size()) throw InvalidArgument("solve_dense_oracle: right-hand side length mismatch");
    DenseSolution out;
    if (sys.size() == 0) {
        out.solution.resize(0);
        out.min_eigenvalue = std::numeric_limits<double>::infinity();
        return out;
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd(sys.matrix());
    const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    for (Index i = 0; i < pivots.size(); ++i) {
        if (!(std::abs(pivots[i]) >= 1e-14 * scale)) {
            throw SingularSystem(-1, "solve_dense_oracle: pivot " + std::to_string(pivots[i]) +
                                         " below 1e-14 * |A|");
        }
    }
    out.solution = ldlt.solve(rhs);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    return out;
}

DenseSolution solve_dense_oracle(const AssembledSystem& sys) { return solve_dense_oracle(sys, sys.rhs()); }

Eigen::VectorXd recover(const AssembledSystem& sys, std::span<const double> values, const RecoveryParams& params) {
    if (values.size() != sys.labeled().size()) throw InvalidArgument("recover: one value per labeled vertex expected");
    if (sys.size() == 0) return sys.scatter(values, Eigen::VectorXd(0));

    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double offset = 0.5 * (*lo + *hi);
    std::vector<double> centered(values.begin(), values.end());
    for (double& v : centered) v -= offset;

    const Index max_iters = params.cg_max_iters.value_or(10 * sys.size());
    CgResult cg = solve_cg(sys, sys.rhs_for(centered), params.cg_tol, max_iters);
    cg.solution.array() += offset;
    return sys.scatter(values, cg.solution);
}

Eigen::VectorXd recover(const SparseWeightGraph& graph, const Observations& obs, const RecoveryParams& params) {
    const AssembledSystem sys = assemble_system(graph, obs, params);
    return recover(sys, obs.values, params);
}

}  // namespace wecure
