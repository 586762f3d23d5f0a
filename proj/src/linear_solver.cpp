#include "bsflow/linear_solver.hpp"

#include "bsflow/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

namespace bsflow {

SparseMatrix::SparseMatrix(int rows, int cols, const std::vector<Eigen::Triplet<double>>& t,
                           bool symmetric)
    : symmetric_(symmetric) {
    m_.resize(rows, cols);
    m_.setFromTriplets(t.begin(), t.end());
    validate();
}

SparseMatrix::SparseMatrix(Eigen::SparseMatrix<double> m, bool symmetric)
    : m_(std::move(m)), symmetric_(symmetric) {
    validate();
}

void SparseMatrix::validate() {
    m_.prune(0.0);
    m_.makeCompressed();
    for (int k = 0; k < m_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m_, k); it; ++it)
            if (!std::isfinite(it.value())) throw SolverError("non-finite matrix entry");
}

SaddleSolution solve_saddle_point(const BlockSystem& sys, double tol) {
    const int N = sys.layout.total();
    const int nb = static_cast<int>(sys.nullspace.size());

    // constraint elimination: identity rows, columns moved to the rhs
    std::vector<char> fixed(N, 0);
    Eigen::VectorXd fix_val = Eigen::VectorXd::Zero(N);
    for (const auto& [dof, val] : sys.constraints) {
        fixed[dof] = 1;
        fix_val[dof] = val;
    }
    Eigen::VectorXd b = sys.rhs;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sys.triplets.size() + N);
    for (const auto& t : sys.triplets) {
        if (fixed[t.row()]) continue;
        if (fixed[t.col()]) {
            b[t.row()] -= t.value() * fix_val[t.col()];
            continue;
        }
        trip.push_back(t);
    }
    for (int d = 0; d < N; ++d) {
        if (fixed[d]) {
            trip.emplace_back(d, d, 1.0);
            b[d] = fix_val[d];
        }
    }

    // border with the pressure mean functionals
    const int M = N + nb;
    for (int i = 0; i < nb; ++i) {
        const Eigen::VectorXd& w = sys.mean_weights[i];
        for (int d = 0; d < N; ++d) {
            if (w[d] == 0.0) continue;
            trip.emplace_back(N + i, d, w[d]);
            trip.emplace_back(d, N + i, w[d]);
        }
    }
    Eigen::SparseMatrix<double> S(M, M);
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();
    Eigen::VectorXd baug = Eigen::VectorXd::Zero(M);
    baug.head(N) = b;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(S);
    lu.factorize(S);
    if (lu.info() != Eigen::Success)
        throw SolverError("sparse LU factorization of the coupled system failed");
    Eigen::VectorXd xaug = lu.solve(baug);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");

    const double res = (S * xaug - baug).norm() / (1.0 + baug.norm());
    if (!(res <= tol))
        throw SolverError("coupled solve residual " + std::to_string(res) + " above tolerance");

    Eigen::VectorXd x = xaug.head(N);
    // project out the constant pressure directions (the border already pins
    // them; this keeps the representative exactly mean-zero)
    for (int i = 0; i < nb; ++i) {
        const auto& n = sys.nullspace[i];
        const auto& w = sys.mean_weights[i];
        const double denom = w.dot(n);
        if (denom != 0.0) x -= (w.dot(x) / denom) * n;
    }

    SaddleSolution out;
    const auto& L = sys.layout;
    out.u = x.segment(0, L.n_u);
    out.p = x.segment(L.col_p(0), L.n_p);
    out.x = x.segment(L.col_x(0), L.n_x);
    out.kappa = x.segment(L.col_k(0), L.n_k);
    out.residual = res;
    return out;
}

Eigen::VectorXd solve_spd(const SparseMatrix& m, const Eigen::VectorXd& rhs, double tol) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(m.eigen());
    if (llt.info() != Eigen::Success) throw SolverError("SPD factorization failed");
    Eigen::VectorXd x = llt.solve(rhs);
    const double res = (m.eigen() * x - rhs).norm() / (1.0 + rhs.norm());
    if (!(res <= tol))
        throw SolverError("SPD solve residual " + std::to_string(res) + " above tolerance");
    return x;
}

} // namespace bsflow
