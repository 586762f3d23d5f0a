#pragma once

#include "bsflow/assembly.hpp"

#include <Eigen/Sparse>

namespace bsflow {

/// Compressed sparse wrapper with the validation the solvers rely on:
/// finite entries and no accumulation of explicit zeros.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, const std::vector<Eigen::Triplet<double>>& triplets,
                 bool symmetric = false);
    explicit SparseMatrix(Eigen::SparseMatrix<double> m, bool symmetric = false);

    const Eigen::SparseMatrix<double>& eigen() const { return m_; }
    int rows() const { return static_cast<int>(m_.rows()); }
    int cols() const { return static_cast<int>(m_.cols()); }
    bool symmetric() const { return symmetric_; }

private:
    void validate();
    Eigen::SparseMatrix<double> m_;
    bool symmetric_ = false;
};

struct SaddleSolution {
    Eigen::VectorXd u;     // velocity coefficients (constrained dofs filled in)
    Eigen::VectorXd p;     // pressure incl. the enrichment coefficient
    Eigen::VectorXd x;     // interface positions (2K)
    Eigen::VectorXd kappa; // 2K (GD) or K (BGN)
    double residual = 0.0; // recomputed relative residual
};

/// Direct solve of the coupled system. The unconstrained pressure space makes
/// the square system consistent but rank deficient; the constant directions
/// are pinned by bordering with the mean functionals, which leaves the
/// equations untouched (the multipliers vanish for consistent data) and
/// returns the mean-zero pressure representative.
SaddleSolution solve_saddle_point(const BlockSystem& sys, double tol = 1e-10);

/// Direct SPD solve with a recomputed-residual check.
Eigen::VectorXd solve_spd(const SparseMatrix& m, const Eigen::VectorXd& rhs, double tol = 1e-10);

} // namespace bsflow
