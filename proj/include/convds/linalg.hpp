#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <limits>
#include <vector>

#include "convds/common.hpp"

namespace convds {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SigmaExtremes {
    double min = 0.0;
    double max = 0.0;
};

/// Extreme singular values. Jacobi for small blocks; large matrices go
/// through the Hermitian eigenproblem of the smaller Gram matrix, whose
/// extreme eigenvalues are the squared singular values. (BDCSVD is avoided:
/// it mis-computes the smallest singular value of some complex matrices.)
inline SigmaExtremes sigma_extremes(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return {0.0, 0.0};
    SigmaExtremes out;
    if (a.rows() <= 32 && a.cols() <= 32) {
        Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
        out.max = sv(0);
        out.min = sv(sv.size() - 1);
    } else {
        Matrix gram = a.rows() >= a.cols() ? Matrix(a.adjoint() * a) : Matrix(a * a.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        out.min = std::sqrt(std::max(0.0, ev(0)));
        out.max = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
    }
    // A strictly wide matrix annihilates part of its domain.
    if (a.rows() < a.cols()) out.min = 0.0;
    return out;
}

struct LstsqResult {
    Vector solution;
    double residual = 0.0;   // ||A x - b||_2
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    bool rank_deficient = false;
};

/// Minimum-residual solve; below the relative rank threshold the small
/// singular directions are dropped, which yields the minimum-norm solution
/// among the least-squares minimizers.
inline LstsqResult lstsq_min_norm(const Matrix& a, const Vector& b, double rank_tol) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    LstsqResult out;
    out.sigma_max = sv.size() ? sv(0) : 0.0;
    out.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
    if (a.rows() < a.cols()) out.sigma_min = 0.0;
    const double cut = rank_tol * out.sigma_max;
    out.rank_deficient = out.sigma_min <= cut;
    Vector ub = svd.matrixU().adjoint() * b;
    Vector y = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cut) y(i) = ub(i) / sv(i);
    }
    out.solution = svd.matrixV() * y;
    out.residual = (a * out.solution - b).norm();
    return out;
}

}  // namespace convds
