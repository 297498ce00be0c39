#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "fuchs/errors.hpp"

namespace fuchs {

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cx imag_unit{0.0, 1.0};

inline bool is_finite(cx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool is_finite(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!is_finite(m(i, j))) return false;
    return true;
}

inline double frobenius(const CMatrix& m) { return m.norm(); }

/// Largest entry magnitude (the "max norm" used by the transport oracles).
inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Entrywise complex conjugate, no transpose.
inline CMatrix entrywise_conj(const CMatrix& m) { return m.conjugate(); }

/// Inverse via full-pivot LU, with an explicit residual check.
/// Throws SingularMatrix when the matrix is not invertible to working precision.
inline CMatrix inverse_checked(const CMatrix& m, const char* what = "matrix") {
    if (m.rows() != m.cols())
        throw SingularMatrix(std::string(what) + ": not square");
    Eigen::FullPivLU<CMatrix> lu(m);
    const double eps = std::numeric_limits<double>::epsilon();
    lu.setThreshold(1e4 * eps);
    if (!lu.isInvertible())
        throw SingularMatrix(std::string(what) + ": singular to working precision");
    CMatrix inv = lu.inverse();
    const double resid = (m * inv - identity(m.rows())).norm();
    if (!(resid < 1e-6 * static_cast<double>(m.rows())))
        throw SingularMatrix(std::string(what) + ": inverse residual " + std::to_string(resid));
    return inv;
}

inline CMatrix matrix_power(const CMatrix& m, int k) {
    CMatrix r = identity(m.rows());
    for (int i = 0; i < k; ++i) r = r * m;
    return r;
}

struct RankInfo {
    int rank = 0;
    std::vector<double> singular_values;
};

/// Numerical rank: singular values above rel_tol times the largest one count.
inline RankInfo numerical_rank(const CMatrix& m, double rel_tol) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    RankInfo info;
    const auto& sv = svd.singularValues();
    info.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() ? sv(0) : 0.0;
    const double cut = rel_tol * smax;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++info.rank;
    return info;
}

/// Orthonormal basis of the (right) null space of m, columns of the result.
/// Singular values at or below rel_tol * sigma_max count as zero; a zero
/// matrix yields the full space.
inline CMatrix nullspace(const CMatrix& m, double rel_tol) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double cut = rel_tol * smax;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    const Eigen::Index n = m.cols();
    return svd.matrixV().rightCols(n - rank);
}

inline double condition_number(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 1.0;
    const double smin = sv(sv.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

} // namespace fuchs
