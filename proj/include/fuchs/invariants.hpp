#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuchs/spectral.hpp"

namespace fuchs {

struct LinearInvariantBasis {
    std::vector<CVector> vectors;  ///< orthonormal
    std::vector<double> residuals; ///< max_i ||T_i^T w - w|| per vector
    double tolerance = 0.0;

    int dimension() const { return static_cast<int>(vectors.size()); }
};

struct QuadraticInvariantBasis {
    std::vector<CMatrix> forms;    ///< symmetric, orthonormal in the trace inner product
    std::vector<double> residuals; ///< max_i ||T_i^T Q T_i - Q|| per form
    double tolerance = 0.0;

    int dimension() const { return static_cast<int>(forms.size()); }
};

namespace detail {

inline void check_generators(const std::vector<CMatrix>& gens) {
    if (gens.empty()) throw ValidationError("invariant search needs at least one generator");
    const auto n = gens.front().rows();
    for (const auto& g : gens) {
        if (g.rows() != n || g.cols() != n)
            throw ValidationError("generators must share one square shape");
        inverse_checked(g, "generator"); // invertibility is a precondition
    }
}

} // namespace detail

/// Linear invariants I(x) = <w, x>: orthonormal basis of the joint fixed
/// space of the transposed generators, from the SVD null space of the
/// stacked maps (T_i^T - Id). Empty when no invariant exists.
inline LinearInvariantBasis linear_invariants(const std::vector<CMatrix>& gens, double tol) {
    detail::check_generators(gens);
    const Eigen::Index n = gens.front().rows();
    CMatrix stacked(static_cast<Eigen::Index>(gens.size()) * n, n);
    for (size_t i = 0; i < gens.size(); ++i)
        stacked.block(static_cast<Eigen::Index>(i) * n, 0, n, n) =
            gens[i].transpose() - identity(n);

    LinearInvariantBasis out;
    out.tolerance = tol;
    const CMatrix basis = nullspace(stacked, tol);
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        CVector w = basis.col(c);
        double resid = 0.0;
        for (const auto& g : gens) resid = std::max(resid, (g.transpose() * w - w).norm());
        out.vectors.push_back(std::move(w));
        out.residuals.push_back(resid);
    }
    return out;
}

namespace detail {

/// Orthonormal coordinates on symmetric matrices: diagonal units e_p e_p^T
/// and off-diagonal (e_p e_q^T + e_q e_p^T)/sqrt(2). The map is an isometry
/// for the trace (Frobenius) inner product.
struct SymBasis {
    int n;
    std::vector<std::pair<int, int>> idx; // p <= q

    explicit SymBasis(int dim) : n(dim) {
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q) idx.emplace_back(p, q);
    }
    int size() const { return static_cast<int>(idx.size()); }

    CMatrix element(int s) const {
        const auto [p, q] = idx[static_cast<size_t>(s)];
        CMatrix b = CMatrix::Zero(n, n);
        if (p == q) b(p, p) = 1.0;
        else b(p, q) = b(q, p) = 1.0 / std::sqrt(2.0);
        return b;
    }

    CVector coords(const CMatrix& q) const {
        CVector v(size());
        for (int s = 0; s < size(); ++s) {
            const auto [i, j] = idx[static_cast<size_t>(s)];
            v(s) = (i == j) ? q(i, i) : std::sqrt(2.0) * q(i, j);
        }
        return v;
    }

    CMatrix matrix(const CVector& v) const {
        CMatrix q = CMatrix::Zero(n, n);
        for (int s = 0; s < size(); ++s) {
            const auto [i, j] = idx[static_cast<size_t>(s)];
            if (i == j) q(i, i) = v(s);
            else q(i, j) = q(j, i) = v(s) / std::sqrt(2.0);
        }
        return q;
    }
};

} // namespace detail

/// Quadratic invariants: symmetric Q with T_i^T Q T_i = Q for every
/// generator, via the null space of the stacked linear operator on the
/// n(n+1)/2-dimensional symmetric space.
inline QuadraticInvariantBasis quadratic_invariants(const std::vector<CMatrix>& gens, double tol) {
    detail::check_generators(gens);
    const int n = static_cast<int>(gens.front().rows());
    const detail::SymBasis sym(n);
    const int m = sym.size();

    CMatrix stacked(static_cast<Eigen::Index>(gens.size()) * m, m);
    for (size_t i = 0; i < gens.size(); ++i) {
        const CMatrix gt = gens[i].transpose();
        for (int s = 0; s < m; ++s) {
            const CMatrix image = gt * sym.element(s) * gens[i] - sym.element(s);
            stacked.block(static_cast<Eigen::Index>(i) * m, s, m, 1) = sym.coords(image);
        }
    }

    QuadraticInvariantBasis out;
    out.tolerance = tol;
    const CMatrix basis = nullspace(stacked, tol);
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        const CMatrix q = sym.matrix(basis.col(c));
        double resid = 0.0;
        for (const auto& g : gens)
            resid = std::max(resid, (g.transpose() * q * g - q).norm());
        out.forms.push_back(q);
        out.residuals.push_back(resid);
    }
    return out;
}

enum class PermutationPairCase { Swap, Fix, Neither };

inline const char* to_string(PermutationPairCase c) {
    switch (c) {
        case PermutationPairCase::Swap: return "Swap";
        case PermutationPairCase::Fix: return "Fix";
        default: return "Neither";
    }
}

struct PermutationPairReport {
    CVector w;
    CVector w_bar;
    PermutationPairCase action = PermutationPairCase::Neither;
    std::optional<CVector> produced_invariant; ///< w + w_bar in the Swap case
    double classification_threshold = 0.0;
    std::string note;
};

/// Structure of the dual generator action on the distinguished eigenvectors
/// of T_inf^T when Spectr(T_inf) = {p, p, p^{-1}, p^{-1}} with both
/// eigenvalues geometrically simple. w and w_bar are the eigenvectors for p
/// (the cluster with positive imaginary part) and p^{-1}, normalized to unit
/// length with the largest-modulus entry real positive; w_bar snaps to
/// conj(w) when they are parallel, which is the reflection-symmetric case.
/// The transposed generators either swap {w, w_bar} (producing the linear
/// invariant w + w_bar), fix both, or act some other way.
inline PermutationPairReport permutation_pair_structure(const CMatrix& t1, const CMatrix& t2,
                                                        const CMatrix& t_inf, double tol,
                                                        double class_threshold = 1e-6) {
    if (t_inf.rows() != 4 || t_inf.cols() != 4 || t1.rows() != 4 || t2.rows() != 4 ||
        t1.cols() != 4 || t2.cols() != 4)
        throw ValidationError("permutation pair analysis expects 4x4 matrices");

    const CMatrix dual = t_inf.transpose();
    const double cluster_tol = tol * std::max(1.0, dual.norm());
    const auto rep = spectrum(dual, cluster_tol);
    if (rep.eigenvalues.size() != 2 || rep.eigenvalues[0].algebraic != 2 ||
        rep.eigenvalues[1].algebraic != 2)
        throw PreconditionFailed("Spectr(T_inf) is not a double pair {p,p,p^-1,p^-1}");
    cx p = rep.eigenvalues[0].value, pinv = rep.eigenvalues[1].value;
    if (std::abs(p - pinv) <= cluster_tol)
        throw PreconditionFailed("p equals p^-1 within tolerance");
    if (std::abs(p * pinv - 1.0) > 10 * tol * std::max(1.0, std::norm(p)))
        throw PreconditionFailed("the two eigenvalue clusters are not mutual inverses");
    if (rep.eigenvalues[0].geometric != 1 || rep.eigenvalues[1].geometric != 1)
        throw PreconditionFailed("eigenvalues of T_inf are not geometrically simple");
    if (p.imag() < 0) std::swap(p, pinv);

    auto eigvec = [&](cx lambda) {
        const CMatrix shifted = dual - lambda * identity(4);
        Eigen::JacobiSVD<CMatrix> svd(shifted, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        // geometric simplicity double-check: exactly one negligible singular value
        if (sv(2) <= 1e-8 * sv(0))
            throw PreconditionFailed("eigenvector of T_inf^T is not unique");
        CVector v = svd.matrixV().col(3);
        Eigen::Index jmax = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < 4; ++j)
            if (std::abs(v(j)) > best) { best = std::abs(v(j)); jmax = j; }
        v /= v.norm();
        const cx phase = v(jmax) / std::abs(v(jmax));
        return CVector(v / phase);
    };

    PermutationPairReport out;
    out.classification_threshold = class_threshold;
    out.w = eigvec(p);
    out.w_bar = eigvec(pinv);
    if ((out.w_bar - out.w.conjugate()).norm() <= 1e-8)
        out.w_bar = out.w.conjugate();

    auto swaps = [&](const CMatrix& t) {
        return (t.transpose() * out.w - out.w_bar).norm() <= class_threshold &&
               (t.transpose() * out.w_bar - out.w).norm() <= class_threshold;
    };
    auto fixes = [&](const CMatrix& t) {
        return (t.transpose() * out.w - out.w).norm() <= class_threshold &&
               (t.transpose() * out.w_bar - out.w_bar).norm() <= class_threshold;
    };

    if (swaps(t1) && swaps(t2)) {
        out.action = PermutationPairCase::Swap;
        out.produced_invariant = CVector(out.w + out.w_bar);
        out.note = "dual generators permute {w, w_bar}; <w + w_bar, x> is a linear invariant";
    } else if (fixes(t1) && fixes(t2)) {
        out.action = PermutationPairCase::Fix;
        out.note = "dual generators fix w and w_bar separately, giving two independent "
                   "linear invariants; incompatible with a group admitting at most one";
    } else {
        out.action = PermutationPairCase::Neither;
        out.note = "dual generator action on {w, w_bar} is not an exact permutation "
                   "within the classification threshold";
    }
    return out;
}

} // namespace fuchs
