#pragma once

#include <array>

#include "fuchs/spectral.hpp"

namespace fuchs {

/// The element T = T_inf + T_inf^{-1} - 2 Id. Being a polynomial in T_inf it
/// commutes with T_inf exactly; for the monodromy groups treated here it
/// centralizes the whole group.
inline CMatrix centralizer_element(const CMatrix& t_inf) {
    if (t_inf.rows() != t_inf.cols())
        throw ValidationError("centralizer_element: matrix not square");
    const CMatrix inv = inverse_checked(t_inf, "T_inf");
    return t_inf + inv - 2.0 * identity(t_inf.rows());
}

/// True iff ||XY - YX|| <= tol * ||X|| * ||Y||.
inline bool commutes(const CMatrix& x, const CMatrix& y, double tol) {
    if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
        throw ValidationError("commutes: shape mismatch");
    return (x * y - y * x).norm() <= tol * x.norm() * y.norm();
}

/// True iff conj(T1)^{-1} = T2 within tol * ||T2|| (entrywise conjugation).
inline bool verify_reflection_symmetry(const CMatrix& t1, const CMatrix& t2, double tol) {
    if (t1.rows() != t2.rows() || t1.cols() != t2.cols() || t1.rows() != t1.cols())
        throw ValidationError("verify_reflection_symmetry: shape mismatch");
    const CMatrix lhs = inverse_checked(t1.conjugate(), "conj(T1)");
    return (lhs - t2).norm() <= tol * t2.norm();
}

/// Same check as verify_reflection_symmetry but returning the residual.
inline double reflection_symmetry_residual(const CMatrix& t1, const CMatrix& t2) {
    const CMatrix lhs = inverse_checked(t1.conjugate(), "conj(T1)");
    return (lhs - t2).norm();
}

struct BlockDiagonalization {
    CMatrix basis;                              ///< columns: sigma1 plane, then sigma2 plane
    std::vector<std::array<CMatrix, 2>> blocks; ///< per generator: {upper 2x2, lower 2x2}
    cx sigma1, sigma2;
    double max_offdiagonal = 0.0;
};

/// Common 2+2 block-diagonalization of generators commuting with a matrix T
/// whose spectrum is {s1, s1, s2, s2}, s1 != s2. The basis columns span the
/// generalized eigenspaces of T; every commuting generator preserves those
/// planes, which is the content of the Frobenius commutation problem.
inline BlockDiagonalization simultaneous_block_diagonalize(const std::vector<CMatrix>& generators,
                                                           const CMatrix& t, double tol) {
    const int n = static_cast<int>(t.rows());
    if (n != 4 || t.cols() != 4)
        throw SpectrumShapeMismatch("block diagonalization requires a 4x4 matrix");
    const double cluster_tol = std::max(tol, 1e-10) * std::max(1.0, t.norm());
    const auto rep = spectrum(t, cluster_tol);
    if (rep.eigenvalues.size() != 2 || rep.eigenvalues[0].algebraic != 2 ||
        rep.eigenvalues[1].algebraic != 2)
        throw SpectrumShapeMismatch("spectrum is not a double pair {s1,s1,s2,s2} with s1 != s2");
    for (const auto& g : generators) {
        if (g.rows() != 4 || g.cols() != 4)
            throw ValidationError("generator shape mismatch");
        if (!commutes(g, t, tol))
            throw CommutationViolated("generator does not commute with T within tolerance");
    }

    BlockDiagonalization out;
    std::array<CMatrix, 2> planes;
    for (int c = 0; c < 2; ++c) {
        const cx s = rep.eigenvalues[static_cast<size_t>(c)].value;
        const CMatrix shifted = t - s * identity(4);
        const CMatrix sq = shifted * shifted;
        const CMatrix ker = nullspace(sq, 1e-8);
        if (ker.cols() != 2)
            throw SpectrumShapeMismatch("generalized eigenspace of cluster " + std::to_string(c) +
                                        " is not two-dimensional");
        planes[static_cast<size_t>(c)] = ker;
    }
    // Plane order: the one weighted toward the leading coordinates first, so
    // an input already in block form keeps the identity basis.
    const double top0 = planes[0].block(0, 0, 2, 2).norm();
    const double top1 = planes[1].block(0, 0, 2, 2).norm();
    const int first = (top1 > top0) ? 1 : 0;
    out.sigma1 = rep.eigenvalues[static_cast<size_t>(first)].value;
    out.sigma2 = rep.eigenvalues[static_cast<size_t>(1 - first)].value;
    CMatrix basis(4, 4);
    basis.block(0, 0, 4, 2) = planes[static_cast<size_t>(first)];
    basis.block(0, 2, 4, 2) = planes[static_cast<size_t>(1 - first)];
    out.basis = basis;
    const CMatrix basis_inv = inverse_checked(basis, "block basis");
    for (const auto& g : generators) {
        const CMatrix gb = basis_inv * g * basis;
        const double off = std::max(gb.block(0, 2, 2, 2).norm(), gb.block(2, 0, 2, 2).norm());
        out.max_offdiagonal = std::max(out.max_offdiagonal, off);
        if (off > 10 * tol * std::max(1.0, g.norm()))
            throw CommutationViolated("off-diagonal block norm " + std::to_string(off) +
                                      " exceeds tolerance");
        out.blocks.push_back({CMatrix(gb.block(0, 0, 2, 2)), CMatrix(gb.block(2, 2, 2, 2))});
    }
    return out;
}

enum class Obstruction {
    NoRationalInvariant,
    InconclusiveNeedsInvariantSearch,
};

inline const char* to_string(Obstruction v) {
    return v == Obstruction::NoRationalInvariant ? "NoRationalInvariant"
                                                 : "InconclusiveNeedsInvariantSearch";
}

struct ObstructionVerdict {
    std::vector<cx> centralizer_spectrum; ///< cluster centroids repeated by multiplicity
    bool has_double_pair_structure = false;
    bool one_in_spectrum_infinity = false;
    Obstruction verdict = Obstruction::InconclusiveNeedsInvariantSearch;
    double tolerance = 0.0;
};

/// Rational-invariant obstruction test: no rational invariant exists when the
/// centralizer element has spectrum {s1,s1,s2,s2} with s1 != s2 and no
/// eigenvalue of T_inf lies within tol of 1. The test only ever concludes in
/// that one direction; anything else is handed to the invariant search.
inline ObstructionVerdict rational_invariant_obstruction(const CMatrix& t_inf, double tol) {
    ObstructionVerdict out;
    out.tolerance = tol;
    const CMatrix t = centralizer_element(t_inf);
    const double cluster_tol = tol * std::max(1.0, t.norm());
    const auto rep = spectrum(t, cluster_tol);
    for (const auto& c : rep.eigenvalues)
        for (int i = 0; i < c.algebraic; ++i) out.centralizer_spectrum.push_back(c.value);
    out.has_double_pair_structure =
        rep.eigenvalues.size() == 2 && rep.eigenvalues[0].algebraic == 2 &&
        rep.eigenvalues[1].algebraic == 2 &&
        std::abs(rep.eigenvalues[0].value - rep.eigenvalues[1].value) > cluster_tol;
    for (cx ev : eigenvalues_raw(t_inf))
        if (std::abs(ev - 1.0) <= tol) out.one_in_spectrum_infinity = true;
    out.verdict = (out.has_double_pair_structure && !out.one_in_spectrum_infinity)
                      ? Obstruction::NoRationalInvariant
                      : Obstruction::InconclusiveNeedsInvariantSearch;
    return out;
}

} // namespace fuchs
