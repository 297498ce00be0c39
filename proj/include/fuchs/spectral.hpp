#pragma once

#include <Eigen/Eigenvalues>
#include <numeric>
#include <vector>

#include "fuchs/linalg.hpp"

namespace fuchs {

struct EigenvalueCluster {
    cx value;          ///< cluster centroid
    int algebraic = 0;
    int geometric = 0;
};

struct JordanBlocks {
    int eigenvalue_index = 0;
    std::vector<int> sizes; ///< descending
};

struct SpectralReport {
    std::vector<EigenvalueCluster> eigenvalues;
    std::vector<JordanBlocks> jordan_blocks;
    double cluster_tolerance = 0.0;
    double rank_tolerance = 0.0;

    const EigenvalueCluster* find(cx v, double tol) const {
        for (const auto& c : eigenvalues)
            if (std::abs(c.value - v) <= tol) return &c;
        return nullptr;
    }
};

/// Raw (unclustered) eigenvalues in the solver's order.
inline std::vector<cx> eigenvalues_raw(const CMatrix& t) {
    if (t.rows() != t.cols()) throw ValidationError("spectrum: matrix not square");
    Eigen::ComplexEigenSolver<CMatrix> es(t, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw IllConditioned("eigenvalue iteration failed to converge");
    const double resid = (t * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal()).norm();
    if (!(resid <= 1e-6 * static_cast<double>(t.rows()) * std::max(1.0, t.norm())))
        throw IllConditioned("eigenproblem residual " + std::to_string(resid) + " too large");
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// Eigenvalue clustering, multiplicities, and Jordan structure.
///
/// Single-linkage clustering merges eigenvalues at distance <= cluster_tol.
/// Geometric multiplicities come from the numerical rank of (T - c I), block
/// sizes from the rank sequence of its powers (Ferrers transpose), both with
/// the stated relative rank tolerance. Monodromy matrices carry continuation
/// error, so exact multiplicities are threshold decisions; both thresholds
/// are echoed in the report.
inline SpectralReport spectrum(const CMatrix& t, double cluster_tol, double rank_tol = 1e-8) {
    const int n = static_cast<int>(t.rows());
    const auto eig = eigenvalues_raw(t);

    // single-linkage union-find
    std::vector<int> root(static_cast<size_t>(n));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int a) { while (root[static_cast<size_t>(a)] != a) a = root[static_cast<size_t>(a)] = root[static_cast<size_t>(root[static_cast<size_t>(a)])]; return a; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(eig[static_cast<size_t>(i)] - eig[static_cast<size_t>(j)]) <= cluster_tol) {
                const int a = find(i), b = find(j);
                if (a != b) root[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
            }

    SpectralReport rep;
    rep.cluster_tolerance = cluster_tol;
    rep.rank_tolerance = rank_tol;
    std::vector<int> cluster_of(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (cluster_of[static_cast<size_t>(r)] < 0) {
            cluster_of[static_cast<size_t>(r)] = static_cast<int>(rep.eigenvalues.size());
            rep.eigenvalues.push_back({});
        }
        auto& c = rep.eigenvalues[static_cast<size_t>(cluster_of[static_cast<size_t>(r)])];
        c.value += eig[static_cast<size_t>(i)];
        c.algebraic += 1;
    }
    for (auto& c : rep.eigenvalues) c.value /= static_cast<double>(c.algebraic);

    for (size_t ci = 0; ci < rep.eigenvalues.size(); ++ci) {
        auto& c = rep.eigenvalues[ci];
        const CMatrix shifted = t - c.value * identity(n);
        const auto shifted_sv = numerical_rank(shifted, 0.0).singular_values;
        const double smax = shifted_sv.empty() ? 0.0 : shifted_sv.front();
        // Rank sequence of powers, r[0] = n. The cutoff for the k-th power
        // scales as smax^k: noise of magnitude eta in the shifted matrix
        // propagates to roughly eta * smax^{k-1} in its k-th power, so a
        // threshold relative to the power's own largest singular value would
        // miscount exact nilpotents computed with error.
        std::vector<int> ranks{n};
        CMatrix power = identity(n);
        for (int k = 1; k <= c.algebraic; ++k) {
            power = power * shifted;
            const double cutoff = rank_tol * std::pow(smax, k);
            int r = 0;
            for (double sv : numerical_rank(power, 0.0).singular_values)
                if (sv > cutoff) ++r;
            ranks.push_back(r);
            if (n - r >= c.algebraic) break;
        }
        // blocks of size >= k: d_k = r_{k-1} - r_k, clamped non-increasing
        std::vector<int> d;
        for (size_t k = 1; k < ranks.size(); ++k)
            d.push_back(std::max(0, ranks[k - 1] - ranks[k]));
        for (size_t k = 1; k < d.size(); ++k) d[k] = std::min(d[k], d[k - 1]);

        JordanBlocks jb;
        jb.eigenvalue_index = static_cast<int>(ci);
        for (size_t k = 0; k < d.size(); ++k) {
            const int next = (k + 1 < d.size()) ? d[k + 1] : 0;
            for (int b = 0; b < d[k] - next; ++b)
                jb.sizes.push_back(static_cast<int>(k) + 1);
        }
        std::sort(jb.sizes.begin(), jb.sizes.end(), std::greater<int>());
        // reconcile against the algebraic multiplicity from clustering
        int total = std::accumulate(jb.sizes.begin(), jb.sizes.end(), 0);
        if (jb.sizes.empty() && c.algebraic > 0) jb.sizes.push_back(0);
        while (total < c.algebraic) { jb.sizes.front() += 1; ++total; }
        while (total > c.algebraic && !jb.sizes.empty()) {
            total -= jb.sizes.back();
            jb.sizes.pop_back();
        }
        if (total < c.algebraic) jb.sizes.push_back(c.algebraic - total);
        std::sort(jb.sizes.begin(), jb.sizes.end(), std::greater<int>());
        c.geometric = static_cast<int>(jb.sizes.size());
        rep.jordan_blocks.push_back(std::move(jb));
    }
    return rep;
}

/// True iff ||(T - I)^n|| <= tol * ||T||^n.
inline bool is_unipotent(const CMatrix& t, double tol) {
    if (t.rows() != t.cols()) throw ValidationError("is_unipotent: matrix not square");
    const int n = static_cast<int>(t.rows());
    const CMatrix p = matrix_power(t - identity(n), n);
    return p.norm() <= tol * std::pow(t.norm(), n);
}

} // namespace fuchs
