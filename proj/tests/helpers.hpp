#pragma once

// Shared test utilities: seeded generators and the independent oracles the
// transport and invariant tests check against. Everything here must stay
// independent of the library's own continuation path: the matrix exponential
// comes from Eigen's unsupported Pade implementation and the alternative
// transport is a fixed-step classical Runge-Kutta integrator.

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "fuchs/fuchs.hpp"

namespace testutil {

using fuchs::cx;
using fuchs::CMatrix;
using fuchs::CVector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double unif(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline cx random_complex(std::mt19937_64& g) { return {unif(g), unif(g)}; }

inline CMatrix random_matrix(std::mt19937_64& g, int n) {
    CMatrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = random_complex(g);
    return m;
}

/// Random matrix rescaled to a given Frobenius norm.
inline CMatrix random_residue(std::mt19937_64& g, int n, double norm) {
    CMatrix m = random_matrix(g, n);
    return m * (norm / m.norm());
}

/// Random invertible matrix with condition number below `max_cond`.
inline CMatrix random_well_conditioned(std::mt19937_64& g, int n, double max_cond = 50.0) {
    for (;;) {
        CMatrix m = random_matrix(g, n);
        if (fuchs::condition_number(m) <= max_cond) return m;
    }
}

inline CMatrix matrix_exp(const CMatrix& m) { return m.exp(); }

/// Monodromy of a single-singularity system around its singular point.
inline CMatrix single_singularity_monodromy(const CMatrix& residue) {
    return matrix_exp(2.0 * fuchs::pi * fuchs::imag_unit * residue);
}

/// Fixed-step classical RK4 for X' = A(z) X along a polyline; the
/// independent check for open-path transports.
inline CMatrix rk4_transport(const fuchs::FuchsianSystem& sys, const std::vector<cx>& waypoints,
                             int steps_per_segment) {
    CMatrix x = fuchs::identity(sys.dimension());
    for (size_t s = 0; s + 1 < waypoints.size(); ++s) {
        const cx a = waypoints[s], b = waypoints[s + 1];
        const cx h = (b - a) / static_cast<double>(steps_per_segment);
        for (int k = 0; k < steps_per_segment; ++k) {
            const cx z = a + static_cast<double>(k) * h;
            const CMatrix k1 = fuchs::evaluate_rhs(sys, z) * x;
            const CMatrix k2 = fuchs::evaluate_rhs(sys, z + 0.5 * h) * (x + 0.5 * h * k1);
            const CMatrix k3 = fuchs::evaluate_rhs(sys, z + 0.5 * h) * (x + 0.5 * h * k2);
            const CMatrix k4 = fuchs::evaluate_rhs(sys, z + h) * (x + h * k3);
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return x;
}

/// Random system with singularities in clockwise sweep order around the
/// basepoint 0, so the file-order product relation holds.
inline fuchs::FuchsianSystem random_clockwise_system(std::mt19937_64& g, int dim, int npoints,
                                                     double residue_norm) {
    std::vector<double> angles;
    for (int i = 0; i < npoints; ++i) angles.push_back(unif(g, -fuchs::pi, fuchs::pi));
    std::sort(angles.begin(), angles.end(), std::greater<double>());
    // keep angular separation workable for the loop construction
    bool ok = true;
    for (size_t i = 0; i + 1 < angles.size(); ++i)
        if (angles[i] - angles[i + 1] < 0.35) ok = false;
    if (!ok || (npoints > 1 && (angles.front() - angles.back()) > 2 * fuchs::pi - 0.35))
        return random_clockwise_system(g, dim, npoints, residue_norm);

    std::vector<fuchs::Singularity> sing;
    for (double th : angles)
        sing.push_back({std::polar(unif(g, 0.7, 1.4), th), random_residue(g, dim, residue_norm)});
    return fuchs::FuchsianSystem(dim, std::move(sing), cx(0, 0));
}

/// Residue for the synthetic three-body-shaped systems: B = R + iJ built
/// from 2x2 pairs [[a, ia], [ia, -a]], mixed by a real orthogonal basis
/// change. Each pair is nilpotent of rank one, so B^2 = 0 with rank 2
/// (unipotent local monodromy, Jordan shape [2,2]); the real part has
/// eigenvalues {a, -a, b, -b}, so -(B + conj B) = -2R realizes prescribed
/// exponents at infinity.
inline CMatrix paired_nilpotent_residue(std::mt19937_64& g, double a, double b) {
    CMatrix block = CMatrix::Zero(4, 4);
    const double scale[2] = {a, b};
    for (int p = 0; p < 2; ++p) {
        const double s = scale[p];
        block(2 * p, 2 * p) = cx(s, 0);
        block(2 * p, 2 * p + 1) = cx(0, s);
        block(2 * p + 1, 2 * p) = cx(0, s);
        block(2 * p + 1, 2 * p + 1) = cx(-s, 0);
    }
    Eigen::MatrixXd real_seed(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) real_seed(r, c) = unif(g);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(real_seed).householderQ();
    const CMatrix qc = q.cast<cx>();
    return qc * block * qc.transpose();
}

/// Synthetic residue system at the closed-form singular points of a mass
/// triple: zero residue at z0, the paired nilpotent B at z1, conj(B) at z2.
/// Every local conjugacy class matches the closed forms (apparent point,
/// unipotent [2,2] pair, exponents {l1, -l1, l2, -l2} at infinity); with
/// three effective singular points that local data pins the representation
/// up to conjugacy, so the group-level pipeline checks hold as well.
inline fuchs::FuchsianSystem synthetic_nve_system(const fuchs::MassInvariants& inv,
                                                  std::mt19937_64& g) {
    const double a = 0.5 * inv.lambda1.real();
    const double b = 0.5 * inv.lambda2.real();
    const CMatrix res = paired_nilpotent_residue(g, a, b);
    std::vector<fuchs::Singularity> sing{{inv.z0, CMatrix::Zero(4, 4)},
                                         {inv.z1, res},
                                         {inv.z2, res.conjugate()}};
    return fuchs::FuchsianSystem(4, std::move(sing), cx(0, 0));
}

/// System with the conjugation symmetry: z1 in the upper half plane with
/// residue B, a real point with a real residue, conj(z1) with conj(B);
/// listed in clockwise sweep order from basepoint 0.
inline fuchs::FuchsianSystem random_reflection_system(std::mt19937_64& g, int dim,
                                                      double residue_norm) {
    CMatrix real_res = random_residue(g, dim, residue_norm);
    real_res = (real_res + real_res.conjugate()) / 2.0;
    const CMatrix b = random_residue(g, dim, residue_norm);
    const cx z1 = std::polar(unif(g, 0.8, 1.3), unif(g, 0.5, fuchs::pi - 0.5));
    const double xr = unif(g, 0.8, 1.3);
    std::vector<fuchs::Singularity> sing{{z1, b},
                                         {cx(xr, 0.0), real_res},
                                         {std::conj(z1), b.conjugate()}};
    return fuchs::FuchsianSystem(dim, std::move(sing), cx(0, 0));
}

} // namespace testutil
