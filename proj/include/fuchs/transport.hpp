#pragma once

#include <vector>

#include "fuchs/path.hpp"

namespace fuchs {

struct TransportResult {
    CMatrix matrix;
    double error_estimate = 0.0;
    long steps_taken = 0;
    double min_clearance = 0.0;
    double condition = 1.0; ///< condition number of the connection matrix
};

struct TransportOptions {
    double tol = 1e-9;
    long max_steps = 200000;
    int max_order = 64;
    int max_halvings = 30;
};

namespace detail {

struct TaylorStep {
    CMatrix propagator;
    double tail = 0.0;
    bool converged = false;
};

/// One series step of the fundamental solution about z_c, evaluated at
/// z_c + h. The coefficients follow the standard recurrence for
/// Y' = A(z) Y with A(z) = sum_i A_i/(z - z_i); the step cap
/// |h| <= 0.25 * dist keeps the term ratio at most 1/4 asymptotically.
inline TaylorStep taylor_step(const FuchsianSystem& sys, cx z_c, cx h, double tol_rel,
                              int max_order) {
    const int n = sys.dimension();
    const int s = sys.num_singularities();
    std::vector<cx> u(static_cast<size_t>(s)), p(static_cast<size_t>(s));
    double u_max = 0.0;
    for (int i = 0; i < s; ++i) {
        u[static_cast<size_t>(i)] = h / (z_c - sys.point(i));
        p[static_cast<size_t>(i)] = u[static_cast<size_t>(i)];
        u_max = std::max(u_max, std::abs(u[static_cast<size_t>(i)]));
    }

    std::vector<CMatrix> d; // d[k] = c_k h^k
    std::vector<CMatrix> m; // m[k] = M_k h^{k+1}
    d.reserve(static_cast<size_t>(max_order) + 1);
    m.reserve(static_cast<size_t>(max_order));
    d.push_back(identity(n));

    TaylorStep out;
    out.propagator = identity(n);
    double prev_term = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_order; ++k) {
        CMatrix mk = CMatrix::Zero(n, n);
        for (int i = 0; i < s; ++i) {
            mk += sys.residue(i) * p[static_cast<size_t>(i)];
            p[static_cast<size_t>(i)] *= -u[static_cast<size_t>(i)];
        }
        m.push_back(std::move(mk));

        CMatrix next = CMatrix::Zero(n, n);
        for (int j = 0; j <= k; ++j)
            next += m[static_cast<size_t>(j)] * d[static_cast<size_t>(k - j)];
        next /= static_cast<double>(k + 1);
        const double term = next.norm();
        out.propagator += next;
        d.push_back(std::move(next));

        if (k >= 1 && term + prev_term <= tol_rel * out.propagator.norm()) {
            double ratio = u_max;
            if (prev_term > 0.0) ratio = std::max(ratio, term / prev_term);
            ratio = std::min(ratio, 0.9);
            out.tail = term * ratio / (1.0 - ratio);
            out.converged = true;
            return out;
        }
        prev_term = term;
    }
    return out; // not converged
}

} // namespace detail

/// Transport the fundamental solution along a polyline. Returns the
/// connection matrix M: the solution normalized to Id at the path start
/// equals M at the path end. For a closed loop at the basepoint this is the
/// monodromy T with Sigma~ = Sigma * T. Propagators compose with the later
/// step on the left, so transporting "path1 then path2" yields
/// transport(path2).matrix * transport(path1).matrix.
///
/// Pure function of its arguments with a fixed summation order: results are
/// bit-identical across runs, and transports along distinct paths may run
/// concurrently on a shared system.
inline TransportResult transport(const FuchsianSystem& sys, const PathSpec& path,
                                 const TransportOptions& opt = {}) {
    validate_path(sys, path);
    const double eps = std::numeric_limits<double>::epsilon();

    TransportResult res;
    res.min_clearance = path_clearance(sys, path.waypoints);

    // Pre-pass: expected step count, for the per-step tolerance split.
    long est = 0;
    for (size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
        const cx a = path.waypoints[seg], b = path.waypoints[seg + 1];
        const double len = std::abs(b - a);
        const cx dir = (b - a) / len;
        double done = 0.0;
        while (done < len) {
            const double dist = sys.distance_to_nearest_singularity(a + done * dir);
            const double h = std::min(len - done, std::isfinite(dist) ? 0.25 * dist : len - done);
            done += h;
            if (++est > opt.max_steps)
                throw ToleranceNotMet("step estimate exceeds the step budget");
        }
    }
    const double tol_step = opt.tol / static_cast<double>(std::max<long>(est, 1));

    CMatrix x = identity(sys.dimension());
    double err = 0.0;
    for (size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
        const cx a = path.waypoints[seg], b = path.waypoints[seg + 1];
        const double len = std::abs(b - a);
        const cx dir = (b - a) / len;
        double done = 0.0;
        while (done < len) {
            const cx pos = a + done * dir;
            const double dist = sys.distance_to_nearest_singularity(pos);
            double h = std::min(len - done, std::isfinite(dist) ? 0.25 * dist : len - done);
            detail::TaylorStep step;
            int halvings = 0;
            for (;;) {
                step = detail::taylor_step(sys, pos, h * dir, tol_step, opt.max_order);
                if (step.converged) break;
                if (++halvings > opt.max_halvings)
                    throw ToleranceNotMet("series step did not converge within the halving budget");
                h *= 0.5;
            }
            x = step.propagator * x;
            const double cond = x.norm() * Eigen::PartialPivLU<CMatrix>(x).inverse().norm();
            err += (step.tail + 8 * eps * step.propagator.norm()) * cond;
            done += h;
            if (++res.steps_taken > opt.max_steps)
                throw ToleranceNotMet("transport exceeded the step budget");
        }
    }
    res.condition = condition_number(x);
    res.matrix = std::move(x);
    res.error_estimate = err;
    return res;
}

inline TransportResult transport(const FuchsianSystem& sys, const PathSpec& path, double tol) {
    TransportOptions opt;
    opt.tol = tol;
    return transport(sys, path, opt);
}

inline TransportResult transport(const FuchsianSystem& sys, const LoopSpec& loop, double tol) {
    return transport(sys, materialize_loop(sys, loop), tol);
}

/// Generators of the monodromy group in file order plus the directly
/// transported element at infinity, with provenance.
struct MonodromyGroup {
    std::vector<CMatrix> generators;
    CMatrix at_infinity;
    double tolerance_used = 0.0;
    std::vector<double> generator_errors;
    double at_infinity_error = 0.0;
};

/// Compute one counterclockwise generator per singularity (file order) and
/// the element at infinity along the big clockwise circle. The generators
/// satisfy T_0 ... T_{k-1} T_inf = Id when the file order lists the
/// singularities in clockwise sweep order as seen from the basepoint,
/// starting anywhere; the ordering is never changed silently, the residual
/// of the relation is reported instead.
inline MonodromyGroup monodromy_generators(const FuchsianSystem& sys, double tol) {
    MonodromyGroup g;
    g.tolerance_used = tol;
    TransportOptions opt;
    opt.tol = tol;
    for (int i = 0; i < sys.num_singularities(); ++i) {
        const auto loop = standard_loop(sys, i, Orientation::Counterclockwise);
        auto r = transport(sys, materialize_loop(sys, loop), opt);
        g.generators.push_back(std::move(r.matrix));
        g.generator_errors.push_back(r.error_estimate);
    }
    auto rinf = transport(sys, infinity_loop(sys), opt);
    g.at_infinity = std::move(rinf.matrix);
    g.at_infinity_error = rinf.error_estimate;
    return g;
}

/// The element at infinity implied by the product relation: the inverse of
/// the ordered product of the finite-loop generators, T_0 T_1 ... T_{k-1}.
inline CMatrix monodromy_at_infinity(const MonodromyGroup& g) {
    if (g.generators.empty())
        throw ValidationError("monodromy group has no generators");
    CMatrix prod = identity(g.generators.front().rows());
    for (const auto& t : g.generators) prod = prod * t;
    return inverse_checked(prod, "generator product");
}

/// Residual of the product relation (T_0 ... T_{k-1}) * T_inf = Id.
inline double product_relation_residual(const MonodromyGroup& g) {
    CMatrix prod = identity(g.at_infinity.rows());
    for (const auto& t : g.generators) prod = prod * t;
    return (prod * g.at_infinity - identity(g.at_infinity.rows())).norm();
}

} // namespace fuchs
