#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "fuchs/linalg.hpp"

namespace fuchs {

struct Singularity {
    cx point;
    CMatrix residue;
};

/// A linear system x' = sum_i A_i/(z - z_i) x together with the basepoint at
/// which fundamental solutions are normalized. Immutable after construction;
/// construction validates shapes, finiteness and point separation.
class FuchsianSystem {
public:
    FuchsianSystem(int dimension, std::vector<Singularity> singularities, cx basepoint)
        : dim_(dimension), sing_(std::move(singularities)), basepoint_(basepoint) {
        validate();
    }

    int dimension() const { return dim_; }
    const std::vector<Singularity>& singularities() const { return sing_; }
    int num_singularities() const { return static_cast<int>(sing_.size()); }
    cx basepoint() const { return basepoint_; }
    cx point(int i) const { return sing_.at(static_cast<size_t>(i)).point; }
    const CMatrix& residue(int i) const { return sing_.at(static_cast<size_t>(i)).residue; }

    /// Largest pairwise distance over singular points and basepoint; the
    /// geometric scale that relative clearance thresholds refer to.
    double scale() const {
        std::vector<cx> pts;
        pts.reserve(sing_.size() + 1);
        for (const auto& s : sing_) pts.push_back(s.point);
        pts.push_back(basepoint_);
        double d = 0.0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                d = std::max(d, std::abs(pts[i] - pts[j]));
        return d;
    }

    double distance_to_nearest_singularity(cx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : sing_) d = std::min(d, std::abs(z - s.point));
        return d;
    }

private:
    void validate() const {
        if (dim_ < 1) throw ValidationError("dimension must be >= 1");
        if (!is_finite(basepoint_)) throw ValidationError("basepoint not finite");
        for (size_t i = 0; i < sing_.size(); ++i) {
            const auto& s = sing_[i];
            if (!is_finite(s.point))
                throw ValidationError("singularity " + std::to_string(i) + ": point not finite");
            if (s.residue.rows() != dim_ || s.residue.cols() != dim_)
                throw ValidationError("singularity " + std::to_string(i) + ": residue is " +
                                      std::to_string(s.residue.rows()) + "x" +
                                      std::to_string(s.residue.cols()) + ", expected " +
                                      std::to_string(dim_) + "x" + std::to_string(dim_));
            if (!is_finite(s.residue))
                throw ValidationError("singularity " + std::to_string(i) + ": residue not finite");
        }
        // Degenerate point clusters make continuation meaningless; the cutoff
        // is relative to the diameter of {singular points, basepoint}.
        const double diam = scale();
        const double floor = 1e-12 * diam;
        for (size_t i = 0; i < sing_.size(); ++i) {
            for (size_t j = i + 1; j < sing_.size(); ++j) {
                if (std::abs(sing_[i].point - sing_[j].point) <= floor)
                    throw ValidationError("singular points " + std::to_string(i) + " and " +
                                          std::to_string(j) + " coincide or nearly coincide");
            }
            if (std::abs(sing_[i].point - basepoint_) <= floor)
                throw ValidationError("basepoint coincides with singular point " + std::to_string(i));
        }
    }

    int dim_;
    std::vector<Singularity> sing_;
    cx basepoint_;
};

/// Evaluate the right-hand-side matrix sum_i A_i/(z - z_i).
inline CMatrix evaluate_rhs(const FuchsianSystem& sys, cx z) {
    const double safe = 1e-13 * (1.0 + std::max(std::abs(z), sys.scale()));
    CMatrix out = CMatrix::Zero(sys.dimension(), sys.dimension());
    for (const auto& s : sys.singularities()) {
        const cx d = z - s.point;
        if (std::abs(d) <= safe)
            throw EvaluationAtSingularity("evaluation point coincides with a singular point");
        out += s.residue / d;
    }
    return out;
}

struct SymmetryReport {
    bool is_real_symmetric = false;
    std::vector<std::pair<int, int>> pairing; ///< (i, j) with z_j = conj(z_i), i < j
    double max_defect = 0.0;
    double tolerance = 0.0;
};

/// Check invariance under complex conjugation: real-axis points must carry
/// real residues, off-axis points must come in conjugate pairs with
/// conjugate residues. The report is always produced; the flag is set iff
/// every point is classified and max_defect <= tol.
inline SymmetryReport check_reality_symmetry(const FuchsianSystem& sys, double tol) {
    SymmetryReport rep;
    rep.tolerance = tol;
    const int k = sys.num_singularities();
    const double eps_floor = 16 * std::numeric_limits<double>::epsilon() * (1.0 + sys.scale());
    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            min_sep = std::min(min_sep, std::abs(sys.point(i) - sys.point(j)));
    // A point counts as lying on the real axis only if that classification
    // cannot swallow a genuine conjugate partner (cap at half the minimum
    // separation); off-axis points match their conjugate image geometrically.
    const double axis_thresh = std::min(std::max(tol, eps_floor),
                                        (k > 1) ? 0.49 * min_sep : std::numeric_limits<double>::infinity());
    const double pair_thresh = (k > 1) ? 0.5 * min_sep : 0.0;

    std::vector<int> partner(static_cast<size_t>(std::max(k, 0)), -2); // -2 unclassified, -1 real axis
    bool complete = true;
    for (int i = 0; i < k; ++i) {
        const cx zi = sys.point(i);
        if (std::abs(zi.imag()) <= axis_thresh) {
            partner[static_cast<size_t>(i)] = -1;
            rep.max_defect = std::max(rep.max_defect, sys.residue(i).imag().norm());
            rep.max_defect = std::max(rep.max_defect, std::abs(zi.imag()));
            continue;
        }
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double d = std::abs(sys.point(j) - std::conj(zi));
            if (d < bestd) { bestd = d; best = j; }
        }
        if (best < 0 || bestd > pair_thresh) {
            complete = false;
            continue;
        }
        partner[static_cast<size_t>(i)] = best;
    }
    for (int i = 0; i < k; ++i) {
        const int j = partner[static_cast<size_t>(i)];
        if (j == -2) { complete = false; continue; }
        if (j == -1) continue;
        if (partner[static_cast<size_t>(j)] != i) { complete = false; continue; }
        if (j < i) continue; // record each pair once
        rep.pairing.emplace_back(i, j);
        rep.max_defect = std::max(rep.max_defect, std::abs(sys.point(j) - std::conj(sys.point(i))));
        rep.max_defect = std::max(rep.max_defect, frobenius(sys.residue(j) - sys.residue(i).conjugate()));
    }
    rep.is_real_symmetric = complete && rep.max_defect <= tol;
    return rep;
}

/// Residue of the system at z = infinity: minus the sum of all residues.
inline CMatrix residue_at_infinity(const FuchsianSystem& sys) {
    CMatrix sum = CMatrix::Zero(sys.dimension(), sys.dimension());
    for (const auto& s : sys.singularities()) sum += s.residue;
    return -sum;
}

} // namespace fuchs
