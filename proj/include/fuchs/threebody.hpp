#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuchs/group.hpp"
#include "fuchs/invariants.hpp"
#include "fuchs/transport.hpp"

namespace fuchs {

struct Masses {
    double m1 = 0, m2 = 0, m3 = 0;
};

inline void validate_masses(const Masses& m) {
    if (!(m.m1 > 0) || !(m.m2 > 0) || !(m.m3 > 0) || !std::isfinite(m.m1) ||
        !std::isfinite(m.m2) || !std::isfinite(m.m3))
        throw NonPositiveMass("masses must be finite and strictly positive");
}

/// Closed-form spectral data of the normal variational equation for a mass
/// triple: symmetric functions, the sigma and theta parameters, the
/// exponents lambda_1 >= lambda_2, and the three singular points (z2 the
/// conjugate of z1, z0 real positive).
struct MassInvariants {
    double S1 = 0, S2 = 0, S3 = 0;
    double sigma = 0, theta = 0;
    cx lambda1, lambda2;
    cx z0, z1, z2;
};

inline MassInvariants mass_invariants(const Masses& m) {
    validate_masses(m);
    MassInvariants inv;
    inv.S1 = m.m1 + m.m2 + m.m3;
    inv.S2 = m.m1 * m.m2 + m.m2 * m.m3 + m.m3 * m.m1;
    inv.S3 = m.m2 + 2.0 * m.m3;
    inv.sigma = inv.S2 / (inv.S1 * inv.S1);
    // theta = 144 (1 - 3 sigma) through the cancellation-free identity
    // S1^2 - 3 S2 = ((m1-m2)^2 + (m2-m3)^2 + (m3-m1)^2)/2, which is exact
    // for equal masses and never goes negative in floating point.
    const double d12 = m.m1 - m.m2, d23 = m.m2 - m.m3, d31 = m.m3 - m.m1;
    inv.theta = 72.0 * (d12 * d12 + d23 * d23 + d31 * d31) / (inv.S1 * inv.S1);
    const double sqrt_theta = std::sqrt(inv.theta);
    const cx inner_hi = cx(13.0 + sqrt_theta, 0.0);
    const cx inner_lo = cx(13.0 - sqrt_theta, 0.0);
    inv.lambda1 = 1.5 + 0.5 * std::sqrt(inner_hi);
    inv.lambda2 = 1.5 + 0.5 * std::sqrt(inner_lo);
    inv.z0 = cx(std::sqrt(3.0) * m.m1 * m.m2 / (2.0 * inv.S2), 0.0);
    inv.z1 = m.m1 * cx(std::sqrt(3.0) * m.m2, inv.S3) / (2.0 * inv.S2);
    inv.z2 = std::conj(inv.z1);
    return inv;
}

/// Predicted Spectr(T_inf) = {e^{2pi i l1}, e^{2pi i l2}, e^{-2pi i l1}, e^{-2pi i l2}}.
inline std::vector<cx> predicted_spectrum_infinity(const MassInvariants& inv) {
    const cx two_pi_i = 2.0 * pi * imag_unit;
    return {std::exp(two_pi_i * inv.lambda1), std::exp(two_pi_i * inv.lambda2),
            std::exp(-two_pi_i * inv.lambda1), std::exp(-two_pi_i * inv.lambda2)};
}

/// Predicted spectrum {s1, s1, s2, s2} of the centralizer element,
/// s_i = 2 (cos(2 pi lambda_i) - 1).
inline std::vector<cx> predicted_centralizer_spectrum(const MassInvariants& inv) {
    const cx s1 = 2.0 * (std::cos(2.0 * pi * inv.lambda1) - 1.0);
    const cx s2 = 2.0 * (std::cos(2.0 * pi * inv.lambda2) - 1.0);
    return {s1, s1, s2, s2};
}

enum class SigmaClassValue {
    Generic,
    InvariantCase,          ///< sigma in {1/3, 8/27}
    LinearOrQuadraticCase,  ///< sigma = 2/9
    ObstructionCase,        ///< sigma in {7/48, 5/16}
    NearBoundary,           ///< within near_tol of a special value but outside tol
};

inline const char* to_string(SigmaClassValue v) {
    switch (v) {
        case SigmaClassValue::Generic: return "Generic";
        case SigmaClassValue::InvariantCase: return "InvariantCase";
        case SigmaClassValue::LinearOrQuadraticCase: return "LinearOrQuadraticCase";
        case SigmaClassValue::ObstructionCase: return "ObstructionCase";
        default: return "NearBoundary";
    }
}

struct SigmaClass {
    SigmaClassValue value = SigmaClassValue::Generic;
    double distance = 0.0; ///< to the nearest special value
    double nearest_special = 0.0;
    double tolerance = 0.0;
};

/// Match sigma against the special values {1/3, 8/27, 2/9, 7/48, 5/16}.
inline SigmaClass classify_sigma(double sigma, double tol = 1e-9, double near_tol = 1e-6) {
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(sigma > 0.0) || sigma > 1.0 / 3.0 + 8 * eps)
        throw SigmaOutOfRange("sigma must lie in (0, 1/3], got " + std::to_string(sigma));
    struct Special { double value; SigmaClassValue cls; };
    static const Special specials[] = {
        {1.0 / 3.0, SigmaClassValue::InvariantCase},
        {8.0 / 27.0, SigmaClassValue::InvariantCase},
        {2.0 / 9.0, SigmaClassValue::LinearOrQuadraticCase},
        {7.0 / 48.0, SigmaClassValue::ObstructionCase},
        {5.0 / 16.0, SigmaClassValue::ObstructionCase},
    };
    SigmaClass out;
    out.tolerance = tol;
    out.distance = std::numeric_limits<double>::infinity();
    SigmaClassValue matched = SigmaClassValue::Generic;
    for (const auto& s : specials) {
        const double d = std::abs(sigma - s.value);
        if (d < out.distance) {
            out.distance = d;
            out.nearest_special = s.value;
            matched = s.cls;
        }
    }
    if (out.distance <= tol) out.value = matched;
    else if (out.distance <= near_tol) out.value = SigmaClassValue::NearBoundary;
    else out.value = SigmaClassValue::Generic;
    return out;
}

/// Mass triple (t, t, 1) realizing a given sigma, via the cancellation-free
/// root t = s / (1 - 2s + sqrt(1 - 3s)) of (1-4s) t^2 + (2-4s) t - s = 0.
/// When two positive roots exist the smaller one is returned.
inline Masses masses_for_sigma(double sigma_target) {
    const double s = sigma_target;
    if (!(s > 0.0) || s > 1.0 / 3.0 + 8 * std::numeric_limits<double>::epsilon())
        throw SigmaOutOfRange("sigma must lie in (0, 1/3], got " + std::to_string(s));
    const double disc = std::max(0.0, 1.0 - 3.0 * s);
    const double t = s / (1.0 - 2.0 * s + std::sqrt(disc));
    Masses m{t, t, 1.0};
    const double achieved = mass_invariants(m).sigma;
    if (std::abs(achieved - s) > 1e-12 * std::max(s, 1e-30))
        throw NumericError("masses_for_sigma: achieved sigma off target by " +
                           std::to_string(std::abs(achieved - s)));
    return m;
}

enum class PipelineVerdict { NoAdditionalMeromorphicIntegral, InvariantFound, Inconclusive };

inline const char* to_string(PipelineVerdict v) {
    switch (v) {
        case PipelineVerdict::NoAdditionalMeromorphicIntegral:
            return "NoAdditionalMeromorphicIntegral";
        case PipelineVerdict::InvariantFound: return "InvariantFound";
        default: return "Inconclusive";
    }
}

enum class CheckStatus { Pass, Fail, Skip };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "skip";
    }
}

struct PipelineCheck {
    std::string name;
    CheckStatus status = CheckStatus::Skip;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct PipelineOptions {
    double transport_tol = 1e-9;
    /// Structural comparisons (matrix distances, commutators, symmetry).
    double check_tol = 1e-7;
    /// Eigenvalue comparisons; wide because eigenvalues of defective
    /// matrices move like the square root of the matrix perturbation.
    double spectral_match_tol = 1e-4;
    /// Rank decisions inside Jordan-shape checks.
    double rank_tol = 1e-5;
    double invariant_tol = 1e-8;
    double classification_tol = 1e-6;
};

struct PipelineReport {
    Masses masses;
    MassInvariants invariants;
    SigmaClass sigma_class;
    PipelineOptions options;
    std::vector<PipelineCheck> checks;
    bool input_mismatch = false;
    bool completed = false;       ///< pipeline ran to the verdict stage
    bool structural_pass = false; ///< checks (a)-(g) all pass
    PipelineVerdict verdict = PipelineVerdict::Inconclusive;
    int invariant_degree = 0; ///< 1 or 2 when verdict == InvariantFound
    std::optional<MonodromyGroup> group;
    std::optional<PermutationPairReport> permutation_pair;
};

namespace detail {

/// Best multiset match of computed vs predicted values (n = 4: brute force
/// over permutations); returns the largest pointwise distance.
inline double multiset_match_residual(std::vector<cx> a, const std::vector<cx>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), size_t{0});
    double best = std::numeric_limits<double>::infinity();
    std::sort(perm.begin(), perm.end());
    do {
        double worst = 0.0;
        for (size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace detail

/// End-to-end verification for supplied residue data: checks the singular
/// points and reality symmetry against the closed forms, computes the
/// monodromy generators, and tests the structural claims (apparent first
/// singularity, unipotent generators with 2+2 Jordan shape, the predicted
/// spectra, the reflection symmetry, the commuting centralizer element) and
/// finally the obstruction test or the degree <= 2 invariant search chosen
/// by the sigma class. Structural failures are report entries; only inputs
/// that cannot be matched to the closed-form layout throw.
inline PipelineReport verify_pipeline(const Masses& masses, const FuchsianSystem& sys,
                                      const PipelineOptions& opt = {}) {
    PipelineReport rep;
    rep.masses = masses;
    rep.invariants = mass_invariants(masses);
    rep.sigma_class = classify_sigma(rep.invariants.sigma);
    rep.options = opt;

    if (sys.dimension() != 4)
        throw InputMismatch("residue system must be 4-dimensional, got " +
                            std::to_string(sys.dimension()));
    if (sys.num_singularities() != 3)
        throw InputMismatch("residue system must have exactly 3 singular points");
    if (std::abs(sys.basepoint()) > opt.check_tol)
        throw InputMismatch("basepoint must be 0 for the closed-form layout");
    const cx expected_pts[3] = {rep.invariants.z0, rep.invariants.z1, rep.invariants.z2};
    double point_resid = 0.0;
    for (int i = 0; i < 3; ++i)
        point_resid = std::max(point_resid, std::abs(sys.point(i) - expected_pts[i]));
    if (point_resid > opt.check_tol)
        throw InputMismatch("singular points disagree with the closed forms by " +
                            std::to_string(point_resid) +
                            " (expected file order z0, z1, z2)");

    // (a) point layout and reality symmetry
    const auto symmetry = check_reality_symmetry(sys, opt.check_tol);
    {
        PipelineCheck c;
        c.name = "a_points_and_reality_symmetry";
        c.residual = std::max(point_resid, symmetry.max_defect);
        c.tolerance = opt.check_tol;
        c.status = symmetry.is_real_symmetric ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "singular points match closed forms; conjugation symmetry defect " +
                   std::to_string(symmetry.max_defect);
        rep.checks.push_back(c);
        if (c.status == CheckStatus::Fail) {
            rep.input_mismatch = true;
            for (const char* name : {"b_apparent_singularity", "c_unipotent_generators",
                                     "d_spectrum_at_infinity", "e_reflection_symmetry",
                                     "f_centralizer_commutes", "g_centralizer_spectrum",
                                     "h_verdict"}) {
                PipelineCheck s;
                s.name = name;
                s.status = CheckStatus::Skip;
                s.detail = "skipped: reality symmetry failed";
                rep.checks.push_back(s);
            }
            return rep;
        }
    }

    auto group = monodromy_generators(sys, opt.transport_tol);
    const CMatrix& t0 = group.generators[0];
    const CMatrix& t1 = group.generators[1];
    const CMatrix& t2 = group.generators[2];
    const CMatrix t_inf = monodromy_at_infinity(group); // product route; direct route kept in group

    // (b) apparent singularity: T0 = Id
    {
        PipelineCheck c;
        c.name = "b_apparent_singularity";
        c.residual = (t0 - identity(4)).norm();
        c.tolerance = opt.check_tol;
        c.status = c.residual <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "||T0 - Id||";
        rep.checks.push_back(c);
    }

    // (c) T1, T2 unipotent with Jordan shape two 2x2 blocks
    {
        PipelineCheck c;
        c.name = "c_unipotent_generators";
        c.tolerance = opt.check_tol;
        bool ok = true;
        double resid = 0.0;
        for (const CMatrix* t : {&t1, &t2}) {
            const CMatrix p = matrix_power(*t - identity(4), 4);
            resid = std::max(resid, p.norm() / std::pow(t->norm(), 4));
            if (!is_unipotent(*t, opt.check_tol)) ok = false;
            const auto sp = spectrum(*t, opt.spectral_match_tol * std::max(1.0, t->norm()),
                                     opt.rank_tol);
            const bool shape = sp.eigenvalues.size() == 1 && sp.eigenvalues[0].algebraic == 4 &&
                               sp.jordan_blocks.size() == 1 &&
                               sp.jordan_blocks[0].sizes == std::vector<int>{2, 2};
            if (!shape) ok = false;
        }
        c.residual = resid;
        c.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "unipotency residual ||(T-I)^4||/||T||^4 and Jordan shape [2,2]";
        rep.checks.push_back(c);
    }

    // (d) Spectr(T_inf) matches the closed-form prediction
    {
        PipelineCheck c;
        c.name = "d_spectrum_at_infinity";
        c.tolerance = opt.spectral_match_tol;
        c.residual = detail::multiset_match_residual(eigenvalues_raw(t_inf),
                                                     predicted_spectrum_infinity(rep.invariants));
        c.status = c.residual <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "multiset distance of eig(T_inf) to {e^{plus/minus 2 pi i lambda_i}}";
        rep.checks.push_back(c);
    }

    // (e) reflection symmetry conj(T1)^{-1} = T2
    {
        PipelineCheck c;
        c.name = "e_reflection_symmetry";
        c.tolerance = opt.check_tol;
        c.residual = reflection_symmetry_residual(t1, t2);
        c.status = c.residual <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "||conj(T1)^-1 - T2||";
        rep.checks.push_back(c);
    }

    // (f) centralizer element commutes with T1, T2
    CMatrix centralizer;
    {
        PipelineCheck c;
        c.name = "f_centralizer_commutes";
        c.tolerance = opt.check_tol;
        centralizer = centralizer_element(t_inf);
        const double denom1 = centralizer.norm() * t1.norm();
        const double denom2 = centralizer.norm() * t2.norm();
        c.residual = std::max(
            (centralizer * t1 - t1 * centralizer).norm() / std::max(denom1, 1e-300),
            (centralizer * t2 - t2 * centralizer).norm() / std::max(denom2, 1e-300));
        c.status = c.residual <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "relative commutator norms ||[T, T_i]|| / (||T|| ||T_i||)";
        rep.checks.push_back(c);
    }

    // (g) Spectr(T) matches {s1, s1, s2, s2}
    {
        PipelineCheck c;
        c.name = "g_centralizer_spectrum";
        c.tolerance = opt.spectral_match_tol;
        c.residual = detail::multiset_match_residual(
            eigenvalues_raw(centralizer), predicted_centralizer_spectrum(rep.invariants));
        c.status = c.residual <= c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = "multiset distance of eig(T) to {2(cos 2 pi lambda_i - 1)}";
        rep.checks.push_back(c);
    }

    // (h) obstruction test or invariant search by sigma class
    {
        PipelineCheck c;
        c.name = "h_verdict";
        c.tolerance = opt.invariant_tol;
        switch (rep.sigma_class.value) {
            case SigmaClassValue::ObstructionCase:
            case SigmaClassValue::Generic: {
                const auto verdict = rational_invariant_obstruction(t_inf, opt.invariant_tol);
                c.residual = 0.0;
                if (verdict.verdict == Obstruction::NoRationalInvariant) {
                    rep.verdict = PipelineVerdict::NoAdditionalMeromorphicIntegral;
                    c.status = CheckStatus::Pass;
                    c.detail = "obstruction holds: centralizer spectrum is a double pair and "
                               "1 is not in Spectr(T_inf)";
                } else {
                    rep.verdict = PipelineVerdict::Inconclusive;
                    c.status = CheckStatus::Fail;
                    c.detail = "obstruction test inconclusive where the sigma class predicts "
                               "an obstruction";
                }
                break;
            }
            case SigmaClassValue::LinearOrQuadraticCase:
            case SigmaClassValue::InvariantCase: {
                const std::vector<CMatrix> gens{t0, t1, t2};
                const auto lin = linear_invariants(gens, opt.invariant_tol);
                if (lin.dimension() > 0) {
                    rep.verdict = PipelineVerdict::InvariantFound;
                    rep.invariant_degree = 1;
                } else {
                    const auto quad = quadratic_invariants(gens, opt.invariant_tol);
                    if (quad.dimension() > 0) {
                        rep.verdict = PipelineVerdict::InvariantFound;
                        rep.invariant_degree = 2;
                    } else {
                        rep.verdict = PipelineVerdict::Inconclusive;
                    }
                }
                const bool expected = rep.verdict == PipelineVerdict::InvariantFound;
                c.status = expected ? CheckStatus::Pass : CheckStatus::Fail;
                c.detail = expected
                               ? ("invariant of degree " + std::to_string(rep.invariant_degree) +
                                  " found")
                               : "no degree <= 2 invariant found where the sigma class "
                                 "predicts one";
                if (rep.sigma_class.value == SigmaClassValue::LinearOrQuadraticCase) {
                    try {
                        rep.permutation_pair = permutation_pair_structure(
                            t1, t2, group.at_infinity, opt.invariant_tol,
                            opt.classification_tol);
                    } catch (const NumericError& e) {
                        c.detail += "; permutation-pair analysis not applicable: ";
                        c.detail += e.what();
                    }
                }
                break;
            }
            case SigmaClassValue::NearBoundary: {
                rep.verdict = PipelineVerdict::Inconclusive;
                c.status = CheckStatus::Skip;
                c.detail = "sigma is within the near-boundary band of a special value; "
                           "classification ambiguous";
                break;
            }
        }
        rep.checks.push_back(c);
    }

    rep.completed = true;
    rep.structural_pass = true;
    for (const auto& c : rep.checks)
        if (c.name != "h_verdict" && c.status == CheckStatus::Fail) rep.structural_pass = false;
    rep.group = std::move(group);
    return rep;
}

} // namespace fuchs
