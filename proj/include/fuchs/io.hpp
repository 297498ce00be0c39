#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fuchs/invariants.hpp"
#include "fuchs/threebody.hpp"
#include "fuchs/transport.hpp"

namespace fuchs {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string locus_line(std::string_view text, size_t byte) {
    size_t line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return "line " + std::to_string(line);
}

inline double number_from_json(const ordered_json& j, const std::string& locus) {
    if (!j.is_number())
        throw ParseError(locus + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(locus + ": number not finite");
    return v;
}

} // namespace detail

inline ordered_json parse_json_text(std::string_view text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(detail::locus_line(text, e.byte) + ": " + e.what());
    }
}

inline cx complex_from_json(const ordered_json& j, const std::string& locus) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(locus + ": expected [re, im]");
    return {detail::number_from_json(j[0], locus + "[0]"),
            detail::number_from_json(j[1], locus + "[1]")};
}

inline ordered_json complex_to_json(cx z) { return ordered_json::array({z.real(), z.imag()}); }

inline CMatrix matrix_from_json(const ordered_json& j, const std::string& locus) {
    if (!j.is_array() || j.empty())
        throw ParseError(locus + ": expected a non-empty array of rows");
    const size_t rows = j.size();
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ParseError(locus + "[0]: expected a non-empty row");
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        const std::string rl = locus + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError(rl + ": ragged row");
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c], rl + "[" + std::to_string(c) + "]");
    }
    return m;
}

inline ordered_json matrix_to_json(const CMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CVector vector_from_json(const ordered_json& j, const std::string& locus) {
    if (!j.is_array() || j.empty()) throw ParseError(locus + ": expected a non-empty array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], locus + "[" + std::to_string(i) + "]");
    return v;
}

inline ordered_json vector_to_json(const CVector& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

// ---------------------------------------------------------------------------
// system file
// {"dimension": n, "basepoint": [re, im],
//  "singularities": [{"point": [re, im], "residue": [[[re, im] x n] x n]}, ...]}
// Singularity order in the file defines the generator indexing everywhere.
// Basepoint defaults to 0 and must not be singular.
// ---------------------------------------------------------------------------

inline FuchsianSystem parse_system(std::string_view text) {
    const ordered_json j = parse_json_text(text);
    if (!j.is_object()) throw ParseError("top level: expected an object");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw ParseError("dimension: expected an integer");
    const int n = j["dimension"].get<int>();
    cx basepoint{0.0, 0.0};
    if (j.contains("basepoint")) basepoint = complex_from_json(j["basepoint"], "basepoint");
    if (!j.contains("singularities") || !j["singularities"].is_array())
        throw ParseError("singularities: expected an array");
    std::vector<Singularity> sing;
    for (size_t i = 0; i < j["singularities"].size(); ++i) {
        const std::string locus = "singularities[" + std::to_string(i) + "]";
        const auto& js = j["singularities"][i];
        if (!js.is_object() || !js.contains("point") || !js.contains("residue"))
            throw ParseError(locus + ": expected {point, residue}");
        Singularity s;
        s.point = complex_from_json(js["point"], locus + ".point");
        s.residue = matrix_from_json(js["residue"], locus + ".residue");
        if (s.residue.rows() != n || s.residue.cols() != n)
            throw ValidationError(locus + ".residue: expected " + std::to_string(n) + "x" +
                                  std::to_string(n) + ", got " + std::to_string(s.residue.rows()) +
                                  "x" + std::to_string(s.residue.cols()));
        sing.push_back(std::move(s));
    }
    return FuchsianSystem(n, std::move(sing), basepoint);
}

inline std::string serialize_system(const FuchsianSystem& sys) {
    ordered_json j;
    j["dimension"] = sys.dimension();
    j["basepoint"] = complex_to_json(sys.basepoint());
    j["singularities"] = ordered_json::array();
    for (const auto& s : sys.singularities()) {
        ordered_json js;
        js["point"] = complex_to_json(s.point);
        js["residue"] = matrix_to_json(s.residue);
        j["singularities"].push_back(std::move(js));
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// loop file: {"around": i, "orientation": "ccw"|"cw"} or
//            {"waypoints": [[re, im], ...]}
// A waypoint route is taken verbatim (closed or open); "around" routes use
// the standard generator loop. Returns the concrete polyline to transport.
// ---------------------------------------------------------------------------

inline PathSpec parse_route(std::string_view text, const FuchsianSystem& sys) {
    const ordered_json j = parse_json_text(text);
    if (!j.is_object()) throw ParseError("top level: expected an object");
    if (j.contains("around")) {
        if (!j["around"].is_number_integer()) throw ParseError("around: expected an integer");
        Orientation orient = Orientation::Counterclockwise;
        if (j.contains("orientation")) {
            const std::string o = j["orientation"].get<std::string>();
            if (o == "ccw") orient = Orientation::Counterclockwise;
            else if (o == "cw") orient = Orientation::Clockwise;
            else throw ParseError("orientation: expected \"ccw\" or \"cw\"");
        }
        return materialize_loop(sys, standard_loop(sys, j["around"].get<int>(), orient));
    }
    if (j.contains("waypoints")) {
        PathSpec path;
        const auto& w = j["waypoints"];
        if (!w.is_array()) throw ParseError("waypoints: expected an array");
        for (size_t i = 0; i < w.size(); ++i)
            path.waypoints.push_back(complex_from_json(w[i], "waypoints[" + std::to_string(i) + "]"));
        validate_path(sys, path);
        return path;
    }
    throw ParseError("expected either \"around\" or \"waypoints\"");
}

// ---------------------------------------------------------------------------
// generators file: {"matrices": [[[re, im] x n] x n, ...]}
// ---------------------------------------------------------------------------

inline std::vector<CMatrix> parse_generators(std::string_view text) {
    const ordered_json j = parse_json_text(text);
    if (!j.is_object() || !j.contains("matrices") || !j["matrices"].is_array() ||
        j["matrices"].empty())
        throw ParseError("expected {\"matrices\": [matrix, ...]} with at least one matrix");
    std::vector<CMatrix> out;
    for (size_t i = 0; i < j["matrices"].size(); ++i) {
        CMatrix m = matrix_from_json(j["matrices"][i], "matrices[" + std::to_string(i) + "]");
        if (m.rows() != m.cols())
            throw ValidationError("matrices[" + std::to_string(i) + "]: not square");
        if (!out.empty() && m.rows() != out.front().rows())
            throw ValidationError("matrices[" + std::to_string(i) + "]: shape differs from matrices[0]");
        out.push_back(std::move(m));
    }
    return out;
}

inline std::string serialize_generators(const std::vector<CMatrix>& gens) {
    ordered_json j;
    j["matrices"] = ordered_json::array();
    for (const auto& g : gens) j["matrices"].push_back(matrix_to_json(g));
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

inline ordered_json spectral_report_json(const SpectralReport& rep) {
    ordered_json j;
    j["eigenvalues"] = ordered_json::array();
    for (const auto& c : rep.eigenvalues) {
        ordered_json e;
        e["value"] = complex_to_json(c.value);
        e["algebraic_multiplicity"] = c.algebraic;
        e["geometric_multiplicity"] = c.geometric;
        j["eigenvalues"].push_back(std::move(e));
    }
    j["jordan_blocks"] = ordered_json::array();
    for (const auto& b : rep.jordan_blocks) {
        ordered_json e;
        e["eigenvalue"] = b.eigenvalue_index;
        e["sizes"] = b.sizes;
        j["jordan_blocks"].push_back(std::move(e));
    }
    j["cluster_tolerance"] = rep.cluster_tolerance;
    j["rank_tolerance"] = rep.rank_tolerance;
    return j;
}

inline ordered_json transport_report_json(const TransportResult& r, double tol) {
    ordered_json j;
    j["matrix"] = matrix_to_json(r.matrix);
    j["error_estimate"] = r.error_estimate;
    j["steps_taken"] = r.steps_taken;
    j["min_clearance"] = r.min_clearance;
    j["condition"] = r.condition;
    j["tolerance"] = tol;
    return j;
}

inline ordered_json monodromy_report_json(const FuchsianSystem& sys, const MonodromyGroup& g,
                                          double cluster_tol_rel) {
    ordered_json j;
    j["dimension"] = sys.dimension();
    j["tolerance"] = g.tolerance_used;
    j["generators"] = ordered_json::array();
    j["generator_errors"] = g.generator_errors;
    j["generator_spectra"] = ordered_json::array();
    j["apparent"] = ordered_json::array();
    const double apparent_tol = 100 * g.tolerance_used;
    for (const auto& t : g.generators) {
        j["generators"].push_back(matrix_to_json(t));
        j["generator_spectra"].push_back(
            spectral_report_json(spectrum(t, cluster_tol_rel * std::max(1.0, t.norm()))));
        j["apparent"].push_back((t - identity(t.rows())).norm() <= apparent_tol);
    }
    j["at_infinity"] = matrix_to_json(g.at_infinity);
    j["at_infinity_error"] = g.at_infinity_error;
    j["at_infinity_from_product"] = matrix_to_json(monodromy_at_infinity(g));
    const double resid = product_relation_residual(g);
    j["product_relation_residual"] = resid;
    j["consistency_tolerance"] = apparent_tol;
    j["ordering_consistent"] = resid <= apparent_tol;
    return j;
}

inline ordered_json obstruction_json(const ObstructionVerdict& v) {
    ordered_json j;
    j["centralizer_spectrum"] = ordered_json::array();
    for (cx s : v.centralizer_spectrum) j["centralizer_spectrum"].push_back(complex_to_json(s));
    j["has_double_pair_structure"] = v.has_double_pair_structure;
    j["one_in_spectrum_infinity"] = v.one_in_spectrum_infinity;
    j["verdict"] = to_string(v.verdict);
    j["tolerance"] = v.tolerance;
    return j;
}

inline ordered_json permutation_pair_json(const PermutationPairReport& p) {
    ordered_json j;
    j["applicable"] = true;
    j["case"] = to_string(p.action);
    j["w"] = vector_to_json(p.w);
    j["w_bar"] = vector_to_json(p.w_bar);
    j["produced_invariant"] =
        p.produced_invariant ? vector_to_json(*p.produced_invariant) : ordered_json(nullptr);
    j["classification_threshold"] = p.classification_threshold;
    j["note"] = p.note;
    return j;
}

inline ordered_json invariants_report_json(const LinearInvariantBasis& lin,
                                           const QuadraticInvariantBasis& quad) {
    ordered_json j;
    j["tolerance"] = lin.tolerance;
    j["linear"] = ordered_json::object();
    j["linear"]["dimension"] = lin.dimension();
    j["linear"]["vectors"] = ordered_json::array();
    for (const auto& w : lin.vectors) j["linear"]["vectors"].push_back(vector_to_json(w));
    j["linear"]["residuals"] = lin.residuals;
    j["quadratic"] = ordered_json::object();
    j["quadratic"]["dimension"] = quad.dimension();
    j["quadratic"]["forms"] = ordered_json::array();
    for (const auto& q : quad.forms) j["quadratic"]["forms"].push_back(matrix_to_json(q));
    j["quadratic"]["residuals"] = quad.residuals;
    return j;
}

inline ordered_json sigma_class_json(const SigmaClass& c) {
    ordered_json j;
    j["value"] = to_string(c.value);
    j["distance"] = c.distance;
    j["nearest_special"] = c.nearest_special;
    j["tolerance"] = c.tolerance;
    return j;
}

inline ordered_json masses_report_json(const Masses& m, const MassInvariants& inv,
                                       const SigmaClass& cls) {
    ordered_json j;
    j["masses"] = ordered_json::array({m.m1, m.m2, m.m3});
    j["S1"] = inv.S1;
    j["S2"] = inv.S2;
    j["S3"] = inv.S3;
    j["sigma"] = inv.sigma;
    j["theta"] = inv.theta;
    j["lambda1"] = complex_to_json(inv.lambda1);
    j["lambda2"] = complex_to_json(inv.lambda2);
    j["z0"] = complex_to_json(inv.z0);
    j["z1"] = complex_to_json(inv.z1);
    j["z2"] = complex_to_json(inv.z2);
    j["sigma_class"] = sigma_class_json(cls);
    j["predicted_spectrum_infinity"] = ordered_json::array();
    for (cx v : predicted_spectrum_infinity(inv))
        j["predicted_spectrum_infinity"].push_back(complex_to_json(v));
    j["predicted_centralizer_spectrum"] = ordered_json::array();
    for (cx v : predicted_centralizer_spectrum(inv))
        j["predicted_centralizer_spectrum"].push_back(complex_to_json(v));
    return j;
}

inline ordered_json pipeline_report_json(const PipelineReport& rep) {
    ordered_json j;
    j["masses"] = ordered_json::array({rep.masses.m1, rep.masses.m2, rep.masses.m3});
    j["sigma"] = rep.invariants.sigma;
    j["sigma_class"] = sigma_class_json(rep.sigma_class);
    j["tolerance"] = rep.options.transport_tol;
    j["check_tolerance"] = rep.options.check_tol;
    j["spectral_match_tolerance"] = rep.options.spectral_match_tol;
    j["invariant_tolerance"] = rep.options.invariant_tol;
    j["checks"] = ordered_json::array();
    for (const auto& c : rep.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["status"] = to_string(c.status);
        e["residual"] = c.residual;
        e["tolerance"] = c.tolerance;
        e["detail"] = c.detail;
        j["checks"].push_back(std::move(e));
    }
    j["input_mismatch"] = rep.input_mismatch;
    j["structural_pass"] = rep.structural_pass;
    j["verdict"] = to_string(rep.verdict);
    j["invariant_degree"] =
        rep.invariant_degree > 0 ? ordered_json(rep.invariant_degree) : ordered_json(nullptr);
    if (rep.permutation_pair) j["permutation_pair"] = permutation_pair_json(*rep.permutation_pair);
    return j;
}

// ---------------------------------------------------------------------------
// text rendering: a stable, generic walk of the JSON report
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace detail {

inline bool is_scalar_array(const ordered_json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j)
        if (e.is_object() || (e.is_array() && !is_scalar_array(e))) return false;
    // nested once (complex numbers / rows) still renders inline
    for (const auto& e : j)
        if (e.is_array())
            for (const auto& f : e)
                if (!f.is_number() && !f.is_string() && !f.is_boolean() && !f.is_null())
                    return false;
    return true;
}

inline std::string scalar_text(const ordered_json& j) {
    if (j.is_number_float()) return format_double(j.get<double>());
    if (j.is_null()) return "none";
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

inline void render_text_impl(const ordered_json& j, int indent, std::string& out) {
    const std::string pad(static_cast<size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !is_scalar_array(value))) {
                out += pad + key + ":\n";
                render_text_impl(value, indent + 2, out);
            } else if (value.is_array()) {
                out += pad + key + ": ";
                render_text_impl(value, 0, out);
            } else {
                out += pad + key + ": " + scalar_text(value) + "\n";
            }
        }
    } else if (j.is_array()) {
        if (is_scalar_array(j)) {
            out += pad + "[";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                if (j[i].is_array()) {
                    std::string inner;
                    render_text_impl(j[i], 0, inner);
                    out += inner;
                    if (!out.empty() && out.back() == '\n') out.pop_back();
                } else {
                    out += scalar_text(j[i]);
                }
            }
            out += "]\n";
        } else {
            for (size_t i = 0; i < j.size(); ++i) {
                out += pad + "- [" + std::to_string(i) + "]\n";
                render_text_impl(j[i], indent + 2, out);
            }
        }
    } else {
        out += pad + scalar_text(j) + "\n";
    }
}

} // namespace detail

inline std::string render_text(const ordered_json& j) {
    std::string out;
    detail::render_text_impl(j, 0, out);
    return out;
}

} // namespace fuchs
