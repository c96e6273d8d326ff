#pragma once

#include <complex>
#include <string>
#include <variant>

#include <json.hpp>

#include "calibra/slag.hpp"
#include "calibra/squeeze.hpp"

namespace calibra {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars: float64 coefficients are JSON numbers, exact coefficients are
// "p/q" strings.
// ---------------------------------------------------------------------------

inline Json scalar_to_json(double x) { return Json(x); }
inline Json scalar_to_json(const Rational& x) { return Json(rational_to_string(x)); }

template <typename S>
S scalar_from_json(const Json& j);

template <>
inline double scalar_from_json<double>(const Json& j) {
    if (!j.is_number()) throw PreconditionError("expected a numeric coefficient");
    return j.get<double>();
}

template <>
inline Rational scalar_from_json<Rational>(const Json& j) {
    if (!j.is_string()) throw PreconditionError("expected a \"p/q\" string coefficient");
    return rational_from_string(j.get<std::string>());
}

// ---------------------------------------------------------------------------
// Forms: {"dim": n, "degree": k, "terms": [{"idx": [...], "re": q, "im": q?}]}
// ---------------------------------------------------------------------------

template <typename S>
Json form_to_json(const KForm<S>& f) {
    Json terms = Json::array();
    for (const auto& [idx, c] : f.coefficients()) {
        Json term;
        term["idx"] = idx.indices();
        term["re"] = scalar_to_json(c);
        terms.push_back(std::move(term));
    }
    return Json{{"dim", f.dim()}, {"degree", f.degree()}, {"terms", std::move(terms)}};
}

template <typename S>
Json form_to_json(const ComplexKForm<S>& f) {
    std::map<MultiIndex, std::pair<S, S>> merged;
    for (const auto& [idx, c] : f.re.coefficients()) merged[idx].first = c;
    for (const auto& [idx, c] : f.im.coefficients()) merged[idx].second = c;
    Json terms = Json::array();
    for (const auto& [idx, parts] : merged) {
        Json term;
        term["idx"] = idx.indices();
        term["re"] = scalar_to_json(parts.first);
        term["im"] = scalar_to_json(parts.second);
        terms.push_back(std::move(term));
    }
    return Json{{"dim", f.dim()}, {"degree", f.degree()}, {"terms", std::move(terms)}};
}

template <typename S>
KForm<S> real_form_from_json(const Json& j) {
    KForm<S> f(j.at("dim").get<int>(), j.at("degree").get<int>());
    for (const auto& term : j.at("terms")) {
        MultiIndex idx(term.at("idx").get<std::vector<int>>());
        f.add_coefficient(idx, scalar_from_json<S>(term.at("re")));
    }
    return f;
}

template <typename S>
ComplexKForm<S> complex_form_from_json(const Json& j) {
    const int dim = j.at("dim").get<int>();
    const int degree = j.at("degree").get<int>();
    KForm<S> re(dim, degree), im(dim, degree);
    for (const auto& term : j.at("terms")) {
        MultiIndex idx(term.at("idx").get<std::vector<int>>());
        re.add_coefficient(idx, scalar_from_json<S>(term.at("re")));
        if (term.contains("im")) im.add_coefficient(idx, scalar_from_json<S>(term.at("im")));
    }
    return ComplexKForm<S>(std::move(re), std::move(im));
}

using ParsedForm = std::variant<KFormD, KFormQ, ComplexKFormD, ComplexKForm<Rational>>;

/// Mode inference: string coefficients mean exact-rational, the presence of
/// any "im" field means complex-valued.
inline ParsedForm form_from_json(const Json& j) {
    bool complex_valued = false;
    bool exact = false;
    for (const auto& term : j.at("terms")) {
        if (term.contains("im")) complex_valued = true;
        if (term.at("re").is_string()) exact = true;
    }
    if (complex_valued && exact) return complex_form_from_json<Rational>(j);
    if (complex_valued) return complex_form_from_json<double>(j);
    if (exact) return real_form_from_json<Rational>(j);
    return real_form_from_json<double>(j);
}

// ---------------------------------------------------------------------------
// Matrices, vectors, ellipsoids
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw PreconditionError("matrix: expected a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[static_cast<std::size_t>(i)].size()) != cols)
            throw PreconditionError("matrix: ragged rows");
        for (int c = 0; c < cols; ++c)
            m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline Json vector_to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline Eigen::VectorXd vector_from_json(const Json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

inline Json ellipsoid_to_json(const Ellipsoid& e) {
    return Json{{"center", vector_to_json(e.center)}, {"shape", matrix_to_json(e.shape)}};
}

inline Ellipsoid ellipsoid_from_json(const Json& j) {
    return Ellipsoid(vector_from_json(j.at("center")), matrix_from_json(j.at("shape")));
}

inline Json complex_matrix_to_json(const ComplexMatrix& m) {
    return Json{{"re", matrix_to_json(m.re)}, {"im", matrix_to_json(m.im)}};
}

inline ComplexMatrix complex_matrix_from_json(const Json& j) {
    return ComplexMatrix(matrix_from_json(j.at("re")), matrix_from_json(j.at("im")));
}

// ---------------------------------------------------------------------------
// Reports and verdicts
// ---------------------------------------------------------------------------

inline Json to_json(const WilliamsonDecomposition& w, const Eigen::MatrixXd& m) {
    const auto [res_j, res_m] = williamson_residuals(m, w);
    Json lambda = Json::array();
    for (int i = 0; i < w.lambda.size(); ++i) lambda.push_back(w.lambda(i));
    return Json{{"S", matrix_to_json(w.S)},
                {"lambda", lambda},
                {"residual_symplectic", res_j},
                {"residual_congruence", res_m}};
}

inline Json to_json(const SymplecticSpectrum& s) {
    return Json{{"radii", vector_to_json(s.radii)}};
}

inline Json to_json(const PowerStabilizerVerdict& v) {
    return Json{{"preserves_power", v.preserves_power},
                {"classification", to_string(v.classification)},
                {"residuals", v.residuals}};
}

inline Json to_json(const ComassReport& r) {
    return Json{{"value", r.value},
                {"frame", matrix_to_json(r.frame)},
                {"restarts", r.restarts},
                {"converged_fraction", r.converged_fraction},
                {"max_sampled", r.max_sampled},
                {"restart_values", r.restart_values}};
}

inline Json to_json(const WirtingerResult& r) {
    return Json{{"value", r.value},
                {"is_equality", r.is_equality},
                {"is_J_invariant", r.is_J_invariant},
                {"j_residual", r.j_residual}};
}

inline Json to_json(const SqueezeResult& r) {
    return Json{{"best_radius", r.best_radius},
                {"best_params", vector_to_json(r.best_params)},
                {"best_component", r.best_component},
                {"best_translation", vector_to_json(r.best_translation)},
                {"iterations", r.iterations},
                {"trace", r.trace},
                {"restart_iterations", r.restart_iterations},
                {"restart_seeds", r.restart_seeds}};
}

/// One row per restart: seed, radius, iterations.
inline std::string squeeze_trace_csv(const SqueezeResult& r) {
    std::string csv = "restart,seed,radius,iterations\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(r.restart_seeds[i]) + "," +
               Json(r.trace[i]).dump() + "," + std::to_string(r.restart_iterations[i]) + "\n";
    }
    return csv;
}

inline Json to_json(const SweepReport& r) {
    return Json{{"min_radius", r.min_radius},
                {"trials", r.trials},
                {"violations", r.violations},
                {"floor", r.floor}};
}

inline Json to_json(const SymplecticWitness& w) {
    return Json{{"found", true},
                {"map", matrix_to_json(w.map)},
                {"lambda", w.lambda},
                {"certificate_radius", w.certificate_radius},
                {"used_inverse", w.used_inverse},
                {"u", vector_to_json(w.u)},
                {"v", vector_to_json(w.v)}};
}

inline Json to_json(const SlagWitness& w) {
    return Json{{"found", true},
                {"map", matrix_to_json(w.map)},
                {"lambda", w.lambda},
                {"theta", w.theta},
                {"certificate_radius", w.certificate_radius},
                {"used_inverse", w.used_inverse}};
}

inline Json to_json(const PhaseVerdict& v) {
    return Json{{"preserves_up_to_phase", v.preserves_up_to_phase},
                {"theta", v.theta},
                {"residual", v.residual}};
}

} // namespace calibra
