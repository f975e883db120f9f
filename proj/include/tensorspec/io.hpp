#pragma once

// JSON serialization.
//
//   tensor:   {"shape":[M1,...,MO], "layout":"colex", "data":[... cardinality numbers ...]}
//   CP:       {"weights":[...], "factors":[matrix, ...]}
//   Tucker:   {"core":tensor, "factors":[matrix, ...]}
//   matrix:   list of rows, e.g. [[1,2],[3,4]]
//   eigen:    {"variant":"z"|"h", "mode":o, "lambda":λ, "vector":[...], "residual":r, "converged":b}
//   singular: {"variant":"l2"|"lO", "p":p, "sigma":σ, "vectors":[[...],...], "residual":r, "converged":b}

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tensorspec/decomp.hpp"
#include "tensorspec/error.hpp"
#include "tensorspec/spectra.hpp"
#include "tensorspec/tensor.hpp"

namespace tensorspec::io {

using json = nlohmann::json;

namespace detail {

inline void require_parse(bool cond, const std::string& what)
{
    if (!cond) throw ParseError(what);
}

inline double finite_number(const json& v, const char* what)
{
    require_parse(v.is_number(), std::string(what) + " must be a number");
    const double d = v.get<double>();
    require_parse(std::isfinite(d), std::string(what) + " must be finite");
    return d;
}

inline Vector number_list(const json& v, const char* what)
{
    require_parse(v.is_array(), std::string(what) + " must be an array");
    Vector out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(finite_number(e, what));
    return out;
}

} // namespace detail

inline json to_json(const Shape& s) { return s.dims(); }

inline Shape shape_from_json(const json& j)
{
    detail::require_parse(j.is_array() && !j.empty(), "shape must be a nonempty array");
    std::vector<std::size_t> dims;
    for (const auto& d : j) {
        detail::require_parse(d.is_number_integer() && d.get<long long>() >= 1,
                              "shape entries must be positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    return Shape(std::move(dims));
}

inline json to_json(const DenseTensor& t)
{
    return json{{"shape", t.shape().dims()}, {"layout", "colex"}, {"data", t.entries()}};
}

inline DenseTensor tensor_from_json(const json& j)
{
    detail::require_parse(j.is_object(), "tensor must be a JSON object");
    detail::require_parse(j.contains("shape") && j.contains("layout") && j.contains("data"),
                          "tensor needs shape, layout and data");
    const Shape shape = shape_from_json(j.at("shape"));
    detail::require_parse(j.at("layout").is_string() && j.at("layout").get<std::string>() == "colex",
                          "unknown tensor layout");
    auto data = detail::number_list(j.at("data"), "tensor data");
    detail::require_parse(data.size() == shape.cardinality(),
                          "tensor data has " + std::to_string(data.size()) + " entries, shape " +
                              shape.to_string() + " needs " + std::to_string(shape.cardinality()));
    return DenseTensor(shape, std::move(data));
}

inline json matrix_to_json(const Matrix& a)
{
    require_matrix(a, "matrix");
    json rows = json::array();
    for (std::size_t i = 1; i <= a.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 1; k <= a.cols(); ++k) row.push_back(a(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j)
{
    detail::require_parse(j.is_array() && !j.empty(), "matrix must be a nonempty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) rows.push_back(detail::number_list(r, "matrix row"));
    const auto w = rows.front().size();
    detail::require_parse(w >= 1, "matrix rows must be nonempty");
    for (const auto& r : rows) detail::require_parse(r.size() == w, "ragged matrix rows");
    return DenseTensor::matrix(rows);
}

inline json to_json(const CpDecomposition& cp)
{
    json factors = json::array();
    for (const auto& f : cp.factors) factors.push_back(matrix_to_json(f));
    return json{{"weights", cp.weights}, {"factors", std::move(factors)}};
}

inline CpDecomposition cp_from_json(const json& j)
{
    detail::require_parse(j.is_object() && j.contains("weights") && j.contains("factors"),
                          "CP decomposition needs weights and factors");
    CpDecomposition cp;
    cp.weights = detail::number_list(j.at("weights"), "CP weights");
    detail::require_parse(j.at("factors").is_array(), "CP factors must be an array");
    for (const auto& f : j.at("factors")) cp.factors.push_back(matrix_from_json(f));
    try {
        cp.validate();
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return cp;
}

inline json to_json(const TuckerDecomposition& tk)
{
    json factors = json::array();
    for (const auto& f : tk.factors) factors.push_back(matrix_to_json(f));
    return json{{"core", to_json(tk.core)}, {"factors", std::move(factors)}};
}

inline TuckerDecomposition tucker_from_json(const json& j)
{
    detail::require_parse(j.is_object() && j.contains("core") && j.contains("factors"),
                          "Tucker decomposition needs core and factors");
    TuckerDecomposition tk;
    tk.core = tensor_from_json(j.at("core"));
    detail::require_parse(j.at("factors").is_array(), "Tucker factors must be an array");
    for (const auto& f : j.at("factors")) tk.factors.push_back(matrix_from_json(f));
    try {
        tk.validate();
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return tk;
}

inline json to_json(const EigenPair& p)
{
    return json{{"variant", to_string(p.variant)}, {"mode", p.mode},          {"lambda", p.lambda},
                {"vector", p.x},                   {"residual", p.residual}, {"converged", p.converged}};
}

inline EigenPair eigen_pair_from_json(const json& j)
{
    detail::require_parse(j.is_object(), "eigenpair must be an object");
    EigenPair p;
    const auto v = j.at("variant").get<std::string>();
    detail::require_parse(v == "z" || v == "h", "eigen variant must be z or h");
    p.variant = v == "z" ? EigenVariant::z : EigenVariant::h;
    p.mode = j.at("mode").get<std::size_t>();
    p.lambda = detail::finite_number(j.at("lambda"), "lambda");
    p.x = detail::number_list(j.at("vector"), "eigenvector");
    p.residual = j.at("residual").get<double>();
    p.converged = j.value("converged", true);
    return p;
}

inline json to_json(const SingularTuple& s)
{
    return json{{"variant", to_string(s.variant)},
                {"p", static_cast<int>(s.p())},
                {"sigma", s.sigma},
                {"vectors", s.xs},
                {"residual", s.residual},
                {"converged", s.converged}};
}

inline SingularTuple singular_tuple_from_json(const json& j)
{
    detail::require_parse(j.is_object(), "singular tuple must be an object");
    SingularTuple s;
    const auto v = j.at("variant").get<std::string>();
    detail::require_parse(v == "l2" || v == "lO", "singular variant must be l2 or lO");
    s.variant = v == "l2" ? SingularVariant::l2 : SingularVariant::lO;
    s.sigma = detail::finite_number(j.at("sigma"), "sigma");
    detail::require_parse(j.at("vectors").is_array(), "vectors must be an array");
    for (const auto& x : j.at("vectors")) s.xs.push_back(detail::number_list(x, "singular vector"));
    s.residual = j.at("residual").get<double>();
    s.converged = j.value("converged", true);
    return s;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    detail::require_parse(static_cast<bool>(in), "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline DenseTensor read_tensor(const std::string& path)
{
    try {
        return tensor_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    detail::require_parse(static_cast<bool>(out), "cannot write " + path);
    out << j.dump() << '\n';
}

inline void write_tensor(const std::string& path, const DenseTensor& t) { write_json_file(path, to_json(t)); }

} // namespace tensorspec::io
