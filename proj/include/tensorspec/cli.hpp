#pragma once

// Command-line front end. `run` takes argv-style arguments and two streams so
// it can be driven in-process by tests; tools/tensorspec.cpp is a thin main.
//
// Exit codes: 0 success, 2 parse error, 3 solver non-convergence (results are
// still emitted, flagged), 4 invalid flags.

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tensorspec/tensorspec.hpp"

namespace tensorspec::cli {

enum ExitCode : int { ok = 0, parse_error = 2, not_converged = 3, invalid_flags = 4 };

inline constexpr int significant_digits = 12;

inline double round_sig(double v)
{
    if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? 0.0 : v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(significant_digits) << round_sig(v);
    return os.str();
}

/// Round every floating-point number in a JSON document to 12 significant digits.
inline void round_numbers(io::json& j)
{
    if (j.is_number_float())
        j = round_sig(j.get<double>());
    else if (j.is_array() || j.is_object())
        for (auto& e : j) round_numbers(e);
}

struct Options {
    std::string variant = "z";
    std::size_t mode = 1;
    std::string p = "2";
    std::size_t rank = 0;
    std::vector<std::size_t> ranks;
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::uint64_t seed = 0;
    std::optional<std::size_t> starts;
    std::optional<std::size_t> threads;
    std::string output;
    std::string format = "json";
    std::vector<std::string> inputs;
};

class FlagError : public Error {
public:
    using Error::Error;
};

inline std::size_t resolve_threads(const Options& o)
{
    if (o.threads) return std::max<std::size_t>(1, *o.threads);
    if (const char* env = std::getenv("TENSORSPEC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    return 1;
}

namespace detail {

inline std::string vec_text(const Vector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

template <class T>
std::string list_text(const std::vector<T>& v)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ']';
    return os.str();
}

inline std::string tensor_table(const DenseTensor& t)
{
    std::ostringstream os;
    os << "shape " << t.shape().to_string() << '\n';
    MultiIndex m(t.order(), 1);
    do {
        os << list_text(m) << "  " << fmt(t.at(m)) << '\n';
    } while (next_colex(t.shape(), m));
    return os.str();
}

inline std::string cp_table(const CpDecomposition& cp)
{
    std::ostringstream os;
    for (std::size_t r = 1; r <= cp.rank(); ++r) {
        os << "term " << r << "  weight " << fmt(cp.weights[r - 1]) << '\n';
        for (std::size_t o = 0; o < cp.order(); ++o)
            os << "  mode " << o + 1 << "  " << vec_text(tensorspec::detail::column(cp.factors[o], r)) << '\n';
    }
    return os.str();
}

struct Emitted {
    io::json doc;
    std::string table;
    bool converged = true;
};

inline void require_flag(bool cond, const std::string& what)
{
    if (!cond) throw FlagError(what);
}

inline void check_mode(const DenseTensor& t, std::size_t mode)
{
    require_flag(mode >= 1 && mode <= t.order(),
                 "--mode " + std::to_string(mode) + " is out of range for an order-" + std::to_string(t.order()) +
                     " tensor");
}

inline Emitted cmd_info(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    const bool symmetric = t.shape().is_cubical() && is_symmetric(t, 0.0);
    const auto ml = multilinear_rank(t, o.tol.value_or(1e-8));
    Emitted e;
    e.doc = {{"shape", t.shape().dims()},
             {"order", t.order()},
             {"symmetric", symmetric},
             {"frobenius_norm", frobenius_norm(t)},
             {"multilinear_rank", ml}};
    std::ostringstream os;
    os << "shape             " << list_text(t.shape().dims()) << '\n'
       << "order             " << t.order() << '\n'
       << "symmetric         " << (symmetric ? "true" : "false") << '\n'
       << "frobenius norm    " << fmt(frobenius_norm(t)) << '\n'
       << "multilinear rank  " << list_text(ml) << '\n';
    e.table = os.str();
    return e;
}

inline Emitted cmd_contract(const Options& o)
{
    require_flag(o.inputs.size() == 2, "contract needs two input files");
    const auto a = io::read_tensor(o.inputs[0]);
    const auto b = io::read_tensor(o.inputs[1]);
    check_mode(a, o.mode);
    require_flag(a.dim(o.mode) == b.dim(1), "contracted modes have different sizes");
    const auto c = contract(a, o.mode, b, 1);
    return {io::to_json(c), tensor_table(c), true};
}

inline EigenOptions eigen_options(const Options& o)
{
    EigenOptions eo;
    if (o.tol) eo.tol = *o.tol;
    if (o.max_iters) eo.max_iters = *o.max_iters;
    if (o.starts) eo.starts = *o.starts;
    eo.seed = o.seed;
    eo.threads = resolve_threads(o);
    require_flag(eo.tol > 0, "--tol must be positive");
    return eo;
}

inline Emitted cmd_eig(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    require_flag(t.shape().is_cubical(), "eigenpairs need a cubical tensor");
    check_mode(t, o.mode);
    const auto variant = o.variant == "z" ? EigenVariant::z : EigenVariant::h;
    const auto pairs = find_eigenpairs(t, o.mode, variant, eigen_options(o));
    Emitted e;
    e.doc = io::json::array();
    std::ostringstream os;
    os << "variant " << o.variant << "  mode " << o.mode << '\n';
    for (const auto& p : pairs) {
        e.doc.push_back(io::to_json(p));
        e.converged = e.converged && p.converged;
        os << "lambda " << std::setw(20) << std::left << fmt(p.lambda) << " x " << vec_text(p.x) << "  residual "
           << fmt(p.residual) << (p.converged ? "" : "  NOT CONVERGED") << '\n';
    }
    e.table = os.str();
    return e;
}

inline Emitted cmd_svd(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    SingularVariant variant;
    if (o.p == "2")
        variant = SingularVariant::l2;
    else if (o.p == "O" || o.p == "o" || o.p == std::to_string(t.order()))
        variant = SingularVariant::lO;
    else
        throw FlagError("--p must be 2 or O");
    SingularOptions so;
    const auto eo = eigen_options(o);
    so.tol = eo.tol;
    so.max_iters = eo.max_iters;
    so.starts = eo.starts;
    so.seed = eo.seed;
    so.threads = eo.threads;
    const auto tuples = find_singular_tuples(t, variant, so);
    Emitted e;
    e.doc = io::json::array();
    std::ostringstream os;
    os << "variant " << to_string(variant) << '\n';
    for (const auto& s : tuples) {
        e.doc.push_back(io::to_json(s));
        e.converged = e.converged && s.converged;
        os << "sigma " << fmt(s.sigma) << "  residual " << fmt(s.residual) << (s.converged ? "" : "  NOT CONVERGED")
           << '\n';
        for (std::size_t k = 0; k < s.xs.size(); ++k) os << "  x" << k + 1 << ' ' << vec_text(s.xs[k]) << '\n';
    }
    e.table = os.str();
    return e;
}

inline Emitted cmd_cp(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    require_flag(o.rank >= 1, "cp needs --rank N with N >= 1");
    AlsOptions ao;
    if (o.tol) ao.tol = *o.tol;
    if (o.max_iters) ao.max_iters = *o.max_iters;
    if (o.starts) ao.starts = *o.starts;
    ao.seed = o.seed;
    ao.threads = resolve_threads(o);
    require_flag(ao.starts >= 1, "--starts must be at least 1");
    const auto r = cp_als(t, o.rank, ao);
    Emitted e;
    e.doc = io::to_json(r.cp);
    e.doc["relative_error"] = r.relative_error;
    e.doc["sweeps"] = r.sweeps;
    e.table = cp_table(r.cp) + "relative error " + fmt(r.relative_error) + '\n';
    return e;
}

inline Emitted cmd_tucker(const Options& o)
{
    const auto doc = io::read_json_file(o.inputs.at(0));
    DenseTensor t;
    try {
        t = doc.contains("core") ? tucker_eval(io::tucker_from_json(doc)) : cp_eval(io::cp_from_json(doc));
    } catch (const io::json::exception& ex) {
        throw ParseError(ex.what());
    }
    return {io::to_json(t), tensor_table(t), true};
}

inline Emitted cmd_hosvd(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    std::vector<std::size_t> ranks = o.ranks;
    if (ranks.empty()) ranks = t.shape().dims();
    require_flag(ranks.size() == t.order(), "--ranks needs one entry per mode");
    for (std::size_t k = 0; k < ranks.size(); ++k)
        require_flag(ranks[k] >= 1 && ranks[k] <= t.dim(k + 1), "--ranks entries must lie in [1, M_o]");
    const auto tk = hosvd(t, ranks);
    const double err = frobenius_norm(t) > 0
                           ? frobenius_norm(t - tucker_eval(tk)) / frobenius_norm(t)
                           : frobenius_norm(tucker_eval(tk));
    Emitted e;
    e.doc = io::to_json(tk);
    e.doc["relative_error"] = err;
    std::ostringstream os;
    os << "core\n" << tensor_table(tk.core);
    for (std::size_t k = 0; k < tk.factors.size(); ++k)
        os << "factor " << k + 1 << '\n' << tensor_table(tk.factors[k]);
    os << "relative error " << fmt(err) << '\n';
    e.table = os.str();
    return e;
}

inline Emitted cmd_odeco(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    OdecoOptions oo;
    oo.symmetric = t.shape().is_cubical() && is_symmetric(t, 1e-12 * (1 + max_abs(t)));
    if (o.tol) oo.tol = *o.tol;
    if (o.max_iters) oo.max_iters = *o.max_iters;
    if (o.starts) oo.starts = *o.starts;
    oo.seed = o.seed;
    oo.rank = o.rank;
    require_flag(oo.starts >= 1, "--starts must be at least 1");
    const auto r = odeco_decompose(t, oo);
    Emitted e;
    e.doc = io::to_json(r.cp);
    e.doc["status"] = to_string(r.status);
    e.doc["residual"] = r.residual;
    e.doc["orthogonality_defect"] = r.orthogonality_defect;
    e.converged = r.status == OdecoStatus::ok;
    e.table = cp_table(r.cp) + "status " + to_string(r.status) + "  residual " + fmt(r.residual) + '\n';
    return e;
}

inline Emitted cmd_mlrank(const Options& o)
{
    const auto t = io::read_tensor(o.inputs.at(0));
    const auto ml = multilinear_rank(t, o.tol.value_or(1e-8));
    return {io::json(ml), list_text(ml) + '\n', true};
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dense tensor algebra, decompositions and spectra", "tensorspec"};
    app.require_subcommand(1, 1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"info", "shape, order, symmetry, Frobenius norm and multilinear rank"},
        {"contract", "contract mode --mode of the first tensor with mode 1 of the second"},
        {"eig", "mode-o Z- or H-eigenpairs"},
        {"svd", "l2 or lO singular value tuples"},
        {"cp", "CP decomposition by alternating least squares"},
        {"tucker", "evaluate a Tucker or CP JSON file to a dense tensor"},
        {"hosvd", "higher-order SVD, optionally truncated with --ranks"},
        {"odeco", "orthogonal decomposition by power iteration and deflation"},
        {"mlrank", "multilinear rank"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("inputs", o.inputs, "input file(s)")->required()->expected(1, name == "contract" ? 2 : 1);
        sub->add_option("--variant", o.variant, "eigen variant")->check(CLI::IsMember({"z", "h"}));
        sub->add_option("--mode", o.mode, "mode (1-based)")->check(CLI::PositiveNumber);
        sub->add_option("--p", o.p, "singular value norm: 2 or O");
        sub->add_option("--rank", o.rank, "decomposition rank")->check(CLI::NonNegativeNumber);
        sub->add_option("--ranks", o.ranks, "per-mode ranks a,b,c")->delimiter(',')->allow_extra_args(false);
        sub->add_option("--tol", o.tol, "tolerance");
        sub->add_option("--max-iters", o.max_iters, "iteration cap");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--starts", o.starts, "multi-start count");
        sub->add_option("--threads", o.threads, "worker threads (default TENSORSPEC_THREADS or 1)");
        sub->add_option("--output", o.output, "write the result here instead of stdout");
        sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
        subs.push_back(sub);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_flags;
    }

    std::string name;
    for (auto* sub : subs)
        if (sub->parsed()) name = sub->get_name();

    detail::Emitted result;
    try {
        if (name == "info") result = detail::cmd_info(o);
        else if (name == "contract") result = detail::cmd_contract(o);
        else if (name == "eig") result = detail::cmd_eig(o);
        else if (name == "svd") result = detail::cmd_svd(o);
        else if (name == "cp") result = detail::cmd_cp(o);
        else if (name == "tucker") result = detail::cmd_tucker(o);
        else if (name == "hosvd") result = detail::cmd_hosvd(o);
        else if (name == "odeco") result = detail::cmd_odeco(o);
        else result = detail::cmd_mlrank(o);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return parse_error;
    } catch (const FlagError& e) {
        err << "invalid flags: " << e.what() << '\n';
        return invalid_flags;
    } catch (const Error& e) {
        err << "invalid flags: " << e.what() << '\n';
        return invalid_flags;
    }

    std::string text;
    if (o.format == "table") {
        text = result.table;
    } else {
        round_numbers(result.doc);
        text = result.doc.dump(2) + '\n';
    }
    if (o.output.empty()) {
        out << text;
    } else {
        std::ofstream f(o.output);
        if (!f) {
            err << "cannot write " << o.output << '\n';
            return invalid_flags;
        }
        f << text;
    }
    if (!result.converged) {
        err << "warning: solver did not converge; results are flagged\n";
        return not_converged;
    }
    return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

} // namespace tensorspec::cli
