#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expr.hpp"
#include "verify.hpp"

namespace drinfeld::cli {

/// Invalid command line or configuration: exit code 4.
class usage_error : public error {
public:
    using error::error;
};

struct RunConfig {
    std::string command;
    std::int64_t q = 3;
    int m = 1;
    int e = 1;
    /// Working precision in u-units; defaults to 20e + 40.
    std::optional<std::int64_t> N;
    std::string lattice;
    std::string module;
    int D = 10;
    int K = 12;
    int B = 10;
    double floor = -20;
    bool json = false;
    unsigned threads = 1;
    std::string chi = "1";
    std::string c = "theta^-1";
    int j = 1;
    int degB = 6;
    bool stable = false;
    /// "i,j": add 1 to the t^j coefficient of zeta_i (1-based i).
    std::string corrupt;

    GroundConfig ground(int e_override = 0, std::optional<std::int64_t> N_override = std::nullopt) const
    {
        GroundConfig g;
        std::int64_t x = q;
        int p = 0;
        for (std::int64_t d = 2; d * d <= x; ++d) {
            if (x % d == 0) {
                p = static_cast<int>(d);
                break;
            }
        }
        if (q >= 2 && p == 0) {
            p = static_cast<int>(q);
        }
        int s = 0;
        while (p >= 2 && x % p == 0) {
            x /= p;
            ++s;
        }
        if (q < 2 || x != 1) {
            throw usage_error("--q " + std::to_string(q) + " is not a prime power");
        }
        g.p = p;
        g.s = s;
        g.m = m;
        g.e = e_override > 0 ? e_override : e;
        g.N = N_override ? *N_override : (N ? *N : 20 * g.e + 40);
        if (std::pow(static_cast<double>(q), m) > 65536.0) {
            throw usage_error("residue field F_{q^m} too large (at most 2^16 elements)");
        }
        return g;
    }
};

struct Parsed {
    std::optional<RunConfig> config;
    /// Set when --help was requested.
    std::string help;
};

namespace detail {

struct Command {
    const char *name;
    const char *help;
};

inline const std::vector<Command> &commands()
{
    static const std::vector<Command> c{
        {"exp", "List e_0..e_K of exp = sum e_k tau^k, from a lattice (Moore recursion with certified "
                "stabilization) or from a module (phi_theta exp = exp theta)."},
        {"module-from-lattice", "Recover phi_theta = theta + a_1 tau + ... + a_r tau^r from exp_Lambda and compare "
                                "e_1..e_6 of both exponentials; spurious b_k must fall below q^(-N/(2e))."},
        {"agf", "Anderson generating functions omega_i = sum_j exp(pi_i / theta^(j+1)) t^j: the special "
                "equation phi_theta(omega) = t omega and a nonzero determinant of (omega_i^(j-1))."},
        {"zeta", "Dual special functions zeta_i from -sum lambda^-1 (x) lambda in pi_i^*-coordinates: the dual "
                 "equation sum_k a_k^(q^(r-k)) zeta^(r-k) = t zeta^(r)."},
        {"pairing", "The pairing identity (theta - t) sum_i omega_i zeta_i = 1, and for rank >= 2 the vanishing "
                    "of sum_i omega_i^(1) zeta_i."},
        {"twist-vanishing", "sum_i omega_i^(j) zeta_i = 0 for j = 1; for j >= 2 the coefficients of t^k, k >= j-1, "
                            "vanish."},
        {"identity1", "beta + sum_lambda chi(lambda)/lambda = 0 for beta in ker(exp^*) attached to chi by "
                      "duality; bounded at span depth B."},
        {"identity2", "c + sum_lambda exp(c lambda)/lambda = 0 for ||c|| < 1; residual at most ||c||^(q^B)."},
        {"identity3", "sum_lambda exp(c lambda)^(q^j)/lambda = 0 for rank >= 2 and ||c|| <= q^-j."},
        {"pellarin", "Rank one: omega * (-sum_{deg h <= degB} h(t)/(rho h(theta))) = 1/(theta - t), an "
                     "independent oracle for zeta, plus agreement of the two zeta computations."},
        {"invertibility", "Rank one: omega is a unit of the Tate algebra with strictly decreasing coefficient "
                          "norms, and omega * omega^-1 = 1."},
        {"suite", "Every applicable check on the given lattice, or on the three standard lattices A, "
                  "A + A u^-1 and A + A u^-1 + A u^-2."},
    };
    return c;
}

inline void add_options(CLI::App &sub, RunConfig &c)
{
    sub.add_option("--q", c.q, "Size of the constant field F_q (a prime power)");
    sub.add_option("--m", c.m, "Degree of the residue field over F_q");
    sub.add_option("--e", c.e, "Ramification: u^e = 1/theta");
    sub.add_option("--N", c.N, "Working precision in u-units (default 20e+40)");
    sub.add_option("--lattice", c.lattice, "Lattice basis, e.g. \"1; u^-1\"");
    sub.add_option("--module", c.module, "Module coefficients a_1..a_r, e.g. \"1, theta^-1\", or carlitz");
    sub.add_option("--D", c.D, "t-degree truncation")->check(CLI::Range(1, 200));
    sub.add_option("--K", c.K, "tau-degree of the exponential")->check(CLI::Range(1, 200));
    sub.add_option("--B", c.B, "Span depth: lattice sums run over the span of v_1..v_B")->check(CLI::Range(1, 20));
    sub.add_option("--floor", c.floor, "Required log_q bound for a pass");
    sub.add_flag("--json", c.json, "One JSON report per line");
    sub.add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1, 256));
    sub.add_option("--config", "key = value file; command-line flags take precedence");
    sub.add_option("--chi", c.chi, "Functional values on v_1, v_2, ... (identity1)");
    sub.add_option("--c", c.c, "The scalar c (identity2, identity3)");
    sub.add_option("--j", c.j, "Twist index")->check(CLI::Range(1, 16));
    sub.add_option("--degB", c.degB, "Degree bound for the polynomial sum (pellarin)")->check(CLI::Range(0, 12));
    sub.add_flag("--stable", c.stable, "Report ms = 0 so that output is reproducible byte for byte");
    sub.add_option("--corrupt-zeta", c.corrupt, "Sensitivity fixture: \"i,j\" adds 1 to the t^j coefficient of zeta_i");
}

/// Lines "key = value" become "--key value"; '#' starts a comment.
inline std::vector<std::string> read_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw usage_error("cannot read config file " + path);
    }
    std::vector<std::string> out;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (const auto h = line.find('#'); h != std::string::npos) {
            line = line.substr(0, h);
        }
        line = drinfeld::detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw usage_error(path + ":" + std::to_string(ln) + ": expected key = value");
        }
        const std::string key = drinfeld::detail::trim(line.substr(0, eq));
        const std::string val = drinfeld::detail::trim(line.substr(eq + 1));
        if (key.empty() || key == "config") {
            throw usage_error(path + ":" + std::to_string(ln) + ": invalid key");
        }
        if (val == "true" && (key == "json" || key == "stable")) {
            out.push_back("--" + key);
        } else if (val != "false") {
            out.push_back("--" + key);
            out.push_back(val);
        }
    }
    return out;
}

} // namespace detail

inline Parsed parse_args(const std::vector<std::string> &argv_in)
{
    std::vector<std::string> args(argv_in.begin() + (argv_in.empty() ? 0 : 1), argv_in.end());
    // Config-file lines go right after the subcommand so that later flags override them.
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t span = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            span = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            span = 1;
        } else {
            continue;
        }
        const auto injected = detail::read_config(path);
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
        std::size_t at = 0;
        for (std::size_t k = 0; k < args.size(); ++k) {
            if (!args[k].empty() && args[k][0] != '-') {
                at = k + 1;
                break;
            }
        }
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
        break;
    }

    RunConfig cfg;
    CLI::App app{"Certified checks for Drinfeld-module special functions over F_q[theta]", "verify"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::vector<CLI::App *> subs;
    for (const auto &c : detail::commands()) {
        auto *sub = app.add_subcommand(c.name, c.help);
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        detail::add_options(*sub, cfg);
        subs.push_back(sub);
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError &ex) {
        if (ex.get_exit_code() == 0) {
            for (auto *s : subs) {
                if (s->parsed()) {
                    return {std::nullopt, s->help()};
                }
            }
            return {std::nullopt, app.help()};
        }
        throw usage_error(ex.what());
    }
    for (auto *s : subs) {
        if (s->parsed()) {
            cfg.command = s->get_name();
        }
    }
    cfg.ground(); // validates q
    const bool has_l = !cfg.lattice.empty();
    const bool has_m = !cfg.module.empty();
    if (has_l && has_m) {
        throw usage_error("give exactly one of --lattice and --module");
    }
    if (cfg.command == "exp") {
        if (!has_l && !has_m) {
            throw usage_error("exp needs --lattice or --module");
        }
    } else if (has_m) {
        throw usage_error(cfg.command + " needs a lattice; --module is accepted by exp only");
    } else if (!has_l && cfg.command != "suite") {
        throw usage_error(cfg.command + " needs --lattice");
    }
    return {cfg, {}};
}

namespace detail {

inline std::string fmt_logq(const std::optional<double> &x)
{
    if (!x) {
        return "zero";
    }
    std::ostringstream s;
    s.precision(6);
    s << *x;
    return s.str();
}

inline void emit(const std::vector<Report> &reps, const RunConfig &cfg, std::ostream &out)
{
    for (const auto &r : reps) {
        if (cfg.json) {
            out << r.to_json().dump() << '\n';
            continue;
        }
        const char *status = r.pass() ? "PASS" : (r.failed() ? "FAIL" : "INCONCLUSIVE");
        std::string lat = r.params.contains("lattice") ? r.params["lattice"].get<std::string>() : "";
        char line[256];
        std::snprintf(line, sizeof line, "%-20s %-22s residual %-10s bound %-10s %-12s %8.1f ms", r.check.c_str(),
                      lat.c_str(), fmt_logq(r.residual).c_str(), fmt_logq(r.bound).c_str(), status, r.ms);
        out << line << '\n';
        if (!r.data.is_null()) {
            out << "  " << r.data.dump() << '\n';
        }
    }
}

inline Pipeline make_pipeline(const RunConfig &cfg, const std::string &lattice, int e, std::optional<std::int64_t> N)
{
    const auto ctx = Context::make(cfg.ground(e, N));
    Pipeline::Options o;
    o.D = cfg.D;
    o.K = cfg.K;
    o.B = cfg.B;
    o.threads = cfg.threads;
    o.label = lattice;
    Pipeline P(parse_lattice(ctx, lattice), o);
    if (!cfg.corrupt.empty()) {
        const auto parts = drinfeld::detail::split(cfg.corrupt, ',');
        if (parts.size() != 2) {
            throw usage_error("--corrupt-zeta expects \"i,j\"");
        }
        try {
            const int i = std::stoi(parts[0]);
            const int j = std::stoi(parts[1]);
            if (i < 1 || i > P.rank()) {
                throw usage_error("--corrupt-zeta: basis index out of range");
            }
            P.corrupt_zeta(i - 1, j);
        } catch (const std::logic_error &) {
            throw usage_error("--corrupt-zeta expects integers");
        }
    }
    return P;
}

inline nlohmann::json series_json(const std::vector<CInf> &xs)
{
    auto a = nlohmann::json::array();
    for (const auto &x : xs) {
        a.push_back(x.to_json());
    }
    return a;
}

inline Report exp_listing(const RunConfig &cfg)
{
    drinfeld::detail::Stopwatch sw;
    const auto ctx = Context::make(cfg.ground());
    std::vector<CInf> e;
    nlohmann::json params;
    if (!cfg.module.empty()) {
        const auto phi = parse_module(ctx, cfg.module);
        e = exp_from_module(phi, cfg.K).coeffs();
        params["module"] = cfg.module;
    } else {
        e = exp_from_lattice(parse_lattice(ctx, cfg.lattice), cfg.K, ctx->cap()).e;
        params["lattice"] = cfg.lattice;
    }
    const auto &g = ctx->config();
    params["q"] = g.q();
    params["m"] = g.m;
    params["e"] = g.e;
    params["N"] = g.N;
    params["K"] = cfg.K;
    params["floor"] = cfg.floor;
    // The listing is certified when every coefficient carries at least -floor digits of
    // relative precision; the bound is the worst relative uncertainty.
    std::int64_t worst = std::numeric_limits<std::int64_t>::min();
    for (const auto &x : e) {
        if (!x.is_exact()) {
            worst = std::max(worst, x.val() - x.abs_prec());
        }
    }
    Report r;
    r.check = "exp";
    r.params = params;
    r.floor = cfg.floor;
    r.bound = worst == std::numeric_limits<std::int64_t>::min() ? cfg.floor
                                                                 : static_cast<double>(worst) / ctx->e();
    r.data = series_json(e);
    r.ms = sw.ms();
    return r;
}

inline std::vector<Report> lattice_checks(Pipeline &P, const RunConfig &cfg)
{
    std::vector<Report> out;
    const auto &ctx = P.context();
    const double f = cfg.floor;
    const int r = P.rank();
    out.push_back(check_main_identity(P, f));
    for (int j = 1; j < r; ++j) {
        out.push_back(check_twist_vanishing(P, j, f));
    }
    out.push_back(check_determinant(P, f));
    if (r <= 2) {
        out.push_back(check_identity1(P, {ctx->field().one()}, f));
        out.push_back(check_identity2(P, CInf::theta_pow(ctx, -1), f));
        for (auto &x : check_exp_pipelines(P, f)) {
            out.push_back(std::move(x));
        }
        out.push_back(check_special_equation(P, f));
        out.push_back(check_dual_equation(P, f));
    }
    if (r == 1) {
        for (auto &x : check_pellarin(P, cfg.degB, f)) {
            out.push_back(std::move(x));
        }
        out.push_back(check_invertibility(P, f));
    }
    if (r == 2) {
        out.push_back(check_identity3(P, CInf::theta_pow(ctx, -1), 1, f));
        out.push_back(check_identity3(P, CInf::theta_pow(ctx, -2), 2, f));
    }
    return out;
}

inline std::vector<Report> dispatch(const RunConfig &cfg)
{
    const std::string &cmd = cfg.command;
    if (cmd == "exp") {
        return {exp_listing(cfg)};
    }
    if (cmd == "suite") {
        struct Std {
            const char *lattice;
            int e;
            std::int64_t N;
        };
        std::vector<Std> runs;
        if (!cfg.lattice.empty()) {
            runs.push_back({cfg.lattice.c_str(), cfg.e, cfg.N.value_or(20 * cfg.e + 40)});
        } else {
            runs = {{"1", 1, 60}, {"1; u^-1", 2, 80}, {"1; u^-1; u^-2", 3, 90}};
            if (cfg.N) {
                for (auto &r : runs) {
                    r.N = *cfg.N;
                }
            }
        }
        std::vector<Report> out;
        for (const auto &s : runs) {
            auto P = make_pipeline(cfg, s.lattice, s.e, s.N);
            for (auto &x : lattice_checks(P, cfg)) {
                out.push_back(std::move(x));
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const Report &a, const Report &b) {
            if (a.check != b.check) {
                return a.check < b.check;
            }
            return a.params.dump() < b.params.dump();
        });
        return out;
    }
    auto P = make_pipeline(cfg, cfg.lattice, 0, std::nullopt);
    const auto &ctx = P.context();
    const double f = cfg.floor;
    if (cmd == "module-from-lattice") {
        return check_exp_pipelines(P, f);
    }
    if (cmd == "agf") {
        auto rep = check_special_equation(P, f);
        auto data = nlohmann::json::array();
        for (const auto &w : P.omega()) {
            data.push_back(w.to_json());
        }
        rep.data = data;
        return {rep, check_determinant(P, f)};
    }
    if (cmd == "zeta") {
        auto rep = check_dual_equation(P, f);
        auto data = nlohmann::json::array();
        for (const auto &z : P.zeta()) {
            auto zj = z.zeta.to_json();
            zj["tail_val"] = z.tail;
            data.push_back(zj);
        }
        rep.data = data;
        return {rep};
    }
    if (cmd == "pairing") {
        std::vector<Report> out{check_main_identity(P, f)};
        if (P.rank() >= 2) {
            out.push_back(check_twist_vanishing(P, 1, f));
        }
        return out;
    }
    if (cmd == "twist-vanishing") {
        return {check_twist_vanishing(P, cfg.j, f)};
    }
    if (cmd == "identity1") {
        return {check_identity1(P, parse_fq_vector(ctx, cfg.chi), f)};
    }
    if (cmd == "identity2") {
        return {check_identity2(P, parse_expr(ctx, cfg.c), f)};
    }
    if (cmd == "identity3") {
        return {check_identity3(P, parse_expr(ctx, cfg.c), cfg.j, f)};
    }
    if (cmd == "pellarin") {
        return check_pellarin(P, cfg.degB, f);
    }
    if (cmd == "invertibility") {
        return {check_invertibility(P, f)};
    }
    throw usage_error("unknown command " + cmd);
}

} // namespace detail

/// Runs a parsed configuration. Exit codes: 0 pass, 1 failure, 2 inconclusive,
/// 3 precision or budget exhaustion, 4 invalid input.
inline int run(const RunConfig &cfg, std::ostream &out, std::ostream &err)
{
    try {
        auto reps = detail::dispatch(cfg);
        if (cfg.stable) {
            for (auto &r : reps) {
                r.ms = 0;
            }
        }
        detail::emit(reps, cfg, out);
        return exit_code(reps);
    } catch (const precision_error &ex) {
        err << "verify: resource exhausted: " << ex.what() << '\n';
        return 3;
    } catch (const std::bad_alloc &) {
        err << "verify: out of memory\n";
        return 3;
    } catch (const error &ex) {
        err << "verify: " << ex.what() << '\n';
        return 4;
    }
}

inline int main(int argc, char **argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    try {
        const auto parsed = parse_args(std::vector<std::string>(argv, argv + argc));
        if (!parsed.config) {
            out << parsed.help;
            return 0;
        }
        return run(*parsed.config, out, err);
    } catch (const precision_error &ex) {
        err << "verify: resource exhausted: " << ex.what() << '\n';
        return 3;
    } catch (const error &ex) {
        err << "verify: " << ex.what() << '\n';
        return 4;
    }
}

} // namespace drinfeld::cli
