#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "module.hpp"
#include "specialfn.hpp"

namespace drinfeld {

/// Outcome of one check. Residual and bound are log_q-norms; the residual is absent when
/// the computed quantity is zero within its precision.
///
/// fail:         residual > bound
/// inconclusive: not failed, but bound > floor (the certificate is too weak)
/// pass:         neither
struct Report {
    std::string check;
    nlohmann::json params = nlohmann::json::object();
    std::optional<double> residual;
    double bound = 0;
    double floor = -20;
    double ms = 0;
    /// Extra payload (listings); omitted from the JSON when null.
    nlohmann::json data;

    bool failed() const { return residual && *residual > bound; }
    bool inconclusive() const { return !failed() && bound > floor; }
    bool pass() const { return !failed() && bound <= floor; }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["check"] = check;
        j["params"] = params;
        if (residual) {
            j["residual_logq"] = *residual;
        } else {
            j["residual_logq"] = nullptr;
        }
        j["bound_logq"] = bound;
        j["pass"] = pass();
        j["inconclusive"] = inconclusive();
        j["ms"] = ms;
        if (!data.is_null()) {
            j["data"] = data;
        }
        return j;
    }
};

namespace detail {

/// Largest certified-nonzero lognorm and smallest absolute precision over a set of values.
struct Residual {
    std::optional<std::int64_t> observed;
    std::int64_t minprec = CInf::exact;

    void add(const CInf &x)
    {
        minprec = std::min(minprec, x.abs_prec());
        if (!x.is_zero()) {
            observed = std::max(observed.value_or(x.lognorm()), x.lognorm());
        }
    }
    void add(const TateSeries &f, int lo, int hi)
    {
        for (int j = std::max(lo, 0); j <= std::min(hi, f.D()); ++j) {
            add(f[j]);
        }
    }
};

/// Bound in u-units: the analytic tail estimate (if any) or the precision of the computation,
/// whichever is weaker.
inline Report finish(std::string name, nlohmann::json params, const Residual &r, std::optional<i128> proof, int e,
                     double floor)
{
    Report rep;
    rep.check = std::move(name);
    rep.params = std::move(params);
    rep.params["floor"] = floor;
    rep.floor = floor;
    if (r.observed) {
        rep.residual = static_cast<double>(*r.observed) / e;
    }
    detail::i128 b = -static_cast<i128>(r.minprec);
    if (proof) {
        b = std::max(b, *proof);
    }
    rep.bound = static_cast<double>(detail::clamp128(b)) / e;
    return rep;
}

/// A report that fails outright: residual 0 against the floor.
inline Report failed_report(std::string name, nlohmann::json params, double floor, const std::string &why)
{
    Report rep;
    rep.check = std::move(name);
    rep.params = std::move(params);
    rep.params["floor"] = floor;
    rep.params["reason"] = why;
    rep.floor = floor;
    rep.residual = 0.0;
    rep.bound = floor;
    return rep;
}

class Stopwatch {
public:
    double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

} // namespace detail

/// P_j = sum_i omega_i^{(j)} zeta_i.
inline TateSeries ev_pair(const std::vector<ZetaSeries> &zeta, const std::vector<TateSeries> &omega, int j)
{
    if (zeta.size() != omega.size() || zeta.empty()) {
        throw domain_error("ev_pair: zeta and omega vectors must have the same positive length");
    }
    TateSeries P = tate_mul(omega[0].twist(j), zeta[0].zeta);
    for (std::size_t i = 1; i < zeta.size(); ++i) {
        P = P + tate_mul(omega[i].twist(j), zeta[i].zeta);
    }
    return P;
}

/// Lattice, exponential, AGFs and zeta functions for one run, built on demand.
class Pipeline {
public:
    struct Options {
        int D = 10;
        int K = 12;
        /// Span depth for lattice sums: all F_q-combinations of v_1..v_B.
        int B = 10;
        unsigned threads = 1;
        std::string label;
    };

    Pipeline(const Lattice &L, Options o) : L_(L), o_(std::move(o)), ob_(L.ordered_basis()) {}

    const ContextPtr &context() const { return L_.context(); }
    const Lattice &lattice() const { return L_; }
    const Options &options() const { return o_; }
    OrderedBasisPtr ordered_basis() const { return ob_; }
    int rank() const { return L_.rank(); }

    const ExpCoefficients &exp()
    {
        if (!exp_) {
            exp_ = e_coeffs(*ob_, o_.K, context()->cap());
        }
        return *exp_;
    }
    const std::vector<TateSeries> &omega()
    {
        if (!omega_) {
            omega_ = agf_all(L_, exp().series(), o_.D);
        }
        return *omega_;
    }
    const std::vector<ZetaSeries> &zeta()
    {
        if (!zeta_) {
            zeta_ = zeta_all(L_, *ob_, o_.D, o_.B, o_.threads);
        }
        return *zeta_;
    }
    /// Adds 1 to the t^j coefficient of zeta_i: a sensitivity fixture.
    void corrupt_zeta(int i, int j)
    {
        zeta();
        auto &z = zeta_->at(static_cast<std::size_t>(i)).zeta;
        if (j < 0 || j > z.D()) {
            throw domain_error("corrupt_zeta: degree out of range");
        }
        z[j] += CInf::one(context());
    }

    /// Same for omega_i.
    void corrupt_omega(int i, int j)
    {
        omega();
        auto &w = omega_->at(static_cast<std::size_t>(i));
        if (j < 0 || j > w.D()) {
            throw domain_error("corrupt_omega: degree out of range");
        }
        w[j] += CInf::one(context());
    }

    nlohmann::json params() const
    {
        const auto &g = context()->config();
        nlohmann::json p;
        p["q"] = g.q();
        p["m"] = g.m;
        p["e"] = g.e;
        p["N"] = g.N;
        p["lattice"] = o_.label;
        p["rank"] = rank();
        p["D"] = o_.D;
        p["K"] = o_.K;
        p["B"] = o_.B;
        return p;
    }

private:
    Lattice L_;
    Options o_;
    OrderedBasisPtr ob_;
    std::optional<ExpCoefficients> exp_;
    std::optional<std::vector<TateSeries>> omega_;
    std::optional<std::vector<ZetaSeries>> zeta_;
};

/// (theta - t) P_0 - 1 on degrees 0..D-1.
inline Report check_main_identity(Pipeline &P, double floor)
{
    detail::Stopwatch sw;
    const auto P0 = ev_pair(P.zeta(), P.omega(), 0);
    const auto res = P0.times_theta_minus_t() - TateSeries::one(P.context(), P0.D());
    detail::Residual r;
    r.add(res, 0, P0.D() - 1);
    auto rep = detail::finish("main-identity", P.params(), r, std::nullopt, P.context()->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// P_j vanishes for j = 1; for j >= 2 only the coefficients of t^k, k >= j-1, are constrained.
inline Report check_twist_vanishing(Pipeline &P, int j, double floor)
{
    if (j < 1 || P.rank() < j + 1) {
        throw domain_error("twist vanishing needs 1 <= j <= rank - 1");
    }
    detail::Stopwatch sw;
    const auto Pj = ev_pair(P.zeta(), P.omega(), j);
    detail::Residual r;
    const int lo = j == 1 ? 0 : j - 1;
    r.add(Pj, lo, Pj.D());
    auto params = P.params();
    params["j"] = j;
    params["window"] = {lo, Pj.D()};
    auto rep = detail::finish("twist-vanishing", params, r, std::nullopt, P.context()->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// beta + sum_{lambda in Lambda_m} chi(lambda)/lambda with m = B, bounded by
/// ||beta|| prod_{k=N}^{m} (r_k / r_{k+1})^{q^k - q^{k-1}}, N the interleaving index.
inline Report check_identity1(Pipeline &P, const std::vector<FFElem> &chi, double floor)
{
    const auto &ctx = P.context();
    const auto &F = ctx->field();
    const std::size_t m = static_cast<std::size_t>(P.options().B);
    if (chi.empty() || chi.size() > m) {
        throw domain_error("identity1: functional must be given on at most B basis vectors");
    }
    detail::Stopwatch sw;
    auto ob = P.ordered_basis();
    const auto pe = poonen_beta(ob, chi, P.options().K, ctx->cap());
    ob->extend(m + 2);
    const auto L = ob->lognorms(m + 1);
    const auto &fq = F.subfield_elements();
    const unsigned T = std::max(1u, P.options().threads);
    std::vector<CInfSum> part(T, CInfSum(ctx));
    for_each_in_span(ob->values(m), T, [&](unsigned tid, std::uint64_t, const std::vector<std::size_t> &d, const CInf &v) {
        FFElem x{};
        for (std::size_t i = 0; i < chi.size(); ++i) {
            if (d[i] != 0) {
                x = F.add(x, F.mul(chi[i], fq[d[i]]));
            }
        }
        if (!x.is_zero()) {
            part[tid].add_scaled(x, v.inv());
        }
    });
    CInfSum s(ctx);
    for (const auto &p : part) {
        s.merge(p);
    }
    const CInf res = pe.beta + s.value();
    const std::size_t N = pe.kernel.interleave_min;
    detail::i128 proof = pe.beta.lognorm();
    for (std::size_t k = N; k <= m; ++k) {
        proof = detail::add128(proof, detail::mul128(detail::pow128(ctx->q(), static_cast<std::int64_t>(k)) -
                                         detail::pow128(ctx->q(), static_cast<std::int64_t>(k - 1)),
                                     L[k - 1] - L[k]));
    }
    detail::Residual r;
    r.add(res);
    auto params = P.params();
    nlohmann::json cj = nlohmann::json::array();
    for (auto c : chi) {
        cj.push_back(F.subfield_index(c));
    }
    params["chi"] = cj;
    params["pivot"] = pe.kernel.pivot;
    params["interleave"] = N;
    params["beta_logq"] = static_cast<double>(pe.beta.lognorm()) / ctx->e();
    auto rep = detail::finish("identity1", params, r, proof, ctx->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

namespace detail {

/// c must be a nonzero element of K_inf = F_q((1/theta)) with ||c|| < 1.
inline void require_kinf_small(const CInf &c, const std::string &who)
{
    const auto &ctx = c.context();
    if (!c.certified_nonzero()) {
        throw domain_error(who + ": c must be nonzero");
    }
    for (const auto &[k, a] : c.terms()) {
        if (k % ctx->e() != 0 || !ctx->field().in_subfield(a)) {
            throw domain_error(who + ": c must lie in F_q((1/theta))");
        }
    }
    if (c.val() <= 0) {
        throw domain_error(who + ": need ||c|| < 1");
    }
}

/// The part of x with ||.|| < 1.
inline CInf frac_part(const CInf &x)
{
    std::map<std::int64_t, FFElem> t;
    for (const auto &[k, a] : x.terms()) {
        if (k > 0) {
            t[k] = a;
        }
    }
    return CInf::from_terms(x.context(), t, x.abs_prec());
}

/// exp(c v_i) for the first m ordered-basis vectors. With v_i = a theta^k pi_l and
/// exp(A pi_l) = 0, exp(c v_i) = a exp(frac(c theta^k) pi_l); this keeps arguments small.
inline std::vector<CInf> exp_on_basis(Pipeline &P, const CInf &c, std::size_t m)
{
    const auto &ctx = P.context();
    auto ob = P.ordered_basis();
    ob->extend(m);
    const auto ex = P.exp().series();
    std::vector<CInf> E;
    for (std::size_t i = 0; i < m; ++i) {
        const auto &combo = ob->at(i).combo;
        if (combo.size() != 1) {
            throw domain_error("exp_on_basis: ordered basis is not monomial");
        }
        const auto [mo, a] = combo.front();
        const CInf f = frac_part(c * CInf::theta_pow(ctx, mo.k));
        const CInf arg = f * P.lattice().basis().at(static_cast<std::size_t>(mo.l));
        E.push_back(ex.apply(arg).scaled(a));
    }
    return E;
}

/// sum over nonzero lambda in the span of v_1..v_m of (sum_i d_i E_i) / lambda.
inline CInf linear_lattice_sum(Pipeline &P, const std::vector<CInf> &E)
{
    const auto &ctx = P.context();
    const std::size_t m = E.size();
    const auto &fq = ctx->field().subfield_elements();
    std::vector<std::vector<CInf>> mult(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (auto a : fq) {
            mult[i].push_back(E[i].scaled(a));
        }
    }
    const unsigned T = std::max(1u, P.options().threads);
    std::vector<CInfSum> part(T, CInfSum(ctx));
    for_each_in_span(P.ordered_basis()->values(m), T,
                     [&](unsigned tid, std::uint64_t idx, const std::vector<std::size_t> &d, const CInf &v) {
                         if (idx == 0) {
                             return;
                         }
                         CInf num = CInf::zero(ctx);
                         for (std::size_t i = 0; i < m; ++i) {
                             if (d[i] != 0) {
                                 num += mult[i][d[i]];
                             }
                         }
                         part[tid].add(num * v.inv());
                     });
    CInfSum s(ctx);
    for (const auto &p : part) {
        s.merge(p);
    }
    return s.value();
}

} // namespace detail

/// c + sum_{lambda in Lambda_m} exp(c lambda)/lambda, bounded by ||c||^{q^m}.
inline Report check_identity2(Pipeline &P, const CInf &c, double floor)
{
    detail::require_kinf_small(c, "identity2");
    detail::Stopwatch sw;
    const auto &ctx = P.context();
    const std::size_t m = static_cast<std::size_t>(P.options().B);
    const auto E = detail::exp_on_basis(P, c, m);
    const CInf res = c + detail::linear_lattice_sum(P, E);
    detail::Residual r;
    r.add(res);
    const detail::i128 proof = detail::mul128(detail::pow128(ctx->q(), static_cast<std::int64_t>(m)), c.lognorm());
    auto params = P.params();
    params["c"] = c.to_string();
    auto rep = detail::finish("identity2", params, r, proof, ctx->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// sum_{lambda in Lambda_m} exp(c lambda)^{q^j}/lambda for rank >= 2 and ||c|| <= q^{-j}.
///
/// The omitted part is bounded by the largest of
///   q^j L(B_k) + q^{k+j} L(c) + (q^{k+j} - q^m) L(r_m) + sum_{i<=m} (q^i - q^{i-1}) L(r_i)
/// over k >= max(0, m - j), with L = lognorm and B_k the coefficient bound; the terms
/// decrease once L(r_{k+1}) > L(c) + L(r_m).
inline Report check_identity3(Pipeline &P, const CInf &c, int j, double floor)
{
    if (P.rank() < 2) {
        throw domain_error("identity3 needs rank >= 2");
    }
    if (j < 1) {
        throw domain_error("identity3 needs j >= 1");
    }
    detail::require_kinf_small(c, "identity3");
    const auto &ctx = P.context();
    if (c.val() < static_cast<std::int64_t>(j) * ctx->e()) {
        throw domain_error("identity3 needs ||c|| <= q^-j");
    }
    detail::Stopwatch sw;
    const std::int64_t q = ctx->q();
    const std::size_t m = static_cast<std::size_t>(P.options().B);
    auto E = detail::exp_on_basis(P, c, m);
    for (auto &x : E) {
        x = x.frobenius(j);
    }
    const CInf res = detail::linear_lattice_sum(P, E);

    auto ob = P.ordered_basis();
    const std::int64_t Lc = c.lognorm();
    detail::i128 C = 0;
    const auto Lm = ob->lognorms(m);
    for (std::size_t i = 1; i <= m; ++i) {
        C = detail::add128(C, detail::mul128(detail::pow128(q, static_cast<std::int64_t>(i)) - detail::pow128(q, static_cast<std::int64_t>(i - 1)),
                             Lm[i - 1]));
    }
    const std::int64_t Lrm = Lm[m - 1];
    detail::i128 proof = detail::k_neg_inf;
    const std::size_t k0 = m > static_cast<std::size_t>(j) ? m - static_cast<std::size_t>(j) : 0;
    for (std::size_t k = k0;; ++k) {
        ob->extend(k + 2);
        const auto L = ob->lognorms(k + 1);
        const detail::i128 t = detail::add128(
            detail::add128(detail::mul128(detail::pow128(q, j), detail::coeff_bound(L, q, k)),
                   detail::mul128(detail::pow128(q, static_cast<std::int64_t>(k) + j), Lc)),
            detail::add128(detail::mul128(detail::pow128(q, static_cast<std::int64_t>(k) + j) - detail::pow128(q, static_cast<std::int64_t>(m)), Lrm), C));
        proof = std::max(proof, t);
        if (L[k] > Lc + Lrm) {
            break;
        }
        if (k > m + 4096) {
            throw precision_error("identity3: tail bound did not settle");
        }
    }
    detail::Residual r;
    r.add(res);
    auto params = P.params();
    params["c"] = c.to_string();
    params["j"] = j;
    auto rep = detail::finish("identity3", params, r, proof, ctx->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// Rank one, Lambda = A rho: the main identity with zeta from direct enumeration of
/// polynomials, and its coefficientwise agreement with the coordinate path.
inline std::vector<Report> check_pellarin(Pipeline &P, int degB, double floor)
{
    if (P.rank() != 1) {
        throw domain_error("pellarin needs a rank-1 lattice");
    }
    if (degB < 0) {
        throw domain_error("pellarin needs degB >= 0");
    }
    detail::Stopwatch sw;
    const auto &ctx = P.context();
    const int D = P.options().D;
    const auto zp = pellarin_zeta(P.lattice().basis()[0], D, degB, P.options().threads);
    const auto P0 = tate_mul(P.omega()[0], zp.zeta);
    const auto res = P0.times_theta_minus_t() - TateSeries::one(ctx, D);
    detail::Residual r;
    r.add(res, 0, D - 1);
    auto params = P.params();
    params["degB"] = degB;
    std::vector<Report> out;
    out.push_back(detail::finish("pellarin", params, r, std::nullopt, ctx->e(), floor));
    out.back().ms = sw.ms();

    detail::Stopwatch sw2;
    detail::Residual a;
    a.add(zp.zeta - P.zeta()[0].zeta, 0, D);
    out.push_back(detail::finish("pellarin-agreement", params, a, std::nullopt, ctx->e(), floor));
    out.back().ms = sw2.ms();
    return out;
}

/// Rank one: omega is a unit with strictly decreasing coefficient norms, and
/// omega * omega^{-1} - 1 vanishes.
inline Report check_invertibility(Pipeline &P, double floor)
{
    if (P.rank() != 1) {
        throw domain_error("invertibility needs a rank-1 lattice");
    }
    detail::Stopwatch sw;
    const auto &w = P.omega()[0];
    const auto cert = tate_is_unit(w);
    auto params = P.params();
    params["unit"] = cert.is_unit;
    params["strictly_decreasing"] = cert.strictly_decreasing;
    if (!cert.is_unit || !cert.strictly_decreasing) {
        auto rep = detail::failed_report("invertibility", params, floor, cert.note);
        rep.ms = sw.ms();
        return rep;
    }
    const auto prod = tate_mul(w, tate_invert_unit(w)) - TateSeries::one(P.context(), w.D());
    detail::Residual r;
    r.add(prod, 0, w.D());
    auto rep = detail::finish("invertibility", params, r, std::nullopt, P.context()->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// The determinant of the trivialization is certified nonzero: its lowest nonzero
/// coefficient must be known to a relative precision of at least -floor digits.
/// The residual is that relative uncertainty.
inline Report check_determinant(Pipeline &P, double floor)
{
    detail::Stopwatch sw;
    const auto det = tate_det(trivialization(P.omega()));
    const auto cert = det_certificate(det);
    auto params = P.params();
    if (!cert.nonzero) {
        auto rep = detail::failed_report("determinant", params, floor, "determinant indistinguishable from zero");
        rep.ms = sw.ms();
        return rep;
    }
    const int e = P.context()->e();
    params["degree"] = cert.degree;
    params["lognorm_logq"] = static_cast<double>(cert.lognorm) / e;
    Report rep;
    rep.check = "determinant";
    rep.params = params;
    rep.params["floor"] = floor;
    rep.floor = floor;
    if (cert.abs_prec < CInf::exact) {
        rep.residual = static_cast<double>(-cert.lognorm - cert.abs_prec) / e;
    }
    rep.bound = floor;
    rep.ms = sw.ms();
    return rep;
}

/// exp from the lattice against exp from the module recovered from it (e_1..e_6), and the
/// detected rank with spurious b_k below q^{-N/(2e)}.
inline std::vector<Report> check_exp_pipelines(Pipeline &P, double floor)
{
    detail::Stopwatch sw;
    const auto &ctx = P.context();
    const int r = P.rank();
    const int e = ctx->e();
    const int K = std::max(6, r + 3);
    auto params = P.params();
    params["K"] = K;
    std::vector<Report> out;
    std::optional<ModuleFromLattice> mfl;
    try {
        mfl = module_from_lattice(P.lattice(), K, ctx->cap());
    } catch (const precision_error &ex) {
        out.push_back(detail::failed_report("exp-pipelines", params, floor, ex.what()));
        out.push_back(detail::failed_report("rank-detection", params, floor, ex.what()));
        return out;
    }
    const auto em = exp_from_module(mfl->module, 6);
    detail::Residual a;
    for (int k = 1; k <= 6; ++k) {
        a.add(mfl->exp.e[static_cast<std::size_t>(k)] - em.coeff(k));
    }
    out.push_back(detail::finish("exp-pipelines", params, a, std::nullopt, e, floor));
    out.back().ms = sw.ms();

    detail::Residual b;
    for (int k = r + 1; k <= K; ++k) {
        const CInf &bk = mfl->b[static_cast<std::size_t>(k - 1)];
        if (!bk.is_zero()) {
            b.observed = std::max(b.observed.value_or(bk.lognorm()), bk.lognorm());
        }
    }
    params["detected_rank"] = mfl->detected_rank;
    Report rd;
    rd.check = "rank-detection";
    rd.params = params;
    rd.params["floor"] = floor;
    rd.floor = floor;
    if (b.observed) {
        rd.residual = static_cast<double>(*b.observed) / e;
    }
    rd.bound = -static_cast<double>(ctx->cap()) / (2.0 * e);
    out.push_back(rd);
    return out;
}

/// phi_theta(omega_i) - t omega_i on degrees 0..D-1, with phi recovered from the lattice.
inline Report check_special_equation(Pipeline &P, double floor)
{
    detail::Stopwatch sw;
    const auto mfl = module_from_lattice(P.lattice(), std::max(6, P.rank() + 3), P.context()->cap());
    const auto pt = mfl.module.phi_theta();
    detail::Residual r;
    for (const auto &w : P.omega()) {
        r.add(w.apply(pt) - w.times_t(), 0, w.D() - 1);
    }
    auto rep = detail::finish("special-equation", P.params(), r, std::nullopt, P.context()->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// The dual equation in cleared form for every zeta_i.
inline Report check_dual_equation(Pipeline &P, double floor)
{
    detail::Stopwatch sw;
    const auto mfl = module_from_lattice(P.lattice(), std::max(6, P.rank() + 3), P.context()->cap());
    detail::Residual r;
    for (const auto &z : P.zeta()) {
        const auto res = dual_relation_residual(mfl.module, z.zeta);
        r.add(res, 0, res.D());
    }
    auto rep = detail::finish("dual-equation", P.params(), r, std::nullopt, P.context()->e(), floor);
    rep.ms = sw.ms();
    return rep;
}

/// 0 all pass, 1 any failure, 2 inconclusive without failure.
inline int exit_code(const std::vector<Report> &reps)
{
    bool inc = false;
    for (const auto &r : reps) {
        if (r.failed()) {
            return 1;
        }
        inc = inc || r.inconclusive();
    }
    return inc ? 2 : 0;
}

} // namespace drinfeld
