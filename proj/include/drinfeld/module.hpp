#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apoly.hpp"
#include "lattice.hpp"
#include "tate.hpp"
#include "twisted.hpp"

namespace drinfeld {

/// phi_theta = theta + a_1 tau + ... + a_r tau^r.
class DrinfeldModule {
public:
    DrinfeldModule(ContextPtr ctx, std::vector<CInf> coeffs) : ctx_(std::move(ctx)), a_(std::move(coeffs))
    {
        if (a_.empty()) {
            throw domain_error("Drinfeld module needs rank >= 1");
        }
        if (!a_.back().certified_nonzero()) {
            throw domain_error("leading coefficient a_r is not certified nonzero");
        }
    }

    static DrinfeldModule carlitz(const ContextPtr &ctx) { return DrinfeldModule(ctx, {CInf::one(ctx)}); }

    const ContextPtr &context() const { return ctx_; }
    int rank() const { return static_cast<int>(a_.size()); }
    /// a_1..a_r.
    const std::vector<CInf> &coeffs() const { return a_; }
    /// a_k with a_0 = theta.
    CInf a(int k) const { return k == 0 ? CInf::theta_pow(ctx_, 1) : a_.at(static_cast<std::size_t>(k - 1)); }

    TwistedSeries phi_theta() const
    {
        std::vector<CInf> c{CInf::theta_pow(ctx_, 1)};
        c.insert(c.end(), a_.begin(), a_.end());
        return TwistedSeries(ctx_, c);
    }

private:
    ContextPtr ctx_;
    std::vector<CInf> a_;
};

/// phi_a = a(phi_theta), by Horner's rule in the twisted ring.
inline TwistedSeries phi_of(const DrinfeldModule &phi, const APoly &a)
{
    const auto &ctx = phi.context();
    if (a.is_zero()) {
        return TwistedSeries(ctx, {});
    }
    const TwistedSeries pt = phi.phi_theta();
    TwistedSeries r = TwistedSeries::constant(CInf::constant(ctx, a.coeff(a.degree())));
    for (int i = a.degree() - 1; i >= 0; --i) {
        r = twisted_mul(r, pt) + TwistedSeries::constant(CInf::constant(ctx, a.coeff(i)));
    }
    return r;
}

/// Applies phi_a coefficientwise to a Tate series.
inline TateSeries phi_action(const DrinfeldModule &phi, const APoly &a, const TateSeries &f)
{
    return f.apply(phi_of(phi, a));
}

/// exp coefficients from the functional equation phi_theta o exp = exp o theta:
/// e_k (theta^{q^k} - theta) = sum_{i=1}^{min(k,r)} a_i e_{k-i}^{q^i}.
inline TwistedSeries exp_from_module(const DrinfeldModule &phi, int K)
{
    const auto &ctx = phi.context();
    std::vector<CInf> e{CInf::one(ctx)};
    for (int k = 1; k <= K; ++k) {
        CInf acc = CInf::zero(ctx);
        for (int i = 1; i <= std::min(k, phi.rank()); ++i) {
            acc += phi.a(i) * e[static_cast<std::size_t>(k - i)].frobenius(i);
        }
        const CInf d = CInf::theta_pow(ctx, 1).frobenius(k) - CInf::theta_pow(ctx, 1);
        e.push_back(acc / d);
    }
    return TwistedSeries(ctx, e, K);
}

/// exp_Lambda through the Moore recursion on the lattice, with certified coefficients.
inline ExpCoefficients exp_from_lattice(const Lattice &L, int K, std::int64_t target_rel)
{
    auto ob = L.ordered_basis();
    return e_coeffs(*ob, K, target_rel);
}

struct ModuleFromLattice {
    DrinfeldModule module;
    /// b_1..b_K as solved; entries beyond the rank should vanish.
    std::vector<CInf> b;
    int detected_rank = 0;
    /// A coefficient counts as zero when its certified norm is below q^{-threshold/e}.
    std::int64_t threshold = 0;
    ExpCoefficients exp;
};

/// Solves e_k theta^{q^k} = sum_{i+j=k} b_i e_j^{q^i} for b_1..b_K and detects the rank.
inline ModuleFromLattice module_from_lattice(const Lattice &L, int K, std::int64_t target_rel)
{
    const auto &ctx = L.context();
    if (K < L.rank() + 2) {
        throw domain_error("module_from_lattice needs K >= rank + 2");
    }
    auto ex = exp_from_lattice(L, K, target_rel);
    const CInf th = CInf::theta_pow(ctx, 1);
    std::vector<CInf> b;
    for (int k = 1; k <= K; ++k) {
        const CInf &ek = ex.e[static_cast<std::size_t>(k)];
        CInf bk = ek * (th.frobenius(k) - th);
        for (int i = 1; i < k; ++i) {
            bk -= b[static_cast<std::size_t>(i - 1)] * ex.e[static_cast<std::size_t>(k - i)].frobenius(i);
        }
        b.push_back(bk);
    }
    const std::int64_t N = ctx->cap();
    auto is_zero = [&](const CInf &x) { return 2 * x.val() > N; };
    int detected = 0;
    for (int k = 1; k <= K; ++k) {
        if (!is_zero(b[static_cast<std::size_t>(k - 1)])) {
            detected = k;
        }
    }
    if (detected != L.rank()) {
        throw precision_error("module_from_lattice: detected rank " + std::to_string(detected) +
                              " differs from the lattice rank " + std::to_string(L.rank()) +
                              " (lattice/precision inconsistency)");
    }
    std::vector<CInf> a(b.begin(), b.begin() + detected);
    return ModuleFromLattice{DrinfeldModule(ctx, a), b, detected, (N + 1) / 2, ex};
}

/// Residual of the dual special-function equation cleared of negative twists:
/// sum_{k=0}^r a_k^{q^{r-k}} zeta^{(r-k)} - t zeta^{(r)}, with a_0 = theta.
inline TateSeries dual_relation_residual(const DrinfeldModule &phi, const TateSeries &zeta)
{
    const int r = phi.rank();
    const TateSeries top = zeta.twist(r);
    TateSeries acc = top.times_t().scaled(-CInf::one(zeta.context()));
    for (int k = 0; k <= r; ++k) {
        acc = acc + zeta.twist(r - k).scaled(phi.a(k).frobenius(r - k));
    }
    return acc;
}

} // namespace drinfeld
