#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apoly.hpp"
#include "lattice.hpp"
#include "module.hpp"
#include "tate.hpp"

namespace drinfeld {

/// omega_i = sum_j exp(pi_i / theta^{j+1}) t^j.
inline TateSeries agf(const Lattice &L, const TwistedSeries &exp, int i, int D)
{
    const auto &ctx = L.context();
    TateSeries w(ctx, D);
    const CInf &pi = L.basis().at(static_cast<std::size_t>(i));
    for (int j = 0; j <= D; ++j) {
        w[j] = exp.apply(pi.shifted(static_cast<std::int64_t>(j + 1) * ctx->e()));
    }
    return w;
}

inline std::vector<TateSeries> agf_all(const Lattice &L, const TwistedSeries &exp, int D)
{
    std::vector<TateSeries> out;
    for (int i = 0; i < L.rank(); ++i) {
        out.push_back(agf(L, exp, i, D));
    }
    return out;
}

using TateMatrix = std::vector<std::vector<TateSeries>>;

/// Entry (i, j) = omega_i^{(j)}, j = 0..r-1.
inline TateMatrix trivialization(const std::vector<TateSeries> &omega)
{
    const std::size_t r = omega.size();
    TateMatrix M(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            M[i].push_back(omega[i].twist(static_cast<int>(j)));
        }
    }
    return M;
}

/// Determinant by cofactor expansion along the first row.
inline TateSeries tate_det(const TateMatrix &M)
{
    const std::size_t n = M.size();
    if (n == 1) {
        return M[0][0];
    }
    const auto &ctx = M[0][0].context();
    TateSeries acc(ctx, M[0][0].D());
    for (std::size_t j = 0; j < n; ++j) {
        TateMatrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<TateSeries> row;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != j) {
                    row.push_back(M[i][k]);
                }
            }
            minor.push_back(std::move(row));
        }
        const TateSeries term = tate_mul(M[0][j], tate_det(minor));
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

struct DetCertificate {
    bool nonzero = false;
    /// t-degree of the lowest certified-nonzero coefficient.
    int degree = -1;
    /// Its lognorm (u-units) and its absolute precision.
    std::int64_t lognorm = 0;
    std::int64_t abs_prec = 0;
};

inline DetCertificate det_certificate(const TateSeries &det)
{
    DetCertificate c;
    for (int j = 0; j <= det.D(); ++j) {
        if (det[j].certified_nonzero()) {
            c.nonzero = true;
            c.degree = j;
            c.lognorm = det[j].lognorm();
            c.abs_prec = det[j].abs_prec();
            break;
        }
    }
    return c;
}

namespace detail {

/// Error of the truncated sum -sum_{lambda in Lambda_m} chi(lambda)/lambda as an
/// approximation of beta = chi(v_s)/E_W(v_s), W = ker(chi), chi = v_s^* + (terms of index
/// > s only).
///
/// With L(.) = lognorm and (r_i) the norm sequence:
///   L(beta) = -[L(r_s) + sum_{i<s, L(r_i)<L(r_s)} (q^i - q^{i-1}) (L(r_s) - L(r_i))],
/// and for s <= m the error is at most
///   L(beta) + sum_{k=N}^{m} (q^k - q^{k-1}) (L(r_k) - L(r_{k+1}))
/// with N the interleaving index; for s > m the truncated sum is zero and the error is
/// beta itself.
inline i128 coordinate_tail(const std::vector<std::int64_t> &L, std::int64_t q, std::size_t s, std::size_t N,
                            std::size_t m)
{
    const i128 Lbeta = -image_floor(L, q, s - 1);
    if (s > m) {
        return Lbeta;
    }
    i128 t = Lbeta;
    for (std::size_t k = N; k <= m; ++k) {
        t = add128(t, mul128(pow128(q, static_cast<std::int64_t>(k)) - pow128(q, static_cast<std::int64_t>(k - 1)),
                             L.at(k - 1) - L.at(k)));
    }
    return t;
}

/// Least index N <= s with r_N = ... = r_s.
inline std::size_t tie_start(const std::vector<std::int64_t> &L, std::size_t s)
{
    std::size_t N = s;
    while (N > 1 && L[N - 2] == L[N - 1]) {
        --N;
    }
    return N;
}

} // namespace detail

/// zeta_i with its t^j coefficient -sum_{lambda != 0} c_j(lambda)/lambda, where c_j(lambda)
/// is the theta^j-coordinate of pi_i^*(lambda). The sum runs over the complete span of the
/// first m ordered-basis vectors; the omitted tail is bounded per coefficient and folded
/// into its precision.
struct ZetaSeries {
    TateSeries zeta;
    /// Valuation lower bound of the omitted tail, per coefficient.
    std::vector<std::int64_t> tail;
    int span_dim = 0;
};

inline std::vector<ZetaSeries> zeta_all(const Lattice &L, OrderedBasis &ob, int D, int m, unsigned threads)
{
    const auto &ctx = L.context();
    const std::int64_t q = ctx->q();
    const int r = L.rank();
    // Position (1-based) of every monomial theta^j pi_i with j <= D.
    std::vector<std::vector<std::size_t>> pos(static_cast<std::size_t>(r),
                                              std::vector<std::size_t>(static_cast<std::size_t>(D) + 1, 0));
    std::size_t need = static_cast<std::size_t>(m) + 2;
    for (std::size_t filled = 0;;) {
        ob.extend(need);
        filled = 0;
        for (std::size_t idx = 0; idx < ob.size(); ++idx) {
            const auto &combo = ob[idx].combo;
            if (combo.size() == 1) {
                const auto mo = combo.front().first;
                if (mo.k <= D) {
                    pos[static_cast<std::size_t>(mo.l)][static_cast<std::size_t>(mo.k)] = idx + 1;
                }
            }
        }
        for (const auto &row : pos) {
            for (auto p : row) {
                filled += p != 0 ? 1 : 0;
            }
        }
        if (filled == static_cast<std::size_t>(r) * (static_cast<std::size_t>(D) + 1)) {
            break;
        }
        need *= 2;
    }
    std::size_t maxpos = 0;
    for (const auto &row : pos) {
        for (auto p : row) {
            maxpos = std::max(maxpos, p);
        }
    }
    ob.extend(std::max(maxpos, static_cast<std::size_t>(m)) + 2);
    const auto norms = ob.lognorms(ob.size());

    // For each span digit position, which (i, j) it feeds.
    std::vector<std::vector<std::pair<int, int>>> feeds(static_cast<std::size_t>(m));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j <= D; ++j) {
            const std::size_t p = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (p <= static_cast<std::size_t>(m)) {
                feeds[p - 1].emplace_back(i, j);
            }
        }
    }
    const unsigned T = std::max(1u, threads);
    const std::size_t slots = static_cast<std::size_t>(r) * (static_cast<std::size_t>(D) + 1);
    std::vector<std::vector<CInfSum>> part(T, std::vector<CInfSum>(slots, CInfSum(ctx)));
    const auto &fq = ctx->field().subfield_elements();
    for_each_in_span(ob.values(static_cast<std::size_t>(m)), T,
                     [&](unsigned tid, std::uint64_t, const std::vector<std::size_t> &d, const CInf &v) {
                         bool any = false;
                         for (std::size_t p = 0; p < d.size() && !any; ++p) {
                             any = d[p] != 0 && !feeds[p].empty();
                         }
                         if (!any) {
                             return;
                         }
                         const CInf inv = v.inv();
                         for (std::size_t p = 0; p < d.size(); ++p) {
                             if (d[p] == 0) {
                                 continue;
                             }
                             for (const auto &[i, j] : feeds[p]) {
                                 part[tid][static_cast<std::size_t>(i) * (static_cast<std::size_t>(D) + 1) +
                                           static_cast<std::size_t>(j)]
                                     .add_scaled(fq[d[p]], inv);
                             }
                         }
                     });
    std::vector<ZetaSeries> out;
    for (int i = 0; i < r; ++i) {
        ZetaSeries z{TateSeries(ctx, D), {}, m};
        for (int j = 0; j <= D; ++j) {
            const std::size_t slot = static_cast<std::size_t>(i) * (static_cast<std::size_t>(D) + 1) + static_cast<std::size_t>(j);
            CInfSum s(ctx);
            for (unsigned t = 0; t < T; ++t) {
                s.merge(part[t][slot]);
            }
            const std::size_t p = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const std::int64_t tail = detail::to_i64(
                -detail::coordinate_tail(norms, q, p, detail::tie_start(norms, p), static_cast<std::size_t>(m)));
            s.limit_prec(tail);
            z.zeta[j] = -s.value();
            z.tail.push_back(tail);
        }
        out.push_back(std::move(z));
    }
    return out;
}

/// Rank-one zeta by direct enumeration over polynomials: -sum_{h != 0, deg h <= degB}
/// h(t)/(rho h(theta)). Independent of the coordinate path; same tail bound with
/// m = degB + 1.
inline ZetaSeries pellarin_zeta(const CInf &rho, int D, int degB, unsigned threads)
{
    const auto &ctx = rho.context();
    const auto &F = ctx->field();
    const auto polys = APoly::enumerate_nonzero(degB, F);
    const unsigned T = std::max(1u, threads);
    std::vector<std::vector<CInfSum>> part(T, std::vector<CInfSum>(static_cast<std::size_t>(D) + 1, CInfSum(ctx)));
    detail::parallel_blocks(polys.size(), T, [&](unsigned tid, std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) {
            const APoly &h = polys[idx];
            const CInf inv = (rho * h.to_cinf(ctx)).inv();
            for (int j = 0; j <= std::min(D, h.degree()); ++j) {
                if (!h.coeff(j).is_zero()) {
                    part[tid][static_cast<std::size_t>(j)].add_scaled(h.coeff(j), inv);
                }
            }
        }
    });
    // Norm sequence of A*rho: r_i = ||rho|| q^{i-1}.
    const std::size_t len = static_cast<std::size_t>(std::max(D, degB)) + 4;
    std::vector<std::int64_t> norms;
    for (std::size_t i = 0; i < len; ++i) {
        norms.push_back(rho.lognorm() + static_cast<std::int64_t>(i) * ctx->e());
    }
    ZetaSeries z{TateSeries(ctx, D), {}, degB + 1};
    for (int j = 0; j <= D; ++j) {
        CInfSum s(ctx);
        for (unsigned t = 0; t < T; ++t) {
            s.merge(part[t][static_cast<std::size_t>(j)]);
        }
        const std::size_t p = static_cast<std::size_t>(j) + 1;
        const std::int64_t tail = detail::to_i64(
            -detail::coordinate_tail(norms, ctx->q(), p, p, static_cast<std::size_t>(degB) + 1));
        s.limit_prec(tail);
        z.zeta[j] = -s.value();
        z.tail.push_back(tail);
    }
    return z;
}

/// beta and g_beta = beta * E_W for W = ker(chi): the element of ker(exp*) attached to chi.
struct PoonenElement {
    SublatticeKernel kernel;
    ExpCoefficients eW;
    CInf beta;
    TwistedSeries g;
};

inline PoonenElement poonen_beta(const OrderedBasisPtr &ob, const std::vector<FFElem> &chi, int K,
                                 std::int64_t target_rel)
{
    auto W = sublattice_kernel(ob, chi);
    const int Keff = std::max<int>(K, static_cast<int>(W.pivot) + 2);
    auto eW = e_coeffs(*W.basis, Keff, target_rel);
    const CInf &l0 = W.lambda0.value;
    const FFElem chi0 = W.chi_lambda0;
    const CInf E0 = eW.series().apply(l0);
    if (E0.is_zero()) {
        throw precision_error("poonen_beta: E_W(lambda_0) indistinguishable from zero");
    }
    const CInf beta = E0.inv().scaled(chi0);
    TwistedSeries g = eW.series().scaled_left(beta);
    const ExpCoefficients ew = eW;
    g.set_tail([ew, beta](const CInf &x) -> std::optional<std::int64_t> {
        const auto t = ew.tail_val(x);
        if (!t) {
            return std::nullopt;
        }
        return detail::sat_add(*t, beta.val());
    });
    return PoonenElement{W, eW, beta, g};
}

/// Coefficients of (1 - tau) o g_beta - beta exp_Lambda, k = 1..K:
/// beta e_{W,k} - (beta e_{W,k-1})^q - beta e_{Lambda,k}.
inline std::vector<CInf> poonen_identity_residual(const PoonenElement &P, const ExpCoefficients &eL, int K)
{
    std::vector<CInf> out;
    for (int k = 1; k <= K; ++k) {
        const CInf a = P.beta * P.eW.e.at(static_cast<std::size_t>(k));
        const CInf b = (P.beta * P.eW.e.at(static_cast<std::size_t>(k - 1))).frobenius(1);
        out.push_back(a - b - P.beta * eL.e.at(static_cast<std::size_t>(k)));
    }
    return out;
}

} // namespace drinfeld
