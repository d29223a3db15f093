#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "detail/util.hpp"
#include "scalars.hpp"
#include "twisted.hpp"

namespace drinfeld {

/// theta^k * pi_l.
struct Monomial {
    int l = 0;
    int k = 0;
    friend bool operator==(const Monomial &, const Monomial &) = default;
    friend auto operator<=>(const Monomial &, const Monomial &) = default;
};

using Combination = std::vector<std::pair<Monomial, FFElem>>;

/// A nonzero lattice element with its norm (as lognorm = -valuation, in u-units) and its
/// F_q-coordinates on the monomials theta^k pi_l.
struct BasisVector {
    CInf value;
    std::int64_t lognorm = 0;
    Combination combo;
};

namespace detail {

inline std::vector<std::pair<std::int64_t, std::uint16_t>> serial_key(const CInf &x)
{
    std::vector<std::pair<std::int64_t, std::uint16_t>> k;
    for (const auto &[e, c] : x.terms()) {
        k.emplace_back(e, c.v);
    }
    return k;
}

/// F_q-linear independence of field elements, by exhausting all coefficient vectors.
inline bool fq_independent(const std::vector<FFElem> &xs, const Field &F)
{
    const auto &fq = F.subfield_elements();
    const std::size_t q = fq.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        total *= q;
    }
    for (std::size_t code = 1; code < total; ++code) {
        std::size_t c = code;
        FFElem s{};
        for (const auto &x : xs) {
            s = F.add(s, F.mul(fq[c % q], x));
            c /= q;
        }
        if (s.is_zero()) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// An ordered basis (v_1, v_2, ...) of a locally finite subspace, materialized on demand.
///
/// extend() must be called before sharing the object between threads; element access is
/// read-only and never extends.
class OrderedBasis {
public:
    using Generator = std::function<std::vector<BasisVector>(std::size_t n)>;

    OrderedBasis(ContextPtr ctx, Generator gen) : ctx_(std::move(ctx)), gen_(std::move(gen)) {}

    const ContextPtr &context() const { return ctx_; }

    void extend(std::size_t n)
    {
        if (n <= v_.size()) {
            return;
        }
        auto fresh = gen_(std::max(n, 2 * v_.size()));
        if (fresh.size() < n) {
            throw domain_error("ordered basis generator returned too few vectors");
        }
        v_.assign(fresh.begin(), fresh.end());
    }
    std::size_t size() const { return v_.size(); }
    /// 0-based access; v_1 is at(0).
    const BasisVector &at(std::size_t i) const
    {
        if (i >= v_.size()) {
            throw domain_error("ordered basis accessed beyond its extension");
        }
        return v_[i];
    }
    const BasisVector &operator[](std::size_t i) const { return at(i); }
    std::vector<std::int64_t> lognorms(std::size_t n) const
    {
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(at(i).lognorm);
        }
        return out;
    }
    std::vector<CInf> values(std::size_t n) const
    {
        std::vector<CInf> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(at(i).value);
        }
        return out;
    }

private:
    ContextPtr ctx_;
    Generator gen_;
    std::deque<BasisVector> v_;
};

using OrderedBasisPtr = std::shared_ptr<OrderedBasis>;

/// A rank-r A-lattice sum_l A pi_l whose basis passed the orthogonality certificate.
///
/// The certificate: group the pi_l by valuation mod e; inside each group the leading
/// residues must be F_q-linearly independent. Then the monomials theta^k pi_l are
/// orthogonal, so the norm of any combination is the largest norm of its terms.
class Lattice {
public:
    static Lattice certify(const ContextPtr &ctx, std::vector<CInf> basis)
    {
        if (basis.empty()) {
            throw domain_error("lattice needs at least one basis element");
        }
        const int e = ctx->e();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            check_same(ctx, basis[i].context());
            if (!basis[i].certified_nonzero()) {
                throw domain_error("basis element " + std::to_string(i + 1) + " is not certified nonzero");
            }
        }
        for (int cls = 0; cls < e; ++cls) {
            std::vector<std::size_t> group;
            for (std::size_t i = 0; i < basis.size(); ++i) {
                if (((basis[i].val() % e) + e) % e == cls) {
                    group.push_back(i);
                }
            }
            std::vector<FFElem> leads;
            for (std::size_t a = 0; a < group.size(); ++a) {
                leads.push_back(basis[group[a]].leading());
                if (!detail::fq_independent(leads, ctx->field())) {
                    // Report the first earlier element that, together with this one, spans
                    // a dependent pair, or the whole group if no pair is dependent.
                    std::string who = "pi_" + std::to_string(group[a] + 1);
                    for (std::size_t b = 0; b < a; ++b) {
                        if (!detail::fq_independent({leads[b], leads.back()}, ctx->field())) {
                            who = "pi_" + std::to_string(group[b] + 1) + ", pi_" + std::to_string(group[a] + 1);
                            break;
                        }
                    }
                    throw domain_error("orthogonality certificate fails for (" + who +
                                       "): valuations agree mod e and leading residues are F_q-dependent");
                }
            }
        }
        return Lattice(ctx, std::move(basis));
    }

    const ContextPtr &context() const { return ctx_; }
    int rank() const { return static_cast<int>(pi_.size()); }
    const std::vector<CInf> &basis() const { return pi_; }

    CInf monomial_value(Monomial mo) const
    {
        return pi_.at(static_cast<std::size_t>(mo.l)).shifted(-static_cast<std::int64_t>(mo.k) * ctx_->e());
    }
    std::int64_t monomial_lognorm(Monomial mo) const
    {
        return pi_.at(static_cast<std::size_t>(mo.l)).lognorm() + static_cast<std::int64_t>(mo.k) * ctx_->e();
    }

    /// All monomials of lognorm <= B, sorted into ordered-basis order.
    std::vector<Monomial> monomials_up_to(std::int64_t B) const
    {
        std::vector<Monomial> out;
        for (int l = 0; l < rank(); ++l) {
            for (int k = 0; monomial_lognorm({l, k}) <= B; ++k) {
                out.push_back({l, k});
            }
        }
        sort_monomials(out);
        return out;
    }

    /// The first n monomials in ordered-basis order: by norm, ties broken
    /// lexicographically on the serialized value.
    std::vector<Monomial> first_monomials(std::size_t n) const
    {
        std::int64_t B = std::numeric_limits<std::int64_t>::min();
        for (const auto &p : pi_) {
            B = std::max(B, p.lognorm());
        }
        std::vector<Monomial> out = monomials_up_to(B);
        while (out.size() < n) {
            B += ctx_->e();
            out = monomials_up_to(B);
        }
        out.resize(n);
        return out;
    }

    BasisVector basis_vector(Monomial mo) const
    {
        return {monomial_value(mo), monomial_lognorm(mo), {{mo, ctx_->field().one()}}};
    }

    /// Monomial ordered basis of the lattice.
    OrderedBasisPtr ordered_basis(std::size_t n = 0) const
    {
        const Lattice self = *this;
        auto ob = std::make_shared<OrderedBasis>(ctx_, [self](std::size_t m) {
            std::vector<BasisVector> out;
            for (const auto &mo : self.first_monomials(m)) {
                out.push_back(self.basis_vector(mo));
            }
            return out;
        });
        ob->extend(std::max<std::size_t>(n, 1));
        return ob;
    }

    CInf combination_value(const Combination &c) const
    {
        CInf acc = CInf::zero(ctx_);
        for (const auto &[mo, a] : c) {
            acc += monomial_value(mo).scaled(a);
        }
        return acc;
    }

private:
    Lattice(ContextPtr ctx, std::vector<CInf> basis) : ctx_(std::move(ctx)), pi_(std::move(basis)) {}

    void sort_monomials(std::vector<Monomial> &ms) const
    {
        std::vector<std::tuple<std::int64_t, std::vector<std::pair<std::int64_t, std::uint16_t>>, Monomial>> keyed;
        for (const auto &mo : ms) {
            keyed.emplace_back(monomial_lognorm(mo), detail::serial_key(monomial_value(mo)), mo);
        }
        std::sort(keyed.begin(), keyed.end());
        for (std::size_t i = 0; i < ms.size(); ++i) {
            ms[i] = std::get<2>(keyed[i]);
        }
    }

    ContextPtr ctx_;
    std::vector<CInf> pi_;
};

/// Every nonzero element of norm <= q^{B/e} (B in u-units), with coordinates.
inline std::vector<BasisVector> enumerate_up_to(const Lattice &L, std::int64_t B)
{
    const auto mons = L.monomials_up_to(B);
    const auto &fq = L.context()->field().subfield_elements();
    const std::size_t q = fq.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < mons.size(); ++i) {
        if (total > (std::size_t{1} << 26) / q) {
            throw precision_error("enumeration bound too large");
        }
        total *= q;
    }
    std::vector<BasisVector> out;
    out.reserve(total - 1);
    for (std::size_t code = 1; code < total; ++code) {
        std::size_t c = code;
        BasisVector bv{CInf::zero(L.context()), 0, {}};
        for (const auto &mo : mons) {
            const FFElem a = fq[c % q];
            c /= q;
            if (!a.is_zero()) {
                bv.combo.emplace_back(mo, a);
                bv.value += L.monomial_value(mo).scaled(a);
            }
        }
        bv.lognorm = bv.value.lognorm();
        out.push_back(std::move(bv));
    }
    return out;
}

namespace detail {

/// Row reduction over F_q on coordinate vectors keyed by monomial.
class SpanTracker {
public:
    explicit SpanTracker(const Field &F) : F_(F) {}

    /// Adds v if it is independent of the rows so far; returns whether it was added.
    bool insert(Combination v)
    {
        auto reduce = [&](Combination x) {
            for (const auto &[piv, row] : rows_) {
                const FFElem c = coord(x, piv);
                if (!c.is_zero()) {
                    x = axpy(x, F_.neg(c), row);
                }
            }
            return x;
        };
        v = reduce(std::move(v));
        if (v.empty()) {
            return false;
        }
        const Monomial piv = v.front().first;
        const FFElem inv = F_.inv(v.front().second);
        for (auto &t : v) {
            t.second = F_.mul(t.second, inv);
        }
        for (auto &[p, row] : rows_) {
            const FFElem c = coord(row, piv);
            if (!c.is_zero()) {
                row = axpy(row, F_.neg(c), v);
            }
        }
        rows_.emplace_back(piv, std::move(v));
        return true;
    }

private:
    static FFElem coord(const Combination &x, Monomial m)
    {
        for (const auto &[mo, a] : x) {
            if (mo == m) {
                return a;
            }
        }
        return FFElem{};
    }
    Combination axpy(const Combination &x, FFElem a, const Combination &y) const
    {
        std::map<Monomial, FFElem> acc;
        for (const auto &[mo, c] : x) {
            acc[mo] = c;
        }
        for (const auto &[mo, c] : y) {
            acc[mo] = F_.add(acc[mo], F_.mul(a, c));
        }
        Combination r;
        for (const auto &[mo, c] : acc) {
            if (!c.is_zero()) {
                r.emplace_back(mo, c);
            }
        }
        return r;
    }

    const Field &F_;
    std::vector<std::pair<Monomial, Combination>> rows_;
};

} // namespace detail

/// Greedy ordered basis computed from the enumeration alone: scan elements of increasing
/// norm in the given order and keep those outside the span so far. `order` permutes
/// elements of equal norm; it serves to check that the norm sequence does not depend
/// on tie-breaking.
inline std::vector<BasisVector> greedy_ordered_basis(
    const Lattice &L, std::size_t n,
    const std::function<bool(const BasisVector &, const BasisVector &)> &tie_order)
{
    std::int64_t B = 0;
    for (const auto &p : L.basis()) {
        B = std::max(B, p.lognorm());
    }
    for (;;) {
        auto elems = enumerate_up_to(L, B);
        std::stable_sort(elems.begin(), elems.end(), [&](const BasisVector &a, const BasisVector &b) {
            if (a.lognorm != b.lognorm) {
                return a.lognorm < b.lognorm;
            }
            return tie_order(a, b);
        });
        detail::SpanTracker span(L.context()->field());
        std::vector<BasisVector> out;
        for (auto &el : elems) {
            if (out.size() == n) {
                break;
            }
            if (span.insert(el.combo)) {
                out.push_back(el);
            }
        }
        // Only a complete prefix is trustworthy: all elements of norm <= B were seen, so
        // the choices are final as long as the last pick has norm <= B, which always holds.
        if (out.size() >= n) {
            return out;
        }
        B += L.context()->e();
    }
}

/// Visits every element sum_i d_i v_i of the F_q-span of `vecs` (q^m elements, the zero
/// element included). The digit vector indexes subfield_elements(). Work is split into
/// static blocks over the index range, so per-thread partial results are deterministic.
inline void for_each_in_span(
    const std::vector<CInf> &vecs, unsigned threads,
    const std::function<void(unsigned tid, std::uint64_t index, const std::vector<std::size_t> &digits,
                             const CInf &value)> &fn)
{
    if (vecs.empty()) {
        return;
    }
    const auto &ctx = vecs.front().context();
    const auto &fq = ctx->field().subfield_elements();
    const std::size_t q = fq.size();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        if (total > (std::uint64_t{1} << 34) / q) {
            throw precision_error("span enumeration exceeds the element budget");
        }
        total *= q;
    }
    // Multiples c * v_i precomputed once.
    std::vector<std::vector<CInf>> mult(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        for (std::size_t d = 0; d < q; ++d) {
            mult[i].push_back(vecs[i].scaled(fq[d]));
        }
    }
    detail::parallel_blocks(static_cast<std::size_t>(total), threads,
                            [&](unsigned tid, std::size_t b, std::size_t e) {
                                std::vector<std::size_t> digits(vecs.size());
                                for (std::size_t idx = b; idx < e; ++idx) {
                                    std::size_t c = idx;
                                    CInf v = CInf::zero(ctx);
                                    for (std::size_t i = 0; i < vecs.size(); ++i) {
                                        digits[i] = c % q;
                                        c /= q;
                                        if (digits[i] != 0) {
                                            v += mult[i][digits[i]];
                                        }
                                    }
                                    fn(tid, idx, digits, v);
                                }
                            });
}

/// P_n(x) = sum_k e_{V_n,k} x^{q^k}, the monic-in-x q-linear polynomial vanishing on
/// V_n = Span(v_1..v_n), kept up to tau-degree K.
class MoorePoly {
public:
    MoorePoly(ContextPtr ctx, int K) : ctx_(std::move(ctx)), K_(K)
    {
        e_.assign(static_cast<std::size_t>(K) + 1, CInf::zero(ctx_));
        e_[0] = CInf::one(ctx_);
    }

    const ContextPtr &context() const { return ctx_; }
    int K() const { return K_; }
    /// Dimension n of the kernel.
    int dimension() const { return static_cast<int>(w_.size()); }
    const std::vector<CInf> &coeffs() const { return e_; }
    const CInf &coeff(int k) const { return e_.at(static_cast<std::size_t>(k)); }
    /// The values w_j = P_{j-1}(v_j).
    const std::vector<CInf> &pivots() const { return w_; }

    /// P_n(x) through the value recursion P_j(x) = P_{j-1}(x) - P_{j-1}(x)^q / w_j^{q-1};
    /// exact in the degree, unlike the truncated coefficient list.
    CInf eval(const CInf &x) const
    {
        CInf y = x;
        for (std::size_t j = 0; j < w_.size(); ++j) {
            if (y.is_zero() && y.is_exact()) {
                break;
            }
            y = y - y.frobenius(1) * winv_[j];
        }
        return y;
    }

    TwistedSeries as_twisted() const
    {
        std::vector<CInf> c(e_.begin(), e_.begin() + std::min<std::size_t>(e_.size(), w_.size() + 1));
        return TwistedSeries(ctx_, c);
    }

    friend MoorePoly moore_extend(const MoorePoly &P, const CInf &v);

private:
    ContextPtr ctx_;
    int K_;
    std::vector<CInf> e_;
    std::vector<CInf> w_;
    std::vector<CInf> winv_;
};

/// P_n from P_{n-1} and v_n. Fails when v_n lies in the kernel of P_{n-1}.
inline MoorePoly moore_extend(const MoorePoly &P, const CInf &v)
{
    const CInf w = P.eval(v);
    if (w.is_zero()) {
        throw domain_error("moore_extend: vector already lies in the span (P(v) = 0 within precision)");
    }
    const auto q = static_cast<std::uint64_t>(P.ctx_->q());
    const CInf winv = w.pow(q - 1).inv();
    MoorePoly R = P;
    for (int k = P.K_; k >= 1; --k) {
        const CInf &prev = P.e_[static_cast<std::size_t>(k - 1)];
        if (prev.is_zero() && prev.is_exact()) {
            continue;
        }
        R.e_[static_cast<std::size_t>(k)] = P.e_[static_cast<std::size_t>(k)] - prev.frobenius(1) * winv;
    }
    R.w_.push_back(w);
    R.winv_.push_back(winv);
    return R;
}

/// log-scale bounds (u-units, as lognorms) built from a norm sequence.
namespace detail {

inline constexpr i128 k_neg_inf = -k_i128_big;

/// L(B_j) = sum_{i<=j} (q^{i-1} - q^i) L(r_i): the coefficient bound for e_{V,j}.
inline i128 coeff_bound(const std::vector<std::int64_t> &L, std::int64_t q, std::size_t j)
{
    i128 s = 0;
    for (std::size_t i = 1; i <= j; ++i) {
        s = add128(s, mul128(pow128(q, static_cast<std::int64_t>(i - 1)) - pow128(q, static_cast<std::int64_t>(i)),
                             L.at(i - 1)));
    }
    return s;
}

/// Lower bound for L(P_n(v)) over v outside V_n = Span(v_1..v_n):
/// L(r_{n+1}) + sum_{i<=n, L(r_i) < L(r_{n+1})} (q^i - q^{i-1}) (L(r_{n+1}) - L(r_i)).
inline i128 image_floor(const std::vector<std::int64_t> &L, std::int64_t q, std::size_t n)
{
    const std::int64_t top = L.at(n);
    i128 s = top;
    for (std::size_t i = 1; i <= n; ++i) {
        if (L[i - 1] < top) {
            s = add128(s, mul128(pow128(q, static_cast<std::int64_t>(i)) - pow128(q, static_cast<std::int64_t>(i - 1)),
                                 top - L[i - 1]));
        }
    }
    return s;
}

} // namespace detail

/// Coefficients e_{V,0..K} of the exponential of a locally finite subspace V, each with a
/// certified error. `err[k]` is a valuation lower bound for e_{V,k} - value, already
/// folded into the precision of `e[k]`.
struct ExpCoefficients {
    ContextPtr ctx;
    std::vector<CInf> e;
    std::vector<std::int64_t> err;
    int steps = 0;
    /// Norm sequence (lognorms) known to the tail model.
    std::vector<std::int64_t> norms;

    /// Valuation lower bound for sum_{k>K} e_k x^{q^k}, from ||e_k|| <= prod r_i^{q^{i-1}-q^i}.
    std::optional<std::int64_t> tail_val(const CInf &x) const
    {
        const int K = static_cast<int>(e.size()) - 1;
        if (x.is_zero()) {
            if (x.is_exact()) {
                return CInf::exact;
            }
            // Norm unknown below the precision: use the precision as the norm bound.
        }
        const std::int64_t Lx = -x.val();
        const std::int64_t q = ctx->q();
        detail::i128 best = detail::k_neg_inf;
        detail::i128 B = detail::coeff_bound(norms, q, static_cast<std::size_t>(K));
        for (std::size_t k = static_cast<std::size_t>(K) + 1;; ++k) {
            if (k > norms.size()) {
                return std::nullopt;
            }
            B = detail::add128(B, detail::mul128(detail::pow128(q, static_cast<std::int64_t>(k - 1)) -
                                                     detail::pow128(q, static_cast<std::int64_t>(k)),
                                                 norms[k - 1]));
            const detail::i128 term = detail::add128(B, detail::mul128(detail::pow128(q, static_cast<std::int64_t>(k)), Lx));
            best = std::max(best, term);
            // From here on the terms decrease: L(r_{k+1}) > L(x).
            if (k < norms.size() && norms[k] > Lx) {
                break;
            }
        }
        return detail::to_i64(-best);
    }

    TwistedSeries series() const
    {
        TwistedSeries s(ctx, e, static_cast<int>(e.size()) - 1);
        const ExpCoefficients self = *this;
        s.set_tail([self](const CInf &x) { return self.tail_val(x); });
        return s;
    }
};

/// e_{V,k} for k <= K via the Moore recursion along an ordered basis of V.
///
/// Stabilization bound. Write W_n = P_n(V), an F_q-space whose nonzero elements have
/// norm >= w_n (image_floor). Then E_V = E_{W_n} o P_n, so
///   e_{V,k} - e_{V_n,k} = sum_{l=1..k} e_{W_n,l} e_{V_n,k-l}^{q^l},
/// and ||e_{W_n,l}|| <= w_n^{1-q^l}, ||e_{V_n,j}|| <= B_j (zero for j > n). Every omitted
/// term carries a factor 1/v with ||v|| >= w_n. We extend n until the bound falls below
/// the working precision of each coefficient.
inline ExpCoefficients e_coeffs(OrderedBasis &ob, int K, std::int64_t target_rel, int budget = 64)
{
    const auto &ctx = ob.context();
    const std::int64_t q = ctx->q();
    const int tail_len = K + budget + 24;
    ob.extend(static_cast<std::size_t>(tail_len));
    const auto L = ob.lognorms(static_cast<std::size_t>(tail_len));

    MoorePoly P(ctx, K);
    std::vector<detail::i128> err(static_cast<std::size_t>(K) + 1, detail::k_neg_inf);
    for (int n = 1; n <= K + budget; ++n) {
        P = moore_extend(P, ob[static_cast<std::size_t>(n - 1)].value);
        if (n < K) {
            continue;
        }
        const detail::i128 Lw = detail::image_floor(L, q, static_cast<std::size_t>(n));
        bool done = true;
        for (int k = 1; k <= K; ++k) {
            detail::i128 ek = detail::k_neg_inf;
            for (int l = 1; l <= k; ++l) {
                if (k - l > n) {
                    continue;
                }
                const detail::i128 t = detail::add128(
                    detail::mul128(1 - detail::pow128(q, l), Lw),
                    detail::mul128(detail::pow128(q, l), detail::coeff_bound(L, q, static_cast<std::size_t>(k - l))));
                ek = std::max(ek, t);
            }
            err[static_cast<std::size_t>(k)] = ek;
            const CInf &c = P.coeff(k);
            const detail::i128 size = c.is_zero() ? detail::coeff_bound(L, q, static_cast<std::size_t>(k))
                                                  : static_cast<detail::i128>(c.lognorm());
            if (ek > size - target_rel) {
                done = false;
            }
        }
        if (done) {
            ExpCoefficients out;
            out.ctx = ctx;
            out.steps = n;
            out.norms = L;
            for (int k = 0; k <= K; ++k) {
                const std::int64_t ev = k == 0 ? CInf::exact : detail::to_i64(-err[static_cast<std::size_t>(k)]);
                out.err.push_back(ev);
                out.e.push_back(P.coeff(k).truncated(ev));
            }
            return out;
        }
    }
    throw precision_error("e_coeffs: target precision not reached within the iteration budget");
}

/// Sum of d-th powers over V_m = Span(v_1..v_m), by brute force and exactly: the sum is
/// computed in a copy of the context without relative-precision cap.
inline CInf power_sum(const OrderedBasis &ob, int m, std::uint64_t d, unsigned threads = 1)
{
    const auto &ctx = ob.context();
    GroundConfig g = ctx->config();
    g.N = std::int64_t{1} << 24;
    const auto wide = Context::make(g);
    std::vector<CInf> vecs;
    for (int i = 0; i < m; ++i) {
        const CInf &v = ob[static_cast<std::size_t>(i)].value;
        if (!v.is_exact()) {
            throw precision_error("power_sum needs exact basis vectors");
        }
        const auto terms = v.terms();
        std::map<std::int64_t, FFElem> t(terms.begin(), terms.end());
        vecs.push_back(CInf::from_terms(wide, t));
    }
    std::vector<CInfSum> parts(std::max(1u, threads), CInfSum(wide));
    for_each_in_span(vecs, threads, [&](unsigned tid, std::uint64_t, const std::vector<std::size_t> &, const CInf &v) {
        if (!v.is_zero()) {
            parts[tid].add(v.pow(d));
        }
    });
    CInfSum total(wide);
    for (const auto &p : parts) {
        total.merge(p);
    }
    return total.value().rebased(ctx);
}

/// Codimension-one subspace W = ker(chi) of a lattice with ordered basis (v_i), where chi
/// is given on v_1..v_p and vanishes on v_i for i > p.
struct SublatticeKernel {
    OrderedBasisPtr basis;
    /// Index s (1-based) of the pivot: the least i with chi(v_i) != 0.
    std::size_t pivot = 0;
    /// lambda_0 = v_s, an element outside W of least norm.
    BasisVector lambda0;
    FFElem chi_lambda0;
    /// Least i with s_i > r_s, so that s_i = r_i for i < m and s_i = r_{i+1} for i >= m.
    std::size_t interleave = 0;
    /// Smallest index N with the same property (shifts down over norm ties).
    std::size_t interleave_min = 0;
    std::vector<FFElem> chi;
};

inline SublatticeKernel sublattice_kernel(const OrderedBasisPtr &ob, std::vector<FFElem> chi)
{
    const auto &ctx = ob->context();
    const auto &F = ctx->field();
    std::size_t s = 0;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        if (!F.in_subfield(chi[i])) {
            throw domain_error("functional values must lie in F_q");
        }
        if (s == 0 && !chi[i].is_zero()) {
            s = i + 1;
        }
    }
    if (s == 0) {
        throw domain_error("functional vanishes on the given prefix");
    }
    ob->extend(chi.size());
    SublatticeKernel K;
    K.pivot = s;
    K.chi = chi;
    K.lambda0 = ob->at(s - 1);
    K.chi_lambda0 = chi[s - 1];
    const std::vector<FFElem> chiv = chi;
    const OrderedBasisPtr parent = ob;
    K.basis = std::make_shared<OrderedBasis>(ctx, [parent, chiv, s](std::size_t n) {
        const auto &Fd = parent->context()->field();
        parent->extend(n + 1);
        const BasisVector &vs = parent->at(s - 1);
        const FFElem cs_inv = Fd.inv(chiv[s - 1]);
        std::vector<BasisVector> out;
        for (std::size_t i = 1; out.size() < n; ++i) {
            if (i == s) {
                continue;
            }
            const BasisVector &vi = parent->at(i - 1);
            const FFElem ci = i <= chiv.size() ? chiv[i - 1] : FFElem{};
            if (ci.is_zero()) {
                out.push_back(vi);
                continue;
            }
            const FFElem f = Fd.neg(Fd.mul(ci, cs_inv));
            BasisVector w;
            w.value = vi.value + vs.value.scaled(f);
            w.lognorm = vi.lognorm;
            w.combo = vi.combo;
            for (const auto &[mo, a] : vs.combo) {
                w.combo.emplace_back(mo, Fd.mul(a, f));
            }
            out.push_back(std::move(w));
        }
        return out;
    });
    const std::size_t probe = std::max<std::size_t>(chi.size(), s) + 8;
    K.basis->extend(probe);
    ob->extend(probe + 1);
    const std::int64_t rs = ob->at(s - 1).lognorm;
    K.interleave = 0;
    for (std::size_t i = 1; i <= probe; ++i) {
        if (K.basis->at(i - 1).lognorm > rs) {
            K.interleave = i;
            break;
        }
    }
    if (K.interleave == 0) {
        throw precision_error("interleaving index beyond the probed prefix");
    }
    std::size_t N = s;
    while (N > 1 && ob->at(N - 2).lognorm == ob->at(N - 1).lognorm) {
        --N;
    }
    K.interleave_min = N;
    return K;
}

} // namespace drinfeld
