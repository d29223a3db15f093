#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "scalars.hpp"

namespace drinfeld {

/// Bound for the omitted tail sum_{k>K} c_k x^{q^k} of a truncated series, given as a
/// valuation lower bound in u-units. nullopt means the tail does not converge at x.
using TailModel = std::function<std::optional<std::int64_t>(const CInf &x)>;

/// sum_i c_i tau^i in the skew ring with tau c = c^q tau.
///
/// Without an order the series is a polynomial. With an order K the coefficients beyond
/// tau^K are unknown; evaluation then needs a tail model.
class TwistedSeries {
public:
    TwistedSeries() = default;
    TwistedSeries(ContextPtr ctx, std::vector<CInf> coeffs, std::optional<int> order = std::nullopt)
        : ctx_(std::move(ctx)), c_(std::move(coeffs)), order_(order)
    {
        if (order_) {
            c_.resize(static_cast<std::size_t>(*order_) + 1, CInf::zero(ctx_));
        }
        trim();
    }

    static TwistedSeries constant(const CInf &c) { return TwistedSeries(c.context(), {c}); }
    static TwistedSeries one(const ContextPtr &ctx) { return constant(CInf::one(ctx)); }
    static TwistedSeries tau(const ContextPtr &ctx, int k = 1)
    {
        std::vector<CInf> c(static_cast<std::size_t>(k) + 1, CInf::zero(ctx));
        c.back() = CInf::one(ctx);
        return TwistedSeries(ctx, std::move(c));
    }

    const ContextPtr &context() const { return ctx_; }
    bool is_polynomial() const { return !order_.has_value(); }
    std::optional<int> order() const { return order_; }
    /// Index of the last stored coefficient, -1 when empty.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<CInf> &coeffs() const { return c_; }
    CInf coeff(int i) const
    {
        if (i >= 0 && i < static_cast<int>(c_.size())) {
            return c_[static_cast<std::size_t>(i)];
        }
        if (order_ && i > *order_) {
            throw precision_error("coefficient beyond the truncation order");
        }
        return CInf::zero(ctx_);
    }

    void set_tail(TailModel t) { tail_ = std::move(t); }
    const TailModel &tail() const { return tail_; }

    friend TwistedSeries operator+(const TwistedSeries &f, const TwistedSeries &g) { return combine(f, g, false); }
    friend TwistedSeries operator-(const TwistedSeries &f, const TwistedSeries &g) { return combine(f, g, true); }

    TwistedSeries scaled_left(const CInf &a) const
    {
        std::vector<CInf> r;
        r.reserve(c_.size());
        for (const auto &c : c_) {
            r.push_back(a * c);
        }
        return TwistedSeries(ctx_, std::move(r), order_);
    }

    /// f * g, with tau^k coefficient sum_{i+j=k} a_i * frobenius(b_j, i).
    friend TwistedSeries twisted_mul(const TwistedSeries &f, const TwistedSeries &g)
    {
        check_same(f.ctx_, g.ctx_);
        std::optional<int> order;
        if (f.order_ || g.order_) {
            order = std::min(f.order_.value_or(INT32_MAX), g.order_.value_or(INT32_MAX));
        }
        if (f.c_.empty() || g.c_.empty()) {
            return TwistedSeries(f.ctx_, {}, order);
        }
        int top = f.degree() + g.degree();
        if (order) {
            top = std::min(top, *order);
        }
        std::vector<CInf> r(static_cast<std::size_t>(top) + 1, CInf::zero(f.ctx_));
        for (int i = 0; i <= f.degree() && i <= top; ++i) {
            const CInf &a = f.c_[static_cast<std::size_t>(i)];
            if (a.is_zero() && a.is_exact()) {
                continue;
            }
            for (int j = 0; j <= g.degree() && i + j <= top; ++j) {
                r[static_cast<std::size_t>(i + j)] += a * g.c_[static_cast<std::size_t>(j)].frobenius(i);
            }
        }
        return TwistedSeries(f.ctx_, std::move(r), order);
    }

    /// sum_i c_i x^{q^i}, with the tail bound folded into the precision.
    CInf apply(const CInf &x) const
    {
        check_same(ctx_, x.context());
        CInf acc = CInf::zero(ctx_);
        if (x.is_zero() && x.is_exact()) {
            return acc;
        }
        CInf xi = x;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i > 0) {
                xi = xi.frobenius(1);
            }
            acc += c_[i] * xi;
        }
        if (order_) {
            if (!tail_) {
                throw domain_error("truncated series evaluated without a tail bound");
            }
            const auto t = tail_(x);
            if (!t) {
                throw domain_error("series diverges at the evaluation point");
            }
            acc = acc.truncated(*t);
        }
        return acc;
    }

    /// Difference within precision, coefficientwise up to the smaller order.
    bool equal_within(const TwistedSeries &g) const
    {
        const int top = std::max(degree(), g.degree());
        for (int i = 0; i <= top; ++i) {
            if ((order_ && i > *order_) || (g.order_ && i > *g.order_)) {
                break;
            }
            if (!coeff(i).equal_within(g.coeff(i))) {
                return false;
            }
        }
        return true;
    }

private:
    static TwistedSeries combine(const TwistedSeries &f, const TwistedSeries &g, bool subtract)
    {
        check_same(f.ctx_, g.ctx_);
        std::optional<int> order;
        if (f.order_ || g.order_) {
            order = std::min(f.order_.value_or(INT32_MAX), g.order_.value_or(INT32_MAX));
        }
        int top = std::max(f.degree(), g.degree());
        if (order) {
            top = std::min(top, *order);
        }
        std::vector<CInf> r;
        for (int i = 0; i <= top; ++i) {
            r.push_back(subtract ? f.coeff(i) - g.coeff(i) : f.coeff(i) + g.coeff(i));
        }
        return TwistedSeries(f.ctx_, std::move(r), order);
    }

    void trim()
    {
        if (order_) {
            return;
        }
        while (!c_.empty() && c_.back().is_zero() && c_.back().is_exact()) {
            c_.pop_back();
        }
    }

    ContextPtr ctx_;
    std::vector<CInf> c_;
    std::optional<int> order_;
    TailModel tail_;
};

inline TwistedSeries twisted_mul(const TwistedSeries &f, const TwistedSeries &g);

inline CInf twisted_apply(const TwistedSeries &f, const CInf &x) { return f.apply(x); }

} // namespace drinfeld
