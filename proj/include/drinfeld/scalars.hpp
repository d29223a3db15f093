#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detail/util.hpp"
#include "field.hpp"

namespace drinfeld {

/// Ground data: q = p^s, residue field F_{q^m}, ramification e (u^e = 1/theta) and the
/// working precision N in u-units.
struct GroundConfig {
    int p = 3;
    int s = 1;
    int m = 1;
    int e = 1;
    std::int64_t N = 60;

    std::int64_t q() const { return detail::ipow(p, static_cast<unsigned>(s)); }

    void validate() const
    {
        if (p < 2 || s < 1) {
            throw domain_error("q must be a prime power >= 2");
        }
        if (m < 1 || e < 1) {
            throw domain_error("m and e must be positive");
        }
        if (N <= 0) {
            throw domain_error("precision N must be positive");
        }
    }

    friend bool operator==(const GroundConfig &, const GroundConfig &) = default;
};

/// Shared immutable state behind every scalar: configuration plus field tables.
class Context {
public:
    explicit Context(const GroundConfig &cfg) : cfg_((cfg.validate(), cfg)), field_(cfg.p, cfg.s, cfg.m) {}

    static std::shared_ptr<const Context> make(const GroundConfig &cfg)
    {
        return std::make_shared<const Context>(cfg);
    }

    const GroundConfig &config() const { return cfg_; }
    const Field &field() const { return field_; }
    std::int64_t q() const { return field_.q(); }
    int e() const { return cfg_.e; }
    /// Relative precision kept by every arithmetic result, in u-units.
    std::int64_t cap() const { return cfg_.N; }

private:
    GroundConfig cfg_;
    Field field_;
};

using ContextPtr = std::shared_ptr<const Context>;

inline void check_same(const ContextPtr &a, const ContextPtr &b)
{
    if (a != b && !(a && b && a->config() == b->config())) {
        throw config_mismatch("operands belong to different ground configurations");
    }
}

/// Truncated Laurent series sum_k c_k u^k over F_{q^m}, known modulo u^{abs_prec}.
///
/// Coefficients are stored densely from the leading exponent. Every result keeps at
/// most N digits of relative precision; values whose support fits in that window and
/// that come from exact inputs stay exact.
class CInf {
public:
    static constexpr std::int64_t exact = detail::k_exact;

    CInf() = default;

    explicit CInf(ContextPtr ctx) : ctx_(std::move(ctx)), val_(exact), prec_(exact) {}

    CInf(ContextPtr ctx, std::int64_t val, std::vector<FFElem> coeffs, std::int64_t prec)
        : ctx_(std::move(ctx)), val_(val), c_(std::move(coeffs)), prec_(prec)
    {
        normalize();
    }

    static CInf zero(const ContextPtr &ctx) { return CInf(ctx); }
    /// Zero known only modulo u^prec.
    static CInf zero(const ContextPtr &ctx, std::int64_t prec) { return CInf(ctx, prec, {}, prec); }
    static CInf one(const ContextPtr &ctx) { return monomial(ctx, ctx->field().one(), 0); }
    static CInf monomial(const ContextPtr &ctx, FFElem c, std::int64_t exp)
    {
        return CInf(ctx, exp, {c}, exact);
    }
    /// theta^n = u^{-e n}.
    static CInf theta_pow(const ContextPtr &ctx, std::int64_t n)
    {
        return monomial(ctx, ctx->field().one(), -n * ctx->e());
    }
    static CInf constant(const ContextPtr &ctx, FFElem c) { return monomial(ctx, c, 0); }
    static CInf from_terms(const ContextPtr &ctx, const std::map<std::int64_t, FFElem> &terms,
                           std::int64_t prec = exact)
    {
        if (terms.empty()) {
            return prec >= exact ? zero(ctx) : zero(ctx, prec);
        }
        const std::int64_t lo = terms.begin()->first;
        const std::int64_t hi = std::min(terms.rbegin()->first + 1, prec);
        std::vector<FFElem> c(hi > lo ? static_cast<std::size_t>(hi - lo) : 0);
        for (const auto &[k, v] : terms) {
            if (k < hi) {
                c[static_cast<std::size_t>(k - lo)] = ctx->field().add(c[static_cast<std::size_t>(k - lo)], v);
            }
        }
        return CInf(ctx, lo, std::move(c), prec);
    }

    const ContextPtr &context() const { return ctx_; }
    const Field &field() const { return ctx_->field(); }

    bool is_exact() const { return prec_ >= exact; }
    std::int64_t abs_prec() const { return prec_; }
    /// True when no coefficient is certified nonzero.
    bool is_zero() const { return c_.empty(); }
    bool certified_nonzero() const { return !c_.empty(); }
    /// Valuation of the leading term; for a value that is zero within precision this
    /// is the precision, a lower bound for the true valuation.
    std::int64_t val() const { return val_; }
    /// e * log_q of the norm, i.e. -val. Only meaningful for nonzero values.
    std::int64_t lognorm() const { return -val_; }
    /// log_q of the norm, or nullopt for zero within precision.
    std::optional<double> log_q_norm() const
    {
        if (is_zero()) {
            return std::nullopt;
        }
        return -static_cast<double>(val_) / ctx_->e();
    }
    /// Norm q^{-v/e}; zero within precision gives 0.
    double norm() const
    {
        if (is_zero()) {
            return 0.0;
        }
        return std::pow(static_cast<double>(ctx_->q()), -static_cast<double>(val_) / ctx_->e());
    }
    FFElem leading() const { return c_.empty() ? FFElem{} : c_.front(); }
    FFElem coeff(std::int64_t k) const
    {
        if (c_.empty() || k < val_ || k >= val_ + static_cast<std::int64_t>(c_.size())) {
            return FFElem{};
        }
        return c_[static_cast<std::size_t>(k - val_)];
    }
    /// One past the highest stored exponent.
    std::int64_t end_exp() const { return c_.empty() ? val_ : val_ + static_cast<std::int64_t>(c_.size()); }
    const std::vector<FFElem> &dense() const { return c_; }
    std::vector<std::pair<std::int64_t, FFElem>> terms() const
    {
        std::vector<std::pair<std::int64_t, FFElem>> out;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (!c_[i].is_zero()) {
                out.emplace_back(val_ + static_cast<std::int64_t>(i), c_[i]);
            }
        }
        return out;
    }

    /// The same series over another context with the same field (applies its cap).
    CInf rebased(const ContextPtr &ctx) const
    {
        if (ctx->field().size() != field().size() || ctx->q() != ctx_->q()) {
            throw config_mismatch("rebase across different residue fields");
        }
        return CInf(ctx, val_, c_, prec_);
    }

    /// Drop every term at or above u^p.
    CInf truncated(std::int64_t p) const
    {
        CInf r = *this;
        r.prec_ = std::min(r.prec_, p);
        r.normalize();
        return r;
    }
    /// Multiply by u^k.
    CInf shifted(std::int64_t k) const
    {
        CInf r = *this;
        if (!r.is_exact()) {
            r.prec_ = detail::sat_add(r.prec_, k);
        }
        if (!r.c_.empty() || !r.is_exact()) {
            r.val_ = detail::sat_add(r.val_, k);
        }
        return r;
    }

    friend CInf operator+(const CInf &x, const CInf &y) { return combine(x, y, false); }
    friend CInf operator-(const CInf &x, const CInf &y) { return combine(x, y, true); }
    CInf operator-() const
    {
        CInf r = *this;
        for (auto &c : r.c_) {
            c = field().neg(c);
        }
        return r;
    }
    CInf &operator+=(const CInf &y) { return *this = *this + y; }
    CInf &operator-=(const CInf &y) { return *this = *this - y; }
    CInf &operator*=(const CInf &y) { return *this = *this * y; }

    CInf scaled(FFElem a) const
    {
        if (a.is_zero()) {
            return zero(ctx_);
        }
        CInf r = *this;
        for (auto &c : r.c_) {
            c = field().mul(c, a);
        }
        return r;
    }

    friend CInf operator*(const CInf &x, const CInf &y)
    {
        check_same(x.ctx_, y.ctx_);
        const auto &F = x.field();
        if ((x.is_zero() && x.is_exact()) || (y.is_zero() && y.is_exact())) {
            return zero(x.ctx_);
        }
        const std::int64_t p1 = x.is_exact() ? exact : detail::sat_add(x.prec_, y.val_);
        const std::int64_t p2 = y.is_exact() ? exact : detail::sat_add(y.prec_, x.val_);
        const std::int64_t prec = std::min(p1, p2);
        if (x.is_zero() || y.is_zero()) {
            return zero(x.ctx_, prec);
        }
        const std::int64_t val = x.val_ + y.val_;
        std::int64_t len = static_cast<std::int64_t>(x.c_.size() + y.c_.size() - 1);
        if (prec < exact) {
            len = std::min(len, prec - val);
        }
        len = std::min(len, x.ctx_->cap() + 1);
        if (len <= 0) {
            return zero(x.ctx_, prec);
        }
        std::vector<FFElem> out(static_cast<std::size_t>(len));
        const std::size_t ny = y.c_.size();
        for (std::size_t i = 0; i < x.c_.size() && static_cast<std::int64_t>(i) < len; ++i) {
            const FFElem a = x.c_[i];
            if (a.is_zero()) {
                continue;
            }
            const std::size_t lim = std::min(ny, static_cast<std::size_t>(len) - i);
            for (std::size_t j = 0; j < lim; ++j) {
                if (!y.c_[j].is_zero()) {
                    out[i + j] = F.add(out[i + j], F.mul(a, y.c_[j]));
                }
            }
        }
        // A product whose exact expansion was cut by the cap is no longer exact.
        std::int64_t p = prec;
        if (p >= exact && len < static_cast<std::int64_t>(x.c_.size() + y.c_.size() - 1)) {
            p = val + len;
        }
        return CInf(x.ctx_, val, std::move(out), p);
    }

    /// Multiplicative inverse; the relative precision of the result is that of x.
    CInf inv() const
    {
        if (is_zero()) {
            throw precision_error("inverse of a value indistinguishable from zero");
        }
        const auto &F = field();
        if (c_.size() == 1 && is_exact()) {
            return monomial(ctx_, F.inv(c_[0]), -val_);
        }
        std::int64_t rp = is_exact() ? ctx_->cap() : prec_ - val_;
        rp = std::min(rp, ctx_->cap());
        const FFElem c0inv = F.inv(c_[0]);
        std::vector<FFElem> y(static_cast<std::size_t>(rp));
        y[0] = c0inv;
        for (std::size_t k = 1; k < y.size(); ++k) {
            FFElem acc{};
            const std::size_t lim = std::min(k, c_.size() - 1);
            for (std::size_t i = 1; i <= lim; ++i) {
                if (!c_[i].is_zero() && !y[k - i].is_zero()) {
                    acc = F.add(acc, F.mul(c_[i], y[k - i]));
                }
            }
            y[k] = F.neg(F.mul(acc, c0inv));
        }
        return CInf(ctx_, -val_, std::move(y), -val_ + rp);
    }

    friend CInf operator/(const CInf &x, const CInf &y) { return x * y.inv(); }

    /// x -> x^{q^k}: coefficients through the field Frobenius, exponents and precision
    /// scaled by q^k.
    CInf frobenius(std::int64_t k) const
    {
        if (k == 0) {
            return *this;
        }
        const auto &F = field();
        const detail::i128 Q = detail::pow128(ctx_->q(), k);
        auto scale = [&](std::int64_t x) -> std::int64_t {
            if (x >= exact) {
                return exact;
            }
            const detail::i128 r = static_cast<detail::i128>(x) * Q;
            if (Q >= detail::k_i128_big || r >= exact || r <= -exact) {
                if (x > 0) {
                    return exact;
                }
                if (x == 0) {
                    return 0;
                }
                throw precision_error("Frobenius power overflows the exponent range");
            }
            return static_cast<std::int64_t>(r);
        };
        if (c_.empty()) {
            return is_exact() ? *this : zero(ctx_, scale(prec_));
        }
        const std::int64_t nv = scale(val_);
        const std::int64_t np = is_exact() ? exact : scale(prec_);
        std::map<std::int64_t, FFElem> t;
        const std::int64_t window = ctx_->cap() + 1;
        bool cut = false;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) {
                continue;
            }
            const detail::i128 off = static_cast<detail::i128>(i) * Q;
            if (off >= window) {
                cut = true;
                break;
            }
            t[nv + static_cast<std::int64_t>(off)] = F.frobenius(c_[i], static_cast<std::uint64_t>(k));
        }
        std::int64_t p = np;
        if (cut) {
            p = std::min(p, nv + window);
        }
        return from_terms(ctx_, t, p);
    }

    CInf pow(std::uint64_t n) const
    {
        CInf r = one(ctx_);
        CInf b = *this;
        while (n > 0) {
            if (n & 1u) {
                r = r * b;
            }
            n >>= 1u;
            if (n > 0) {
                b = b * b;
            }
        }
        return r;
    }

    /// Equal within the precision of both operands.
    bool equal_within(const CInf &y) const { return (*this - y).is_zero(); }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        if (is_zero()) {
            j["val"] = nullptr;
        } else {
            j["val"] = val_;
        }
        if (is_exact()) {
            j["exact"] = true;
        } else {
            j["abs_prec"] = prec_;
        }
        auto arr = nlohmann::json::array();
        for (const auto &[k, c] : terms()) {
            arr.push_back({k, c.v});
        }
        j["terms"] = arr;
        return j;
    }

    std::string to_string() const
    {
        if (is_zero()) {
            return is_exact() ? "0" : "O(u^" + std::to_string(prec_) + ")";
        }
        std::string s;
        for (const auto &[k, c] : terms()) {
            if (!s.empty()) {
                s += " + ";
            }
            s += field().to_string(c) + "*u^" + std::to_string(k);
        }
        if (!is_exact()) {
            s += " + O(u^" + std::to_string(prec_) + ")";
        }
        return s;
    }

private:
    static CInf combine(const CInf &x, const CInf &y, bool subtract)
    {
        check_same(x.ctx_, y.ctx_);
        const auto &F = x.field();
        const std::int64_t prec = std::min(x.prec_, y.prec_);
        if (x.c_.empty() && y.c_.empty()) {
            return prec >= exact ? zero(x.ctx_) : zero(x.ctx_, prec);
        }
        std::int64_t lo = exact;
        std::int64_t hi = -exact;
        for (const CInf *z : {&x, &y}) {
            if (!z->c_.empty()) {
                lo = std::min(lo, z->val_);
                hi = std::max(hi, z->end_exp());
            }
        }
        hi = std::min(hi, prec);
        if (hi <= lo) {
            return zero(x.ctx_, prec);
        }
        std::vector<FFElem> out(static_cast<std::size_t>(hi - lo));
        for (std::size_t i = 0; i < x.c_.size(); ++i) {
            const std::int64_t k = x.val_ + static_cast<std::int64_t>(i);
            if (k >= hi) {
                break;
            }
            out[static_cast<std::size_t>(k - lo)] = x.c_[i];
        }
        for (std::size_t i = 0; i < y.c_.size(); ++i) {
            const std::int64_t k = y.val_ + static_cast<std::int64_t>(i);
            if (k >= hi) {
                break;
            }
            auto &o = out[static_cast<std::size_t>(k - lo)];
            o = subtract ? F.sub(o, y.c_[i]) : F.add(o, y.c_[i]);
        }
        return CInf(x.ctx_, lo, std::move(out), prec);
    }

    void normalize()
    {
        if (prec_ < exact && !c_.empty()) {
            const std::int64_t keep = prec_ - val_;
            if (keep <= 0) {
                c_.clear();
            } else if (keep < static_cast<std::int64_t>(c_.size())) {
                c_.resize(static_cast<std::size_t>(keep));
            }
        }
        std::size_t first = 0;
        while (first < c_.size() && c_[first].is_zero()) {
            ++first;
        }
        if (first == c_.size()) {
            c_.clear();
            val_ = prec_;
            return;
        }
        if (first > 0) {
            c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(first));
            val_ += static_cast<std::int64_t>(first);
        }
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
        const std::int64_t cap = ctx_->cap();
        if (static_cast<std::int64_t>(c_.size()) > cap) {
            c_.resize(static_cast<std::size_t>(cap));
            prec_ = std::min(prec_, val_ + cap);
            while (!c_.empty() && c_.back().is_zero()) {
                c_.pop_back();
            }
        } else if (prec_ < exact) {
            prec_ = std::min(prec_, val_ + cap);
        }
    }

    ContextPtr ctx_;
    std::int64_t val_ = exact;
    std::vector<FFElem> c_;
    std::int64_t prec_ = exact;
};

/// Running sum of many scalars with a common context, without reallocating per term.
class CInfSum {
public:
    explicit CInfSum(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    void add_scaled(FFElem a, const CInf &x)
    {
        check_same(ctx_, x.context());
        prec_ = std::min(prec_, x.abs_prec());
        if (a.is_zero() || x.is_zero()) {
            return;
        }
        const auto &F = ctx_->field();
        const std::int64_t lo = x.val();
        const std::int64_t hi = x.end_exp();
        reserve(lo, hi);
        const auto &c = x.dense();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_zero()) {
                auto &o = buf_[static_cast<std::size_t>(lo - base_) + i];
                o = F.add(o, F.mul(a, c[i]));
            }
        }
    }
    void add(const CInf &x) { add_scaled(ctx_->field().one(), x); }
    void merge(const CInfSum &o)
    {
        prec_ = std::min(prec_, o.prec_);
        if (o.buf_.empty()) {
            return;
        }
        reserve(o.base_, o.base_ + static_cast<std::int64_t>(o.buf_.size()));
        const auto &F = ctx_->field();
        for (std::size_t i = 0; i < o.buf_.size(); ++i) {
            auto &t = buf_[static_cast<std::size_t>(o.base_ - base_) + i];
            t = F.add(t, o.buf_[i]);
        }
    }
    /// Fold in an extra error term: the result is only known modulo u^p.
    void limit_prec(std::int64_t p) { prec_ = std::min(prec_, p); }

    CInf value() const
    {
        if (buf_.empty()) {
            return prec_ >= CInf::exact ? CInf::zero(ctx_) : CInf::zero(ctx_, prec_);
        }
        // Normalization applies the relative cap, which may turn an exact sum inexact
        // only if its support is wider than the working precision.
        return CInf(ctx_, base_, buf_, prec_);
    }

private:
    void reserve(std::int64_t lo, std::int64_t hi)
    {
        if (buf_.empty()) {
            base_ = lo;
            buf_.assign(static_cast<std::size_t>(hi - lo), FFElem{});
            return;
        }
        if (lo < base_) {
            buf_.insert(buf_.begin(), static_cast<std::size_t>(base_ - lo), FFElem{});
            base_ = lo;
        }
        const std::int64_t end = base_ + static_cast<std::int64_t>(buf_.size());
        if (hi > end) {
            buf_.resize(buf_.size() + static_cast<std::size_t>(hi - end));
        }
    }

    ContextPtr ctx_;
    std::int64_t base_ = 0;
    std::vector<FFElem> buf_;
    std::int64_t prec_ = CInf::exact;
};

} // namespace drinfeld
