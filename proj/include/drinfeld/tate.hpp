#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalars.hpp"
#include "twisted.hpp"

namespace drinfeld {

/// sum_{j<=D} c_j t^j in the Tate algebra, truncated at t-degree D.
class TateSeries {
public:
    TateSeries() = default;
    TateSeries(ContextPtr ctx, int D) : ctx_(std::move(ctx)), c_(static_cast<std::size_t>(D) + 1, CInf::zero(ctx_)) {}
    TateSeries(ContextPtr ctx, std::vector<CInf> coeffs) : ctx_(std::move(ctx)), c_(std::move(coeffs))
    {
        if (c_.empty()) {
            throw domain_error("Tate series needs at least one coefficient");
        }
    }

    static TateSeries one(const ContextPtr &ctx, int D)
    {
        TateSeries r(ctx, D);
        r.c_[0] = CInf::one(ctx);
        return r;
    }
    /// The variable t.
    static TateSeries t(const ContextPtr &ctx, int D)
    {
        TateSeries r(ctx, D);
        if (D >= 1) {
            r.c_[1] = CInf::one(ctx);
        }
        return r;
    }

    const ContextPtr &context() const { return ctx_; }
    int D() const { return static_cast<int>(c_.size()) - 1; }
    const CInf &operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
    CInf &operator[](int j) { return c_[static_cast<std::size_t>(j)]; }
    const std::vector<CInf> &coeffs() const { return c_; }

    friend TateSeries operator+(const TateSeries &f, const TateSeries &g)
    {
        const int D = std::min(f.D(), g.D());
        TateSeries r(f.ctx_, D);
        for (int j = 0; j <= D; ++j) {
            r[j] = f[j] + g[j];
        }
        return r;
    }
    friend TateSeries operator-(const TateSeries &f, const TateSeries &g)
    {
        const int D = std::min(f.D(), g.D());
        TateSeries r(f.ctx_, D);
        for (int j = 0; j <= D; ++j) {
            r[j] = f[j] - g[j];
        }
        return r;
    }
    TateSeries scaled(const CInf &a) const
    {
        TateSeries r = *this;
        for (auto &c : r.c_) {
            c = a * c;
        }
        return r;
    }
    /// t * f, truncated at the same degree.
    TateSeries times_t() const
    {
        TateSeries r(ctx_, D());
        for (int j = 1; j <= D(); ++j) {
            r[j] = c_[static_cast<std::size_t>(j - 1)];
        }
        return r;
    }
    /// (theta - t) * f.
    TateSeries times_theta_minus_t() const { return scaled(CInf::theta_pow(ctx_, 1)) - times_t(); }

    /// Applies frobenius(., k) to each coefficient; t is fixed.
    TateSeries twist(int k) const
    {
        TateSeries r = *this;
        for (auto &c : r.c_) {
            c = c.frobenius(k);
        }
        return r;
    }

    /// Applies a twisted polynomial to each coefficient.
    TateSeries apply(const TwistedSeries &f) const
    {
        TateSeries r = *this;
        for (auto &c : r.c_) {
            c = f.apply(c);
        }
        return r;
    }

    /// Largest coefficient lognorm (u-units), nullopt if every coefficient is zero within
    /// precision.
    std::optional<std::int64_t> max_lognorm() const
    {
        std::optional<std::int64_t> best;
        for (const auto &c : c_) {
            if (!c.is_zero()) {
                best = std::max(best.value_or(c.lognorm()), c.lognorm());
            }
        }
        return best;
    }
    /// Smallest absolute precision over all coefficients.
    std::int64_t precision_floor() const
    {
        std::int64_t p = CInf::exact;
        for (const auto &c : c_) {
            p = std::min(p, c.abs_prec());
        }
        return p;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["D"] = D();
        const auto pf = precision_floor();
        if (pf >= CInf::exact) {
            j["precision_floor"] = nullptr;
        } else {
            j["precision_floor"] = pf;
        }
        auto arr = nlohmann::json::array();
        for (const auto &c : c_) {
            arr.push_back(c.to_json());
        }
        j["coeffs"] = arr;
        return j;
    }

private:
    ContextPtr ctx_;
    std::vector<CInf> c_;
};

/// Cauchy product truncated at the smaller degree.
inline TateSeries tate_mul(const TateSeries &f, const TateSeries &g)
{
    check_same(f.context(), g.context());
    const int D = std::min(f.D(), g.D());
    TateSeries r(f.context(), D);
    for (int k = 0; k <= D; ++k) {
        CInf acc = CInf::zero(f.context());
        for (int i = 0; i <= k; ++i) {
            acc += f[i] * g[k - i];
        }
        r[k] = acc;
    }
    return r;
}

inline TateSeries tate_twist(const TateSeries &f, int k) { return f.twist(k); }

/// Result of the unit test for a truncated Tate series.
struct UnitCertificate {
    bool is_unit = false;
    /// Degree up to which ||c_0|| > ||c_j|| was checked.
    int verified_degree = 0;
    bool strictly_decreasing = false;
    std::string note;
};

/// ||c_0|| > ||c_j|| for 1 <= j <= D. Dominance is only checked on stored coefficients.
inline UnitCertificate tate_is_unit(const TateSeries &f)
{
    UnitCertificate cert;
    cert.verified_degree = f.D();
    cert.note = "dominance verified up to degree " + std::to_string(f.D());
    if (f[0].is_zero()) {
        cert.note = "constant term indistinguishable from zero";
        return cert;
    }
    const std::int64_t v0 = f[0].val();
    bool dominant = true;
    for (int j = 1; j <= f.D(); ++j) {
        // A zero coefficient is below c_0 only if its precision says so.
        if (f[j].val() <= v0) {
            dominant = false;
            cert.note = "coefficient " + std::to_string(j) + " not dominated by the constant term";
            break;
        }
    }
    cert.is_unit = dominant;
    bool decreasing = true;
    for (int j = 1; j <= f.D(); ++j) {
        if (f[j].is_zero() || f[j].val() <= f[j - 1].val()) {
            decreasing = false;
            break;
        }
    }
    cert.strictly_decreasing = decreasing;
    return cert;
}

/// Inverse of a unit: with f = c_0 (1 - g), 1/f = c_0^{-1} sum_n g^n. Since g has no
/// constant term, the geometric sum is finite in the truncated ring.
inline TateSeries tate_invert_unit(const TateSeries &f)
{
    const auto cert = tate_is_unit(f);
    if (!cert.is_unit) {
        throw precision_error("Tate series is not a certified unit: " + cert.note);
    }
    const auto &ctx = f.context();
    const CInf c0inv = f[0].inv();
    TateSeries g = TateSeries::one(ctx, f.D()) - f.scaled(c0inv);
    g[0] = CInf::zero(ctx);
    TateSeries sum = TateSeries::one(ctx, f.D());
    TateSeries pw = TateSeries::one(ctx, f.D());
    for (int n = 1; n <= f.D(); ++n) {
        pw = tate_mul(pw, g);
        sum = sum + pw;
    }
    return sum.scaled(c0inv);
}

/// Inverse through the recursion c_0 h_k = -sum_{i>=1} c_i h_{k-i}; used as a cross-check.
inline TateSeries tate_inverse_recursive(const TateSeries &f)
{
    const auto &ctx = f.context();
    const CInf c0inv = f[0].inv();
    TateSeries h(ctx, f.D());
    h[0] = c0inv;
    for (int k = 1; k <= f.D(); ++k) {
        CInf acc = CInf::zero(ctx);
        for (int i = 1; i <= k; ++i) {
            acc += f[i] * h[k - i];
        }
        h[k] = -(acc * c0inv);
    }
    return h;
}

} // namespace drinfeld
