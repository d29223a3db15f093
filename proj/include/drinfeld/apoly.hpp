#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalars.hpp"

namespace drinfeld {

/// Element of A = F_q[theta]. Coefficients live in the F_q subfield of the residue field.
class APoly {
public:
    APoly() = default;
    explicit APoly(std::vector<FFElem> coeffs) : c_(std::move(coeffs)) { trim(); }

    static APoly constant(FFElem c) { return APoly({c}); }
    static APoly theta() { return APoly({FFElem{0}, FFElem{1}}); }
    static APoly theta_pow(int n)
    {
        std::vector<FFElem> c(static_cast<std::size_t>(n) + 1);
        c.back() = FFElem{1};
        return APoly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    /// Degree, -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    FFElem coeff(int i) const
    {
        return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)] : FFElem{};
    }
    const std::vector<FFElem> &coeffs() const { return c_; }

    APoly add(const APoly &b, const Field &F) const
    {
        std::vector<FFElem> r(std::max(c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = F.add(coeff(static_cast<int>(i)), b.coeff(static_cast<int>(i)));
        }
        return APoly(std::move(r));
    }
    APoly sub(const APoly &b, const Field &F) const
    {
        std::vector<FFElem> r(std::max(c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = F.sub(coeff(static_cast<int>(i)), b.coeff(static_cast<int>(i)));
        }
        return APoly(std::move(r));
    }
    APoly mul(const APoly &b, const Field &F) const
    {
        if (is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<FFElem> r(c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                r[i + j] = F.add(r[i + j], F.mul(c_[i], b.c_[j]));
            }
        }
        return APoly(std::move(r));
    }

    /// The image of a in C_inf, an exact value.
    CInf to_cinf(const ContextPtr &ctx) const
    {
        std::map<std::int64_t, FFElem> t;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (!c_[i].is_zero()) {
                t[-static_cast<std::int64_t>(i) * ctx->e()] = c_[i];
            }
        }
        return CInf::from_terms(ctx, t);
    }

    /// Every nonzero polynomial of degree <= d, in a fixed order (base-q counting).
    static std::vector<APoly> enumerate_nonzero(int d, const Field &F)
    {
        const auto &fq = F.subfield_elements();
        const std::size_t q = fq.size();
        std::size_t total = 1;
        for (int i = 0; i <= d; ++i) {
            total *= q;
        }
        std::vector<APoly> out;
        out.reserve(total - 1);
        for (std::size_t code = 1; code < total; ++code) {
            std::vector<FFElem> c(static_cast<std::size_t>(d) + 1);
            std::size_t x = code;
            for (int i = 0; i <= d; ++i) {
                c[static_cast<std::size_t>(i)] = fq[x % q];
                x /= q;
            }
            out.emplace_back(std::move(c));
        }
        return out;
    }

    friend bool operator==(const APoly &, const APoly &) = default;

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
    }

    std::vector<FFElem> c_;
};

/// a * dtheta, an element of the rank-one A-module of differentials.
struct DifferentialForm {
    APoly multiplier;
};

/// Coefficient of theta^{-1} of a value that is an F_q-Laurent series in theta.
inline FFElem residue(const CInf &h)
{
    const auto &ctx = h.context();
    const int e = ctx->e();
    const auto &F = ctx->field();
    for (const auto &[k, c] : h.terms()) {
        if (k % e != 0 || !F.in_subfield(c)) {
            throw domain_error("residue: value is not an F_q-Laurent series in theta");
        }
    }
    if (h.abs_prec() <= e) {
        throw precision_error("residue: theta^-1 coefficient lies beyond the known precision");
    }
    return h.coeff(e);
}

/// Residue pairing of a form a*dtheta with a Laurent expansion h: res(a*h*dtheta).
inline FFElem residue_pairing(const DifferentialForm &w, const CInf &h)
{
    return residue(w.multiplier.to_cinf(h.context()) * h);
}

} // namespace drinfeld
