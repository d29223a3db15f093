#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detail/util.hpp"

namespace drinfeld {

/// Element of the residue field F_{q^m}. The value encodes a polynomial over F_p in
/// base p (digit i is the coefficient of z^i, z a root of the defining polynomial).
struct FFElem {
    std::uint16_t v = 0;

    constexpr bool is_zero() const { return v == 0; }
    friend constexpr bool operator==(FFElem a, FFElem b) { return a.v == b.v; }
    friend constexpr auto operator<=>(FFElem a, FFElem b) { return a.v <=> b.v; }
};

/// The finite field F_{p^n} with n = s*m, carrying its subfield F_q (q = p^s).
///
/// Arithmetic goes through precomputed tables: full addition and multiplication
/// tables for fields of at most 256 elements, log/antilog tables otherwise.
class Field {
public:
    Field(int p, int s, int m) : p_(p), s_(s), m_(m), n_(s * m)
    {
        if (p < 2 || s < 1 || m < 1) {
            throw domain_error("invalid field parameters");
        }
        for (int d = 2; d * d <= p; ++d) {
            if (p % d == 0) {
                throw domain_error("characteristic " + std::to_string(p) + " is not prime");
            }
        }
        std::int64_t size = 1;
        for (int i = 0; i < n_; ++i) {
            size *= p;
            if (size > 65536) {
                throw domain_error("residue field larger than 2^16 elements is not supported");
            }
        }
        size_ = static_cast<std::uint32_t>(size);
        q_ = static_cast<std::uint32_t>(detail::ipow(p, static_cast<unsigned>(s)));
        build();
    }

    int characteristic() const { return p_; }
    std::uint32_t q() const { return q_; }
    std::uint32_t size() const { return size_; }
    int degree() const { return n_; }
    /// Coefficients (low to high, monic) of the defining polynomial over F_p.
    const std::vector<int> &modulus() const { return modulus_; }

    FFElem zero() const { return FFElem{0}; }
    FFElem one() const { return FFElem{1}; }
    /// The class of the integer k (k mod p times 1).
    FFElem from_int(std::int64_t k) const
    {
        std::int64_t r = k % p_;
        if (r < 0) {
            r += p_;
        }
        return FFElem{static_cast<std::uint16_t>(r)};
    }
    /// The root z of the defining polynomial (a primitive element).
    FFElem generator() const { return FFElem{exp_[1]}; }

    FFElem add(FFElem a, FFElem b) const
    {
        if (small_) {
            return FFElem{add_tab_[a.v * size_ + b.v]};
        }
        return FFElem{digit_op(a.v, b.v, false)};
    }
    FFElem sub(FFElem a, FFElem b) const { return add(a, neg(b)); }
    FFElem neg(FFElem a) const { return FFElem{neg_tab_[a.v]}; }
    FFElem mul(FFElem a, FFElem b) const
    {
        if (small_) {
            return FFElem{mul_tab_[a.v * size_ + b.v]};
        }
        if (a.v == 0 || b.v == 0) {
            return zero();
        }
        std::uint32_t l = log_[a.v] + log_[b.v];
        if (l >= size_ - 1) {
            l -= size_ - 1;
        }
        return FFElem{exp_[l]};
    }
    FFElem inv(FFElem a) const
    {
        if (a.v == 0) {
            throw precision_error("inverse of zero in the residue field");
        }
        const std::uint32_t l = log_[a.v];
        return FFElem{exp_[l == 0 ? 0 : size_ - 1 - l]};
    }
    FFElem div(FFElem a, FFElem b) const { return mul(a, inv(b)); }
    FFElem pow(FFElem a, std::uint64_t e) const
    {
        if (e == 0) {
            return one();
        }
        if (a.v == 0) {
            return zero();
        }
        const std::uint64_t l = (static_cast<std::uint64_t>(log_[a.v]) * (e % (size_ - 1))) % (size_ - 1);
        return FFElem{exp_[l]};
    }
    /// x -> x^{q^k}.
    FFElem frobenius(FFElem a, std::uint64_t k) const
    {
        if (a.v == 0 || k == 0) {
            return a;
        }
        if (k == 1) {
            return FFElem{frob_tab_[a.v]};
        }
        // q^k mod (size-1), computed by repeated multiplication.
        std::uint64_t e = 1;
        for (std::uint64_t i = 0; i < k % order_of_q(); ++i) {
            e = (e * q_) % (size_ - 1);
        }
        const std::uint64_t l = (static_cast<std::uint64_t>(log_[a.v]) * e) % (size_ - 1);
        return FFElem{exp_[l]};
    }
    bool in_subfield(FFElem a) const { return frob_tab_[a.v] == a.v; }

    /// The q elements of F_q: 0 first, then powers of a generator of F_q^x.
    const std::vector<FFElem> &subfield_elements() const { return fq_; }
    /// Position of an element of F_q inside subfield_elements().
    std::size_t subfield_index(FFElem a) const { return fq_index_.at(a.v); }

    std::string to_string(FFElem a) const { return std::to_string(a.v); }

private:
    std::uint64_t order_of_q() const { return static_cast<std::uint64_t>(m_); }

    std::uint16_t digit_op(std::uint32_t a, std::uint32_t b, bool) const
    {
        std::uint32_t r = 0;
        std::uint32_t place = 1;
        for (int i = 0; i < n_; ++i) {
            const std::uint32_t da = a % p_;
            const std::uint32_t db = b % p_;
            r += ((da + db) % p_) * place;
            a /= p_;
            b /= p_;
            place *= p_;
        }
        return static_cast<std::uint16_t>(r);
    }

    std::uint32_t times_z(std::uint32_t a, const std::vector<int> &mod) const
    {
        std::vector<int> d(n_ + 1, 0);
        for (int i = 0; i < n_; ++i) {
            d[i + 1] = static_cast<int>(a % p_);
            a /= p_;
        }
        const int top = d[n_];
        for (int i = 0; i < n_; ++i) {
            d[i] = ((d[i] - top * mod[i]) % p_ + p_) % p_;
        }
        std::uint32_t r = 0;
        std::uint32_t place = 1;
        for (int i = 0; i < n_; ++i) {
            r += static_cast<std::uint32_t>(d[i]) * place;
            place *= p_;
        }
        return r;
    }

    // Search the monic polynomials of degree n in lexicographic order for one whose
    // root has multiplicative order size-1.
    void build()
    {
        const std::uint32_t count = size_; // number of monic polys of degree n = p^n
        bool found = false;
        for (std::uint32_t code = 0; code < count && !found; ++code) {
            std::vector<int> mod(n_ + 1, 0);
            std::uint32_t c = code;
            for (int i = 0; i < n_; ++i) {
                mod[i] = static_cast<int>(c % p_);
                c /= p_;
            }
            mod[n_] = 1;
            if (mod[0] == 0) {
                continue;
            }
            std::vector<std::uint16_t> ex(size_ - 1);
            std::uint32_t cur = 1;
            bool ok = true;
            for (std::uint32_t k = 0; k + 1 < size_; ++k) {
                if (k > 0 && cur == 1) {
                    ok = false;
                    break;
                }
                ex[k] = static_cast<std::uint16_t>(cur);
                cur = (n_ == 1) ? static_cast<std::uint32_t>((cur * static_cast<std::uint32_t>((p_ - mod[0]) % p_)) % p_)
                                : times_z(cur, mod);
            }
            if (ok && cur == 1) {
                modulus_ = mod;
                exp_ = ex;
                found = true;
            }
        }
        if (!found) {
            throw domain_error("no primitive polynomial found");
        }
        log_.assign(size_, 0);
        for (std::uint32_t k = 0; k + 1 < size_; ++k) {
            log_[exp_[k]] = k;
        }
        neg_tab_.resize(size_);
        for (std::uint32_t a = 0; a < size_; ++a) {
            std::uint32_t r = 0;
            std::uint32_t place = 1;
            std::uint32_t x = a;
            for (int i = 0; i < n_; ++i) {
                r += ((p_ - x % p_) % p_) * place;
                x /= p_;
                place *= p_;
            }
            neg_tab_[a] = static_cast<std::uint16_t>(r);
        }
        small_ = size_ <= 256;
        if (small_) {
            add_tab_.resize(static_cast<std::size_t>(size_) * size_);
            mul_tab_.resize(static_cast<std::size_t>(size_) * size_);
            for (std::uint32_t a = 0; a < size_; ++a) {
                for (std::uint32_t b = 0; b < size_; ++b) {
                    add_tab_[a * size_ + b] = digit_op(a, b, false);
                    if (a == 0 || b == 0) {
                        mul_tab_[a * size_ + b] = 0;
                    } else {
                        mul_tab_[a * size_ + b] = exp_[(log_[a] + log_[b]) % (size_ - 1)];
                    }
                }
            }
        }
        frob_tab_.resize(size_);
        for (std::uint32_t a = 0; a < size_; ++a) {
            frob_tab_[a] = a == 0 ? 0 : exp_[(static_cast<std::uint64_t>(log_[a]) * q_) % (size_ - 1)];
        }
        fq_.push_back(zero());
        const std::uint32_t step = (size_ - 1) / (q_ - 1);
        for (std::uint32_t j = 0; j + 1 < q_; ++j) {
            fq_.push_back(FFElem{exp_[j * step]});
        }
        fq_index_.assign(size_, static_cast<std::size_t>(-1));
        for (std::size_t i = 0; i < fq_.size(); ++i) {
            fq_index_[fq_[i].v] = i;
        }
    }

    int p_;
    int s_;
    int m_;
    int n_;
    std::uint32_t size_ = 0;
    std::uint32_t q_ = 0;
    bool small_ = false;
    std::vector<int> modulus_;
    std::vector<std::uint16_t> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint16_t> neg_tab_;
    std::vector<std::uint16_t> add_tab_;
    std::vector<std::uint16_t> mul_tab_;
    std::vector<std::uint16_t> frob_tab_;
    std::vector<FFElem> fq_;
    std::vector<std::size_t> fq_index_;
};

} // namespace drinfeld
