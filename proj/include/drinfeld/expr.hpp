#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "module.hpp"
#include "scalars.hpp"

namespace drinfeld {

/// Malformed textual input.
class parse_error : public error {
public:
    using error::error;
};

namespace detail {

/// Recursive descent over
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '·')? factor)*
///   factor := '-' factor | atom ('^' int)?
///   atom   := int | 'theta' | 'θ' | 'u' | 'z' | '(' expr ')'
/// Negative exponents are accepted on theta and u only.
class ExprParser {
public:
    ExprParser(const ContextPtr &ctx, std::string s) : ctx_(ctx), s_(std::move(s)) {}

    CInf parse()
    {
        CInf v = expr();
        skip();
        if (i_ != s_.size()) {
            fail("unexpected '" + s_.substr(i_, 1) + "'");
        }
        return v;
    }

private:
    [[noreturn]] void fail(const std::string &why) const
    {
        throw parse_error("malformed expression \"" + s_ + "\" at offset " + std::to_string(i_) + ": " + why);
    }
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
    }
    bool eat(const std::string &tok)
    {
        skip();
        if (s_.compare(i_, tok.size(), tok) == 0) {
            i_ += tok.size();
            return true;
        }
        return false;
    }
    bool at_factor_start()
    {
        skip();
        if (i_ >= s_.size()) {
            return false;
        }
        const char c = s_[i_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '(' || c == 'u' || c == 'z' || c == 't' ||
               s_.compare(i_, 2, "\xCE\xB8") == 0;
    }
    std::int64_t integer()
    {
        skip();
        bool neg = false;
        if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) {
            neg = s_[i_] == '-';
            ++i_;
        }
        if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            fail("integer expected");
        }
        std::int64_t v = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            v = v * 10 + (s_[i_] - '0');
            if (v > (std::int64_t{1} << 40)) {
                fail("integer too large");
            }
            ++i_;
        }
        return neg ? -v : v;
    }

    CInf expr()
    {
        CInf v = term();
        for (;;) {
            if (eat("+")) {
                v = v + term();
            } else if (eat("-")) {
                v = v - term();
            } else {
                return v;
            }
        }
    }
    CInf term()
    {
        CInf v = factor();
        for (;;) {
            if (eat("*") || eat("\xC2\xB7")) {
                v = v * factor();
            } else if (at_factor_start()) {
                v = v * factor();
            } else {
                return v;
            }
        }
    }
    CInf factor()
    {
        if (eat("-")) {
            return -factor();
        }
        skip();
        enum class Kind { theta, u, other } kind = Kind::other;
        CInf base;
        if (eat("(")) {
            base = expr();
            if (!eat(")")) {
                fail("')' expected");
            }
        } else if (eat("theta") || eat("\xCE\xB8")) {
            kind = Kind::theta;
        } else if (eat("u")) {
            kind = Kind::u;
        } else if (eat("z")) {
            base = CInf::constant(ctx_, ctx_->field().generator());
        } else if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            base = CInf::constant(ctx_, ctx_->field().from_int(integer()));
        } else {
            fail("operand expected");
        }
        std::int64_t n = 1;
        if (eat("^")) {
            n = eat("(") ? paren_int() : integer();
        }
        if (kind == Kind::theta) {
            return CInf::theta_pow(ctx_, n);
        }
        if (kind == Kind::u) {
            return CInf::monomial(ctx_, ctx_->field().one(), n);
        }
        if (n < 0) {
            fail("negative exponents are allowed on theta and u only");
        }
        return base.pow(static_cast<std::uint64_t>(n));
    }
    std::int64_t paren_int()
    {
        const std::int64_t n = integer();
        if (!eat(")")) {
            fail("')' expected");
        }
        return n;
    }

    ContextPtr ctx_;
    std::string s_;
    std::size_t i_ = 0;
};

inline std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string &s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

} // namespace detail

inline CInf parse_expr(const ContextPtr &ctx, const std::string &s)
{
    if (detail::trim(s).empty()) {
        throw parse_error("empty expression");
    }
    return detail::ExprParser(ctx, s).parse();
}

/// "pi_1; pi_2; ..." -> certified lattice.
inline Lattice parse_lattice(const ContextPtr &ctx, const std::string &s)
{
    std::vector<CInf> basis;
    for (const auto &part : detail::split(s, ';')) {
        basis.push_back(parse_expr(ctx, part));
    }
    return Lattice::certify(ctx, basis);
}

/// "carlitz" or "a_1, ..., a_r".
inline DrinfeldModule parse_module(const ContextPtr &ctx, const std::string &s)
{
    if (detail::trim(s) == "carlitz") {
        return DrinfeldModule::carlitz(ctx);
    }
    std::vector<CInf> a;
    for (const auto &part : detail::split(s, ',')) {
        a.push_back(parse_expr(ctx, part));
    }
    return DrinfeldModule(ctx, a);
}

/// Comma-separated constants in F_q.
inline std::vector<FFElem> parse_fq_vector(const ContextPtr &ctx, const std::string &s)
{
    std::vector<FFElem> out;
    for (const auto &part : detail::split(s, ',')) {
        const CInf v = parse_expr(ctx, part);
        if (!v.is_exact() || (!v.is_zero() && (v.val() != 0 || v.end_exp() != 1))) {
            throw parse_error("\"" + detail::trim(part) + "\" is not a constant");
        }
        const FFElem c = v.coeff(0);
        if (!ctx->field().in_subfield(c)) {
            throw parse_error("\"" + detail::trim(part) + "\" does not lie in F_q");
        }
        out.push_back(c);
    }
    return out;
}

} // namespace drinfeld
