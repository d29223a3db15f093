#include <catch_amalgamated.hpp>

#include <random>

#include <drinfeld/scalars.hpp>

using namespace drinfeld;

namespace {

ContextPtr ctx_q3(int e = 1, std::int64_t N = 40, int m = 1)
{
    GroundConfig g;
    g.p = 3;
    g.m = m;
    g.e = e;
    g.N = N;
    return Context::make(g);
}

CInf theta(const ContextPtr &c, std::int64_t n = 1) { return CInf::theta_pow(c, n); }

CInf random_value(const ContextPtr &c, std::mt19937_64 &rng, bool exact)
{
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_int_distribution<int> ex(-8, 8);
    std::uniform_int_distribution<int> co(0, static_cast<int>(c->field().size()) - 1);
    std::map<std::int64_t, FFElem> t;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        t[ex(rng)] = FFElem{static_cast<std::uint16_t>(co(rng))};
    }
    t[ex(rng)] = FFElem{1};
    std::int64_t prec = CInf::exact;
    if (!exact) {
        prec = t.rbegin()->first + 1 + std::uniform_int_distribution<int>(0, 10)(rng);
    }
    return CInf::from_terms(c, t, prec);
}

} // namespace

TEST_CASE("addition")
{
    auto c = ctx_q3();
    const auto &F = c->field();
    CHECK((theta(c) + CInf::zero(c)).equal_within(theta(c)));
    CHECK((theta(c) + (-theta(c))).is_zero());
    CHECK((theta(c) + (-theta(c))).is_exact());
    const CInf a = theta(c) + CInf::one(c);
    const CInf b = theta(c).scaled(F.from_int(2));
    const CInf s = a + b;
    CHECK(s.equal_within(CInf::one(c)));
    CHECK(s.norm() == 1.0);
}

TEST_CASE("multiplication and inverse")
{
    auto c = ctx_q3();
    CHECK((theta(c) * theta(c, -1)).equal_within(CInf::one(c)));
    auto c2 = ctx_q3(2);
    const CInf u = CInf::monomial(c2, c2->field().one(), 1);
    CHECK((u * u).equal_within(theta(c2, -1)));

    // 1/(theta - 1) = theta^-1 + theta^-2 + ...
    const CInf x = theta(c) - CInf::one(c);
    const CInf y = x.inv();
    CHECK_FALSE(y.is_exact());
    CHECK(y.val() == 1);
    for (std::int64_t k = 1; k < y.abs_prec(); ++k) {
        CHECK(y.coeff(k) == FFElem{1});
    }
    const CInf back = x * y;
    CHECK(back.equal_within(CInf::one(c)));
    CHECK(back.abs_prec() >= c->cap() - 1);
    CHECK_THROWS_AS(CInf::zero(c, 5).inv(), precision_error);
}

TEST_CASE("mul precision rule")
{
    auto c = ctx_q3();
    const CInf x = CInf::from_terms(c, {{0, FFElem{1}}, {1, FFElem{2}}}, 5);
    const CInf y = CInf::from_terms(c, {{-2, FFElem{1}}}, 3);
    const CInf p = x * y;
    CHECK(p.abs_prec() == std::min<std::int64_t>(5 + -2, 3 + 0));
}

TEST_CASE("frobenius")
{
    auto c = ctx_q3();
    const CInf x = theta(c) + CInf::one(c);
    CHECK(x.frobenius(0).equal_within(x));
    CHECK(x.frobenius(1).equal_within(theta(c, 3) + CInf::one(c)));
    const CInf y = theta(c, -1) + theta(c, -2).scaled(FFElem{2});
    CHECK((x * y).frobenius(1).equal_within(x.frobenius(1) * y.frobenius(1)));
    CHECK(x.frobenius(1).frobenius(1).equal_within(x.frobenius(2)));
    const CInf z = CInf::from_terms(c, {{1, FFElem{1}}}, 4);
    CHECK(z.frobenius(1).abs_prec() == 12);
}

TEST_CASE("norms")
{
    auto c = ctx_q3();
    CHECK(theta(c, 2).norm() == Catch::Approx(9.0));
    CHECK(CInf::zero(c).norm() == 0.0);
    auto c2 = ctx_q3(2);
    const CInf uinv = CInf::monomial(c2, c2->field().one(), -1);
    CHECK(uinv.norm() == Catch::Approx(std::sqrt(3.0)));
    CHECK(*uinv.log_q_norm() == Catch::Approx(0.5));
}

TEST_CASE("config mismatch")
{
    auto a = ctx_q3(1);
    auto b = ctx_q3(2);
    CHECK_THROWS_AS(theta(a) + theta(b), config_mismatch);
    // Same configuration through a different context object is compatible.
    auto a2 = ctx_q3(1);
    CHECK_NOTHROW(theta(a) + theta(a2));
}

TEST_CASE("ultrametric and multiplicativity fuzz")
{
    std::mt19937_64 rng(12345);
    auto c = ctx_q3(2, 40, 2);
    int violations = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        const CInf x = random_value(c, rng, iter % 2 == 0);
        const CInf y = random_value(c, rng, iter % 3 == 0);
        const CInf s = x + y;
        if (!s.is_zero() && s.val() < std::min(x.val(), y.val())) {
            ++violations;
        }
        if (x.val() != y.val() && s.val() != std::min(x.val(), y.val())) {
            ++violations;
        }
        const CInf p = x * y;
        if (p.is_zero() || p.val() != x.val() + y.val()) {
            ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("precision soundness fuzz")
{
    std::mt19937_64 rng(777);
    auto c = ctx_q3(1, 30);
    std::uniform_int_distribution<int> co(1, 2);
    int violations = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        const CInf x = random_value(c, rng, false);
        const CInf y = random_value(c, rng, false);
        // Perturb x at or above its precision.
        const std::int64_t at = x.abs_prec() + std::uniform_int_distribution<int>(0, 3)(rng);
        const CInf xp = CInf::from_terms(c, [&] {
            std::map<std::int64_t, FFElem> t;
            for (auto [k, v] : x.terms()) {
                t[k] = v;
            }
            t[at] = FFElem{static_cast<std::uint16_t>(co(rng))};
            return t;
        }(), at + 1);
        std::vector<std::pair<CInf, CInf>> outs;
        outs.emplace_back(x + y, xp + y);
        outs.emplace_back(x * y, xp * y);
        outs.emplace_back(x.frobenius(1), xp.frobenius(1));
        if (!x.is_zero()) {
            outs.emplace_back(x.inv(), xp.inv());
        }
        for (const auto &[a, b] : outs) {
            for (std::int64_t k = std::min(a.val(), b.val()); k < a.abs_prec(); ++k) {
                if (a.coeff(k) != b.coeff(k)) {
                    ++violations;
                    break;
                }
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("relative precision cap")
{
    auto c = ctx_q3(1, 10);
    // theta^27 - theta spans 27 digits: no longer exact under a cap of 10.
    const CInf x = theta(c, 27) - theta(c);
    CHECK_FALSE(x.is_exact());
    CHECK(x.abs_prec() == -27 + 10);
    const CInf y = theta(c, 5) - theta(c);
    CHECK(y.is_exact());
}

TEST_CASE("json form")
{
    auto c = ctx_q3();
    const auto j = (theta(c) + CInf::one(c)).to_json();
    CHECK(j["val"] == -1);
    CHECK(j["exact"] == true);
    CHECK(j["terms"].size() == 2);
}
