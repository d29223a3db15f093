#include <catch_amalgamated.hpp>

#include <drinfeld/module.hpp>

using namespace drinfeld;

namespace {

ContextPtr make_ctx(int e, std::int64_t N)
{
    GroundConfig g;
    g.p = 3;
    g.e = e;
    g.N = N;
    return Context::make(g);
}

CInf theta(const ContextPtr &c, int n = 1) { return CInf::theta_pow(c, n); }

} // namespace

TEST_CASE("phi_of")
{
    auto c = make_ctx(1, 40);
    const auto C = DrinfeldModule::carlitz(c);
    const auto p1 = phi_of(C, APoly::theta());
    REQUIRE(p1.degree() == 1);
    CHECK(p1.coeff(0).equal_within(theta(c)));
    CHECK(p1.coeff(1).equal_within(CInf::one(c)));
    const auto one = phi_of(C, APoly::constant(FFElem{1}));
    CHECK(one.degree() == 0);
    CHECK(one.coeff(0).equal_within(CInf::one(c)));
    const auto p2 = phi_of(C, APoly::theta_pow(2));
    REQUIRE(p2.degree() == 2);
    CHECK(p2.coeff(0).equal_within(theta(c, 2)));
    CHECK(p2.coeff(1).equal_within(theta(c, 3) + theta(c)));
    CHECK(p2.coeff(2).equal_within(CInf::one(c)));
}

TEST_CASE("homomorphism and degree law")
{
    auto c = make_ctx(2, 40);
    const auto &F = c->field();
    const CInf uinv = CInf::monomial(c, F.one(), -1);
    const DrinfeldModule phi(c, {uinv + CInf::one(c), theta(c, -1)});
    const APoly a({FFElem{1}, FFElem{2}, FFElem{1}});
    const APoly b({FFElem{2}, FFElem{0}, FFElem{0}, FFElem{1}});
    const auto lhs = phi_of(phi, a.mul(b, F));
    const auto rhs = twisted_mul(phi_of(phi, a), phi_of(phi, b));
    CHECK(lhs.equal_within(rhs));
    CHECK(lhs.degree() == 2 * 5);
    CHECK(phi_of(phi, a).degree() == 2 * 2);

    // phi_{ab}(f) = phi_a(phi_b(f)) on Tate series.
    TateSeries f(c, 3);
    f[0] = theta(c, -1);
    f[1] = uinv;
    f[3] = CInf::one(c);
    const auto l = phi_action(phi, a.mul(b, F), f);
    const auto r = phi_action(phi, a, phi_action(phi, b, f));
    for (int j = 0; j <= 3; ++j) {
        CHECK(l[j].equal_within(r[j]));
    }
}

TEST_CASE("exp from module")
{
    auto c = make_ctx(1, 60);
    const auto C = DrinfeldModule::carlitz(c);
    const auto ex = exp_from_module(C, 6);
    CHECK(ex.coeff(0).equal_within(CInf::one(c)));
    CHECK((ex.coeff(1) * (theta(c, 3) - theta(c))).equal_within(CInf::one(c)));
    // phi_theta o exp - exp o theta vanishes through tau^6.
    const auto lhs = twisted_mul(C.phi_theta(), ex);
    const auto rhs = twisted_mul(ex, TwistedSeries::constant(theta(c)));
    CHECK(lhs.equal_within(rhs));
}

TEST_CASE("two pipelines for the exponential")
{
    for (int e : {1, 2}) {
        auto c = make_ctx(e, e == 1 ? 60 : 80);
        std::vector<CInf> basis{CInf::one(c)};
        if (e == 2) {
            basis.push_back(CInf::monomial(c, c->field().one(), -1));
        }
        const auto L = Lattice::certify(c, basis);
        const auto mfl = module_from_lattice(L, 8, c->cap());
        CHECK(mfl.detected_rank == e);
        for (int k = e + 1; k <= 8; ++k) {
            CHECK(2 * mfl.b[static_cast<std::size_t>(k - 1)].val() > c->cap());
        }
        const auto ex = exp_from_module(mfl.module, 8);
        for (int k = 1; k <= 6; ++k) {
            const CInf d = ex.coeff(k) - mfl.exp.e[static_cast<std::size_t>(k)];
            INFO("e=" << e << " k=" << k << " diff " << d.to_string());
            CHECK(d.is_zero());
        }
        // Kernel: exp vanishes on small lattice elements.
        const auto series = mfl.exp.series();
        for (const auto &el : enumerate_up_to(L, 2 * e)) {
            CHECK(series.apply(el.value).is_zero());
        }
    }
}

TEST_CASE("dual relation")
{
    auto c = make_ctx(1, 40);
    const auto C = DrinfeldModule::carlitz(c);
    TateSeries z(c, 4);
    CHECK_FALSE(dual_relation_residual(C, z).max_lognorm().has_value());
    // Rank 1: theta^q zeta^(1) + zeta - t zeta^(1).
    z[0] = theta(c, -1);
    z[2] = theta(c, -3);
    const auto r = dual_relation_residual(C, z);
    const auto z1 = z.twist(1);
    const auto expect = z1.scaled(theta(c, 3)) + z - z1.times_t();
    for (int j = 0; j <= 4; ++j) {
        CHECK(r[j].equal_within(expect[j]));
    }
}
