#include <catch_amalgamated.hpp>

#include <drinfeld/verify.hpp>

using namespace drinfeld;

namespace {

Pipeline make_pipeline(int r, int D = 6, int B = 8)
{
    GroundConfig g;
    g.p = 3;
    g.e = r;
    g.N = r == 1 ? 60 : (r == 2 ? 80 : 90);
    auto c = Context::make(g);
    std::vector<CInf> basis{CInf::one(c)};
    for (int i = 1; i < r; ++i) {
        basis.push_back(CInf::monomial(c, c->field().one(), -i));
    }
    Pipeline::Options o;
    o.D = D;
    o.B = B;
    o.threads = 2;
    o.label = "test";
    return Pipeline(Lattice::certify(c, basis), o);
}

CInf theta_inv(const Pipeline &P, int k = 1) { return CInf::theta_pow(P.context(), -k); }

} // namespace

TEST_CASE("report semantics")
{
    Report r;
    r.floor = -20;
    r.bound = -30;
    r.residual = -40;
    CHECK(r.pass());
    r.residual = -25;
    CHECK(r.failed());
    CHECK_FALSE(r.pass());
    r.residual.reset();
    r.bound = -10;
    CHECK(r.inconclusive());
    CHECK_FALSE(r.pass());
    const auto j = r.to_json();
    CHECK(j["residual_logq"].is_null());
    CHECK(j["inconclusive"] == true);
    CHECK(exit_code({r}) == 2);
}

TEST_CASE("pairing checks pass on the standard lattices")
{
    auto P1 = make_pipeline(1);
    const auto m1 = check_main_identity(P1, -20);
    INFO(m1.to_json().dump());
    CHECK(m1.pass());
    CHECK_THROWS_AS(check_twist_vanishing(P1, 1, -20), domain_error);

    auto P2 = make_pipeline(2);
    CHECK(check_main_identity(P2, -20).pass());
    const auto t = check_twist_vanishing(P2, 1, -20);
    INFO(t.to_json().dump());
    CHECK(t.pass());
}

TEST_CASE("ev_pair")
{
    auto P = make_pipeline(1, 4);
    const auto P0 = ev_pair(P.zeta(), P.omega(), 0);
    const auto direct = tate_mul(P.omega()[0], P.zeta()[0].zeta);
    for (int j = 0; j <= 4; ++j) {
        CHECK(P0[j].equal_within(direct[j]));
    }
    // Bilinearity in zeta.
    auto z2 = P.zeta();
    const CInf c = CInf::theta_pow(P.context(), 2);
    z2[0].zeta = z2[0].zeta.scaled(c);
    const auto Pc = ev_pair(z2, P.omega(), 0);
    for (int j = 0; j <= 4; ++j) {
        CHECK(Pc[j].equal_within(c * P0[j]));
    }
}

TEST_CASE("sensitivity: corrupted zeta fails")
{
    for (int j : {0, 2, 5}) {
        auto P = make_pipeline(1);
        P.corrupt_zeta(0, j);
        const auto rep = check_main_identity(P, -20);
        INFO(rep.to_json().dump());
        CHECK(rep.failed());
    }
    auto P2 = make_pipeline(2);
    P2.corrupt_zeta(1, 3);
    CHECK(check_main_identity(P2, -20).failed());
}

TEST_CASE("sensitivity: corrupted omega fails")
{
    for (int j : {0, 3}) {
        auto P = make_pipeline(2);
        P.corrupt_omega(0, j);
        CHECK(check_main_identity(P, -20).failed());
        CHECK(check_special_equation(P, -20).failed());
    }
    auto P1 = make_pipeline(1);
    P1.corrupt_omega(0, 1);
    CHECK(check_invertibility(P1, -20).failed());
}

TEST_CASE("identities")
{
    auto P1 = make_pipeline(1);
    const auto &F = P1.context()->field();
    const auto i1 = check_identity1(P1, {F.one()}, -20);
    INFO(i1.to_json().dump());
    CHECK(i1.pass());
    const auto i2 = check_identity2(P1, theta_inv(P1), -20);
    INFO(i2.to_json().dump());
    CHECK(i2.pass());
    CHECK_THROWS_AS(check_identity3(P1, theta_inv(P1), 1, -20), domain_error);
    CHECK_THROWS_AS(check_identity2(P1, CInf::zero(P1.context()), -20), domain_error);

    auto P2 = make_pipeline(2);
    const auto &F2 = P2.context()->field();
    for (const auto &rep : {check_identity1(P2, {F2.one()}, -20), check_identity2(P2, theta_inv(P2), -20),
                            check_identity3(P2, theta_inv(P2), 1, -20), check_identity3(P2, theta_inv(P2, 2), 2, -20)}) {
        INFO(rep.to_json().dump());
        CHECK(rep.pass());
    }
    CHECK_THROWS_AS(check_identity3(P2, theta_inv(P2), 2, -20), domain_error);
}

TEST_CASE("pellarin, invertibility, determinant, pipelines")
{
    auto P1 = make_pipeline(1, 8);
    for (const auto &rep : check_pellarin(P1, 6, -20)) {
        INFO(rep.to_json().dump());
        CHECK(rep.pass());
    }
    const auto small = check_pellarin(P1, 0, -20);
    INFO(small[0].to_json().dump());
    CHECK(small[0].inconclusive());
    CHECK(check_invertibility(P1, -20).pass());
    CHECK(check_determinant(P1, -20).pass());
    for (const auto &rep : check_exp_pipelines(P1, -20)) {
        INFO(rep.to_json().dump());
        CHECK(rep.pass());
    }
    CHECK(check_special_equation(P1, -20).pass());
    CHECK(check_dual_equation(P1, -20).pass());

    auto P2 = make_pipeline(2, 6);
    CHECK(check_determinant(P2, -20).pass());
    for (const auto &rep : check_exp_pipelines(P2, -20)) {
        INFO(rep.to_json().dump());
        CHECK(rep.pass());
    }
}

TEST_CASE("monotonicity in the span depth")
{
    auto a = make_pipeline(2, 4, 6);
    auto b = make_pipeline(2, 4, 9);
    const auto ra = check_identity2(a, theta_inv(a), -20);
    const auto rb = check_identity2(b, theta_inv(b), -20);
    CHECK(rb.bound <= ra.bound);
    CHECK((!ra.pass() || rb.pass()));
}
