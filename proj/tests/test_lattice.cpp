#include <catch_amalgamated.hpp>

#include <drinfeld/lattice.hpp>

using namespace drinfeld;

namespace {

ContextPtr make_ctx(int p, int e, std::int64_t N = 60, int s = 1)
{
    GroundConfig g;
    g.p = p;
    g.s = s;
    g.e = e;
    g.N = N;
    return Context::make(g);
}

CInf uinv(const ContextPtr &c, int k) { return CInf::monomial(c, c->field().one(), -k); }

Lattice rank1(const ContextPtr &c) { return Lattice::certify(c, {CInf::one(c)}); }
Lattice rank2(const ContextPtr &c) { return Lattice::certify(c, {CInf::one(c), uinv(c, 1)}); }

} // namespace

TEST_CASE("certificate")
{
    auto c1 = make_ctx(3, 1);
    CHECK_NOTHROW(rank1(c1));
    auto c2 = make_ctx(3, 2);
    CHECK_NOTHROW(rank2(c2));
    CHECK_THROWS_AS(Lattice::certify(c1, {CInf::one(c1), CInf::theta_pow(c1, 1)}), domain_error);
    try {
        Lattice::certify(c1, {CInf::one(c1), CInf::theta_pow(c1, 1)});
    } catch (const domain_error &e) {
        CHECK(std::string(e.what()).find("pi_1, pi_2") != std::string::npos);
    }
    // Independent leading residues over F_9 = F_3(z) pass even with equal valuations.
    GroundConfig g;
    g.p = 3;
    g.m = 2;
    auto c3 = Context::make(g);
    const FFElem z = c3->field().generator();
    CHECK_NOTHROW(Lattice::certify(c3, {CInf::one(c3), CInf::constant(c3, z)}));
    CHECK_THROWS_AS(Lattice::certify(c3, {CInf::one(c3), CInf::constant(c3, FFElem{2})}), domain_error);
}

TEST_CASE("enumeration")
{
    auto c1 = make_ctx(3, 1);
    const auto L1 = rank1(c1);
    CHECK(enumerate_up_to(L1, 0).size() == 2);
    CHECK(enumerate_up_to(L1, -1).empty());
    auto c2 = make_ctx(3, 2);
    const auto L2 = rank2(c2);
    const auto els = enumerate_up_to(L2, 1);
    CHECK(els.size() == 8);
    for (const auto &el : els) {
        CHECK(el.lognorm <= 1);
        CHECK(el.value.lognorm() == el.lognorm);
    }
}

TEST_CASE("ordered bases and norm sequences")
{
    auto c1 = make_ctx(3, 1);
    auto ob1 = rank1(c1).ordered_basis(3);
    CHECK(ob1->lognorms(3) == std::vector<std::int64_t>{0, 1, 2});
    CHECK(ob1->at(1).value.equal_within(CInf::theta_pow(c1, 1)));

    auto c2 = make_ctx(3, 2);
    auto ob2 = rank2(c2).ordered_basis(4);
    // e = 2, so lognorms 0,1,2,3 are norms 1, q^{1/2}, q, q^{3/2}.
    CHECK(ob2->lognorms(4) == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("norm sequence does not depend on tie-breaking")
{
    GroundConfig g;
    g.p = 3;
    g.m = 2;
    g.e = 1;
    auto c = Context::make(g);
    const FFElem z = c->field().generator();
    const auto L = Lattice::certify(c, {CInf::one(c), CInf::constant(c, z)});
    auto fwd = greedy_ordered_basis(L, 6, [](const BasisVector &a, const BasisVector &b) {
        return detail::serial_key(a.value) < detail::serial_key(b.value);
    });
    auto rev = greedy_ordered_basis(L, 6, [](const BasisVector &a, const BasisVector &b) {
        return detail::serial_key(b.value) < detail::serial_key(a.value);
    });
    std::vector<std::int64_t> n1;
    std::vector<std::int64_t> n2;
    for (std::size_t i = 0; i < 6; ++i) {
        n1.push_back(fwd[i].lognorm);
        n2.push_back(rev[i].lognorm);
    }
    CHECK(n1 == n2);
    CHECK(n1 == L.ordered_basis(6)->lognorms(6));
    CHECK(n1 == std::vector<std::int64_t>{0, 0, 1, 1, 2, 2});
}

TEST_CASE("Moore polynomials")
{
    auto c = make_ctx(3, 1);
    auto ob = rank1(c).ordered_basis(4);
    MoorePoly P(c, 4);
    P = moore_extend(P, ob->at(0).value);
    CHECK(P.coeff(0).equal_within(CInf::one(c)));
    CHECK(P.coeff(1).equal_within(CInf::constant(c, FFElem{2})));
    CHECK(P.coeff(2).is_zero());
    CHECK(P.eval(ob->at(0).value).is_zero());
    CHECK_THROWS_AS(moore_extend(P, ob->at(0).value.scaled(FFElem{2})), domain_error);

    auto c2 = make_ctx(3, 2, 60);
    auto L2 = rank2(c2);
    auto ob2 = L2.ordered_basis(4);
    MoorePoly Q(c2, 4);
    for (int n = 0; n < 3; ++n) {
        Q = moore_extend(Q, ob2->at(static_cast<std::size_t>(n)).value);
    }
    // Kernel check by brute force over V_3.
    for_each_in_span(ob2->values(3), 1, [&](unsigned, std::uint64_t, const std::vector<std::size_t> &, const CInf &v) {
        CHECK(Q.eval(v).is_zero());
        CHECK(Q.as_twisted().apply(v).is_zero());
    });
    CHECK_FALSE(Q.eval(ob2->at(3).value).is_zero());
}

TEST_CASE("power sums")
{
    auto c = make_ctx(3, 1);
    auto ob = rank1(c).ordered_basis(4);
    CHECK(power_sum(*ob, 1, 2).equal_within(CInf::constant(c, FFElem{2})));
    CHECK(power_sum(*ob, 2, 2).is_zero());
    CHECK(power_sum(*ob, 2, 8).certified_nonzero());
}

TEST_CASE("power-sum vanishing and norm bound, q in {2,3}, m <= 4")
{
    for (int p : {2, 3}) {
        for (int e : {1, 2}) {
            auto c = make_ctx(p, e);
            std::vector<CInf> basis{CInf::one(c)};
            if (e == 2) {
                basis.push_back(uinv(c, 1));
            }
            auto L = Lattice::certify(c, basis);
            auto ob = L.ordered_basis(5);
            const auto r = ob->lognorms(5);
            const std::int64_t q = p;
            for (int m = 1; m <= 4; ++m) {
                for (int k = 0; k <= m + 1; ++k) {
                    const auto d = static_cast<std::uint64_t>(detail::ipow(q, static_cast<unsigned>(k)) - 1);
                    if (d == 0) {
                        continue;
                    }
                    const CInf s = power_sum(*ob, m, d);
                    if (k < m) {
                        CHECK(s.is_zero());
                        CHECK(s.is_exact());
                    } else if (!s.is_zero()) {
                        // r_m^{q^k - q^m} prod_{i<=m} r_i^{q^i - q^{i-1}}
                        std::int64_t bound = (detail::ipow(q, k) - detail::ipow(q, m)) * r[m - 1];
                        for (int i = 1; i <= m; ++i) {
                            bound += (detail::ipow(q, i) - detail::ipow(q, i - 1)) * r[i - 1];
                        }
                        CHECK(s.lognorm() <= bound);
                    }
                }
            }
        }
    }
}

TEST_CASE("exponential coefficients")
{
    auto c = make_ctx(3, 1, 60);
    auto ob = rank1(c).ordered_basis(1);
    const auto ex = e_coeffs(*ob, 6, 60);
    CHECK(ex.e[0].equal_within(CInf::one(c)));
    // For A itself (not the Carlitz lattice) e_1 = pi~^{q-1}/(theta^q - theta) has norm 1.
    CHECK(ex.e[1].val() == 0);
    CHECK(ex.e[1].abs_prec() - ex.e[1].val() >= 50);
    // Coefficient bound ||e_k|| <= prod r_i^{q^{i-1}-q^i}.
    const auto r = ex.norms;
    for (int k = 1; k <= 6; ++k) {
        CHECK(static_cast<std::int64_t>(ex.e[static_cast<std::size_t>(k)].lognorm()) <=
              detail::to_i64(detail::coeff_bound(r, 3, static_cast<std::size_t>(k))));
    }

    // Certificates are sound: a longer iteration moves coefficients by less than the bound.
    auto c2 = make_ctx(3, 2, 60);
    auto ob2 = rank2(c2).ordered_basis(1);
    const auto a = e_coeffs(*ob2, 5, 60);
    const auto b = e_coeffs(*ob2, 9, 60);
    CHECK(b.steps > a.steps);
    for (int k = 0; k <= 5; ++k) {
        const CInf diff = a.e[static_cast<std::size_t>(k)] - b.e[static_cast<std::size_t>(k)];
        CHECK(diff.val() >= std::min(a.err[static_cast<std::size_t>(k)], a.e[static_cast<std::size_t>(k)].abs_prec()));
    }
}

TEST_CASE("codimension-one kernels")
{
    auto c = make_ctx(3, 1);
    auto ob = rank1(c).ordered_basis(5);
    auto K = sublattice_kernel(ob, {FFElem{1}});
    CHECK(K.pivot == 1);
    CHECK(K.interleave == 1);
    CHECK(K.basis->lognorms(3) == std::vector<std::int64_t>{1, 2, 3});

    auto c2 = make_ctx(3, 2);
    auto ob2 = rank2(c2).ordered_basis(8);
    for (const auto &chi : std::vector<std::vector<FFElem>>{{FFElem{0}, FFElem{1}}, {FFElem{0}, FFElem{0}, FFElem{2}, FFElem{1}}, {FFElem{1}}}) {
        auto W = sublattice_kernel(ob2, chi);
        ob2->extend(12);
        W.basis->extend(10);
        const auto r = ob2->lognorms(12);
        const auto s = W.basis->lognorms(10);
        const std::size_t m = W.interleave;
        for (std::size_t i = 1; i <= 10; ++i) {
            if (i < m) {
                CHECK(s[i - 1] == r[i - 1]);
            } else {
                CHECK(s[i - 1] == r[i]);
            }
        }
        // Kernel elements really are in ker(chi): their coordinates at v_s cancel.
        const auto e = e_coeffs(*W.basis, 4, 40);
        CHECK(e.e[0].equal_within(CInf::one(c2)));
    }
    CHECK_THROWS_AS(sublattice_kernel(ob2, {FFElem{0}, FFElem{0}}), domain_error);
}
