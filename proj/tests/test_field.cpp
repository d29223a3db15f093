#include <catch_amalgamated.hpp>

#include <drinfeld/field.hpp>

using drinfeld::FFElem;
using drinfeld::Field;

TEST_CASE("prime field F_3")
{
    Field F(3, 1, 1);
    CHECK(F.size() == 3);
    CHECK(F.q() == 3);
    CHECK(F.add(FFElem{1}, FFElem{2}) == FFElem{0});
    CHECK(F.mul(FFElem{2}, FFElem{2}) == FFElem{1});
    CHECK(F.from_int(-1) == FFElem{2});
    CHECK(F.subfield_elements().size() == 3);
}

TEST_CASE("field axioms on F_81 with subfield F_9")
{
    Field F(3, 2, 2);
    REQUIRE(F.size() == 81);
    REQUIRE(F.q() == 9);
    for (std::uint16_t a = 1; a < F.size(); ++a) {
        CHECK(F.mul(FFElem{a}, F.inv(FFElem{a})) == F.one());
        CHECK(F.add(FFElem{a}, F.neg(FFElem{a})) == F.zero());
    }
    int fixed = 0;
    for (std::uint16_t a = 0; a < F.size(); ++a) {
        const FFElem x{a};
        if (F.in_subfield(x)) {
            ++fixed;
        }
        // Frobenius is additive and has order m = 2.
        CHECK(F.frobenius(F.frobenius(x, 1), 1) == x);
        CHECK(F.frobenius(x, 2) == x);
        CHECK(F.frobenius(F.add(x, FFElem{5}), 1) == F.add(F.frobenius(x, 1), F.frobenius(FFElem{5}, 1)));
    }
    CHECK(fixed == 9);
    for (auto c : F.subfield_elements()) {
        CHECK(F.in_subfield(c));
    }
}

TEST_CASE("large field uses log tables")
{
    Field F(2, 1, 10);
    REQUIRE(F.size() == 1024);
    const FFElem z = F.generator();
    CHECK(F.pow(z, 1023) == F.one());
    CHECK(F.pow(z, 341) != F.one());
    const FFElem a{123};
    const FFElem b{456};
    const FFElem c{789};
    CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
    CHECK(F.frobenius(a, 1) == F.mul(a, a));
    CHECK(F.frobenius(a, 3) == F.pow(a, 8));
}

TEST_CASE("invalid parameters")
{
    CHECK_THROWS_AS(Field(6, 1, 1), drinfeld::domain_error);
    CHECK_THROWS_AS(Field(3, 1, 20), drinfeld::domain_error);
}
