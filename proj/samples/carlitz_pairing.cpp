// Lambda = A over F_3: build omega and zeta, then show that (theta - t) omega zeta = 1.

#include <cstdio>

#include <drinfeld/drinfeld.hpp>

using namespace drinfeld;

int main()
{
    GroundConfig g;
    g.p = 3;
    g.e = 1;
    g.N = 60;
    const auto ctx = Context::make(g);

    Pipeline::Options o;
    o.D = 6;
    o.B = 9;
    o.label = "1";
    Pipeline P(parse_lattice(ctx, "1"), o);

    const auto &ex = P.exp();
    std::printf("e_1 = %s\n", ex.e[1].to_string().c_str());
    for (int j = 0; j <= 3; ++j) {
        std::printf("omega[%d] = %s\n", j, P.omega()[0][j].to_string().c_str());
    }
    for (int j = 0; j <= 3; ++j) {
        std::printf("zeta[%d]  = %s\n", j, P.zeta()[0].zeta[j].to_string().c_str());
    }

    const auto P0 = ev_pair(P.zeta(), P.omega(), 0);
    const auto res = P0.times_theta_minus_t() - TateSeries::one(ctx, P0.D());
    for (int j = 0; j < P0.D(); ++j) {
        std::printf("(theta - t) P_0 - 1, t^%d: %s\n", j, res[j].to_string().c_str());
    }
    const auto rep = check_main_identity(P, -20);
    std::printf("%s\n", rep.to_json().dump().c_str());
    return rep.pass() ? 0 : 1;
}
