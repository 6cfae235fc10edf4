#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "qc/rigidcoh.hpp"

using namespace qc;

namespace {
const WeierstrassCurve E37(0, 0, 1, -1, 0);
const long P = 7;
const int N = 10;

Series poly_series(const PadicPoly& poly, const Series& X) {
    Series acc(X.prime(), X.trunc_order());
    for (int d = static_cast<int>(poly.size()) - 1; d >= 0; --d)
        acc = acc * X + Series::constant(X.prime(), poly[d], X.trunc_order());
    return acc;
}

Series sqrt_series(const Series& F, const Padic& y0) {
    // Newton iteration for Y with Y^2 = F, Y(0) = y0 (a unit)
    long p = F.prime();
    Series Y = Series::constant(p, y0, F.trunc_order());
    Padic half = Padic::from_mpq(p, mpq_class(1, 2), y0.abs_prec() + 8);
    for (int it = 0; it < 12; ++it) Y = (Y + F * Y.inverse()) * half;
    return Y;
}
}  // namespace

TEST_CASE("bezout context: sigma f + tau f' = 1") {
    CohContext ctx = make_context(E37, P, 20);
    PadicPoly lhs = poly_add(poly_mul(ctx.sigma, ctx.f), poly_mul(ctx.tau, ctx.df));
    REQUIRE(poly_deg(lhs) == 0);
    CHECK((lhs[0] - Padic::from_long(P, 1, 20)).is_zero());
}

TEST_CASE("reduce_odd: basis forms and exact forms") {
    CohContext ctx = make_context(E37, P, 20);
    // omega_1 = dx/y reduces to itself
    OddForm w1;
    w1[1] = {Padic::from_long(P, 1, 20)};
    OddReduction r1 = reduce_odd(ctx, w1);
    CHECK((r1.c1 - Padic::from_long(P, 1, 20)).is_zero());
    CHECK(r1.c2.is_zero());
    CHECK(r1.primitive.empty());

    // d(y) = f'/(2y) dx is exact: class must vanish, primitive must be y
    OddForm dy;
    dy[1] = poly_scale(ctx.df, Padic::from_mpq(P, mpq_class(1, 2), 20));
    OddReduction r2 = reduce_odd(ctx, dy);
    CHECK(r2.c1.is_zero());
    CHECK(r2.c2.is_zero());
    REQUIRE(r2.primitive.size() == 1);
    CHECK(r2.primitive[0].a == 0);
    CHECK(r2.primitive[0].b == 1);
    CHECK((r2.primitive[0].c - Padic::from_long(P, 1, 20)).is_zero());

    // d(x/y) = (1/y - x f'/(2 f y)) dx = (2f - x f')/(2 y^3) dx
    PadicPoly xpoly = {Padic::exact_zero(P), Padic::from_long(P, 1, 20)};
    OddForm dxy;
    dxy[3] = poly_scale(poly_sub(poly_scale(ctx.f, Padic::from_long(P, 2, 20)),
                                 poly_mul(xpoly, ctx.df)),
                        Padic::from_mpq(P, mpq_class(1, 2), 20));
    OddReduction r3 = reduce_odd(ctx, dxy);
    CHECK(r3.c1.is_zero());
    CHECK(r3.c2.is_zero());
}

TEST_CASE("reduce_even: exact form and residue class") {
    CohContext ctx = make_context(E37, P, 20);
    // f'/f^2 dx = d(-1/f): primitive -f^-1, remainder 0
    EvenForm e1;
    e1[2] = ctx.df;
    EvenReduction r1 = reduce_even(ctx, e1);
    CHECK(poly_deg(r1.remainder) < 0);
    REQUIRE(r1.primitive.size() == 1);
    CHECK(r1.primitive[0].a == 0);
    CHECK(r1.primitive[0].b == -2);
    CHECK((r1.primitive[0].c + Padic::from_long(P, 1, 20)).is_zero());

    // f'/f dx = dlog f is NOT exact in the algebra: remainder is f' itself
    EvenForm e2;
    e2[1] = ctx.df;
    EvenReduction r2 = reduce_even(ctx, e2);
    REQUIRE(poly_deg(r2.remainder) == 2);
    CHECK((r2.remainder[2] - Padic::from_long(P, 3, 20)).is_zero());

    // polynomial part integrates termwise: x^2 dx -> x^3/3
    EvenForm e3;
    e3[0] = {Padic::exact_zero(P), Padic::exact_zero(P), Padic::from_long(P, 1, 20)};
    EvenReduction r3 = reduce_even(ctx, e3);
    REQUIRE(r3.primitive.size() == 1);
    CHECK(r3.primitive[0].a == 3);
    CHECK(r3.primitive[0].b == 0);
    CHECK((r3.primitive[0].c * 3 - Padic::from_long(P, 1, 20)).is_zero());
}

TEST_CASE("frobenius matrix: trace = a_p and v_p(det) = 1") {
    for (long p : {5L, 7L, 11L}) {
        FrobeniusData fd = frobenius_lift(E37, p, N);
        long ap = trace_of_frobenius(E37, p);  // exhaustive enumeration
        CHECK(fd.ap == ap);
        CHECK((fd.trace() - Padic::from_long(p, ap, N)).truncate(N - 2).is_zero());
        CHECK(fd.det().valuation() == 1);
        CHECK((fd.det() - Padic::from_long(p, p, N)).truncate(N - 2).is_zero());
        CHECK(fd.loss <= N / 2);
    }
    // a second curve, including a supersingular prime for y^2 = x^3 + 1 at p = 5
    WeierstrassCurve Et(0, 0, 0, 0, 1);
    FrobeniusData fs = frobenius_lift(Et, 5, N);
    CHECK(fs.supersingular);
    CHECK(fs.ap == trace_of_frobenius(Et, 5));
    CHECK(fs.det().valuation() == 1);
}

TEST_CASE("exactness of phi^* omega_i - sum M_ji omega_j - d g_i in a disk") {
    FrobeniusData fd = frobenius_lift(E37, P, N);
    CohContext ctx = make_context(E37, P, 2 * N);
    int T = 16;
    // pick two non-Weierstrass disks
    auto disks = residue_disks(E37, P);
    for (auto& D : {disks[0], disks[3]}) {
        PadicPoint C = to_short_model(E37, teichmuller_center(E37, P, D, 2 * N));
        Series X = Series::monomial(P, 1, Padic::from_long(P, 1, 2 * N), T) +
                   Series::constant(P, C.x, T);
        Series F = poly_series(ctx.f, X);
        Series Y = sqrt_series(F, C.y);
        CHECK((Y * Y - F).known_zero());

        // phi(1/y) = y^-p (1 + E(X)/F^p)^(-1/2), E = f(x^p) - f(x)^p
        Series Xp = X.pow(P);
        Series EX = poly_series(ctx.f, Xp) - F.pow(P);
        Series h = EX * F.pow(-P);
        Series invsqrt = inv_sqrt_one_plus(h, 2 * N + 2);
        Series phi_inv_y = Y.pow(-P) * invsqrt;

        for (int i = 0; i < 2; ++i) {
            // d(phi x) = p x^(p-1) dx; extra X^p for omega_2
            Series lhs = phi_inv_y * Xp.pow(i) * X.pow(P - 1) * Padic::from_long(P, P, 2 * N);
            Series rhs = (Series::constant(P, fd.M[0][i], T) +
                          X * Series::constant(P, fd.M[1][i], T)) *
                         Y.inverse();
            Series dg = evaluate_monomials(fd.g[i], X, Y).derivative();
            Series diff = (lhs - rhs - dg).truncated(T - 4);
            for (auto& [k, v] : diff.coeffs()) {
                bool small = v.is_zero() || v.valuation() >= N - 2;
                CHECK(small);
            }
        }
    }
}

TEST_CASE("frobenius on disk parameters") {
    auto disks = residue_disks(E37, P);
    FrobeniusData fd = frobenius_lift(E37, P, N);
    (void)fd;
    for (auto& D : {disks[0], disks[2]}) {
        Series phit = frobenius_on_disk_parameter(E37, P, D, 20, N);
        // fixes the center
        CHECK(phit.coeff(0).is_zero());
        // reduces to t^p mod p
        for (auto& [k, v] : phit.coeffs()) {
            if (k == P)
                CHECK((v - Padic::from_long(P, 1, N)).valuation() >= 1);
            else
                CHECK((v.is_zero() || v.valuation() >= 1));
        }
    }
    ResidueDisk wd{0, 0, true};
    CHECK_THROWS(frobenius_on_disk_parameter(WeierstrassCurve(0, 0, 0, -1, 0), P, wd, 20, N));
}

TEST_CASE("determinism and cache round-trip") {
    std::string dir = std::filesystem::temp_directory_path() / "qc_cache_test";
    std::filesystem::remove_all(dir);
    FrobeniusData a = frobenius_lift(E37, P, N, dir);   // computes, writes
    FrobeniusData b = frobenius_lift(E37, P, N, dir);   // cache hit
    FrobeniusData c = frobenius_lift(E37, P, N);        // recomputation
    CHECK(serialize_frobenius(a) == serialize_frobenius(b));
    CHECK(serialize_frobenius(a) == serialize_frobenius(c));
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / frobenius_cache_key(E37, P, N)));
    // round-trip through text
    FrobeniusData d = deserialize_frobenius(serialize_frobenius(a));
    CHECK(serialize_frobenius(d) == serialize_frobenius(a));
    std::filesystem::remove_all(dir);
}
