#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qc/chabauty.hpp>

#include <algorithm>

using namespace qc;

namespace {

constexpr long kP = 7;
constexpr int kN = 12;

const WeierstrassCurve& e37() {
    static WeierstrassCurve E = WeierstrassCurve::parse("0,0,1,-1,0");
    return E;
}

const ColemanSystem& sys37() {
    static ColemanSystem cs(e37(), kP, kN);
    return cs;
}

const KimFunction& kim37() {
    static KimFunction k(sys37(), RatPoint::affine(0, 0));
    return k;
}

int val_floor(const Padic& v) {
    return v.is_zero() ? v.abs_prec() : v.valuation();
}

PadicPoint mult(long m) {
    return to_padic(e37(), mul(e37(), m, RatPoint::affine(0, 0)), kP, 2 * kN);
}

}  // namespace

TEST_CASE("rho at Teichmuller centers is the double integral") {
    for (const auto& dd : sys37().disks()) {
        PadicPoint c = teichmuller_center(e37(), kP, dd.disk, 2 * kN);
        Padic r = kim37().rho(c);
        Padic d2 = sys37().D2(c);
        CHECK(val_floor(r - d2) >= kN);
    }
}

TEST_CASE("rho disk series differentiates to log_beta * alpha") {
    // 4 rho = J with dJ = L2 * dx/Y, so on each disk (parameter t = x - xc)
    // the series identity 4 rho' * Y = L2 must hold coefficientwise.
    for (const auto& dd : sys37().disks()) {
        const DiskSeries& ds = sys37().disk_series(dd.disk);
        Series lhs = kim37().rho_series(dd.disk).derivative() * ds.y *
                     Padic::from_long(kP, 4, 2 * kN);
        Series diff = lhs - ds.L2;
        CHECK(diff.known_zero());
    }
}

TEST_CASE("rho is even: rho(z) - rho(-z) vanishes at ten points") {
    for (long m : {1L, 2L, 3L, 4L, 5L, 6L, 7L, 8L, 10L, 11L}) {
        PadicPoint z = mult(m);
        PadicPoint w = neg(e37(), z);
        CHECK(val_floor(kim37().rho(z) - kim37().rho(w)) >= kN - 1);
    }
}

TEST_CASE("theta vanishes at every brute-force integral point") {
    auto pts = integral_points_brute(e37(), 10000);
    REQUIRE(pts.size() == 10);
    for (const auto& P : pts) {
        PadicPoint z = to_padic(e37(), P, kP, 2 * kN);
        CHECK(val_floor(kim37().theta(z)) >= kN - 4);
    }
}

TEST_CASE("quadratic defect matches away-prime contributions") {
    // Independent oracle for the normalization of rho: along multiples m*y,
    // rho(m*y) - m^2 rho(y) must equal -(1/2) log(den x(m*y)).  At integral
    // multiples the defect vanishes; at fractional ones it is a logarithm.
    Padic rho_y = kim37().rho_y();
    for (long m : {2L, 3L, 4L, 6L, 5L, 7L, 8L, 10L, 11L}) {
        RatPoint Q = mul(e37(), m, RatPoint::affine(0, 0));
        Padic defect = kim37().rho(mult(m)) -
                       Padic::from_long(kP, m * m, 2 * kN) * rho_y;
        Padic den = Padic::from_mpz(kP, Q.x.get_den(), 2 * kN);
        Padic expect = den.iwasawa_log() *
                       Padic::from_mpq(kP, mpq_class(-1, 2), 2 * kN);
        CHECK(val_floor(defect - expect) >= kN - 2);
        if (Q.x.get_den() == 1) CHECK(val_floor(defect) >= kN - 2);
    }
}

TEST_CASE("theta at a fractional multiple is a pinned logarithm") {
    // 5*y = (1/4, -5/8): theta(5y) = log_alpha(y)^2 (rho(5y) - 25 rho(y))
    //                              = -log_alpha(y)^2 * log 2.
    Padic la = kim37().log_alpha_y();
    Padic expect = -(la * la) * Padic::from_long(kP, 2, 2 * kN).iwasawa_log();
    Padic got = kim37().theta(mult(5));
    REQUIRE(!got.is_zero());
    CHECK(got.valuation() == 3);
    CHECK(val_floor(got - expect) >= kN - 1);
}

TEST_CASE("psi identities") {
    PadicPoint y = mult(1);
    CHECK(val_floor(kim37().psi(y)) >= kN - 2);
    Padic la2 = kim37().log_alpha_y() * kim37().log_alpha_y();
    Padic two = Padic::from_long(kP, 2, 2 * kN);
    for (long m : {2L, 3L, 5L, 7L}) {
        PadicPoint z = mult(m);
        Padic lhs = kim37().psi(z) * la2 +
                    two * kim37().res_pairing_inv() * kim37().theta(z);
        CHECK(val_floor(lhs) >= kN - 2);
    }
    // pinned: psi(5y) = 2 Res(v alpha)^{-1} log 2, nonzero of valuation 1
    Padic expect = two * kim37().res_pairing_inv() *
                   Padic::from_long(kP, 2, 2 * kN).iwasawa_log();
    Padic got = kim37().psi(mult(5));
    REQUIRE(!got.is_zero());
    CHECK(got.valuation() == 1);
    CHECK(val_floor(got - expect) >= kN - 2);
}

TEST_CASE("theta zero set is independent of the base point") {
    PadicPoint y1 = mult(1);
    PadicPoint y2 = to_padic(e37(), RatPoint::affine(2, 2), kP, 2 * kN);
    std::vector<PadicPoint> sample;
    for (long m : {2L, 3L, 5L, 7L, 8L}) sample.push_back(mult(m));
    CHECK(independence_check(sys37(), y1, y2, sample) >= kN - 4);
    // same base point twice: exact agreement
    CHECK(independence_check(sys37(), y1, y1, sample) >= kN);
    // negated base point: rho(-y) = rho(y), log_alpha(-y) = -log_alpha(y)
    CHECK(independence_check(sys37(), y1, neg(e37(), y1), sample) >= kN - 1);
}

TEST_CASE("brute force integral point search") {
    auto pts = integral_points_brute(e37(), 10000);
    REQUIRE(pts.size() == 10);
    std::vector<std::pair<long, long>> expect = {
        {-1, 0}, {-1, -1}, {0, 0}, {0, -1}, {1, 0},
        {1, -1}, {2, 2},   {2, -3}, {6, 14}, {6, -15}};
    for (auto [x, y] : expect) {
        CHECK(std::find(pts.begin(), pts.end(),
                        RatPoint::affine(x, y)) != pts.end());
    }
}

TEST_CASE("sweep recovers exactly the integral points of 37a") {
    SweepReport rep = sweep(sys37(), RatPoint::affine(0, 0), 10000, 2);
    CHECK(rep.conclusive);
    CHECK(rep.all_matched());
    CHECK(rep.disks.size() == 8);
    int roots = 0;
    for (const auto& d : rep.disks) {
        CHECK(d.swept);
        CHECK(!d.inconclusive);
        CHECK(d.strassman_bound == 2);  // two roots certified per disk
        roots += static_cast<int>(d.roots.size());
    }
    CHECK(roots == 16);
    CHECK(rep.total_roots == 16);
    // every one of the ten integral points appears among the matches
    int matched = 0;
    for (const auto& d : rep.disks)
        for (const auto& r : d.roots) matched += !r.matches.empty();
    CHECK(matched >= 10);
}

TEST_CASE("sweep is deterministic across thread counts") {
    SweepReport a = sweep(sys37(), RatPoint::affine(0, 0), 100, 1);
    SweepReport b = sweep(sys37(), RatPoint::affine(0, 0), 100, 4);
    CHECK(a.to_json(false) == b.to_json(false));
    CHECK(a.to_table() == b.to_table());
}
