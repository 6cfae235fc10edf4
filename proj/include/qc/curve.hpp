#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "qc/padic.hpp"

namespace qc {

// Truncated Laurent series over Q with exact coefficients.
class QSeries {
  public:
    QSeries() : trunc_(0) {}
    explicit QSeries(int trunc_order) : trunc_(trunc_order) {}

    static QSeries monomial(int deg, const mpq_class& c, int trunc_order);

    int trunc_order() const { return trunc_; }
    int lowest() const;
    mpq_class coeff(int k) const;
    void set_coeff(int k, const mpq_class& v);
    bool is_zero() const;

    QSeries operator+(const QSeries& o) const;
    QSeries operator-(const QSeries& o) const;
    QSeries operator-() const;
    QSeries operator*(const QSeries& o) const;
    QSeries operator*(const mpq_class& s) const;
    QSeries inverse() const;
    QSeries pow(long e) const;
    QSeries derivative() const;
    // Antiderivative; throws if the t^-1 coefficient is nonzero.
    QSeries integrate() const;
    QSeries truncated(int order) const;
    QSeries compose(const QSeries& inner) const;
    mpq_class residue() const { return coeff(-1); }

    const std::vector<std::pair<int, mpq_class>> terms() const;
    std::string str() const;

  private:
    int trunc_;
    // sparse: exponent -> coefficient
    std::vector<std::pair<int, mpq_class>> c_;
    mpq_class* find(int k);
    const mpq_class* find(int k) const;
    void prune();
};

struct WeierstrassCurve {
    mpz_class a1, a2, a3, a4, a6;
    mpz_class b2, b4, b6, b8, disc;

    WeierstrassCurve(mpz_class a1_, mpz_class a2_, mpz_class a3_, mpz_class a4_,
                     mpz_class a6_);
    static WeierstrassCurve parse(const std::string& csv);

    bool good_at(long p) const;
    // Short model y^2 = f(x) after y -> y + (a1 x + a3)/2.
    // f(x) = x^3 + fc2 x^2 + fc1 x + fc0 (all in Z[1/2]).
    mpq_class fc2() const { return mpq_class(b2, 4); }
    mpq_class fc1() const { return mpq_class(b4, 2); }
    mpq_class fc0() const { return mpq_class(b6, 4); }
    mpq_class f_of(const mpq_class& x) const;
    std::string str() const;
};

struct RatPoint {
    bool inf = true;
    mpq_class x, y;
    static RatPoint identity() { return {}; }
    static RatPoint affine(mpq_class x, mpq_class y) { return {false, std::move(x), std::move(y)}; }
    bool operator==(const RatPoint& o) const {
        return inf == o.inf && (inf || (x == o.x && y == o.y));
    }
};

struct PadicPoint {
    bool inf = true;
    Padic x, y;
    static PadicPoint identity() { return {}; }
    static PadicPoint affine(Padic x, Padic y) { return {false, std::move(x), std::move(y)}; }
};

struct FpPoint {
    bool inf = true;
    long x = 0, y = 0;
    bool operator==(const FpPoint& o) const {
        return inf == o.inf && (inf || (x == o.x && y == o.y));
    }
};

bool on_curve(const WeierstrassCurve& E, const RatPoint& P);
bool on_curve(const WeierstrassCurve& E, const PadicPoint& P);

RatPoint neg(const WeierstrassCurve& E, const RatPoint& P);
RatPoint add(const WeierstrassCurve& E, const RatPoint& P, const RatPoint& Q);
RatPoint mul(const WeierstrassCurve& E, long n, const RatPoint& P);

PadicPoint neg(const WeierstrassCurve& E, const PadicPoint& P);
PadicPoint add(const WeierstrassCurve& E, const PadicPoint& P, const PadicPoint& Q);
PadicPoint mul(const WeierstrassCurve& E, long n, const PadicPoint& P);

PadicPoint to_padic(const WeierstrassCurve& E, const RatPoint& P, long p, int prec);
// Short-model transport (x, y) -> (x, y + (a1 x + a3)/2).
PadicPoint to_short_model(const WeierstrassCurve& E, const PadicPoint& P);

FpPoint reduce_mod_p(const WeierstrassCurve& E, const RatPoint& P, long p);
FpPoint reduce_mod_p(const WeierstrassCurve& E, const PadicPoint& P);
FpPoint fp_neg(const WeierstrassCurve& E, long p, const FpPoint& P);
FpPoint fp_add(const WeierstrassCurve& E, long p, const FpPoint& P, const FpPoint& Q);
bool fp_on_curve(const WeierstrassCurve& E, long p, const FpPoint& P);

long count_points(const WeierstrassCurve& E, long p);  // #E(F_p) incl. infinity
long trace_of_frobenius(const WeierstrassCurve& E, long p);  // a_p

struct LocalExpansion {
    QSeries x, y;       // Laurent series in t = -x/y
    QSeries alpha, beta;  // coefficient series: alpha(t) dt, beta(t) dt
};
LocalExpansion local_expansion_at_origin(const WeierstrassCurve& E, int order);

mpq_class residue_pairing(const WeierstrassCurve& E, int order = 8);

struct ResidueDisk {
    long xbar = 0, ybar = 0;
    bool weierstrass = false;  // 2y + a1 x + a3 = 0 at the reduction point
};
std::vector<ResidueDisk> residue_disks(const WeierstrassCurve& E, long p);

// Frobenius-fixed center of a non-Weierstrass residue disk.
PadicPoint teichmuller_center(const WeierstrassCurve& E, long p, const ResidueDisk& D,
                              int prec);

// Order of a rational point if it is at most `bound`; 0 otherwise.
long point_order(const WeierstrassCurve& E, const RatPoint& P, long bound = 16);

}  // namespace qc
