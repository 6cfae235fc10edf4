#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qc/curve.hpp"
#include "qc/padic.hpp"
#include "qc/series.hpp"

namespace qc {

// Polynomials in x with p-adic coefficients; index = degree.
using PadicPoly = std::vector<Padic>;

void poly_trim(PadicPoly& a);
int poly_deg(const PadicPoly& a);  // -1 for (indistinguishable from) zero
PadicPoly poly_add(const PadicPoly& a, const PadicPoly& b);
PadicPoly poly_sub(const PadicPoly& a, const PadicPoly& b);
PadicPoly poly_mul(const PadicPoly& a, const PadicPoly& b);
PadicPoly poly_scale(const PadicPoly& a, const Padic& s);
PadicPoly poly_derivative(const PadicPoly& a);
Padic poly_eval(const PadicPoly& a, const Padic& x);
// division by a monic polynomial
std::pair<PadicPoly, PadicPoly> poly_divmod(const PadicPoly& num, const PadicPoly& den);

// A single term c * x^a * y^b of an overconvergent function on y^2 = f(x)
// (even b means f^{b/2}).
struct MonomialFn {
    int a = 0, b = 0;
    Padic c;
};

struct CohContext {
    long p = 0;
    int prec = 0;           // working p-adic precision
    PadicPoly f, df;        // short model: y^2 = f(x), monic cubic
    PadicPoly sigma, tau;   // sigma*f + tau*f' = 1 (from an exact computation over Q)
    std::vector<mpq_class> fq;  // exact coefficients of f
};
CohContext make_context(const WeierstrassCurve& E, long p, int prec);

// Differential forms on the affine short-model curve.
// Odd: sum over odd s >= 1 of P_s(x) y^{-s} dx.
using OddForm = std::map<int, PadicPoly>;
// Even: sum over m >= 0 of P_m(x) f^{-m} dx (m = 0 is the polynomial part).
using EvenForm = std::map<int, PadicPoly>;

struct OddReduction {
    Padic c1, c2;  // class = c1 [dx/y] + c2 [x dx/y]
    std::vector<MonomialFn> primitive;
};
OddReduction reduce_odd(const CohContext& ctx, OddForm form);

struct EvenReduction {
    std::vector<MonomialFn> primitive;
    PadicPoly remainder;  // leftover class: remainder(x)/f dx, deg <= 2
};
EvenReduction reduce_even(const CohContext& ctx, EvenForm form);

// phi^* omega_i as an odd form, with phi(x) = x^p and
// phi(y) = y^p (1 + E/f^p)^{1/2}, E = f(x^p) - f(x)^p.
OddForm phi_omega(const CohContext& ctx, int i, int kmax = -1);
// Coefficient series of (1 + E/f^p)^{-1/2} as an odd-form-style multiplier:
// returns the E-power truncation bound used by phi_omega.
int phi_series_terms(const CohContext& ctx);

struct FrobeniusData {
    WeierstrassCurve E;
    long p;
    int N;      // requested precision
    int prec;   // working precision used
    std::array<std::array<Padic, 2>, 2> M;  // phi^* omega_i = dg_i + sum_j M[j][i] omega_j
    std::array<std::vector<MonomialFn>, 2> g;
    int loss = 0;  // digits consumed by the reduction
    bool supersingular = false;
    long ap = 0;

    Padic trace() const { return M[0][0] + M[1][1]; }
    Padic det() const { return M[0][0] * M[1][1] - M[0][1] * M[1][0]; }
};

// thrown when the reduction consumed more precision than the budget allows
struct retry_at_higher_precision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCodeVersion = "qc-1";

FrobeniusData frobenius_lift(const WeierstrassCurve& E, long p, int N,
                             const std::string& cache_dir = "");

std::string frobenius_cache_key(const WeierstrassCurve& E, long p, int N);
std::string serialize_frobenius(const FrobeniusData& fd);
FrobeniusData deserialize_frobenius(const std::string& json_text);

// Evaluate sum c x^a y^b along disk expansions X(t), Y(t) (with Y^2 = f(X)).
Series evaluate_monomials(const std::vector<MonomialFn>& terms, const Series& X,
                          const Series& Y);

// Same sum at a single point (x, y) of the short model.
Padic evaluate_monomials_at(const std::vector<MonomialFn>& terms, const Padic& x,
                            const Padic& y);

// (1 + h)^(-1/2) by the binomial series; h must have coefficients of positive
// valuation so the truncated sum is accurate to the working precision.
Series inv_sqrt_one_plus(const Series& h, int terms);

// Frobenius action on the parameter t = x - x_center of a non-Weierstrass disk.
Series frobenius_on_disk_parameter(const WeierstrassCurve& E, long p,
                                   const ResidueDisk& D, int order, int prec);

}  // namespace qc
