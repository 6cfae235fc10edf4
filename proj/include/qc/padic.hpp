#pragma once

#include <gmpxx.h>

#include <climits>
#include <stdexcept>
#include <string>

namespace qc {

struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

struct division_by_zero : std::runtime_error {
    explicit division_by_zero(const std::string& what) : std::runtime_error(what) {}
};

/// Capped-precision element of Q_p.
///
/// A nonzero value is  p^val * mant  with mant a unit in [1, p^(N-val)),
/// known modulo p^N (absolute precision N).  Two kinds of zero are kept
/// apart: an exact zero (valuation +infinity) and a value indistinguishable
/// from zero at the current precision (mant == 0, val == N).
///
/// Precision propagation is pessimistic:
///   add/sub : N = min(N1, N2)
///   mul     : N = min(N1 + v2, N2 + v1)
///   div     : relative precision = min of relative precisions
///
/// Values are immutable after construction.
class Padic {
public:
    static constexpr int kInfValuation = INT_MAX / 2;

    Padic() : p_(0), val_(kInfValuation), prec_(kInfValuation) {}

    static Padic exact_zero(long p) {
        Padic z;
        z.p_ = p;
        return z;
    }

    // Zero known only modulo p^prec.
    static Padic approx_zero(long p, int prec) {
        Padic z;
        z.p_ = p;
        z.val_ = prec;
        z.prec_ = prec;
        return z;
    }

    static Padic from_mpz(long p, const mpz_class& v, int prec);
    static Padic from_long(long p, long v, int prec) { return from_mpz(p, mpz_class(v), prec); }
    static Padic from_mpq(long p, const mpq_class& v, int prec);
    // p^val * mant, mant not necessarily reduced; normalizes.
    static Padic from_parts(long p, int val, const mpz_class& mant, int prec);

    long prime() const { return p_; }
    int valuation() const {
        if (is_exact_zero()) return kInfValuation;
        return val_;
    }
    int abs_prec() const { return prec_; }
    bool is_exact_zero() const { return prec_ == kInfValuation && val_ == kInfValuation; }
    // True when nothing distinguishes the value from 0 at its precision.
    bool is_zero() const { return is_exact_zero() || mant_ == 0; }
    bool is_unit() const { return !is_zero() && val_ == 0; }
    const mpz_class& mantissa() const { return mant_; }

    Padic operator-() const;
    Padic operator+(const Padic& o) const;
    Padic operator-(const Padic& o) const { return *this + (-o); }
    Padic operator*(const Padic& o) const;
    Padic operator/(const Padic& o) const { return *this * o.inverse(); }
    Padic inverse() const;

    Padic operator*(long s) const;
    Padic operator/(long s) const;

    // Value reduced modulo p^n (lowers precision; raising is not possible).
    Padic truncate(int n) const;
    Padic pow(unsigned long e) const;

    // Square root of a unit congruent to the given mod-p root (p odd).
    Padic sqrt_unit(long root_mod_p) const;
    // The (p-1)-st root of unity congruent to this unit mod p.
    Padic teichmuller() const;
    // Iwasawa branch: log p = 0, log(teichmuller) = 0.
    Padic iwasawa_log() const;
    // exp, defined for valuation >= 1 (p odd).
    Padic exp() const;

    // Representative integer of p^-val * value mod p^(prec-val), i.e. mantissa.
    // lift(): smallest non-negative integer congruent to the value (val >= 0 only).
    mpz_class lift() const;

    bool same_prime(const Padic& o) const { return p_ == o.p_; }
    // Agreement modulo p^min(prec, o.prec).
    bool eq_at_prec(const Padic& o) const { return ((*this) - o).is_zero(); }

    std::string str() const;

private:
    long p_;
    int val_;
    int prec_;
    mpz_class mant_;

    static mpz_class pow_p(long p, int e);
    void normalize();
    void check_same(const Padic& o) const {
        if (p_ != o.p_) throw std::invalid_argument("p-adic prime mismatch");
    }
};

mpz_class pow_mpz(long base, unsigned long e);

}  // namespace qc
