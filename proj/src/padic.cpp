#include "qc/padic.hpp"

#include <sstream>

namespace qc {

mpz_class pow_mpz(long base, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

mpz_class Padic::pow_p(long p, int e) {
    if (e < 0) throw std::logic_error("negative power of p");
    return pow_mpz(p, static_cast<unsigned long>(e));
}

void Padic::normalize() {
    if (is_exact_zero()) return;
    if (val_ >= prec_) {
        mant_ = 0;
        val_ = prec_;
        return;
    }
    if (mant_ == 0) {
        val_ = prec_;
        return;
    }
    // When the working precision vastly exceeds the mantissa size the modular
    // reduction is a no-op with an astronomically large modulus; skip it and
    // keep the mantissa as a (possibly negative) representative.
    if (prec_ - val_ > 4096 &&
        mpz_sizeinbase(mant_.get_mpz_t(), 2) + 4 <
            static_cast<size_t>(prec_ - val_)) {
        while (mpz_divisible_ui_p(mant_.get_mpz_t(), static_cast<unsigned long>(p_))) {
            mpz_divexact_ui(mant_.get_mpz_t(), mant_.get_mpz_t(), static_cast<unsigned long>(p_));
            ++val_;
        }
        return;
    }
    mpz_class mod = pow_p(p_, prec_ - val_);
    mpz_mod(mant_.get_mpz_t(), mant_.get_mpz_t(), mod.get_mpz_t());
    if (mant_ == 0) {
        val_ = prec_;
        return;
    }
    // Pull p-powers out of the mantissa into the valuation.
    while (mpz_divisible_ui_p(mant_.get_mpz_t(), static_cast<unsigned long>(p_))) {
        mpz_divexact_ui(mant_.get_mpz_t(), mant_.get_mpz_t(), static_cast<unsigned long>(p_));
        ++val_;
        if (val_ >= prec_) {
            mant_ = 0;
            val_ = prec_;
            return;
        }
    }
    mod = pow_p(p_, prec_ - val_);
    mpz_mod(mant_.get_mpz_t(), mant_.get_mpz_t(), mod.get_mpz_t());
    if (mant_ == 0) val_ = prec_;
}

Padic Padic::from_parts(long p, int val, const mpz_class& mant, int prec) {
    Padic x;
    x.p_ = p;
    x.val_ = val;
    x.prec_ = prec;
    x.mant_ = mant;
    x.normalize();
    return x;
}

Padic Padic::from_mpz(long p, const mpz_class& v, int prec) {
    if (v == 0) return exact_zero(p);
    return from_parts(p, 0, v, prec);
}

Padic Padic::from_mpq(long p, const mpq_class& v, int prec) {
    if (v == 0) return exact_zero(p);
    mpz_class num = v.get_num(), den = v.get_den();
    int val = 0;
    while (mpz_divisible_ui_p(num.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(p));
        ++val;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(p));
        --val;
    }
    if (val >= prec) return approx_zero(p, prec);
    mpz_class mod = pow_p(p, prec - val);
    mpz_class deninv;
    if (mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::logic_error("denominator not invertible");
    return from_parts(p, val, num * deninv, prec);
}

Padic Padic::operator-() const {
    if (is_zero()) return *this;
    Padic r = *this;
    r.mant_ = pow_p(p_, prec_ - val_) - mant_;
    return r;
}

Padic Padic::operator+(const Padic& o) const {
    check_same(o);
    if (is_exact_zero()) return o;
    if (o.is_exact_zero()) return *this;
    int prec = std::min(prec_, o.prec_);
    int v = std::min(val_, o.val_);
    if (v >= prec) return approx_zero(p_, prec);
    mpz_class m = 0;
    if (!is_zero() || mant_ != 0) m += mant_ * pow_p(p_, val_ - v);
    if (!o.is_zero() || o.mant_ != 0) m += o.mant_ * pow_p(p_, o.val_ - v);
    return from_parts(p_, v, m, prec);
}

Padic Padic::operator*(const Padic& o) const {
    check_same(o);
    if (is_exact_zero() || o.is_exact_zero()) return exact_zero(p_);
    // min(N1+v2, N2+v1); a zero-at-precision factor still caps the precision.
    long prec = std::min<long>(static_cast<long>(prec_) + o.val_, static_cast<long>(o.prec_) + val_);
    if (is_zero() || o.is_zero()) return approx_zero(p_, static_cast<int>(std::min<long>(prec, kInfValuation)));
    return from_parts(p_, val_ + o.val_, mant_ * o.mant_, static_cast<int>(prec));
}

Padic Padic::inverse() const {
    if (is_exact_zero()) throw division_by_zero("inverse of exact zero");
    if (is_zero()) throw division_by_zero("inverse of value indistinguishable from zero at precision");
    int rel = prec_ - val_;
    mpz_class mod = pow_p(p_, rel);
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), mant_.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::logic_error("mantissa not invertible");
    return from_parts(p_, -val_, inv, rel - val_);
}

Padic Padic::operator*(long s) const {
    if (s == 0) return exact_zero(p_);
    if (is_exact_zero()) return *this;
    mpz_class m(s);
    int v = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p_))) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(p_));
        ++v;
    }
    if (is_zero()) return approx_zero(p_, prec_ + v);
    return from_parts(p_, val_ + v, mant_ * m, prec_ + v);
}

Padic Padic::operator/(long s) const {
    if (s == 0) throw division_by_zero("division by integer zero");
    if (is_exact_zero()) return *this;
    mpz_class m(s);
    int v = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p_))) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(p_));
        ++v;
    }
    if (is_zero()) return approx_zero(p_, prec_ - v);
    int rel = prec_ - val_;
    mpz_class mod = pow_p(p_, rel);
    mpz_class inv;
    mpz_mod(m.get_mpz_t(), m.get_mpz_t(), mod.get_mpz_t());
    if (mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::logic_error("unit part of divisor not invertible");
    return from_parts(p_, val_ - v, mant_ * inv, prec_ - v);
}

Padic Padic::truncate(int n) const {
    if (is_exact_zero()) return *this;
    if (n >= prec_) return *this;
    Padic r = *this;
    r.prec_ = n;
    r.normalize();
    return r;
}

Padic Padic::pow(unsigned long e) const {
    Padic r = from_long(p_, 1, prec_ == kInfValuation ? 64 : prec_);
    Padic b = *this;
    if (e == 0) return r;
    bool started = false;
    Padic acc;
    while (e > 0) {
        if (e & 1) {
            acc = started ? acc * b : b;
            started = true;
        }
        e >>= 1;
        if (e) b = b * b;
    }
    return acc;
}

Padic Padic::sqrt_unit(long root_mod_p) const {
    if (!is_unit()) throw std::invalid_argument("sqrt_unit: not a unit");
    int rel = prec_ - val_;
    mpz_class mod = pow_p(p_, rel);
    // Hensel lift of the mod-p root with Newton iteration x -> (x + a/x)/2.
    mpz_class x(root_mod_p);
    mpz_class a = mant_;
    mpz_class inv2;
    mpz_class two(2);
    mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
    for (int k = 1; k < rel; k *= 2) {
        mpz_class xinv;
        if (mpz_invert(xinv.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw std::logic_error("sqrt iteration lost invertibility");
        x = ((x + a * xinv % mod) * inv2) % mod;
    }
    mpz_class check = (x * x - a) % mod;
    if (check != 0) throw std::invalid_argument("sqrt_unit: not a square at this precision");
    return from_parts(p_, 0, x, prec_);
}

Padic Padic::teichmuller() const {
    if (!is_unit()) throw std::invalid_argument("teichmuller: not a unit");
    int rel = prec_;
    mpz_class mod = pow_p(p_, rel);
    mpz_class x = mant_ % mod;
    // x -> x^p gains at least one digit of agreement with the limit per step.
    for (int k = 0; k < rel; ++k) {
        mpz_class nx;
        mpz_powm_ui(nx.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p_), mod.get_mpz_t());
        if (nx == x) break;
        x = nx;
    }
    return from_parts(p_, 0, x, prec_);
}

Padic Padic::iwasawa_log() const {
    if (is_zero()) throw std::invalid_argument("log of zero");
    // Iwasawa branch: kill p^val and the Teichmuller part, log the 1-unit.
    Padic u = from_parts(p_, 0, mant_, prec_ - val_);
    Padic w = u.teichmuller();
    Padic u1 = u / w;  // congruent to 1 mod p
    Padic z = u1 - from_long(p_, 1, u1.abs_prec());
    int N = u1.abs_prec();
    if (z.is_zero()) return approx_zero(p_, N);
    Padic acc = approx_zero(p_, N + 64);
    Padic zk = z;
    // Tail bound: term k has valuation >= k*v(z) - log_p k; stop once that
    // exceeds the target precision (v(z) >= 1).
    int logp_bound = 0;
    for (int k = 1;; ++k) {
        int floorlog = 0;
        for (long q = p_; q <= k; q *= p_) ++floorlog;
        logp_bound = floorlog;
        if (static_cast<long>(k) * z.valuation() - logp_bound >= N && k > 1) break;
        Padic term = zk / (k % 2 == 0 ? -k : k);
        acc = acc + term;
        zk = zk * z;
        if (zk.is_zero() && zk.abs_prec() >= N) break;
    }
    return acc.truncate(N);
}

Padic Padic::exp() const {
    if (is_exact_zero()) return from_long(p_, 1, kInfValuation / 2);
    if (valuation() < 1) throw std::invalid_argument("exp requires valuation >= 1 for odd p");
    int N = prec_;
    Padic acc = from_long(p_, 1, N);
    Padic term = from_long(p_, 1, N + 64);
    for (int k = 1;; ++k) {
        term = term * (*this) / k;
        // v(x^k/k!) >= k*v - (k-1)/(p-1) grows without bound for v >= 1.
        if (term.is_zero() && term.abs_prec() >= N) break;
        acc = acc + term;
        if (static_cast<long>(k) * (valuation() - 1) + k - 64 > N) break;
    }
    return acc.truncate(N);
}

mpz_class Padic::lift() const {
    if (is_zero()) return 0;
    if (val_ < 0) throw std::logic_error("lift of negative-valuation value");
    return mant_ * pow_p(p_, val_);
}

std::string Padic::str() const {
    std::ostringstream os;
    if (is_exact_zero()) {
        os << "0 (exact, " << p_ << "-adic)";
        return os.str();
    }
    if (is_zero()) {
        os << "O(" << p_ << "^" << prec_ << ")";
        return os.str();
    }
    os << mant_ << "*" << p_ << "^" << val_ << " + O(" << p_ << "^" << prec_ << ")";
    return os.str();
}

}  // namespace qc
