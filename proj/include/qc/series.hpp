#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qc/padic.hpp"

namespace qc {

/// Truncated Laurent series over Q_p: finitely many terms below 0, all
/// terms of degree >= trunc_order unknown.
class Series {
public:
    Series() : p_(0), trunc_(0) {}
    Series(long p, int trunc_order, std::string var = "t")
        : p_(p), trunc_(trunc_order), var_(std::move(var)) {}

    static Series monomial(long p, int deg, const Padic& c, int trunc_order);
    static Series constant(long p, const Padic& c, int trunc_order);
    static Series one(long p, int prec, int trunc_order);

    long prime() const { return p_; }
    int trunc_order() const { return trunc_; }
    const std::string& var() const { return var_; }
    const std::map<int, Padic>& coeffs() const { return c_; }

    bool known_zero() const;  // every stored coefficient is zero
    int lowest() const;       // lowest stored exponent (trunc_ if none)

    Padic coeff(int k) const;  // exact zero when absent and k < trunc
    void set_coeff(int k, const Padic& v);

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;
    Series operator*(const Padic& s) const;
    Series operator/(const Padic& s) const;

    // Multiplicative inverse; leading coefficient must be a unit times p-power.
    Series inverse() const;
    Series pow(long e) const;  // negative e via inverse
    Series derivative() const;
    // Substitute g for the variable; g must have lowest exponent >= 1.
    Series compose(const Series& g) const;
    Series truncated(int order) const;
    Series shift(int k) const;  // multiply by t^k

    Padic evaluate(const Padic& t) const;  // requires val(t)*lowest() convergent

    std::string str() const;

private:
    long p_;
    int trunc_;
    std::string var_;
    std::map<int, Padic> c_;

    void prune();
};

/// Sum_k f_k(t) (log t)^k with the k = 0 part always present.
class LogSeries {
public:
    LogSeries() = default;
    explicit LogSeries(Series part0) { parts_.push_back(std::move(part0)); }

    static LogSeries zero(long p, int trunc) { return LogSeries(Series(p, trunc)); }

    int max_log_power() const { return static_cast<int>(parts_.size()) - 1; }
    const Series& part(int k) const;
    void set_part(int k, Series s);

    bool pure_power_series() const;  // no log terms (beyond zero), no principal part

    LogSeries operator+(const LogSeries& o) const;
    LogSeries operator-(const LogSeries& o) const;
    LogSeries operator*(const LogSeries& o) const;
    LogSeries operator*(const Padic& s) const;

    std::string str() const;

private:
    std::vector<Series> parts_;
};

/// Antiderivative of f(t) dt: t^k -> t^(k+1)/(k+1), the t^-1 term becomes
/// (residue) log t.  Constant of integration is zero.
LogSeries formal_integrate(const Series& f);
/// Same, for integrands known to have zero residue.
Series formal_integrate_no_log(const Series& f);

struct StrassmanRoot {
    Padic value;
    bool multiple = false;  // f and f' both vanish at the root at precision
};

struct StrassmanResult {
    enum class Status { ok, inconclusive } status = Status::ok;
    std::vector<StrassmanRoot> roots;
    int bound = 0;          // Strassman bound: max zero count in Z_p
    int min_valuation = 0;  // valuation of the extremal coefficient
    std::string note;
};

/// All roots in Z_p of a series with p-integral coefficients whose terms
/// tend to zero (the truncation tail must be dominated).  An all-below-
/// precision series yields an explicit inconclusive outcome.
StrassmanResult strassman_roots(const Series& f);

}  // namespace qc
