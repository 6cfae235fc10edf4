#include "qc/series.hpp"

#include <algorithm>
#include <sstream>

namespace qc {

void Series::prune() {
    for (auto it = c_.begin(); it != c_.end();) {
        if (it->first >= trunc_ || it->second.is_exact_zero())
            it = c_.erase(it);
        else
            ++it;
    }
}

Series Series::monomial(long p, int deg, const Padic& c, int trunc_order) {
    Series s(p, trunc_order);
    s.set_coeff(deg, c);
    return s;
}

Series Series::constant(long p, const Padic& c, int trunc_order) {
    return monomial(p, 0, c, trunc_order);
}

Series Series::one(long p, int prec, int trunc_order) {
    return constant(p, Padic::from_long(p, 1, prec), trunc_order);
}

bool Series::known_zero() const {
    for (auto& [k, v] : c_)
        if (!v.is_zero()) return false;
    return true;
}

int Series::lowest() const {
    for (auto& [k, v] : c_)
        if (!v.is_zero()) return k;
    return trunc_;
}

Padic Series::coeff(int k) const {
    auto it = c_.find(k);
    if (it != c_.end()) return it->second;
    return Padic::exact_zero(p_);
}

void Series::set_coeff(int k, const Padic& v) {
    if (k >= trunc_) return;
    if (v.is_exact_zero())
        c_.erase(k);
    else
        c_[k] = v;
}

Series Series::operator+(const Series& o) const {
    if (p_ != o.p_) throw std::invalid_argument("series prime mismatch");
    Series r(p_, std::min(trunc_, o.trunc_), var_);
    for (auto& [k, v] : c_)
        if (k < r.trunc_) r.c_[k] = v;
    for (auto& [k, v] : o.c_) {
        if (k >= r.trunc_) continue;
        auto it = r.c_.find(k);
        if (it == r.c_.end())
            r.c_[k] = v;
        else
            it->second = it->second + v;
    }
    r.prune();
    return r;
}

Series Series::operator-() const {
    Series r(p_, trunc_, var_);
    for (auto& [k, v] : c_) r.c_[k] = -v;
    return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    if (p_ != o.p_) throw std::invalid_argument("series prime mismatch");
    int lo1 = lowest(), lo2 = o.lowest();
    int tr = std::min(trunc_ + lo2, o.trunc_ + lo1);
    Series r(p_, tr, var_);
    for (auto& [i, a] : c_) {
        if (a.is_zero() && a.abs_prec() > 200000) continue;
        for (auto& [j, b] : o.c_) {
            int k = i + j;
            if (k >= tr) continue;
            Padic t = a * b;
            auto it = r.c_.find(k);
            if (it == r.c_.end())
                r.c_[k] = t;
            else
                it->second = it->second + t;
        }
    }
    r.prune();
    return r;
}

Series Series::operator*(const Padic& s) const {
    Series r(p_, trunc_, var_);
    for (auto& [k, v] : c_) r.c_[k] = v * s;
    r.prune();
    return r;
}

Series Series::operator/(const Padic& s) const { return (*this) * s.inverse(); }

Series Series::inverse() const {
    int lo = lowest();
    if (known_zero()) throw division_by_zero("inverse of zero series");
    Padic lead = coeff(lo);
    if (lead.is_zero()) throw division_by_zero("inverse: leading coefficient zero at precision");
    // 1 / (c t^lo (1 + u)) with u of positive degree; recurrence for (1+u)^-1.
    int m = trunc_ - lo;  // number of known terms of the unit part
    Series r(p_, m, var_);
    Padic linv = lead.inverse();
    std::vector<Padic> u(m, Padic::exact_zero(p_));
    for (auto& [k, v] : c_) {
        int d = k - lo;
        if (d > 0 && d < m) u[d] = v * linv;
    }
    std::vector<Padic> b(m, Padic::exact_zero(p_));
    b[0] = Padic::from_long(p_, 1, lead.abs_prec() + std::abs(lead.valuation()) + 8);
    for (int n = 1; n < m; ++n) {
        Padic acc = Padic::exact_zero(p_);
        for (int j = 1; j <= n; ++j) {
            if (u[j].is_exact_zero() || b[n - j].is_exact_zero()) continue;
            acc = acc + u[j] * b[n - j];
        }
        b[n] = -acc;
    }
    for (int n = 0; n < m; ++n) r.set_coeff(n, b[n] * linv);
    return r.shift(-lo);
}

Series Series::shift(int k) const {
    Series r(p_, trunc_ + k, var_);
    for (auto& [d, v] : c_) r.c_[d + k] = v;
    return r;
}

Series Series::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    if (e == 0) return one(p_, Padic::kInfValuation, trunc_ - lowest());
    Series base = *this;
    Series result;
    bool started = false;
    long ee = e;
    while (ee > 0) {
        if (ee & 1) {
            result = started ? result * base : base;
            started = true;
        }
        ee >>= 1;
        if (ee) base = base * base;
    }
    return result;
}

Series Series::derivative() const {
    Series r(p_, trunc_ - 1, var_);
    for (auto& [k, v] : c_) {
        if (k == 0) continue;
        r.set_coeff(k - 1, v * k);
    }
    return r;
}

Series Series::truncated(int order) const {
    Series r(p_, std::min(order, trunc_), var_);
    for (auto& [k, v] : c_)
        if (k < r.trunc_) r.c_[k] = v;
    return r;
}

Series Series::compose(const Series& g) const {
    if (g.lowest() < 1) throw std::invalid_argument("compose: inner series must vanish at 0");
    int glow = g.lowest();
    // Output reliable up to min(g.trunc-ish, trunc*glow).
    int tr = std::min(g.trunc_, trunc_ * glow);
    Series r(p_, tr, var_);
    // Non-negative part via Horner over the stored exponents.
    std::vector<std::pair<int, Padic>> pos, neg;
    for (auto& [k, v] : c_) (k >= 0 ? pos : neg).emplace_back(k, v);
    if (!pos.empty()) {
        Series acc(p_, tr, var_);
        int prev = -1;
        for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
            if (prev >= 0) acc = acc * g.pow(prev - it->first).truncated(tr);
            acc = acc + constant(p_, it->second, tr);
            prev = it->first;
        }
        if (prev > 0) acc = acc * g.pow(prev).truncated(tr);
        r = r + acc;
    }
    if (!neg.empty()) {
        Series gi = g.inverse();
        for (auto& [k, v] : neg) r = r + gi.pow(-k).truncated(tr + 8 * glow) * v;
    }
    return r.truncated(tr);
}

Padic Series::evaluate(const Padic& t) const {
    if (c_.empty()) return Padic::approx_zero(p_, trunc_);
    int vt = t.valuation();
    if (vt < 1 && trunc_ < 100000) throw std::invalid_argument("evaluate: |t| must be < 1");
    Padic acc = Padic::exact_zero(p_);
    for (auto& [k, v] : c_) {
        Padic tk = k == 0 ? Padic::from_long(p_, 1, t.abs_prec() + 8)
                          : (k > 0 ? t.pow(k) : t.inverse().pow(-k));
        acc = acc + v * tk;
    }
    // Unknown tail starts at t^trunc.
    long tail = static_cast<long>(vt) * trunc_;
    if (tail < acc.abs_prec()) acc = acc.truncate(static_cast<int>(tail));
    return acc;
}

std::string Series::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : c_) {
        if (v.is_zero() && v.abs_prec() > 10000) continue;
        if (!first) os << " + ";
        os << "(" << v.str() << ")*" << var_ << "^" << k;
        first = false;
    }
    if (first) os << "0";
    os << " + O(" << var_ << "^" << trunc_ << ")";
    return os.str();
}

// --- LogSeries ---

const Series& LogSeries::part(int k) const {
    static const Series empty;
    if (k < 0 || k >= static_cast<int>(parts_.size())) return empty;
    return parts_[k];
}

void LogSeries::set_part(int k, Series s) {
    if (k < 0) throw std::invalid_argument("negative log power");
    while (static_cast<int>(parts_.size()) <= k)
        parts_.push_back(Series(s.prime(), s.trunc_order(), s.var()));
    parts_[k] = std::move(s);
}

bool LogSeries::pure_power_series() const {
    for (int k = 1; k <= max_log_power(); ++k)
        if (!part(k).known_zero()) return false;
    return part(0).lowest() >= 0;
}

LogSeries LogSeries::operator+(const LogSeries& o) const {
    LogSeries r = *this;
    for (int k = 0; k <= o.max_log_power(); ++k) {
        if (k <= r.max_log_power() && !(r.part(k).prime() == 0))
            r.set_part(k, r.part(k) + o.part(k));
        else
            r.set_part(k, o.part(k));
    }
    return r;
}

LogSeries LogSeries::operator-(const LogSeries& o) const {
    LogSeries neg = o * Padic::from_long(o.part(0).prime(), -1, Padic::kInfValuation / 2);
    return *this + neg;
}

LogSeries LogSeries::operator*(const LogSeries& o) const {
    LogSeries r;
    long p = part(0).prime();
    for (int i = 0; i <= max_log_power(); ++i) {
        for (int j = 0; j <= o.max_log_power(); ++j) {
            Series prod = part(i) * o.part(j);
            if (i + j <= r.max_log_power() && r.part(0).prime() == p)
                r.set_part(i + j, r.part(i + j) + prod);
            else if (r.max_log_power() < 0 || static_cast<int>(i + j) > r.max_log_power())
                r.set_part(i + j, prod);
            else
                r.set_part(i + j, r.part(i + j) + prod);
        }
    }
    return r;
}

LogSeries LogSeries::operator*(const Padic& s) const {
    LogSeries r = *this;
    for (int k = 0; k <= r.max_log_power(); ++k) r.set_part(k, r.part(k) * s);
    return r;
}

std::string LogSeries::str() const {
    std::ostringstream os;
    for (int k = 0; k <= max_log_power(); ++k) {
        if (k) os << " + log^" << k << " * [";
        else os << "[";
        os << part(k).str() << "]";
    }
    return os.str();
}

// --- integration ---

LogSeries formal_integrate(const Series& f) {
    long p = f.prime();
    Series power(p, f.trunc_order() + 1, f.var());
    Padic residue = Padic::exact_zero(p);
    for (auto& [k, v] : f.coeffs()) {
        if (k == -1) {
            residue = v;
            continue;
        }
        power.set_coeff(k + 1, v / (k + 1));
    }
    LogSeries r(power);
    if (!residue.is_exact_zero())
        r.set_part(1, Series::constant(p, residue, power.trunc_order()));
    return r;
}

Series formal_integrate_no_log(const Series& f) {
    Padic res = f.coeff(-1);
    if (!res.is_zero())
        throw std::invalid_argument("formal_integrate_no_log: nonzero residue");
    LogSeries r = formal_integrate(f);
    return r.part(0);
}

// --- Strassman root isolation ---

namespace {

// Coefficients of f(r + c*u) from those of f (polynomial part only).
std::vector<Padic> taylor_shift(const std::vector<Padic>& f, const Padic& r, const Padic& c, long p) {
    int n = static_cast<int>(f.size());
    std::vector<Padic> w = f;
    for (int i = 0; i < n; ++i)
        for (int j = n - 2; j >= i; --j) w[j] = w[j] + r * w[j + 1];
    Padic ck = Padic::from_long(p, 1, Padic::kInfValuation / 2);
    for (int j = 0; j < n; ++j) {
        w[j] = w[j] * ck;
        ck = ck * c;
    }
    return w;
}

Padic eval_poly(const std::vector<Padic>& f, const Padic& x, long p) {
    Padic acc = Padic::exact_zero(p);
    for (int j = static_cast<int>(f.size()) - 1; j >= 0; --j) acc = acc * x + f[j];
    return acc;
}

std::vector<Padic> derive_poly(const std::vector<Padic>& f) {
    std::vector<Padic> d;
    for (size_t j = 1; j < f.size(); ++j) d.push_back(f[j] * static_cast<long>(j));
    return d;
}

struct RootSearch {
    long p;
    int prec_floor;
    StrassmanResult* res;

    void search(const std::vector<Padic>& f, const Padic& base, const Padic& scale, int depth) {
        bool all_zero = true;
        for (auto& c : f)
            if (!c.is_zero()) { all_zero = false; break; }
        if (all_zero) {
            res->status = StrassmanResult::Status::inconclusive;
            res->note += "branch series indistinguishable from zero; ";
            return;
        }
        std::vector<Padic> fd = derive_poly(f);
        for (long r = 0; r < p; ++r) {
            Padic rr = Padic::from_long(p, r, prec_floor + depth + 8);
            Padic fr = eval_poly(f, rr, p);
            if (!fr.is_zero() && fr.valuation() <= 0) continue;
            Padic fdr = eval_poly(fd, rr, p);
            if (!fdr.is_zero() && fdr.valuation() == 0) {
                // simple root: Newton
                Padic x = rr;
                for (int it = 0; it < prec_floor + 4; ++it) {
                    Padic fx = eval_poly(f, x, p);
                    if (fx.is_zero()) break;
                    x = x - fx / eval_poly(fd, x, p);
                }
                Padic root = base + scale * x;
                push(root, false);
            } else if (depth < prec_floor) {
                // f and f' both small near r: dig a digit deeper
                Padic pp = Padic::from_long(p, p, prec_floor + depth + 8);
                std::vector<Padic> g = taylor_shift(f, rr, pp, p);
                // strip content to keep coefficients honest units where possible
                int minv = Padic::kInfValuation;
                for (auto& c : g)
                    if (!c.is_zero()) minv = std::min(minv, c.valuation());
                if (minv > 0 && minv < Padic::kInfValuation) {
                    Padic content = Padic::from_long(p, 1, prec_floor + depth + 8);
                    for (int i = 0; i < minv; ++i) content = content * p;
                    for (auto& c : g) c = c / content;
                }
                if (g.empty()) continue;
                size_t before = res->roots.size();
                search(g, base + scale * rr, scale * Padic::from_long(p, p, prec_floor + 8), depth + 1);
                // mark deep (non-Newton) roots as possibly multiple
                Padic fdr2 = eval_poly(fd, rr, p);
                if (fdr2.is_zero())
                    for (size_t i = before; i < res->roots.size(); ++i) res->roots[i].multiple = true;
            } else {
                // precision floor reached with a persistent near-zero
                Padic root = base + scale * rr;
                push(root, true);
            }
        }
    }

    void push(const Padic& root, bool multiple) {
        for (auto& existing : res->roots)
            if (existing.value.eq_at_prec(root)) {
                existing.multiple = existing.multiple || multiple;
                return;
            }
        res->roots.push_back({root, multiple});
    }
};

}  // namespace

StrassmanResult strassman_roots(const Series& f) {
    StrassmanResult res;
    long p = f.prime();
    if (f.lowest() < 0) throw std::invalid_argument("strassman_roots: principal part present");
    bool any = false;
    int minval = Padic::kInfValuation, argmax = 0, minprec = Padic::kInfValuation;
    for (auto& [k, v] : f.coeffs()) {
        if (v.valuation() < 0) throw std::invalid_argument("strassman_roots: non-integral coefficient");
        if (!v.is_zero()) {
            any = true;
            if (v.valuation() < minval) minval = v.valuation();
            minprec = std::min(minprec, v.abs_prec());
        }
    }
    if (!any) {
        res.status = StrassmanResult::Status::inconclusive;
        res.note = "all coefficients below the precision floor";
        return res;
    }
    for (auto& [k, v] : f.coeffs())
        if (!v.is_zero() && v.valuation() == minval) argmax = k;
    res.bound = argmax;
    res.min_valuation = minval;
    // Tail guard: the last stored coefficients must sit strictly above the
    // extremal valuation, otherwise the truncation hides potential zeros.
    for (auto& [k, v] : f.coeffs()) {
        if (k >= f.trunc_order() - 3 && (v.is_zero() || v.valuation() <= minval)) {
            res.status = StrassmanResult::Status::inconclusive;
            res.note = "truncation tail not dominated";
            return res;
        }
    }

    std::vector<Padic> poly;
    int deg = 0;
    for (auto& [k, v] : f.coeffs()) deg = std::max(deg, k);
    poly.assign(deg + 1, Padic::exact_zero(p));
    for (auto& [k, v] : f.coeffs()) poly[k] = v;

    RootSearch rs{p, std::max(2, minprec - minval - 2), &res};
    RootSearch* r = &rs;
    std::vector<Padic> scaled = poly;
    if (minval > 0) {
        Padic content = Padic::from_long(p, 1, minprec + 8);
        for (int i = 0; i < minval; ++i) content = content * p;
        for (auto& c : scaled) c = c / content;
    }
    r->search(scaled, Padic::exact_zero(p), Padic::from_long(p, 1, minprec + 8), 0);
    if (static_cast<int>(res.roots.size()) > res.bound) {
        res.status = StrassmanResult::Status::inconclusive;
        res.note += "root count exceeds Strassman bound; ";
    }
    return res;
}

}  // namespace qc
