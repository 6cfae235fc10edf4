#include "qc/curve.hpp"

#include <algorithm>
#include <sstream>

namespace qc {

// --- QSeries ---

mpq_class* QSeries::find(int k) {
    for (auto& [d, v] : c_)
        if (d == k) return &v;
    return nullptr;
}

const mpq_class* QSeries::find(int k) const {
    for (auto& [d, v] : c_)
        if (d == k) return &v;
    return nullptr;
}

void QSeries::prune() {
    c_.erase(std::remove_if(c_.begin(), c_.end(),
                            [&](auto& kv) { return kv.first >= trunc_ || kv.second == 0; }),
             c_.end());
    std::sort(c_.begin(), c_.end(), [](auto& a, auto& b) { return a.first < b.first; });
}

QSeries QSeries::monomial(int deg, const mpq_class& c, int trunc_order) {
    QSeries s(trunc_order);
    s.set_coeff(deg, c);
    return s;
}

int QSeries::lowest() const {
    if (c_.empty()) return trunc_;
    return c_.front().first;
}

mpq_class QSeries::coeff(int k) const {
    const mpq_class* v = find(k);
    return v ? *v : mpq_class(0);
}

void QSeries::set_coeff(int k, const mpq_class& v) {
    if (k >= trunc_) return;
    if (mpq_class* q = find(k)) {
        *q = v;
        if (v == 0) prune();
        return;
    }
    if (v == 0) return;
    c_.emplace_back(k, v);
    prune();
}

bool QSeries::is_zero() const { return c_.empty(); }

QSeries QSeries::operator+(const QSeries& o) const {
    QSeries r(std::min(trunc_, o.trunc_));
    r.c_ = c_;
    for (auto& [k, v] : o.c_) {
        if (mpq_class* q = r.find(k))
            *q += v;
        else
            r.c_.emplace_back(k, v);
    }
    r.prune();
    return r;
}

QSeries QSeries::operator-() const {
    QSeries r = *this;
    for (auto& [k, v] : r.c_) v = -v;
    return r;
}

QSeries QSeries::operator-(const QSeries& o) const { return *this + (-o); }

QSeries QSeries::operator*(const QSeries& o) const {
    int tr = std::min(trunc_ + o.lowest(), o.trunc_ + lowest());
    QSeries r(tr);
    for (auto& [i, a] : c_)
        for (auto& [j, b] : o.c_) {
            if (i + j >= tr) continue;
            if (mpq_class* q = r.find(i + j))
                *q += a * b;
            else
                r.c_.emplace_back(i + j, a * b);
        }
    r.prune();
    return r;
}

QSeries QSeries::operator*(const mpq_class& s) const {
    QSeries r = *this;
    for (auto& [k, v] : r.c_) v *= s;
    r.prune();
    return r;
}

QSeries QSeries::inverse() const {
    if (is_zero()) throw std::invalid_argument("QSeries: inverse of zero");
    int lo = lowest();
    mpq_class lead = coeff(lo);
    int m = trunc_ - lo;
    std::vector<mpq_class> u(m, 0), b(m, 0);
    for (auto& [k, v] : c_)
        if (k - lo > 0 && k - lo < m) u[k - lo] = v / lead;
    b[0] = 1;
    for (int n = 1; n < m; ++n) {
        mpq_class acc = 0;
        for (int j = 1; j <= n; ++j) acc += u[j] * b[n - j];
        b[n] = -acc;
    }
    QSeries r(m - lo);
    for (int n = 0; n < m; ++n)
        if (b[n] != 0) r.c_.emplace_back(n - lo, b[n] / lead);
    r.prune();
    return r;
}

QSeries QSeries::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    if (e == 0) return monomial(0, 1, trunc_ - lowest());
    QSeries base = *this, result;
    bool started = false;
    while (e > 0) {
        if (e & 1) {
            result = started ? result * base : base;
            started = true;
        }
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

QSeries QSeries::derivative() const {
    QSeries r(trunc_ - 1);
    for (auto& [k, v] : c_) {
        if (k == 0) continue;
        r.c_.emplace_back(k - 1, v * k);
    }
    r.prune();
    return r;
}

QSeries QSeries::integrate() const {
    if (coeff(-1) != 0) throw std::invalid_argument("QSeries: nonzero residue in integrate");
    QSeries r(trunc_ + 1);
    for (auto& [k, v] : c_) r.c_.emplace_back(k + 1, v / (k + 1));
    r.prune();
    return r;
}

QSeries QSeries::truncated(int order) const {
    QSeries r(std::min(order, trunc_));
    for (auto& [k, v] : c_)
        if (k < r.trunc_) r.c_.emplace_back(k, v);
    return r;
}

QSeries QSeries::compose(const QSeries& g) const {
    if (g.lowest() < 1) throw std::invalid_argument("QSeries: inner series must vanish at 0");
    int glow = g.lowest();
    int tr = std::min(g.trunc_, trunc_ * glow);
    QSeries r(tr);
    std::vector<std::pair<int, mpq_class>> pos, negv;
    for (auto& [k, v] : c_) (k >= 0 ? pos : negv).emplace_back(k, v);
    if (!pos.empty()) {
        QSeries acc(tr);
        int prev = -1;
        for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
            if (prev >= 0) acc = acc * g.pow(prev - it->first).truncated(tr);
            acc = acc + monomial(0, it->second, tr);
            prev = it->first;
        }
        if (prev > 0) acc = acc * g.pow(prev).truncated(tr);
        r = r + acc;
    }
    if (!negv.empty()) {
        QSeries gi = g.inverse();
        for (auto& [k, v] : negv) r = r + gi.pow(-k).truncated(tr + 8 * glow) * v;
    }
    return r.truncated(tr);
}

const std::vector<std::pair<int, mpq_class>> QSeries::terms() const { return c_; }

std::string QSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : c_) {
        if (!first) os << " + ";
        os << "(" << v.get_str() << ")*t^" << k;
        first = false;
    }
    if (first) os << "0";
    os << " + O(t^" << trunc_ << ")";
    return os.str();
}

// --- WeierstrassCurve ---

WeierstrassCurve::WeierstrassCurve(mpz_class a1_, mpz_class a2_, mpz_class a3_,
                                   mpz_class a4_, mpz_class a6_)
    : a1(std::move(a1_)), a2(std::move(a2_)), a3(std::move(a3_)), a4(std::move(a4_)),
      a6(std::move(a6_)) {
    b2 = a1 * a1 + 4 * a2;
    b4 = 2 * a4 + a1 * a3;
    b6 = a3 * a3 + 4 * a6;
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    if (disc == 0) throw std::invalid_argument("singular Weierstrass model");
}

WeierstrassCurve WeierstrassCurve::parse(const std::string& csv) {
    std::vector<mpz_class> a;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        a.emplace_back(tok);
    }
    if (a.size() != 5) throw std::invalid_argument("expected a1,a2,a3,a4,a6");
    return WeierstrassCurve(a[0], a[1], a[2], a[3], a[4]);
}

bool WeierstrassCurve::good_at(long p) const {
    return p > 3 && mpz_tdiv_ui(disc.get_mpz_t(), static_cast<unsigned long>(p)) != 0;
}

mpq_class WeierstrassCurve::f_of(const mpq_class& x) const {
    return x * x * x + fc2() * x * x + fc1() * x + fc0();
}

std::string WeierstrassCurve::str() const {
    std::ostringstream os;
    os << "[" << a1 << "," << a2 << "," << a3 << "," << a4 << "," << a6 << "]";
    return os.str();
}

// --- group law (shared template over exact and p-adic coordinates) ---

namespace {

struct RatOps {
    const WeierstrassCurve& E;
    using F = mpq_class;
    F from_a(const mpz_class& a) const { return mpq_class(a); }
    bool is_zero(const F& v) const { return v == 0; }
    bool exactly_zero(const F& v) const { return v == 0; }
    F div(const F& a, const F& b) const { return a / b; }
};

struct PadicOps {
    const WeierstrassCurve& E;
    long p;
    int prec;
    using F = Padic;
    F from_a(const mpz_class& a) const { return Padic::from_mpz(p, a, prec); }
    bool is_zero(const F& v) const { return v.is_zero(); }
    bool exactly_zero(const F& v) const { return v.is_exact_zero(); }
    F div(const F& a, const F& b) const { return a / b; }
};

template <class Ops, class Pt>
Pt add_impl(const Ops& ops, const Pt& P, const Pt& Q) {
    const WeierstrassCurve& E = ops.E;
    if (P.inf) return Q;
    if (Q.inf) return P;
    using F = typename Ops::F;
    F a1 = ops.from_a(E.a1), a2 = ops.from_a(E.a2), a3 = ops.from_a(E.a3),
      a4 = ops.from_a(E.a4), a6 = ops.from_a(E.a6);
    F dx = Q.x - P.x;
    F lam, nu;
    if (ops.is_zero(dx)) {
        // same x: either negatives of each other or a doubling
        F ysum = Q.y + P.y + a1 * P.x + a3;
        if (ops.is_zero(ysum)) return Pt::identity();
        F den = P.y + P.y + a1 * P.x + a3;
        if (ops.is_zero(den)) {
            if (ops.exactly_zero(den)) return Pt::identity();
            throw precision_error("group law: 2-torsion ambiguity at working precision");
        }
        lam = ops.div(P.x * P.x * 3 + a2 * P.x * 2 + a4 - a1 * P.y, den);
        nu = ops.div(-(P.x * P.x * P.x) + a4 * P.x + a6 + a6 - a3 * P.y, den);
    } else {
        lam = ops.div(Q.y - P.y, dx);
        nu = ops.div(P.y * Q.x - Q.y * P.x, dx);
    }
    F x3 = lam * lam + a1 * lam - a2 - P.x - Q.x;
    F y3 = -(lam + a1) * x3 - nu - a3;
    return Pt::affine(x3, y3);
}

}  // namespace

namespace {

// Working precision for operations around a point: minimum of the finite
// coordinate precisions (exact zeros carry infinite precision).
int point_prec(const PadicPoint& P, int fallback = 64) {
    int pr = Padic::kInfValuation;
    if (!P.inf) {
        if (P.x.abs_prec() < pr) pr = P.x.abs_prec();
        if (P.y.abs_prec() < pr) pr = P.y.abs_prec();
    }
    return pr >= Padic::kInfValuation / 4 ? fallback : pr;
}

}  // namespace

bool on_curve(const WeierstrassCurve& E, const RatPoint& P) {
    if (P.inf) return true;
    mpq_class lhs = P.y * P.y + mpq_class(E.a1) * P.x * P.y + mpq_class(E.a3) * P.y;
    mpq_class rhs = P.x * P.x * P.x + mpq_class(E.a2) * P.x * P.x + mpq_class(E.a4) * P.x +
                    mpq_class(E.a6);
    return lhs == rhs;
}

bool on_curve(const WeierstrassCurve& E, const PadicPoint& P) {
    if (P.inf) return true;
    long p = P.x.prime();
    int prec = point_prec(P);
    Padic a1 = Padic::from_mpz(p, E.a1, prec), a2 = Padic::from_mpz(p, E.a2, prec),
          a3 = Padic::from_mpz(p, E.a3, prec), a4 = Padic::from_mpz(p, E.a4, prec),
          a6 = Padic::from_mpz(p, E.a6, prec);
    Padic lhs = P.y * P.y + a1 * P.x * P.y + a3 * P.y;
    Padic rhs = P.x * P.x * P.x + a2 * P.x * P.x + a4 * P.x + a6;
    return (lhs - rhs).is_zero();
}

RatPoint neg(const WeierstrassCurve& E, const RatPoint& P) {
    if (P.inf) return P;
    return RatPoint::affine(P.x, -P.y - mpq_class(E.a1) * P.x - mpq_class(E.a3));
}

RatPoint add(const WeierstrassCurve& E, const RatPoint& P, const RatPoint& Q) {
    return add_impl(RatOps{E}, P, Q);
}

RatPoint mul(const WeierstrassCurve& E, long n, const RatPoint& P) {
    RatPoint base = n < 0 ? neg(E, P) : P;
    long e = n < 0 ? -n : n;
    RatPoint acc = RatPoint::identity();
    while (e > 0) {
        if (e & 1) acc = add(E, acc, base);
        e >>= 1;
        if (e) base = add(E, base, base);
    }
    return acc;
}

PadicPoint neg(const WeierstrassCurve& E, const PadicPoint& P) {
    if (P.inf) return P;
    long p = P.x.prime();
    int prec = point_prec(P) + 8;
    return PadicPoint::affine(
        P.x, -P.y - Padic::from_mpz(p, E.a1, prec) * P.x - Padic::from_mpz(p, E.a3, prec));
}

PadicPoint add(const WeierstrassCurve& E, const PadicPoint& P, const PadicPoint& Q) {
    long p = P.inf ? (Q.inf ? 2 : Q.x.prime()) : P.x.prime();
    int prec = std::max(point_prec(P), point_prec(Q)) + 8;
    return add_impl(PadicOps{E, p, prec}, P, Q);
}

PadicPoint mul(const WeierstrassCurve& E, long n, const PadicPoint& P) {
    PadicPoint base = n < 0 ? neg(E, P) : P;
    long e = n < 0 ? -n : n;
    PadicPoint acc = PadicPoint::identity();
    while (e > 0) {
        if (e & 1) acc = add(E, acc, base);
        e >>= 1;
        if (e) base = add(E, base, base);
    }
    return acc;
}

PadicPoint to_padic(const WeierstrassCurve& E, const RatPoint& P, long p, int prec) {
    (void)E;
    if (P.inf) return PadicPoint::identity();
    return PadicPoint::affine(Padic::from_mpq(p, P.x, prec), Padic::from_mpq(p, P.y, prec));
}

PadicPoint to_short_model(const WeierstrassCurve& E, const PadicPoint& P) {
    if (P.inf) return P;
    long p = P.x.prime();
    int prec = point_prec(P) + 8;
    Padic half = Padic::from_mpq(p, mpq_class(1, 2), prec);
    Padic Y = P.y + half * (Padic::from_mpz(p, E.a1, prec) * P.x + Padic::from_mpz(p, E.a3, prec));
    return PadicPoint::affine(P.x, Y);
}

// --- reduction and F_p arithmetic ---

namespace {

long mod_red(const mpz_class& v, long p) {
    long r = static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(p)));
    return r;
}

long mpq_mod_p(const mpq_class& v, long p) {
    mpz_class den = v.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p)))
        throw std::invalid_argument("coordinate not p-integral");
    long n = mod_red(v.get_num(), p);
    long d = mod_red(den, p);
    // modular inverse of d
    long inv = 1, base = d % p, e = p - 2;
    while (e > 0) {
        if (e & 1) inv = (inv * base) % p;
        base = (base * base) % p;
        e >>= 1;
    }
    return (n * inv) % p;
}

long fp_inv(long a, long p) {
    long inv = 1, base = ((a % p) + p) % p, e = p - 2;
    if (base == 0) throw division_by_zero("F_p inverse of 0");
    while (e > 0) {
        if (e & 1) inv = (inv * base) % p;
        base = (base * base) % p;
        e >>= 1;
    }
    return inv;
}

}  // namespace

FpPoint reduce_mod_p(const WeierstrassCurve& E, const RatPoint& P, long p) {
    if (!E.good_at(p)) throw std::invalid_argument("bad prime");
    if (P.inf) return FpPoint{};
    return FpPoint{false, mpq_mod_p(P.x, p), mpq_mod_p(P.y, p)};
}

FpPoint reduce_mod_p(const WeierstrassCurve& E, const PadicPoint& P) {
    if (P.inf) return FpPoint{};
    long p = P.x.prime();
    if (!E.good_at(p)) throw std::invalid_argument("bad prime");
    if (P.x.valuation() < 0 || P.y.valuation() < 0) return FpPoint{};  // e-disk
    auto red = [&](const Padic& v) {
        if (v.is_exact_zero() || v.valuation() > 0) return 0L;
        mpz_class m = v.lift();
        return mod_red(m, p);
    };
    return FpPoint{false, red(P.x), red(P.y)};
}

bool fp_on_curve(const WeierstrassCurve& E, long p, const FpPoint& P) {
    if (P.inf) return true;
    long a1 = mod_red(E.a1, p), a2 = mod_red(E.a2, p), a3 = mod_red(E.a3, p),
         a4 = mod_red(E.a4, p), a6 = mod_red(E.a6, p);
    long lhs = (P.y * P.y + a1 * P.x % p * P.y + a3 * P.y) % p;
    long rhs = (((P.x * P.x % p) * P.x % p) + a2 * P.x % p * P.x % p + a4 * P.x % p + a6) % p;
    return ((lhs - rhs) % p + p) % p == 0;
}

FpPoint fp_neg(const WeierstrassCurve& E, long p, const FpPoint& P) {
    if (P.inf) return P;
    long a1 = mod_red(E.a1, p), a3 = mod_red(E.a3, p);
    long y = ((-P.y - a1 * P.x % p - a3) % p + p) % p;
    return FpPoint{false, P.x, y};
}

FpPoint fp_add(const WeierstrassCurve& E, long p, const FpPoint& P, const FpPoint& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    long a1 = mod_red(E.a1, p), a2 = mod_red(E.a2, p), a3 = mod_red(E.a3, p),
         a4 = mod_red(E.a4, p), a6 = mod_red(E.a6, p);
    long lam, nu;
    if (P.x == Q.x) {
        long ysum = (Q.y + P.y + a1 * P.x % p + a3) % p;
        if (ysum % p == 0) return FpPoint{};
        long den = (2 * P.y + a1 * P.x % p + a3) % p;
        long inv = fp_inv(den, p);
        lam = ((3 * P.x % p * P.x % p + 2 * a2 * P.x % p + a4 - a1 * P.y % p) % p + p) % p *
              inv % p;
        nu = (((-(P.x * P.x % p * P.x % p) + a4 * P.x % p + 2 * a6 - a3 * P.y % p) % p + p) %
              p) * inv % p;
    } else {
        long inv = fp_inv(Q.x - P.x, p);
        lam = (((Q.y - P.y) % p + p) % p) * inv % p;
        nu = (((P.y * Q.x % p - Q.y * P.x % p) % p + p) % p) * inv % p;
    }
    long x3 = ((lam * lam % p + a1 * lam % p - a2 - P.x - Q.x) % p + p) % p;
    long y3 = ((-(lam + a1) % p * x3 % p - nu - a3) % p + p) % p;
    return FpPoint{false, x3, y3};
}

long count_points(const WeierstrassCurve& E, long p) {
    if (!E.good_at(p)) throw std::invalid_argument("bad prime");
    long n = 1;  // infinity
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y)
            if (fp_on_curve(E, p, FpPoint{false, x, y})) ++n;
    return n;
}

long trace_of_frobenius(const WeierstrassCurve& E, long p) {
    long a = p + 1 - count_points(E, p);
    // Hasse bound as a checked postcondition
    if (static_cast<double>(a) * a > 4.0 * p)
        throw std::logic_error("Hasse bound violated: enumeration bug");
    return a;
}

// --- local expansions at the origin ---

LocalExpansion local_expansion_at_origin(const WeierstrassCurve& E, int order) {
    if (order < 5) throw std::invalid_argument("expansion order must be >= 5");
    int M = order + 8;
    mpq_class a1(E.a1), a2(E.a2), a3(E.a3), a4(E.a4), a6(E.a6);
    // t = -x/y, w = -1/y;  w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3
    QSeries t = QSeries::monomial(1, 1, M);
    QSeries w = QSeries::monomial(3, 1, M);
    for (int it = 0; it < M; ++it) {
        QSeries w2 = w * w;
        QSeries nw = t.pow(3) + (t * w) * a1 + (t * t * w) * a2 + w2 * a3 + (t * w2) * a4 +
                     (w2 * w) * a6;
        nw = nw.truncated(M);
        if ((nw - w).is_zero()) { w = nw; break; }
        w = nw;
    }
    LocalExpansion L;
    L.x = (t * w.inverse()).truncated(order);
    L.y = (-w.inverse()).truncated(order);
    // alpha = dx / (2y + a1 x + a3), beta = x * alpha
    QSeries den = L.y * 2 + L.x * a1 + QSeries::monomial(0, a3, order);
    L.alpha = (L.x.derivative() * den.inverse()).truncated(order);
    L.beta = (L.x * L.alpha).truncated(order - 2);
    return L;
}

mpq_class residue_pairing(const WeierstrassCurve& E, int order) {
    LocalExpansion L = local_expansion_at_origin(E, order);
    if (L.beta.residue() != 0)
        throw std::logic_error("beta is not of the second kind");
    QSeries v = L.beta.integrate();
    return (v * L.alpha).residue();
}

// --- residue disks ---

std::vector<ResidueDisk> residue_disks(const WeierstrassCurve& E, long p) {
    if (!E.good_at(p)) throw std::invalid_argument("bad prime");
    long a1 = mod_red(E.a1, p), a3 = mod_red(E.a3, p);
    std::vector<ResidueDisk> out;
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y)
            if (fp_on_curve(E, p, FpPoint{false, x, y}))
                out.push_back(ResidueDisk{x, y, (2 * y + a1 * x % p + a3) % p == 0});
    return out;
}

PadicPoint teichmuller_center(const WeierstrassCurve& E, long p, const ResidueDisk& D,
                              int prec) {
    if (D.weierstrass)
        throw std::invalid_argument("Weierstrass disk has no Frobenius-fixed center in Q_p");
    Padic xc = Padic::from_long(p, D.xbar, prec);
    if (D.xbar != 0) xc = xc.teichmuller();
    // Solve the original-model equation for y via the short model:
    // Y^2 = f(xc), y = Y - (a1 xc + a3)/2, with the branch matching ybar.
    Padic fx = Padic::from_mpq(p, E.fc0(), prec) +
               (Padic::from_mpq(p, E.fc1(), prec) +
                (Padic::from_mpq(p, E.fc2(), prec) + xc) * xc) * xc;
    if (fx.valuation() != 0)
        throw std::logic_error("non-Weierstrass disk with non-unit f(x)");
    long a1 = mod_red(E.a1, p), a3 = mod_red(E.a3, p);
    long Ybar = (((2 * D.ybar + a1 * D.xbar % p + a3) % p + p) % p) * fp_inv(2, p) % p;
    Padic Y = fx.sqrt_unit(Ybar);
    Padic half = Padic::from_mpq(p, mpq_class(1, 2), prec);
    Padic yc = Y - half * (Padic::from_mpz(p, E.a1, prec) * xc + Padic::from_mpz(p, E.a3, prec));
    return PadicPoint::affine(xc, yc);
}

long point_order(const WeierstrassCurve& E, const RatPoint& P, long bound) {
    RatPoint acc = P;
    for (long n = 1; n <= bound; ++n) {
        if (acc.inf) return n;
        acc = add(E, acc, P);
    }
    return 0;
}

}  // namespace qc
