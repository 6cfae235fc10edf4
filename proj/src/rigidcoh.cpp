#include "qc/rigidcoh.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace qc {

using json = nlohmann::json;

// --- polynomial helpers ---

void poly_trim(PadicPoly& a) {
    while (!a.empty() && a.back().is_exact_zero()) a.pop_back();
}

int poly_deg(const PadicPoly& a) {
    for (int d = static_cast<int>(a.size()) - 1; d >= 0; --d)
        if (!a[d].is_zero()) return d;
    return -1;
}

PadicPoly poly_add(const PadicPoly& a, const PadicPoly& b) {
    PadicPoly r = a.size() >= b.size() ? a : b;
    const PadicPoly& s = a.size() >= b.size() ? b : a;
    for (size_t i = 0; i < s.size(); ++i) r[i] = r[i] + s[i];
    poly_trim(r);
    return r;
}

PadicPoly poly_sub(const PadicPoly& a, const PadicPoly& b) {
    PadicPoly nb = b;
    for (auto& c : nb) c = -c;
    return poly_add(a, nb);
}

PadicPoly poly_mul(const PadicPoly& a, const PadicPoly& b) {
    if (a.empty() || b.empty()) return {};
    long p = 0;
    for (auto& c : a)
        if (c.prime()) { p = c.prime(); break; }
    PadicPoly r(a.size() + b.size() - 1, Padic::exact_zero(p));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_exact_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_exact_zero()) continue;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    poly_trim(r);
    return r;
}

PadicPoly poly_scale(const PadicPoly& a, const Padic& s) {
    PadicPoly r = a;
    for (auto& c : r) c = c * s;
    poly_trim(r);
    return r;
}

PadicPoly poly_derivative(const PadicPoly& a) {
    PadicPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
    poly_trim(r);
    return r;
}

Padic poly_eval(const PadicPoly& a, const Padic& x) {
    Padic acc = Padic::exact_zero(x.prime());
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) acc = acc * x + a[i];
    return acc;
}

std::pair<PadicPoly, PadicPoly> poly_divmod(const PadicPoly& num, const PadicPoly& den) {
    int dd = static_cast<int>(den.size()) - 1;
    while (dd >= 0 && den[dd].is_exact_zero()) --dd;
    if (dd < 0) throw division_by_zero("poly_divmod: zero divisor");
    if (!den[dd].is_unit())
        throw std::invalid_argument("poly_divmod: divisor leading coefficient must be a unit");
    Padic lead_inv = den[dd].inverse();
    PadicPoly rem = num, quot;
    int dn = static_cast<int>(rem.size()) - 1;
    if (dn >= dd) quot.assign(dn - dd + 1, Padic::exact_zero(den[dd].prime()));
    for (int d = dn; d >= dd; --d) {
        if (rem[d].is_exact_zero()) continue;
        Padic c = rem[d] * lead_inv;
        quot[d - dd] = c;
        for (int j = 0; j <= dd; ++j) rem[d - dd + j] = rem[d - dd + j] - c * den[j];
        rem[d] = Padic::exact_zero(den[dd].prime());
    }
    rem.resize(std::min<size_t>(rem.size(), dd));
    poly_trim(quot);
    poly_trim(rem);
    return {quot, rem};
}

// --- context ---

namespace {

// Solve sigma*f + tau*f' = 1 exactly over Q with deg sigma <= 1, deg tau <= 2.
void bezout_f(const std::vector<mpq_class>& f, std::vector<mpq_class>& sigma,
              std::vector<mpq_class>& tau) {
    std::vector<mpq_class> df = {f[1], 2 * f[2], 3 * f[3]};
    // unknowns: s0, s1, t0, t1, t2; equations: coefficients of x^0..x^4
    const int n = 5;
    mpq_class A[n][n + 1] = {};
    for (int si = 0; si < 2; ++si)
        for (int fi = 0; fi < 4; ++fi) A[si + fi][si] += f[fi];
    for (int ti = 0; ti < 3; ++ti)
        for (int fi = 0; fi < 3; ++fi) A[ti + fi][2 + ti] += df[fi];
    A[0][n] = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (A[r][col] != 0) { piv = r; break; }
        if (piv < 0) throw std::logic_error("f not squarefree");
        for (int c = 0; c <= n; ++c) std::swap(A[col][c], A[piv][c]);
        mpq_class inv = 1 / A[col][col];
        for (int c = col; c <= n; ++c) A[col][c] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            mpq_class m = A[r][col];
            for (int c = col; c <= n; ++c) A[r][c] -= m * A[col][c];
        }
    }
    sigma = {A[0][n], A[1][n]};
    tau = {A[2][n], A[3][n], A[4][n]};
}

PadicPoly from_mpq_poly(const std::vector<mpq_class>& q, long p, int prec) {
    PadicPoly r;
    for (auto& c : q) r.push_back(Padic::from_mpq(p, c, prec));
    poly_trim(r);
    return r;
}

}  // namespace

CohContext make_context(const WeierstrassCurve& E, long p, int prec) {
    if (!E.good_at(p)) throw std::invalid_argument("bad prime");
    CohContext ctx;
    ctx.p = p;
    ctx.prec = prec;
    ctx.fq = {E.fc0(), E.fc1(), E.fc2(), 1};
    std::vector<mpq_class> sq, tq;
    bezout_f(ctx.fq, sq, tq);
    ctx.f = from_mpq_poly(ctx.fq, p, prec);
    ctx.df = poly_derivative(ctx.f);
    ctx.sigma = from_mpq_poly(sq, p, prec);
    ctx.tau = from_mpq_poly(tq, p, prec);
    return ctx;
}

// --- reductions ---

namespace {

// P = A*f + B*f' with deg B <= 2 (B = P*tau mod f).
void split_against_f(const CohContext& ctx, const PadicPoly& P, PadicPoly& A, PadicPoly& B) {
    B = poly_divmod(poly_mul(P, ctx.tau), ctx.f).second;
    auto [quot, rem] = poly_divmod(poly_sub(P, poly_mul(B, ctx.df)), ctx.f);
    for (auto& c : rem)
        if (!c.is_zero()) throw std::logic_error("Bezout split failed");
    A = quot;
}

}  // namespace

OddReduction reduce_odd(const CohContext& ctx, OddForm form) {
    long p = ctx.p;
    OddReduction out;
    out.c1 = Padic::exact_zero(p);
    out.c2 = Padic::exact_zero(p);
    int smax = 1;
    for (auto& [s, poly] : form) {
        if (s < 1 || s % 2 == 0) throw std::invalid_argument("reduce_odd: pole orders must be odd >= 1");
        smax = std::max(smax, s);
    }
    for (int s = smax; s >= 3; s -= 2) {
        auto it = form.find(s);
        if (it == form.end() || poly_deg(it->second) < 0) continue;
        PadicPoly A, B;
        split_against_f(ctx, it->second, A, B);
        // P/y^s dx = (A + 2/(s-2) B') / y^(s-2) dx + d( 2/(2-s) * B * y^(2-s) )
        Padic two_over = Padic::from_long(p, 2, ctx.prec) / Padic::from_long(p, s - 2, ctx.prec);
        PadicPoly down = poly_add(A, poly_scale(poly_derivative(B), two_over));
        auto& tgt = form[s - 2];
        tgt = poly_add(tgt, down);
        for (size_t j = 0; j < B.size(); ++j)
            if (!B[j].is_zero())
                out.primitive.push_back({static_cast<int>(j), 2 - s, -two_over * B[j]});
    }
    // pole order 1: reduce x-degree with d(x^k y) = (k x^(k-1) f + 1/2 x^k f') dx/y
    PadicPoly P = form.count(1) ? form[1] : PadicPoly{};
    Padic half = Padic::from_mpq(p, mpq_class(1, 2), ctx.prec);
    for (int d = poly_deg(P); d >= 2; d = poly_deg(P)) {
        int k = d - 2;
        PadicPoly w(k + 3, Padic::exact_zero(p));
        for (size_t j = 0; j < ctx.f.size(); ++j) {
            if (k >= 1) w[k - 1 + j] = w[k - 1 + j] + ctx.f[j] * static_cast<long>(k);
        }
        for (size_t j = 0; j < ctx.df.size(); ++j) w[k + j] = w[k + j] + half * ctx.df[j];
        // leading coefficient is k + 3/2, a unit for p odd
        Padic c = P[d] / w[d];
        P = poly_sub(P, poly_scale(w, c));
        if (poly_deg(P) >= d) throw std::logic_error("degree reduction did not progress");
        if (!c.is_zero()) out.primitive.push_back({k, 1, c});
    }
    if (P.size() > 0 && !P[0].is_exact_zero()) out.c1 = P[0];
    if (P.size() > 1 && !P[1].is_exact_zero()) out.c2 = P[1];
    return out;
}

EvenReduction reduce_even(const CohContext& ctx, EvenForm form) {
    long p = ctx.p;
    EvenReduction out;
    int mmax = 0;
    for (auto& [m, poly] : form) {
        if (m < 0) throw std::invalid_argument("reduce_even: negative f-power key");
        mmax = std::max(mmax, m);
    }
    for (int m = mmax; m >= 2; --m) {
        auto it = form.find(m);
        if (it == form.end() || poly_deg(it->second) < 0) continue;
        PadicPoly A, B;
        split_against_f(ctx, it->second, A, B);
        // P f^-m dx = (A + B'/(m-1)) f^(1-m) dx + d( -B f^(1-m) / (m-1) )
        Padic inv = Padic::from_long(p, 1, ctx.prec) / Padic::from_long(p, m - 1, ctx.prec);
        PadicPoly down = poly_add(A, poly_scale(poly_derivative(B), inv));
        auto& tgt = form[m - 1];
        tgt = poly_add(tgt, down);
        for (size_t j = 0; j < B.size(); ++j)
            if (!B[j].is_zero())
                out.primitive.push_back({static_cast<int>(j), 2 * (1 - m), -inv * B[j]});
    }
    // m = 1: split off the polynomial part; the deg <= 2 remainder over f is the
    // cohomology class, returned to the caller.
    PadicPoly polypart = form.count(0) ? form[0] : PadicPoly{};
    if (form.count(1) && poly_deg(form[1]) >= 0) {
        auto [quot, rem] = poly_divmod(form[1], ctx.f);
        polypart = poly_add(polypart, quot);
        out.remainder = rem;
    }
    for (size_t k = 0; k < polypart.size(); ++k)
        if (!polypart[k].is_zero())
            out.primitive.push_back({static_cast<int>(k) + 1, 0,
                                     polypart[k] / static_cast<long>(k + 1)});
    return out;
}

// --- Frobenius pullback assembly ---

int phi_series_terms(const CohContext& ctx) { return ctx.prec + 3; }

OddForm phi_omega(const CohContext& ctx, int i, int kmax) {
    if (i != 1 && i != 2) throw std::invalid_argument("phi_omega: i must be 1 or 2");
    long p = ctx.p;
    int prec = ctx.prec;
    if (kmax < 0) kmax = phi_series_terms(ctx);
    // E(x) = f(x^p) - f(x)^p, exactly over Q, then mapped to Z_p
    std::vector<mpq_class> fxp(3 * p + 1, 0), fpow = {1}, acc;
    for (int j = 0; j <= 3; ++j) fxp[j * p] += ctx.fq[j];
    // f(x)^p
    for (long e = 0; e < p; ++e) {
        acc.assign(fpow.size() + 3, 0);
        for (size_t a = 0; a < fpow.size(); ++a)
            for (int b = 0; b <= 3; ++b) acc[a + b] += fpow[a] * ctx.fq[b];
        fpow = acc;
    }
    std::vector<mpq_class> Eq(std::max(fxp.size(), fpow.size()), 0);
    for (size_t j = 0; j < fxp.size(); ++j) Eq[j] += fxp[j];
    for (size_t j = 0; j < fpow.size(); ++j) Eq[j] -= fpow[j];
    PadicPoly Epoly = from_mpq_poly(Eq, p, prec + kmax);

    OddForm form;
    PadicPoly Ek = {Padic::from_long(p, 1, prec + kmax)};
    mpq_class binom = 1;  // binom(-1/2, k)
    PadicPoly xlead(p - 1 + (i - 1) * p, Padic::exact_zero(p));
    xlead.push_back(Padic::from_long(p, p, prec + kmax));  // p * x^(p-1+(i-1)p)
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            Ek = poly_mul(Ek, Epoly);
            binom *= mpq_class(-(2 * k - 1), 2 * k);
        }
        Padic ck = Padic::from_mpq(p, binom, prec + kmax);
        int s = (2 * k + 1) * static_cast<int>(p);
        form[s] = poly_mul(poly_scale(Ek, ck), xlead);
    }
    return form;
}

// --- FrobeniusData construction, serialization, cache ---

namespace {

json padic_to_json(const Padic& v) {
    json j;
    if (v.is_exact_zero()) {
        j["v"] = "inf";
        return j;
    }
    j["v"] = v.valuation();
    j["n"] = v.abs_prec();
    j["m"] = v.mantissa().get_str();
    return j;
}

Padic padic_from_json(const json& j, long p) {
    if (j.at("v").is_string()) return Padic::exact_zero(p);
    int val = j.at("v").get<int>();
    int prec = j.at("n").get<int>();
    mpz_class m(j.at("m").get<std::string>());
    if (m == 0) return Padic::approx_zero(p, prec);
    return Padic::from_parts(p, val, m, prec);
}

json terms_to_json(const std::vector<MonomialFn>& terms) {
    json arr = json::array();
    for (auto& t : terms) arr.push_back({{"a", t.a}, {"b", t.b}, {"c", padic_to_json(t.c)}});
    return arr;
}

std::vector<MonomialFn> terms_from_json(const json& arr, long p) {
    std::vector<MonomialFn> out;
    for (auto& t : arr)
        out.push_back({t.at("a").get<int>(), t.at("b").get<int>(), padic_from_json(t.at("c"), p)});
    return out;
}

int min_prec(const FrobeniusData& fd) {
    int m = fd.prec;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!fd.M[i][j].is_exact_zero()) m = std::min(m, fd.M[i][j].abs_prec());
    return m;
}

FrobeniusData compute_frobenius(const WeierstrassCurve& E, long p, int N) {
    int Nw = 2 * N;  // working precision
    CohContext ctx = make_context(E, p, Nw);
    FrobeniusData fd{E, p, N, Nw, {}, {}, 0, false, 0};
    for (int i = 1; i <= 2; ++i) {
        OddReduction red = reduce_odd(ctx, phi_omega(ctx, i));
        fd.M[0][i - 1] = red.c1.truncate(Nw);
        fd.M[1][i - 1] = red.c2.truncate(Nw);
        fd.g[i - 1] = std::move(red.primitive);
        for (auto& t : fd.g[i - 1]) t.c = t.c.truncate(Nw);
    }
    fd.ap = trace_of_frobenius(E, p);
    fd.supersingular = (fd.ap % p) == 0;
    fd.loss = fd.prec - min_prec(fd);
    int budget = fd.supersingular ? N / 2 : N;  // doubled loss budget when supersingular
    if (fd.loss > fd.prec - budget)
        throw retry_at_higher_precision("Frobenius reduction consumed the precision budget");
    // structural checks: trace = a_p, det = p
    Padic ap = Padic::from_long(p, fd.ap, N);
    if (!(fd.trace() - ap).truncate(N - std::min(N - 1, fd.loss)).is_zero())
        throw std::logic_error("Frobenius trace does not match the point count");
    Padic detm = fd.det();
    if (detm.valuation() != 1)
        throw std::logic_error("det(M) is not p times a unit");
    if (!(detm - Padic::from_long(p, p, N)).truncate(N - std::min(N - 1, fd.loss)).is_zero())
        throw std::logic_error("det(M) != p at working precision");
    return fd;
}

}  // namespace

std::string frobenius_cache_key(const WeierstrassCurve& E, long p, int N) {
    std::ostringstream os;
    os << "frob_" << E.a1 << "_" << E.a2 << "_" << E.a3 << "_" << E.a4 << "_" << E.a6 << "_p"
       << p << "_N" << N << "_" << kCodeVersion << ".json";
    return os.str();
}

std::string serialize_frobenius(const FrobeniusData& fd) {
    json j;
    j["version"] = kCodeVersion;
    j["curve"] = {fd.E.a1.get_str(), fd.E.a2.get_str(), fd.E.a3.get_str(), fd.E.a4.get_str(),
                  fd.E.a6.get_str()};
    j["p"] = fd.p;
    j["N"] = fd.N;
    j["prec"] = fd.prec;
    j["loss"] = fd.loss;
    j["ap"] = fd.ap;
    j["supersingular"] = fd.supersingular;
    j["M"] = json::array();
    for (int i = 0; i < 2; ++i)
        j["M"].push_back({padic_to_json(fd.M[i][0]), padic_to_json(fd.M[i][1])});
    j["g1"] = terms_to_json(fd.g[0]);
    j["g2"] = terms_to_json(fd.g[1]);
    return j.dump(1);
}

FrobeniusData deserialize_frobenius(const std::string& text) {
    json j = json::parse(text);
    if (j.at("version").get<std::string>() != kCodeVersion)
        throw std::runtime_error("cache version mismatch");
    auto c = j.at("curve");
    WeierstrassCurve E(mpz_class(c[0].get<std::string>()), mpz_class(c[1].get<std::string>()),
                       mpz_class(c[2].get<std::string>()), mpz_class(c[3].get<std::string>()),
                       mpz_class(c[4].get<std::string>()));
    long p = j.at("p").get<long>();
    FrobeniusData fd{E, p, j.at("N").get<int>(), j.at("prec").get<int>(), {}, {},
                     j.at("loss").get<int>(), j.at("supersingular").get<bool>(),
                     j.at("ap").get<long>()};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) fd.M[i][k] = padic_from_json(j.at("M")[i][k], p);
    fd.g[0] = terms_from_json(j.at("g1"), p);
    fd.g[1] = terms_from_json(j.at("g2"), p);
    return fd;
}

FrobeniusData frobenius_lift(const WeierstrassCurve& E, long p, int N,
                             const std::string& cache_dir) {
    namespace fs = std::filesystem;
    fs::path file;
    if (!cache_dir.empty()) {
        file = fs::path(cache_dir) / frobenius_cache_key(E, p, N);
        if (fs::exists(file)) {
            std::ifstream in(file);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                return deserialize_frobenius(ss.str());
            } catch (const std::exception&) {
                // unreadable entry: fall through and recompute
            }
        }
    }
    FrobeniusData fd = compute_frobenius(E, p, N);
    if (!cache_dir.empty()) {
        fs::create_directories(file.parent_path());
        std::ofstream out(file);
        out << serialize_frobenius(fd);
    }
    return fd;
}

Series evaluate_monomials(const std::vector<MonomialFn>& terms, const Series& X,
                          const Series& Y) {
    long p = X.prime();
    int tr = std::min(X.trunc_order(), Y.trunc_order());
    int lowX = X.lowest(), lowY = Y.lowest();
    // Sort terms into parity groups (b even: f^(b/2); b odd: y * f^((b-1)/2)),
    // dropping terms whose leading disk order already exceeds the truncation.
    std::map<int, std::map<int, std::map<int, Padic>>> groups;  // parity -> e -> a -> c
    int amax = 0;
    for (auto& t : terms) {
        if (t.c.is_exact_zero()) continue;
        long order = static_cast<long>(t.a) * lowX + static_cast<long>(t.b) * lowY;
        if (order >= tr) continue;
        int parity = ((t.b % 2) + 2) % 2;
        int e = (t.b - parity) / 2;
        auto& c = groups[parity][e][t.a];
        c = c.prime() == 0 ? t.c : c + t.c;
        amax = std::max(amax, t.a);
    }
    Series out(p, tr);
    if (groups.empty()) return out;
    // cached powers of X
    std::vector<Series> xp;
    xp.push_back(Series::one(p, Padic::kInfValuation, tr - std::min(0, lowX) * (amax + 1)));
    for (int a = 1; a <= amax; ++a) xp.push_back(xp.back() * X);
    auto poly_at_x = [&](const std::map<int, Padic>& poly) {
        Series acc(p, xp[0].trunc_order());
        for (auto& [a, c] : poly) acc = acc + xp[a] * c;
        return acc;
    };
    Series F = Y * Y;
    Series Finv = F.inverse();
    for (auto& [parity, by_e] : groups) {
        // ascending Horner in F^-1 over k = -e >= 0; positive e handled directly
        int kmax = 0;
        for (auto& [e, poly] : by_e)
            if (e < 0) kmax = std::max(kmax, -e);
        Series acc(p, Padic::kInfValuation / 4);
        for (int k = kmax; k >= 0; --k) {
            if (k < kmax) acc = acc * Finv;
            auto it = by_e.find(-k);
            if (it != by_e.end()) acc = acc + poly_at_x(it->second);
        }
        for (auto& [e, poly] : by_e)
            if (e > 0) acc = acc + poly_at_x(poly) * F.pow(e);
        if (parity == 1) acc = acc * Y;
        out = out + acc.truncated(tr);
    }
    return out;
}

Padic evaluate_monomials_at(const std::vector<MonomialFn>& terms, const Padic& x,
                            const Padic& y) {
    long p = x.prime();
    Padic out = Padic::exact_zero(p);
    std::map<int, std::map<int, std::map<int, Padic>>> groups;
    int amax = 0;
    for (auto& t : terms) {
        if (t.c.is_exact_zero()) continue;
        int parity = ((t.b % 2) + 2) % 2;
        auto& c = groups[parity][(t.b - parity) / 2][t.a];
        c = c.prime() == 0 ? t.c : c + t.c;
        amax = std::max(amax, t.a);
    }
    std::vector<Padic> xp = {Padic::from_long(p, 1, x.abs_prec() + 8)};
    for (int a = 1; a <= amax; ++a) xp.push_back(xp.back() * x);
    Padic Finv = (y * y).inverse();
    for (auto& [parity, by_e] : groups) {
        int kmax = 0;
        for (auto& [e, poly] : by_e) kmax = std::max(kmax, -e);
        Padic acc = Padic::exact_zero(p);
        for (int k = kmax; k >= 0; --k) {
            if (k < kmax) acc = acc * Finv;
            auto it = by_e.find(-k);
            if (it == by_e.end()) continue;
            for (auto& [a, c] : it->second) acc = acc + c * xp[a];
        }
        for (auto& [e, poly] : by_e) {
            if (e <= 0) continue;
            Padic fe = (y * y).pow(static_cast<unsigned long>(e));
            for (auto& [a, c] : poly) acc = acc + c * xp[a] * fe;
        }
        if (parity == 1) acc = acc * y;
        out = out + acc;
    }
    return out;
}

Series inv_sqrt_one_plus(const Series& h, int terms) {
    long p = h.prime();
    Series acc = Series::one(p, Padic::kInfValuation, h.trunc_order());
    Series hk = acc;
    mpq_class binom = 1;
    for (int k = 1; k <= terms; ++k) {
        hk = hk * h;
        binom *= mpq_class(-(2 * k - 1), 2 * k);
        acc = acc + hk * Padic::from_mpq(p, binom, 4 * terms);
    }
    return acc;
}

Series frobenius_on_disk_parameter(const WeierstrassCurve& E, long p, const ResidueDisk& D,
                                   int order, int prec) {
    if (D.weierstrass)
        throw std::invalid_argument("Weierstrass disk parameters are not Frobenius-stable");
    PadicPoint C = teichmuller_center(E, p, D, prec);
    // parameter t = x - x_c; phi(t) = (x_c + t)^p - x_c since x_c^p = x_c
    Series out(p, order);
    Padic binom = Padic::from_long(p, 1, prec);
    // (x_c + t)^p = sum binom(p, j) x_c^(p-j) t^j
    mpz_class bin = 1;
    Padic xc_pow = C.x.pow(static_cast<unsigned long>(p));
    for (long j = 0; j <= p && j < order; ++j) {
        if (j > 0) {
            bin *= (p - j + 1);
            mpz_divexact_ui(bin.get_mpz_t(), bin.get_mpz_t(), static_cast<unsigned long>(j));
            xc_pow = C.x.is_zero() ? (j == p ? Padic::from_long(p, 1, prec) : Padic::exact_zero(p))
                                   : xc_pow / C.x;
        }
        Padic coeff = Padic::from_mpz(p, bin, prec) * xc_pow;
        if (j == 0) coeff = coeff - C.x;  // x_c^p - x_c = 0, kept for clarity
        out.set_coeff(static_cast<int>(j), coeff);
    }
    return out;
}

}  // namespace qc
