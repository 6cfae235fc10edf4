#include "qc/nilpotent.hpp"

#include <chrono>
#include <random>

namespace qc {

namespace {

// Integer 2x2 matrices of small multiplicative order (valid over any field
// in which the order is invertible, i.e. any field we use here).
template <class K>
std::array<K, 4> order_matrix(int order) {
    switch (order) {
        case 1: return {K(1), K(0), K(0), K(1)};
        case 2: return {K(-1), K(0), K(0), K(-1)};
        case 3: return {K(0), K(-1), K(1), K(-1)};
        case 4: return {K(0), K(-1), K(1), K(0)};
        case 6: return {K(1), K(-1), K(1), K(0)};
        default: throw std::invalid_argument("unsupported matrix order");
    }
}

template <class K>
K rand_scalar(std::mt19937_64& rng);

template <>
mpq_class rand_scalar<mpq_class>(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-9, 9);
    std::uniform_int_distribution<long> den(1, 4);
    mpq_class v(num(rng), den(rng));
    v.canonicalize();
    return v;
}

template <>
GF<101> rand_scalar<GF<101>>(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> d(0, 100);
    return GF<101>(d(rng));
}

template <class K>
bool run_instance(const GroupModel<K>& G, std::mt19937_64& rng,
                  bool central_twist) {
    const int n = G.n;
    auto rnd = [&]() { return rand_scalar<K>(rng); };

    // --- group law, m(lambda), splitting -------------------------------
    Nil<K> u{rnd(), rnd(), rnd()}, v{rnd(), rnd(), rnd()}, w{rnd(), rnd(), rnd()};
    if (!(bch_mul(bch_mul(u, v), w) == bch_mul(u, bch_mul(v, w)))) return false;
    if (!(bch_mul(u, bch_inverse(u)) == nil_zero<K>())) return false;
    K lam = rnd(), mu = rnd();
    if (!(m_lambda(lam, bch_mul(u, v)) ==
          bch_mul(m_lambda(lam, u), m_lambda(lam, v))))
        return false;
    if (!(m_lambda(lam, m_lambda(mu, u)) == m_lambda(K(lam * mu), u))) return false;
    {
        Nil<K> lift1 = u;
        Nil<K> lift2 = u;
        lift2.c = lift2.c + rnd();  // lifts differing by a central element
        if (!(splitting(lift1) == splitting(lift2))) return false;
        Nil<K> s = splitting(u);
        if (!(s.a == u.a && s.b == u.b && s.c == K(0))) return false;
        for (int g = 0; g < n; ++g)
            if (!(splitting(G.act_nil(g, u)) == G.act_nil(g, splitting(u))))
                return false;
    }

    // --- d o d = 0 ------------------------------------------------------
    {
        C1Z<K> f(n, K(0));
        C1L1<K> fl(n, {K(0), K(0)});
        for (int g = 0; g < n; ++g) {
            f[g] = rnd();
            fl[g] = {rnd(), rnd()};
        }
        if (!d2z_vanishes(G, d1z(G, f))) return false;
    }

    // --- a Maurer-Cartan pair from the solver ---------------------------
    // a1(g) = g*x - x for random x: a 1-cocycle for any action.
    C1L1<K> a1(n, {K(0), K(0)});
    {
        std::array<K, 2> x{rnd(), rnd()};
        for (int g = 0; g < n; ++g) {
            std::array<K, 2> gx = G.act_l1(g, x);
            a1[g] = {gx[0] - x[0], gx[1] - x[1]};
        }
    }
    C2Z<K> mc = cup(G, a1, a1);
    C2Z<K> target(n, std::vector<K>(n, K(0)));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            target[g][h] = -(mc[g][h] * half_scalar<K>());
    std::optional<C1Z<K>> a2 = coboundary_preimage_cyclic(G, target);
    if (!a2) return false;  // the finite model's stand-in for vanishing H^2
    if (!check_nonabelian_cocycle(G, a1, *a2).ok) return false;

    // --- the Massey cocycle ---------------------------------------------
    std::optional<C1L1<K>> b =
        coboundary_preimage_l1_cyclic(G, cup_scalar_l1(G, G.c, a1));
    if (!b) return false;
    MasseyResult<K> m1 = massey_phi(G, *b, G.c, a1, *a2);
    if (!m1.ok) return false;

    // --- gauge independence (the coboundary certificate) ----------------
    {
        Nil<K> gauge{rnd(), rnd(), rnd()};
        C1L1<K> a1g = a1;
        C1Z<K> a2g = *a2;
        gauge_act(G, gauge, a1g, a2g);
        if (!check_nonabelian_cocycle(G, a1g, a2g).ok) return false;
        C1L1<K> bg = *b;
        for (int g = 0; g < n; ++g) {
            // b may be corrected by c ∪ u1 when a is gauged by u
            std::array<K, 2> gu = G.act_l1(g, {gauge.a, gauge.b});
            bg[g] = {bg[g][0] + G.c[g] * gu[0], bg[g][1] + G.c[g] * gu[1]};
        }
        MasseyResult<K> m2 = massey_phi(G, bg, G.c, a1g, a2g);
        if (!m2.ok) return false;
        C2Z<K> diff(n, std::vector<K>(n, K(0)));
        for (int g = 0; g < n; ++g)
            for (int h = 0; h < n; ++h)
                diff[g][h] = m2.phi[g][h] - m1.phi[g][h];
        if (!coboundary_preimage_cyclic(G, diff)) return false;
    }

    // --- the lambda-scaling decomposition --------------------------------
    {
        K zeta = K(0);
        if (central_twist) zeta = rnd();  // requires n*zeta = 0 in K
        C1Z<K> z(n, K(0));
        {
            K acc = K(0);
            for (int g = 1; g < n; ++g) {
                acc = acc + zeta;
                z[g] = acc;
            }
            if (!is_zero_c2z(d1z(G, z))) return false;  // central cocycle
        }
        C1L1<K> s1(n, {K(0), K(0)});
        C1Z<K> s2(n, K(0));
        for (int g = 0; g < n; ++g) {
            s1[g] = {lam * a1[g][0], lam * a1[g][1]};
            s2[g] = lam * lam * (*a2)[g] + z[g];
        }
        // independent choice of the b-cochain for s: lambda*b + (g*x - x)
        C1L1<K> bs(n, {K(0), K(0)});
        std::array<K, 2> x{rnd(), rnd()};
        for (int g = 0; g < n; ++g) {
            std::array<K, 2> gx = G.act_l1(g, x);
            bs[g] = {lam * (*b)[g][0] + gx[0] - x[0],
                     lam * (*b)[g][1] + gx[1] - x[1]};
        }
        MasseyResult<K> ms = massey_phi(G, bs, G.c, s1, s2);
        if (!ms.ok) return false;
        // phi_s - lambda^2 phi_y - 2 c ∪ (m(lambda)a - s) must be a
        // coboundary; the last cochain is central, equal to -z.
        C1Z<K> mz(n, K(0));
        for (int g = 0; g < n; ++g) mz[g] = -z[g];
        C2Z<K> cz = cup_scalar_z(G, G.c, mz);
        C2Z<K> resid(n, std::vector<K>(n, K(0)));
        for (int g = 0; g < n; ++g)
            for (int h = 0; h < n; ++h)
                resid[g][h] =
                    ms.phi[g][h] - lam * lam * m1.phi[g][h] - K(2) * cz[g][h];
        std::optional<C1Z<K>> cert = coboundary_preimage_cyclic(G, resid);
        if (!cert) return false;
        C2Z<K> back = d1z(G, *cert);
        for (int g = 0; g < n; ++g)
            for (int h = 0; h < n; ++h)
                if (!(back[g][h] == resid[g][h])) return false;
    }
    return true;
}

}  // namespace

NilpotentSuiteResult run_nilpotent_suite(int instances, std::uint64_t seed) {
    auto start = std::chrono::steady_clock::now();
    NilpotentSuiteResult out;
    std::mt19937_64 rng(seed);
    const int orders[] = {2, 3, 4, 6};
    // The order-101 unipotent model over F_101: the one family with a
    // nontrivial additive character (101 * zeta = 0 there), exercising the
    // genuinely twisted instances.
    GroupModel<GF<101>> big = GroupModel<GF<101>>::cyclic(
        101, {GF<101>(1), GF<101>(1), GF<101>(0), GF<101>(1)}, GF<101>(1));
    for (int i = 0; i < instances; ++i) {
        bool ok;
        if (i % 20 == 19) {
            ok = run_instance<GF<101>>(big, rng, true);
        } else if (i % 2 == 0) {
            GroupModel<mpq_class> G = GroupModel<mpq_class>::cyclic(
                orders[(i / 2) % 4], order_matrix<mpq_class>(orders[(i / 2) % 4]),
                mpq_class(0));
            ok = run_instance<mpq_class>(G, rng, false);
        } else {
            GroupModel<GF<101>> G = GroupModel<GF<101>>::cyclic(
                orders[(i / 2) % 4], order_matrix<GF<101>>(orders[(i / 2) % 4]),
                GF<101>(0));
            ok = run_instance<GF<101>>(G, rng, false);
        }
        ++out.instances;
        if (!ok) ++out.failures;
    }
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

}  // namespace qc
