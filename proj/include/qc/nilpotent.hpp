#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace qc {

// Prime field F_Q with exact arithmetic; Q must be an odd prime for the
// group-law and splitting formulas (they divide by 2).
template <long Q>
class GF {
public:
    static_assert(Q >= 2, "modulus must be at least 2");
    GF(long v = 0) : v_(((v % Q) + Q) % Q) {}
    long value() const { return v_; }
    GF operator+(GF o) const { return GF(v_ + o.v_); }
    GF operator-(GF o) const { return GF(v_ - o.v_); }
    GF operator-() const { return GF(-v_); }
    GF operator*(GF o) const { return GF(v_ * o.v_); }
    GF inverse() const {
        if (v_ == 0) throw std::domain_error("division by zero in GF");
        long r = 1, b = v_, e = Q - 2;
        while (e) {
            if (e & 1) r = (r * b) % Q;
            b = (b * b) % Q;
            e >>= 1;
        }
        return GF(r);
    }
    GF operator/(GF o) const { return *this * o.inverse(); }
    bool operator==(GF o) const { return v_ == o.v_; }
    bool operator!=(GF o) const { return v_ != o.v_; }

private:
    long v_;
};

template <class K>
K half_scalar() {
    return K(1) / K(2);
}

// Element a A + b B + c C of the level-2 free nilpotent Lie algebra on A, B
// with center spanned by C = [A, B]; doubles as the group U_2 via log.
template <class K>
struct Nil {
    K a{}, b{}, c{};
    bool operator==(const Nil& o) const {
        return a == o.a && b == o.b && c == o.c;
    }
    bool operator!=(const Nil& o) const { return !(*this == o); }
};

template <class K>
Nil<K> nil_zero() {
    return Nil<K>{};
}

// Campbell-Hausdorff product at level 2:
// (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+(1/2)(ab'-ba')).
template <class K>
Nil<K> bch_mul(const Nil<K>& u, const Nil<K>& v) {
    K cross = (u.a * v.b - u.b * v.a) * half_scalar<K>();
    return Nil<K>{u.a + v.a, u.b + v.b, u.c + v.c + cross};
}

template <class K>
Nil<K> bch_inverse(const Nil<K>& u) {
    return Nil<K>{-u.a, -u.b, -u.c};
}

// m(lambda): lambda on the L1 part, lambda^2 on the center.
template <class K>
Nil<K> m_lambda(const K& lam, const Nil<K>& u) {
    return Nil<K>{lam * u.a, lam * u.b, lam * lam * u.c};
}

// The involution I: -1 on L1 coordinates, +1 on the center.
template <class K>
Nil<K> involution(const Nil<K>& u) {
    return Nil<K>{-u.a, -u.b, u.c};
}

// The equivariant splitting s(x) = (1/2)(x' - I(x')) for any lift x' of x.
template <class K>
Nil<K> splitting(const Nil<K>& lift) {
    Nil<K> d = Nil<K>{lift.a - (-lift.a), lift.b - (-lift.b), lift.c - lift.c};
    return Nil<K>{d.a * half_scalar<K>(), d.b * half_scalar<K>(), K(0)};
}

// Symplectic bracket on L1 coordinates: [x, y] = x_a y_b - x_b y_a, landing
// in the center.
template <class K>
K l1_bracket(const std::array<K, 2>& x, const std::array<K, 2>& y) {
    return x[0] * y[1] - x[1] * y[0];
}

// Finite group with a 2x2 linear action on L1, the induced determinant
// character on the center, and a distinguished additive character c.
template <class K>
struct GroupModel {
    int n = 1;
    std::vector<std::vector<int>> mul;  // mul[g][h], identity at index 0
    std::vector<int> inv;
    std::vector<std::array<K, 4>> act;  // row-major 2x2 matrices
    std::vector<K> zchar;               // det of act: the action on Z
    std::vector<K> c;                   // additive character G -> K

    std::array<K, 2> act_l1(int g, const std::array<K, 2>& x) const {
        const std::array<K, 4>& M = act[g];
        return {M[0] * x[0] + M[1] * x[1], M[2] * x[0] + M[3] * x[1]};
    }
    Nil<K> act_nil(int g, const Nil<K>& u) const {
        std::array<K, 2> l1 = act_l1(g, {u.a, u.b});
        return Nil<K>{l1[0], l1[1], zchar[g] * u.c};
    }

    // Cyclic group of order n generated by the matrix M (M^n must be the
    // identity); the character sends the generator to gamma (n*gamma must
    // vanish in K, e.g. gamma = 0 over Q or n | char over F_q... any gamma
    // with n*gamma == 0).
    static GroupModel cyclic(int n, const std::array<K, 4>& M, const K& gamma);
};

template <class K>
GroupModel<K> GroupModel<K>::cyclic(int n, const std::array<K, 4>& M,
                                    const K& gamma) {
    GroupModel<K> G;
    G.n = n;
    G.mul.assign(n, std::vector<int>(n));
    G.inv.assign(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G.mul[i][j] = (i + j) % n;
    for (int i = 0; i < n; ++i) G.inv[i] = (n - i) % n;
    std::array<K, 4> I{K(1), K(0), K(0), K(1)};
    G.act.assign(n, I);
    for (int i = 1; i < n; ++i) {
        const std::array<K, 4>& P = G.act[i - 1];
        G.act[i] = {P[0] * M[0] + P[1] * M[2], P[0] * M[1] + P[1] * M[3],
                    P[2] * M[0] + P[3] * M[2], P[2] * M[1] + P[3] * M[3]};
    }
    {
        const std::array<K, 4>& last = G.act[n - 1];
        std::array<K, 4> Mn = {
            last[0] * M[0] + last[1] * M[2], last[0] * M[1] + last[1] * M[3],
            last[2] * M[0] + last[3] * M[2], last[2] * M[1] + last[3] * M[3]};
        if (!(Mn == I))
            throw std::invalid_argument("generator matrix order does not divide n");
    }
    G.zchar.assign(n, K(1));
    for (int i = 0; i < n; ++i)
        G.zchar[i] = G.act[i][0] * G.act[i][3] - G.act[i][1] * G.act[i][2];
    G.c.assign(n, K(0));
    K acc = K(0);
    for (int i = 1; i < n; ++i) {
        acc = acc + gamma;
        G.c[i] = acc;
    }
    if (!(acc + gamma == K(0)))
        throw std::invalid_argument("character value does not close up the cycle");
    return G;
}

// Cochain tables (identity-normalized inhomogeneous cochains).
template <class K>
using C1L1 = std::vector<std::array<K, 2>>;  // G -> L1
template <class K>
using C1Z = std::vector<K>;  // G -> Z
template <class K>
using C2L1 = std::vector<std::vector<std::array<K, 2>>>;  // G x G -> L1
template <class K>
using C2Z = std::vector<std::vector<K>>;  // G x G -> Z
template <class K>
using C3Z = std::vector<std::vector<std::vector<K>>>;

// (c ∪ c')(g, h) = [c(g), g·c'(h)] for L1-valued arguments.
template <class K>
C2Z<K> cup(const GroupModel<K>& G, const C1L1<K>& x, const C1L1<K>& y) {
    C2Z<K> out(G.n, std::vector<K>(G.n, K(0)));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            out[g][h] = l1_bracket<K>(x[g], G.act_l1(g, y[h]));
    return out;
}

// scalar ∪ L1: (c ∪ a)(g, h) = c(g) · g·a(h), valued in L1.
template <class K>
C2L1<K> cup_scalar_l1(const GroupModel<K>& G, const C1Z<K>& c,
                      const C1L1<K>& a) {
    C2L1<K> out(G.n, std::vector<std::array<K, 2>>(G.n, {K(0), K(0)}));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h) {
            std::array<K, 2> v = G.act_l1(g, a[h]);
            out[g][h] = {c[g] * v[0], c[g] * v[1]};
        }
    return out;
}

// scalar ∪ Z: (c ∪ a)(g, h) = c(g) · g·a(h), valued in Z.
template <class K>
C2Z<K> cup_scalar_z(const GroupModel<K>& G, const C1Z<K>& c, const C1Z<K>& a) {
    C2Z<K> out(G.n, std::vector<K>(G.n, K(0)));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h) out[g][h] = c[g] * G.zchar[g] * a[h];
    return out;
}

// Inhomogeneous differentials.
template <class K>
C2L1<K> d1(const GroupModel<K>& G, const C1L1<K>& a) {
    C2L1<K> out(G.n, std::vector<std::array<K, 2>>(G.n, {K(0), K(0)}));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h) {
            std::array<K, 2> ga = G.act_l1(g, a[h]);
            out[g][h] = {ga[0] - a[G.mul[g][h]][0] + a[g][0],
                         ga[1] - a[G.mul[g][h]][1] + a[g][1]};
        }
    return out;
}

template <class K>
C2Z<K> d1z(const GroupModel<K>& G, const C1Z<K>& a) {
    C2Z<K> out(G.n, std::vector<K>(G.n, K(0)));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            out[g][h] = G.zchar[g] * a[h] - a[G.mul[g][h]] + a[g];
    return out;
}

template <class K>
C3Z<K> d2z(const GroupModel<K>& G, const C2Z<K>& f) {
    C3Z<K> out(G.n, std::vector<std::vector<K>>(G.n, std::vector<K>(G.n, K(0))));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            for (int k = 0; k < G.n; ++k)
                out[g][h][k] = G.zchar[g] * f[h][k] - f[G.mul[g][h]][k] +
                               f[g][G.mul[h][k]] - f[g][h];
    return out;
}

template <class K>
bool is_zero_c2l1(const C2L1<K>& t) {
    for (const auto& row : t)
        for (const auto& v : row)
            if (!(v[0] == K(0)) || !(v[1] == K(0))) return false;
    return true;
}

template <class K>
bool is_zero_c2z(const C2Z<K>& t) {
    for (const auto& row : t)
        for (const auto& v : row)
            if (!(v == K(0))) return false;
    return true;
}

// d2z == 0 without materializing the n^3 table; bails on the first
// nonvanishing entry.
template <class K>
bool d2z_vanishes(const GroupModel<K>& G, const C2Z<K>& f) {
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            for (int k = 0; k < G.n; ++k) {
                K v = G.zchar[g] * f[h][k] - f[G.mul[g][h]][k] +
                      f[g][G.mul[h][k]] - f[g][h];
                if (!(v == K(0))) return false;
            }
    return true;
}

template <class K>
bool is_zero_c3z(const C3Z<K>& t) {
    for (const auto& pl : t)
        for (const auto& row : pl)
            for (const auto& v : row)
                if (!(v == K(0))) return false;
    return true;
}

// Dense exact Gaussian elimination: solve A u = rhs, A given by rows.
template <class K>
std::optional<std::vector<K>> solve_linear(std::vector<std::vector<K>> A,
                                           std::vector<K> rhs) {
    const size_t rows = A.size();
    const size_t cols = rows ? A[0].size() : 0;
    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && A[piv][c] == K(0)) ++piv;
        if (piv == rows) continue;
        std::swap(A[piv], A[r]);
        std::swap(rhs[piv], rhs[r]);
        K inv = K(1) / A[r][c];
        for (size_t j = c; j < cols; ++j) A[r][j] = A[r][j] * inv;
        rhs[r] = rhs[r] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == K(0)) continue;
            K f = A[i][c];
            for (size_t j = c; j < cols; ++j) A[i][j] = A[i][j] - f * A[r][j];
            rhs[i] = rhs[i] - f * rhs[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (!(rhs[i] == K(0))) return std::nullopt;  // inconsistent
    std::vector<K> u(cols, K(0));
    for (size_t i = 0; i < r; ++i) u[pivot_col[i]] = rhs[i];
    return u;
}

// du = target for a Z-valued 1-cochain u; the coboundary certificate.
template <class K>
std::optional<C1Z<K>> coboundary_preimage(const GroupModel<K>& G,
                                          const C2Z<K>& target) {
    std::vector<std::vector<K>> A;
    std::vector<K> rhs;
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h) {
            std::vector<K> row(G.n, K(0));
            row[h] = row[h] + G.zchar[g];
            row[G.mul[g][h]] = row[G.mul[g][h]] - K(1);
            row[g] = row[g] + K(1);
            A.push_back(std::move(row));
            rhs.push_back(target[g][h]);
        }
    std::optional<std::vector<K>> u = solve_linear(std::move(A), std::move(rhs));
    if (!u) return std::nullopt;
    return C1Z<K>(u->begin(), u->end());
}

// db = target for an L1-valued 1-cochain b.
template <class K>
std::optional<C1L1<K>> coboundary_preimage_l1(const GroupModel<K>& G,
                                              const C2L1<K>& target) {
    std::vector<std::vector<K>> A;
    std::vector<K> rhs;
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            for (int comp = 0; comp < 2; ++comp) {
                std::vector<K> row(2 * G.n, K(0));
                // g acting on b(h): row of the matrix picks both components
                row[2 * h] = row[2 * h] + G.act[g][2 * comp];
                row[2 * h + 1] = row[2 * h + 1] + G.act[g][2 * comp + 1];
                row[2 * G.mul[g][h] + comp] = row[2 * G.mul[g][h] + comp] - K(1);
                row[2 * g + comp] = row[2 * g + comp] + K(1);
                A.push_back(std::move(row));
                rhs.push_back(target[g][h][comp]);
            }
    std::optional<std::vector<K>> u = solve_linear(std::move(A), std::move(rhs));
    if (!u) return std::nullopt;
    C1L1<K> b(G.n, {K(0), K(0)});
    for (int g = 0; g < G.n; ++g) b[g] = {(*u)[2 * g], (*u)[2 * g + 1]};
    return b;
}

// Propagate-and-verify solver for du = target when the model is cyclic
// (mul[i][j] = i+j mod n): u(e) is pinned by the (e, e) equation, u(g) is a
// free scalar propagated around the cycle, the wrap-around equation fixes
// it, and every equation is verified afterwards.  O(n^2) instead of the
// dense solver's O(n^5).
template <class K>
std::optional<C1Z<K>> coboundary_preimage_cyclic(const GroupModel<K>& G,
                                                 const C2Z<K>& target) {
    const int n = G.n;
    std::vector<K> base(n, K(0)), coef(n, K(0));
    base[0] = target[0][0];  // du(e, e) = u(e)
    if (n > 1) coef[1] = K(1);
    const K z1 = n > 1 ? G.zchar[1] : K(1);
    for (int i = 1; i + 1 < n; ++i) {
        base[i + 1] = z1 * base[i] + base[1] - target[1][i];
        coef[i + 1] = z1 * coef[i] + coef[1];
    }
    K s = K(0);
    if (n > 1) {
        // wrap: z1 u(g^{n-1}) + u(g) - t(g, g^{n-1}) = u(e)
        K A = z1 * coef[n - 1] + K(1);
        K B = base[0] + target[1][n - 1] - z1 * base[n - 1];
        if (!(A == K(0)))
            s = B / A;
        else if (!(B == K(0)))
            return std::nullopt;
    }
    C1Z<K> u(n, K(0));
    for (int i = 0; i < n; ++i) u[i] = base[i] + coef[i] * s;
    C2Z<K> du = d1z(G, u);
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            if (!(du[g][h] == target[g][h])) return std::nullopt;
    return u;
}

// L1-valued variant: the free unknown u(g) lives in K^2 and propagates
// through the 2x2 action matrices; the wrap-around system is 2x2.
template <class K>
std::optional<C1L1<K>> coboundary_preimage_l1_cyclic(const GroupModel<K>& G,
                                                     const C2L1<K>& target) {
    const int n = G.n;
    using V = std::array<K, 2>;
    using M = std::array<K, 4>;
    auto mat_vec = [](const M& m, const V& v) -> V {
        return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    };
    auto mat_mul = [](const M& x, const M& y) -> M {
        return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
    };
    std::vector<V> base(n, V{K(0), K(0)});
    std::vector<M> coef(n, M{K(0), K(0), K(0), K(0)});
    base[0] = target[0][0];
    const M I{K(1), K(0), K(0), K(1)};
    if (n > 1) coef[1] = I;
    const M A1 = n > 1 ? G.act[1] : I;
    for (int i = 1; i + 1 < n; ++i) {
        V t = mat_vec(A1, base[i]);
        base[i + 1] = {t[0] + base[1][0] - target[1][i][0],
                       t[1] + base[1][1] - target[1][i][1]};
        M c = mat_mul(A1, coef[i]);
        coef[i + 1] = {c[0] + coef[1][0], c[1] + coef[1][1],
                       c[2] + coef[1][2], c[3] + coef[1][3]};
    }
    V s{K(0), K(0)};
    if (n > 1) {
        M A = mat_mul(A1, coef[n - 1]);
        A = {A[0] + K(1), A[1], A[2], A[3] + K(1)};
        V t = mat_vec(A1, base[n - 1]);
        V B = {base[0][0] + target[1][n - 1][0] - t[0],
               base[0][1] + target[1][n - 1][1] - t[1]};
        std::optional<std::vector<K>> sol = solve_linear<K>(
            {{A[0], A[1]}, {A[2], A[3]}}, {B[0], B[1]});
        if (!sol) return std::nullopt;
        s = {(*sol)[0], (*sol)[1]};
    }
    C1L1<K> u(n, V{K(0), K(0)});
    for (int i = 0; i < n; ++i) {
        V cs = mat_vec(coef[i], s);
        u[i] = {base[i][0] + cs[0], base[i][1] + cs[1]};
    }
    C2L1<K> du = d1(G, u);
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            if (!(du[g][h][0] == target[g][h][0]) ||
                !(du[g][h][1] == target[g][h][1]))
                return std::nullopt;
    return u;
}

// The Maurer-Cartan pair check: a1 a cocycle and da2 = -(1/2)(a1 ∪ a1).
template <class K>
struct CocycleCheck {
    bool ok = false;
    C2L1<K> defect_a1;
    C2Z<K> defect_a2;
};

template <class K>
CocycleCheck<K> check_nonabelian_cocycle(const GroupModel<K>& G,
                                         const C1L1<K>& a1, const C1Z<K>& a2) {
    CocycleCheck<K> out;
    out.defect_a1 = d1(G, a1);
    C2Z<K> mc = cup(G, a1, a1);
    C2Z<K> da2 = d1z(G, a2);
    out.defect_a2.assign(G.n, std::vector<K>(G.n, K(0)));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            out.defect_a2[g][h] = da2[g][h] + mc[g][h] * half_scalar<K>();
    out.ok = is_zero_c2l1(out.defect_a1) && is_zero_c2z(out.defect_a2);
    return out;
}

// phi = b ∪ a1 - 2 c ∪ a2, with the preconditions db = c ∪ a1 and the
// Maurer-Cartan pair condition verified exactly; d phi = 0 checked.
template <class K>
struct MasseyResult {
    bool ok = false;
    std::string note;
    C2Z<K> phi;
};

template <class K>
MasseyResult<K> massey_phi(const GroupModel<K>& G, const C1L1<K>& b,
                           const C1Z<K>& c, const C1L1<K>& a1,
                           const C1Z<K>& a2) {
    MasseyResult<K> out;
    CocycleCheck<K> cc = check_nonabelian_cocycle(G, a1, a2);
    if (!cc.ok) {
        out.note = "Maurer-Cartan pair condition fails";
        return out;
    }
    C2L1<K> db = d1(G, b);
    C2L1<K> ca1 = cup_scalar_l1(G, c, a1);
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            for (int comp = 0; comp < 2; ++comp)
                if (!(db[g][h][comp] == ca1[g][h][comp])) {
                    out.note = "db != c cup a1";
                    return out;
                }
    C2Z<K> ba1 = cup(G, b, a1);
    C2Z<K> ca2 = cup_scalar_z(G, c, a2);
    out.phi.assign(G.n, std::vector<K>(G.n, K(0)));
    for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h)
            out.phi[g][h] = ba1[g][h] - K(2) * ca2[g][h];
    if (!d2z_vanishes(G, out.phi)) {
        out.note = "d phi != 0";
        return out;
    }
    out.ok = true;
    return out;
}

// Gauge action (u · a)(g) = u * a(g) * g(u^{-1}) on U2-valued cochains.
template <class K>
void gauge_act(const GroupModel<K>& G, const Nil<K>& u, C1L1<K>& a1, C1Z<K>& a2) {
    for (int g = 0; g < G.n; ++g) {
        Nil<K> ag{a1[g][0], a1[g][1], a2[g]};
        Nil<K> moved = bch_mul(bch_mul(u, ag), G.act_nil(g, bch_inverse(u)));
        a1[g] = {moved.a, moved.b};
        a2[g] = moved.c;
    }
}

// Aggregate pass/fail summary of the randomized identity suite (exact
// arithmetic over Q and over F_101), used by the CLI selftest and the
// acceptance harness.
struct NilpotentSuiteResult {
    int instances = 0;
    int failures = 0;
    double seconds = 0.0;
    bool ok() const { return instances > 0 && failures == 0; }
};

NilpotentSuiteResult run_nilpotent_suite(int instances, std::uint64_t seed);

}  // namespace qc
