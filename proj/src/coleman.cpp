#include "qc/coleman.hpp"

#include <algorithm>
#include <sstream>

namespace qc {

Series to_padic_series(const QSeries& q, long p, int prec) {
    Series out(p, q.trunc_order());
    for (auto& [k, c] : q.terms()) out.set_coeff(k, Padic::from_mpq(p, c, prec));
    return out;
}

namespace {

// f(X) for a truncated series X, Horner with the context coefficients.
Series poly_at_series(const PadicPoly& f, const Series& X) {
    long p = X.prime();
    Series acc(p, Padic::kInfValuation / 4);
    for (int k = poly_deg(f); k >= 0; --k) {
        if (k < poly_deg(f)) acc = acc * X;
        acc = acc + Series::constant(p, f[k], acc.trunc_order());
    }
    return acc;
}

// min valuation floor of the known coefficients, optionally skipping t^0
int series_floor(const Series& s, bool skip_const) {
    int floor = Padic::kInfValuation / 4;
    for (auto& [k, c] : s.coeffs()) {
        if (skip_const && k == 0) continue;
        int v = c.is_zero() ? c.abs_prec() : c.valuation();
        floor = std::min(floor, v);
    }
    return floor;
}

// g stored as monomials, multiplied against an odd form P_s(x) y^{-s} dx
// or against omega_i = x^(i-1) y^-1 dx; everything lands in the even part.
void accumulate_even_product(EvenForm& out, const std::vector<MonomialFn>& g,
                             const OddForm& odd, const Padic& scale) {
    for (auto& term : g) {
        if (term.c.is_exact_zero()) continue;
        for (auto& [s, poly] : odd) {
            int m = (s - term.b) / 2;
            PadicPoly shifted(term.a, Padic());
            for (auto& c : shifted) c = Padic::exact_zero(term.c.prime());
            for (auto& c : poly) shifted.push_back(c * term.c * scale);
            auto& slot = out[m];
            slot = slot.empty() ? shifted : poly_add(slot, shifted);
        }
    }
}

}  // namespace

ColemanSystem::ColemanSystem(const WeierstrassCurve& E, long p, int N,
                             const std::string& cache_dir)
    : E_(E),
      p_(p),
      N_(N),
      fd_(frobenius_lift(E, p, N, cache_dir)),
      ctx_(make_context(E, p, fd_.prec)) {
    Nw_ = fd_.prec;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M_[i][j] = fd_.M[i][j];
    detM_ = fd_.det();
    half_ = Padic::from_mpq(p_, mpq_class(1, 2), Nw_ + 4);
    check_val_ = Padic::kInfValuation / 4;
    build();
}

void ColemanSystem::note_residual(const Series& s, const char* what) const {
    int floor = series_floor(s, /*skip_const=*/true);
    check_val_ = std::min(check_val_, floor);
    if (floor < N_ / 2) {
        std::ostringstream os;
        os << "internal consistency residual too large (" << what << "): valuation "
           << floor << " < " << N_ / 2;
        throw retry_at_higher_precision(os.str());
    }
}

void ColemanSystem::note_residual(const Padic& v, const char* what) const {
    int floor = v.is_zero() ? v.abs_prec() : v.valuation();
    check_val_ = std::min(check_val_, floor);
    if (floor < N_ / 2) {
        std::ostringstream os;
        os << "internal consistency residual too large (" << what << "): valuation "
           << floor << " < " << N_ / 2;
        throw retry_at_higher_precision(os.str());
    }
}

template <class T>
T ColemanSystem::w_combo(bool forJ, const T& L1, const T& L2, const T& G,
                         const T& H) const {
    const Padic& cg = forJ ? c2_ : c1_;
    const Padic& mg1 = forJ ? M_[0][1] : M_[0][0];  // coefficient on L1 G
    const Padic& mg2 = forJ ? M_[1][1] : M_[1][0];  // coefficient on L2 G
    const Padic& mc1 = forJ ? M_[0][0] : M_[0][1];  // coefficient on cg L1
    const Padic& mc2 = forJ ? M_[1][0] : M_[1][1];  // coefficient on cg L2
    T out = L1 * G * mg1 + L2 * G * mg2;
    out = out + L1 * L1 * (half_ * M_[0][0] * M_[0][1]);
    out = out + L2 * L2 * (half_ * M_[1][0] * M_[1][1]);
    out = out + L1 * L2 * (M_[0][1] * M_[1][0]);
    out = out + G * cg + L1 * (cg * mc1) + L2 * (cg * mc2);
    out = out + H;
    return out;
}

Padic ColemanSystem::w_at_point(bool forJ, const Padic& x, const Padic& y,
                                const Padic& L1v, const Padic& L2v) const {
    Padic G = evaluate_monomials_at(fd_.g[forJ ? 0 : 1], x, y);
    Padic H = evaluate_monomials_at(forJ ? hJ_ : hK_, x, y);
    return w_combo(forJ, L1v, L2v, G, H);
}

void ColemanSystem::build() {
    // --- even leftovers of the iterated-integral decompositions ---------
    OddForm pw1 = phi_omega(ctx_, 1);
    OddForm pw2 = phi_omega(ctx_, 2);
    Padic one = Padic::from_long(p_, 1, Nw_ + 4);
    OddForm w1form = {{1, {one}}};
    OddForm w2form = {{1, {Padic::approx_zero(p_, Nw_ + 4), one}}};

    EvenForm evJ, evK;
    accumulate_even_product(evJ, fd_.g[1], pw1, one);
    accumulate_even_product(evJ, fd_.g[0], w1form, -M_[0][1]);
    accumulate_even_product(evJ, fd_.g[0], w2form, -M_[1][1]);
    accumulate_even_product(evK, fd_.g[0], pw2, one);
    accumulate_even_product(evK, fd_.g[1], w1form, -M_[0][0]);
    accumulate_even_product(evK, fd_.g[1], w2form, -M_[1][0]);

    // The descent through pole orders divides by m - 1 at every step, and
    // naive precision tracking compounds those losses even though the true
    // loss of an exact reduction is only logarithmic in the pole order.
    // Work on exact representative lifts with enough headroom for the
    // pessimistic bookkeeping, then cut the results back to an honest level.
    int mmax = 1;
    for (auto& [m, poly] : evJ) mmax = std::max(mmax, m);
    for (auto& [m, poly] : evK) mmax = std::max(mmax, m);
    int cascade = 0;
    for (long q = p_; q <= mmax; q *= p_) cascade += mmax / static_cast<int>(q);
    int lift_prec = Nw_ + cascade + 8;
    auto lift_rep = [&](const Padic& c) {
        if (c.abs_prec() >= lift_prec) return c;
        if (c.is_zero()) return Padic::approx_zero(p_, lift_prec);
        return Padic::from_parts(p_, c.valuation(), c.mantissa(), lift_prec);
    };
    int honest = Nw_ - 8;
    for (auto* form : {&evJ, &evK})
        for (auto& [m, poly] : *form)
            for (auto& c : poly) c = lift_rep(c);
    EvenReduction redJ = reduce_even(ctx_, evJ);
    EvenReduction redK = reduce_even(ctx_, evK);
    hJ_ = redJ.primitive;
    hK_ = redK.primitive;
    for (auto& t : hJ_) t.c = t.c.truncate(honest);
    for (auto& t : hK_) t.c = t.c.truncate(honest);
    for (auto& c : redJ.remainder)
        note_residual(c.truncate(honest), "even class of g2 phi*w1");
    for (auto& c : redK.remainder)
        note_residual(c.truncate(honest), "even class of g1 phi*w2");

    // --- base-disk expansions --------------------------------------------
    int minlow = -2;
    auto scan = [&](const std::vector<MonomialFn>& terms) {
        for (auto& t : terms) minlow = std::min(minlow, -2 * t.a - 3 * t.b);
    };
    scan(fd_.g[0]);
    scan(fd_.g[1]);
    scan(hJ_);
    scan(hK_);
    Te_ = N_ + 30 - minlow + 8 * static_cast<int>(p_);
    Td_ = N_ + 10;

    LocalExpansion lx = local_expansion_at_origin(E_, Te_ + 10);
    QSeries Yq = lx.y + (lx.x * mpq_class(E_.a1) +
                         QSeries::monomial(0, mpq_class(E_.a3), lx.y.trunc_order())) *
                            mpq_class(1, 2);
    ed_.x = to_padic_series(lx.x, p_, Nw_);
    ed_.y = to_padic_series(Yq, p_, Nw_);
    ed_.w1 = to_padic_series(lx.alpha * mpq_class(2), p_, Nw_);
    ed_.w2 = to_padic_series(lx.beta * mpq_class(2), p_, Nw_);
    if (lx.beta.residue() != 0) throw std::logic_error("second form has residue at e");
    ed_.L1 = formal_integrate_no_log(ed_.w1);
    ed_.L2 = formal_integrate_no_log(ed_.w2);

    // Frobenius on the base-disk parameter: phi(t) = -X^p / phi(Y).
    Series Xp = ed_.x.pow(p_);
    Series F = ed_.y * ed_.y;
    Series Fp = F.pow(p_);
    Series he = (poly_at_series(ctx_.f, Xp) - Fp) * Fp.inverse();
    Series sqrt1h = (Series::one(p_, Nw_ + 4, he.trunc_order()) + he) *
                    inv_sqrt_one_plus(he, Nw_ + 2);
    Series phiY = ed_.y.pow(p_) * sqrt1h;
    // back to the original-model y = Y - (a1 x + a3)/2 defining t = -x/y
    Padic a1 = Padic::from_mpz(p_, E_.a1, Nw_ + 4);
    Padic a3 = Padic::from_mpz(p_, E_.a3, Nw_ + 4);
    Series phiy = phiY - (Xp * a1 + Series::constant(p_, a3, Xp.trunc_order())) * half_;
    ed_.phi_t = Xp * phiy.inverse() * Padic::from_long(p_, -1, Nw_ + 4);
    // sanity: phi(t) = t^p mod p
    {
        Series dev = ed_.phi_t - Series::monomial(p_, static_cast<int>(p_), one,
                                                  ed_.phi_t.trunc_order());
        if (series_floor(dev, false) < 1) {
            std::ostringstream os;
            os << "Frobenius on the base disk is not t^p mod p (Te=" << Te_
               << " low=" << ed_.phi_t.lowest()
               << " tr=" << ed_.phi_t.trunc_order() << "):";
            for (auto& [k, c] : dev.coeffs())
                if (!c.is_zero() && c.valuation() < 1)
                    os << " [t^" << k << " val=" << c.valuation()
                       << " prec=" << c.abs_prec() << "]";
            throw std::logic_error(os.str());
        }
    }

    // --- constants of the single integrals --------------------------------
    Series G1 = evaluate_monomials(fd_.g[0], ed_.x, ed_.y);
    Series G2 = evaluate_monomials(fd_.g[1], ed_.x, ed_.y);
    Series R1 = ed_.L1.compose(ed_.phi_t) - ed_.L1 * M_[0][0] - ed_.L2 * M_[1][0] - G1;
    Series R2 = ed_.L2.compose(ed_.phi_t) - ed_.L1 * M_[0][1] - ed_.L2 * M_[1][1] - G2;
    c1_ = R1.coeff(0);
    c2_ = R2.coeff(0);
    note_residual(R1, "single integral equivariance (w1)");
    note_residual(R2, "single integral equivariance (w2)");

    // --- iterated integrals ------------------------------------------------
    Series dJ = ed_.L2 * ed_.w1;
    Series dK = ed_.L1 * ed_.w2;
    ed_.Jlog = dJ.coeff(-1);
    ed_.Klog = dK.coeff(-1);
    note_residual(ed_.Jlog + ed_.Klog, "residue of d(L1 L2)");
    ed_.Jpow = formal_integrate_no_log(
        dJ - Series::monomial(p_, -1, ed_.Jlog, dJ.trunc_order()));
    ed_.Kpow = formal_integrate_no_log(
        dK - Series::monomial(p_, -1, ed_.Klog, dK.trunc_order()));
    kappa_ = (ed_.L1 * ed_.L2).coeff(0);
    note_residual(kappa_ + Padic::from_long(p_, 4, Nw_), "kappa = -4");
    note_residual(ed_.Jpow + ed_.Kpow -
                      (ed_.L1 * ed_.L2 - Series::constant(p_, kappa_, Te_)),
                  "shuffle on the base disk");

    // log of the unit part of phi(t) = t^p u(t)
    Series u = ed_.phi_t.shift(-static_cast<int>(p_));
    Series logu = formal_integrate_no_log(u.derivative() * u.inverse()) +
                  Series::constant(p_, u.coeff(0).iwasawa_log(), u.trunc_order());

    Series HJ = evaluate_monomials(hJ_, ed_.x, ed_.y);
    Series HK = evaluate_monomials(hK_, ed_.x, ed_.y);
    Series WJ = w_combo(true, ed_.L1, ed_.L2, G1, HJ);
    Series WK = w_combo(false, ed_.L1, ed_.L2, G2, HK);
    note_residual((detM_ - Padic::from_long(p_, p_, Nw_)) * ed_.Jlog,
                  "log-part match of the J decomposition");

    Series RJ = ed_.Jpow.compose(ed_.phi_t) + logu * ed_.Jlog - ed_.Jpow * detM_ - WJ;
    Series RK = ed_.Kpow.compose(ed_.phi_t) + logu * ed_.Klog - ed_.Kpow * detM_ - WK;
    CJ_ = RJ.coeff(0);
    CK_ = RK.coeff(0);
    note_residual(RJ, "iterated integral equivariance (J)");
    note_residual(RK, "iterated integral equivariance (K)");

    // --- per-disk constants at the Teichmuller centers --------------------
    Padic oneminusdet = (Padic::from_long(p_, 1, Nw_) - detM_).inverse();
    for (auto& D : residue_disks(E_, p_)) {
        if (D.weierstrass) continue;
        PadicPoint Pc = teichmuller_center(E_, p_, D, Nw_);
        PadicPoint Pcs = to_short_model(E_, Pc);
        Padic g1v = evaluate_monomials_at(fd_.g[0], Pcs.x, Pcs.y);
        Padic g2v = evaluate_monomials_at(fd_.g[1], Pcs.x, Pcs.y);
        // (I - M^T) (L1, L2) = g + c at the fixed point
        Padic a = Padic::from_long(p_, 1, Nw_) - M_[0][0], b = -M_[1][0];
        Padic c = -M_[0][1], d = Padic::from_long(p_, 1, Nw_) - M_[1][1];
        Padic det = (a * d - b * c).inverse();
        Padic r1 = g1v + c1_, r2 = g2v + c2_;
        DiskData dd;
        dd.disk = D;
        dd.xc = Pcs.x;
        dd.yc = Pcs.y;
        dd.L1c = (d * r1 - b * r2) * det;
        dd.L2c = (a * r2 - c * r1) * det;
        dd.Jc = (w_at_point(true, Pcs.x, Pcs.y, dd.L1c, dd.L2c) + CJ_) * oneminusdet;
        dd.Kc = (w_at_point(false, Pcs.x, Pcs.y, dd.L1c, dd.L2c) + CK_) * oneminusdet;
        note_residual(dd.Jc + dd.Kc - dd.L1c * dd.L2c + kappa_,
                      "shuffle at a disk center");
        disks_.push_back(std::move(dd));
    }
}

const DiskSeries& ColemanSystem::disk_series(const ResidueDisk& D) const {
    if (D.weierstrass)
        throw unsupported_disk("iterated integrals on a Weierstrass disk");
    std::lock_guard<std::mutex> lk(cache_mu_);
    auto key = std::make_pair(D.xbar, D.ybar);
    auto it = disk_cache_.find(key);
    if (it != disk_cache_.end()) return it->second;
    const DiskData* dd = nullptr;
    for (auto& d : disks_)
        if (d.disk.xbar == D.xbar && d.disk.ybar == D.ybar) dd = &d;
    if (!dd) throw unsupported_disk("unknown residue disk");

    DiskSeries ds;
    ds.xc = dd->xc;
    ds.yc = dd->yc;
    ds.x = Series::monomial(p_, 1, Padic::from_long(p_, 1, Nw_), Td_) +
           Series::constant(p_, dd->xc, Td_);
    Series F = poly_at_series(ctx_.f, ds.x).truncated(Td_);
    // Y = sqrt(f(X)) by Newton iteration from the center value
    Series Y = Series::constant(p_, dd->yc, Td_);
    for (int it2 = 0; it2 < 8; ++it2) Y = (Y + F * Y.inverse()) * half_;
    note_residual(Y * Y - F, "disk square root");
    ds.y = Y;
    Series w1 = Y.inverse();
    Series w2 = ds.x * w1;
    ds.L1 = formal_integrate_no_log(w1) + Series::constant(p_, dd->L1c, Td_);
    ds.L2 = formal_integrate_no_log(w2) + Series::constant(p_, dd->L2c, Td_);
    ds.J = formal_integrate_no_log(ds.L2 * w1) + Series::constant(p_, dd->Jc, Td_);
    ds.K = formal_integrate_no_log(ds.L1 * w2) + Series::constant(p_, dd->Kc, Td_);
    return disk_cache_.emplace(key, std::move(ds)).first->second;
}

const DiskData& ColemanSystem::locate(const PadicPoint& z, Padic& t0) const {
    if (z.inf) throw unsupported_disk("the disk at infinity");
    if (z.x.valuation() < 0) throw unsupported_disk("the disk at infinity");
    FpPoint zbar = reduce_mod_p(E_, z);
    for (auto& d : disks_) {
        if (d.disk.xbar != zbar.x || d.disk.ybar != zbar.y) continue;
        PadicPoint zs = to_short_model(E_, z);
        t0 = zs.x - d.xc;
        return d;
    }
    throw unsupported_disk("point reduces into a Weierstrass disk");
}

Padic ColemanSystem::eval_component(const PadicPoint& z, int which) const {
    Padic t0;
    const DiskData& dd = locate(z, t0);
    const DiskSeries& ds = disk_series(dd.disk);
    // The Hensel branch through the center must pass through the point.
    PadicPoint zs = to_short_model(E_, z);
    if (!(zs.y - ds.y.evaluate(t0)).is_zero())
        throw std::logic_error("disk expansion misses the point");
    switch (which) {
        case 0: return ds.L1.evaluate(t0).truncate(N_);
        case 1: return ds.L2.evaluate(t0).truncate(N_);
        case 2: return ds.J.evaluate(t0).truncate(N_);
        default: return ds.K.evaluate(t0).truncate(N_);
    }
}

Padic ColemanSystem::log_alpha(const PadicPoint& z) const { return L1(z) * half_; }
Padic ColemanSystem::log_beta(const PadicPoint& z) const { return L2(z) * half_; }
Padic ColemanSystem::D2(const PadicPoint& z) const {
    return J(z) * (half_ * half_);
}
Padic ColemanSystem::BA(const PadicPoint& z) const {
    return (K(z) + kappa_) * (half_ * half_);
}

Padic ColemanSystem::log_alpha(const RatPoint& z) const {
    return log_alpha(to_padic(E_, z, p_, Nw_));
}
Padic ColemanSystem::log_beta(const RatPoint& z) const {
    return log_beta(to_padic(E_, z, p_, Nw_));
}
Padic ColemanSystem::D2(const RatPoint& z) const {
    return D2(to_padic(E_, z, p_, Nw_));
}
Padic ColemanSystem::BA(const RatPoint& z) const {
    return BA(to_padic(E_, z, p_, Nw_));
}

std::pair<Padic, Padic> ColemanSystem::frobenius_chain_check(
    const PadicPoint& z) const {
    PadicPoint zs = to_short_model(E_, z);
    Padic xq = zs.x.pow(static_cast<unsigned long>(p_));
    Padic Fz = zs.y * zs.y;
    Padic ratio = (poly_eval(ctx_.f, xq) - Fz.pow(static_cast<unsigned long>(p_))) *
                  Fz.pow(static_cast<unsigned long>(p_)).inverse();
    Padic s = (Padic::from_long(p_, 1, Nw_) + ratio).sqrt_unit(1);
    Padic Yq = zs.y.pow(static_cast<unsigned long>(p_)) * s;
    Padic a1 = Padic::from_mpz(p_, E_.a1, Nw_), a3 = Padic::from_mpz(p_, E_.a3, Nw_);
    PadicPoint zphi = PadicPoint::affine(xq, Yq - (a1 * xq + a3) * half_);
    Padic t0;
    const DiskData& dd = locate(z, t0);
    const DiskSeries& ds = disk_series(dd.disk);
    Padic L1v = ds.L1.evaluate(t0), L2v = ds.L2.evaluate(t0);
    Padic direct = J(zphi);
    Padic relation =
        ds.J.evaluate(t0) * detM_ + w_at_point(true, zs.x, zs.y, L1v, L2v) + CJ_;
    return {direct, relation.truncate(N_)};
}

template Series ColemanSystem::w_combo<Series>(bool, const Series&, const Series&,
                                               const Series&, const Series&) const;
template Padic ColemanSystem::w_combo<Padic>(bool, const Padic&, const Padic&,
                                             const Padic&, const Padic&) const;

}  // namespace qc
