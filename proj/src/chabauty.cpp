#include "qc/chabauty.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <sstream>
#include <thread>

namespace qc {

namespace {

int val_floor(const Padic& v) { return v.is_zero() ? v.abs_prec() : v.valuation(); }

bool p_integral(const RatPoint& P, long p) {
    if (P.inf) return false;
    return !mpz_divisible_ui_p(P.x.get_den().get_mpz_t(), p) &&
           !mpz_divisible_ui_p(P.y.get_den().get_mpz_t(), p);
}

std::string point_label(const RatPoint& P) {
    if (P.inf) return "O";
    return "(" + P.x.get_str() + "," + P.y.get_str() + ")";
}

}  // namespace

KimFunction::KimFunction(const ColemanSystem& cs, const RatPoint& y)
    : cs_(&cs), y_(to_padic(cs.curve(), y, cs.prime(), 2 * cs.precision())) {
    init();
}

KimFunction::KimFunction(const ColemanSystem& cs, const PadicPoint& y)
    : cs_(&cs), y_(y) {
    init();
}

void KimFunction::init() {
    long p = cs_->prime();
    half_ = Padic::from_mpq(p, mpq_class(1, 2), 2 * cs_->precision() + 4);
    la_y_ = cs_->log_alpha(y_);
    if (la_y_.is_zero())
        throw std::domain_error(
            "base point has zero logarithm at precision (torsion or imprecise)");
    lb_y_ = cs_->log_beta(y_);
    d2_y_ = cs_->D2(y_);
    rho_y_ = d2_y_;
    mpq_class rp = residue_pairing(cs_->curve());
    res_inv_ = Padic::from_mpq(p, rp, 2 * cs_->precision()).inverse();
    psi_y_ = Padic::exact_zero(p);
}

// rho must be the bare double integral D2.  Subtracting
// (1/2)log_alpha*log_beta destroys quadraticity along multiples of y:
// with the subtraction, rho(m*y) - m^2*rho(y) is nonzero even at integral
// multiples, while for the bare D2 the defect vanishes at every integral
// multiple and equals -(1/2)*log(den x(m*y)) otherwise (the away-prime
// local height contribution).  See test_chabauty for the numerical oracle.
Padic KimFunction::rho(const PadicPoint& z) const {
    return cs_->D2(z);
}

Series KimFunction::rho_series(const ResidueDisk& D) const {
    const DiskSeries& ds = cs_->disk_series(D);
    Padic quarter = half_ * half_;
    return ds.J * quarter;
}

Padic KimFunction::theta(const PadicPoint& z) const {
    Padic la_z = cs_->log_alpha(z);
    return la_y_ * la_y_ * rho(z) - la_z * la_z * rho_y_;
}

Series KimFunction::theta_series(const ResidueDisk& D) const {
    const DiskSeries& ds = cs_->disk_series(D);
    Series la_z = ds.L1 * half_;
    return rho_series(D) * (la_y_ * la_y_) - la_z * la_z * rho_y_;
}

Padic KimFunction::lambda(const PadicPoint& z) const {
    return cs_->log_alpha(z) * la_y_.inverse();
}

Padic KimFunction::psi(const PadicPoint& z) const {
    Padic l = lambda(z);
    Padic two = Padic::from_long(cs_->prime(), 2, 2 * cs_->precision());
    return l * l * psi_y_ + two * (l * l * rho_y_ - rho(z)) * res_inv_;
}

int independence_check(const ColemanSystem& cs, const PadicPoint& y1,
                       const PadicPoint& y2,
                       const std::vector<PadicPoint>& sample) {
    KimFunction k1(cs, y1), k2(cs, y2);
    Padic s1 = k1.rho_y() * (k1.log_alpha_y() * k1.log_alpha_y()).inverse();
    Padic s2 = k2.rho_y() * (k2.log_alpha_y() * k2.log_alpha_y()).inverse();
    int floor = Padic::kInfValuation / 4;
    for (auto& z : sample) {
        Padic la = cs.log_alpha(z);
        Padic d1 = k1.rho(z) - s1 * la * la;
        Padic d2 = k2.rho(z) - s2 * la * la;
        floor = std::min(floor, val_floor(d1 - d2));
    }
    return floor;
}

std::vector<RatPoint> integral_points_brute(const WeierstrassCurve& E, long bound) {
    std::vector<RatPoint> out;
    for (long x = -bound; x <= bound; ++x) {
        // y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6
        mpz_class xx(x);
        mpz_class b = E.a1 * xx + E.a3;
        mpz_class rhs = ((xx + E.a2) * xx + E.a4) * xx + E.a6;
        mpz_class disc = b * b + 4 * rhs;
        if (disc < 0) continue;
        mpz_class r = sqrt(disc);
        if (r * r != disc) continue;
        for (int sign : {1, -1}) {
            mpz_class num = -b + sign * r;
            if (!mpz_divisible_ui_p(num.get_mpz_t(), 2)) continue;
            RatPoint P = RatPoint::affine(mpq_class(xx), mpq_class(num / 2));
            bool dup = false;
            for (auto& q : out) dup = dup || q == P;
            if (!dup && on_curve(E, P)) out.push_back(P);
        }
    }
    return out;
}

SweepReport sweep(const ColemanSystem& cs, const RatPoint& y, long search_bound,
                  int jobs, long multiple_bound) {
    auto t_start = std::chrono::steady_clock::now();
    const WeierstrassCurve& E = cs.curve();
    long p = cs.prime();
    int N = cs.precision();
    KimFunction kim(cs, y);

    SweepReport rep;
    rep.curve = E.str();
    rep.p = p;
    rep.N = N;
    rep.y = point_label(y);
    rep.search_bound = search_bound;
    rep.integral_points = integral_points_brute(E, search_bound);

    // known points to match roots against: brute-force integral points and
    // small multiples of y
    struct Target {
        std::string label;
        FpPoint red;
        Padic tparam;
        bool integral;
        bool matched = false;
    };
    std::vector<Target> targets;
    auto add_target = [&](const RatPoint& P, const std::string& label,
                          bool integral) {
        if (P.inf || !p_integral(P, p)) return;
        FpPoint red = reduce_mod_p(E, P, p);
        PadicPoint zs = to_short_model(E, to_padic(E, P, p, 2 * N));
        for (auto& dd : cs.disks())
            if (dd.disk.xbar == red.x && dd.disk.ybar == red.y) {
                targets.push_back(Target{label, red, zs.x - dd.xc, integral});
                return;
            }
        // reduces into an unswept (Weierstrass) disk
        if (integral) {
            rep.unmatched_points.push_back(label + " [disk not swept]");
            rep.conclusive = false;
        }
    };
    for (auto& P : rep.integral_points) add_target(P, point_label(P), true);
    for (long m = -multiple_bound; m <= multiple_bound; ++m) {
        if (m == 0) continue;
        RatPoint Q = mul(E, m, y);
        add_target(Q, std::to_string(m) + "*y", false);
    }

    std::vector<ResidueDisk> all = residue_disks(E, p);
    rep.disks.resize(all.size());
    Padic pfac = Padic::from_long(p, p, 2 * N + 8);
    int match_digits = (N + 1) / 2;

    auto work = [&](size_t i) {
        const ResidueDisk& D = all[i];
        DiskReport dr;
        dr.disk = D;
        if (D.weierstrass) {
            dr.swept = false;
            dr.inconclusive = true;
            dr.note = "Weierstrass disk: no iterated-integral expansion";
            rep.disks[i] = dr;
            return;
        }
        dr.swept = true;
        Series th = kim.theta_series(D);
        // points of the disk have parameter in p Z_p: substitute t = p u
        Series su(p, th.trunc_order());
        for (auto& [k, c] : th.coeffs()) su.set_coeff(k, c * pfac.pow(k));
        int content = Padic::kInfValuation / 4;
        for (auto& [k, c] : su.coeffs())
            if (!c.is_zero()) content = std::min(content, c.valuation());
        if (content >= Padic::kInfValuation / 8) {
            dr.inconclusive = true;
            dr.note = "theta vanishes on the whole disk at working precision";
            rep.disks[i] = dr;
            return;
        }
        dr.content_val = content;
        Series scaled = su * Padic::from_parts(p, -content, 1, 3 * N);
        StrassmanResult sr = strassman_roots(scaled);
        dr.strassman_bound = sr.bound;
        if (sr.status == StrassmanResult::Status::inconclusive) {
            dr.inconclusive = true;
            dr.note = sr.note;
            rep.disks[i] = dr;
            return;
        }
        for (auto& root : sr.roots) {
            RootReport rr;
            rr.t = root.value * pfac;
            rr.multiple = root.multiple;
            dr.roots.push_back(rr);
        }
        rep.disks[i] = dr;
    };

    if (jobs <= 1) {
        for (size_t i = 0; i < all.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        // warm the shared disk-series cache single-threaded to keep the
        // mutex-guarded map insertions trivial
        for (auto& D : all)
            if (!D.weierstrass) (void)cs.disk_series(D);
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < all.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    // match roots against the known points
    for (auto& dr : rep.disks) {
        for (auto& rr : dr.roots) {
            for (auto& tg : targets) {
                if (tg.red.x != dr.disk.xbar || tg.red.y != dr.disk.ybar) continue;
                if (val_floor(tg.tparam - rr.t) >= match_digits) {
                    rr.matches.push_back(tg.label);
                    tg.matched = true;
                }
            }
        }
        rep.total_roots += static_cast<int>(dr.roots.size());
        if (dr.inconclusive) rep.conclusive = false;
    }
    for (auto& tg : targets)
        if (tg.integral && !tg.matched) rep.unmatched_points.push_back(tg.label);

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                t_start)
                      .count();
    return rep;
}

std::string SweepReport::to_json(bool with_timings) const {
    nlohmann::json j;
    j["schema"] = "qc-sweep-1";
    j["curve"] = curve;
    j["p"] = p;
    j["N"] = N;
    j["y"] = y;
    j["search_bound"] = search_bound;
    j["conclusive"] = conclusive;
    j["total_roots"] = total_roots;
    j["integral_points"] = nlohmann::json::array();
    for (auto& P : integral_points) j["integral_points"].push_back(point_label(P));
    j["unmatched"] = unmatched_points;
    j["disks"] = nlohmann::json::array();
    for (auto& dr : disks) {
        nlohmann::json d;
        d["xbar"] = dr.disk.xbar;
        d["ybar"] = dr.disk.ybar;
        d["weierstrass"] = dr.disk.weierstrass;
        d["swept"] = dr.swept;
        d["inconclusive"] = dr.inconclusive;
        if (!dr.note.empty()) d["note"] = dr.note;
        d["content_val"] = dr.content_val;
        d["strassman_bound"] = dr.strassman_bound;
        d["roots"] = nlohmann::json::array();
        for (auto& rr : dr.roots) {
            nlohmann::json r;
            r["t"] = rr.t.str();
            r["multiple"] = rr.multiple;
            r["matches"] = rr.matches;
            d["roots"].push_back(r);
        }
        j["disks"].push_back(d);
    }
    if (with_timings) j["seconds"] = seconds;
    return j.dump(1);
}

std::string SweepReport::to_table() const {
    std::ostringstream os;
    os << "curve " << curve << "  p=" << p << "  N=" << N << "  y=" << y << "\n";
    os << "integral points (|x| <= " << search_bound << "): ";
    for (auto& P : integral_points) os << point_label(P) << " ";
    os << "\n";
    for (auto& dr : disks) {
        os << "disk (" << dr.disk.xbar << "," << dr.disk.ybar << ") ";
        if (!dr.swept) {
            os << "NOT SWEPT: " << dr.note << "\n";
            continue;
        }
        if (dr.inconclusive) {
            os << "INCONCLUSIVE: " << dr.note << "\n";
            continue;
        }
        os << "bound=" << dr.strassman_bound << " roots=" << dr.roots.size();
        for (auto& rr : dr.roots) {
            os << "  [t=" << rr.t.str();
            if (rr.multiple) os << " (multiple)";
            if (!rr.matches.empty()) {
                os << " -> ";
                for (auto& m : rr.matches) os << m << " ";
            }
            os << "]";
        }
        os << "\n";
    }
    os << (unmatched_points.empty() ? "all integral points matched"
                                    : "UNMATCHED integral points:");
    for (auto& u : unmatched_points) os << " " << u;
    os << "\ntotal roots: " << total_roots
       << (conclusive ? " (conclusive)" : " (with inconclusive disks)") << "\n";
    return os.str();
}

}  // namespace qc
