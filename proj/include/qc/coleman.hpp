#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qc/curve.hpp"
#include "qc/rigidcoh.hpp"
#include "qc/series.hpp"

namespace qc {

// Evaluation requested on a disk where the function is not defined (the
// disk at infinity, or a Weierstrass disk for the iterated integral).
struct unsupported_disk : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expansions around the tangential base point in t = -x/y.  All integrals
// are normalized to have zero constant term here; the iterated integrals
// J = int L2 w1 and K = int L1 w2 carry a log t part whose coefficient is
// stored separately.
struct EDisk {
    Series x, y;        // short-model X(t), Y(t)
    Series w1, w2;      // coefficient series of dx/Y and x dx/Y
    Series phi_t;       // induced Frobenius action on t
    Series L1, L2;      // single integrals of w1, w2
    Series Jpow, Kpow;  // power-series parts of the iterated integrals
    Padic Jlog, Klog;   // their log t coefficients
};

// Per-disk data anchored at the Teichmuller center (short-model coords).
struct DiskData {
    ResidueDisk disk;
    Padic xc, yc;
    Padic L1c, L2c, Jc, Kc;
};

// Per-disk expansions in the parameter t = x - xc of the short model.
struct DiskSeries {
    Padic xc, yc;
    Series x, y;
    Series L1, L2, J, K;
};

// Coleman integration on a curve with good reduction at p: the single
// integrals of w1 = dx/Y, w2 = x dx/Y and the iterated integrals
// J = int L2 w1, K = int L1 w2, glued across residue disks through the
// Frobenius structure on H^1 and normalized at the tangential base point.
class ColemanSystem {
public:
    ColemanSystem(const WeierstrassCurve& E, long p, int N,
                  const std::string& cache_dir = "");

    const WeierstrassCurve& curve() const { return E_; }
    long prime() const { return p_; }
    int precision() const { return N_; }
    const FrobeniusData& frob() const { return fd_; }
    const EDisk& edisk() const { return ed_; }
    const std::vector<DiskData>& disks() const { return disks_; }

    Padic c1() const { return c1_; }
    Padic c2() const { return c2_; }
    Padic CJ() const { return CJ_; }
    Padic CK() const { return CK_; }
    // smallest valuation floor among all internal consistency residuals
    int check_valuation() const { return check_val_; }

    // Point evaluation (original-model coordinates; the point must reduce
    // to an affine non-Weierstrass residue.)
    Padic L1(const PadicPoint& z) const { return eval_component(z, 0); }
    Padic L2(const PadicPoint& z) const { return eval_component(z, 1); }
    Padic J(const PadicPoint& z) const { return eval_component(z, 2); }
    Padic K(const PadicPoint& z) const { return eval_component(z, 3); }

    Padic log_alpha(const PadicPoint& z) const;
    Padic log_beta(const PadicPoint& z) const;
    Padic D2(const PadicPoint& z) const;  // int alpha beta
    Padic BA(const PadicPoint& z) const;  // int beta alpha

    // Convenience for rational points.
    Padic log_alpha(const RatPoint& z) const;
    Padic log_beta(const RatPoint& z) const;
    Padic D2(const RatPoint& z) const;
    Padic BA(const RatPoint& z) const;

    // Disk expansions (cached; throws unsupported_disk for Weierstrass
    // disks and the disk at infinity).
    const DiskSeries& disk_series(const ResidueDisk& D) const;

    // Direct evaluation of J at phi(z) versus continuation through the
    // Frobenius relation det(M) J(z) + W(z) + C_J: an independent check
    // that the analytic continuation is path-consistent.
    std::pair<Padic, Padic> frobenius_chain_check(const PadicPoint& z) const;

private:
    WeierstrassCurve E_;
    long p_;
    int N_;   // target precision
    int Nw_;  // working precision
    int Te_;  // truncation order of the base-disk expansions
    int Td_;  // truncation order of the affine disk expansions
    FrobeniusData fd_;
    CohContext ctx_;
    Padic M_[2][2], detM_, half_;
    std::vector<MonomialFn> hJ_, hK_;  // primitives of the even leftovers
    EDisk ed_;
    Padic c1_, c2_, CJ_, CK_, kappa_;  // kappa = constant term of L1 L2 at e
    std::vector<DiskData> disks_;
    mutable int check_val_ = 0;

    mutable std::map<std::pair<long, long>, DiskSeries> disk_cache_;
    mutable std::mutex cache_mu_;

    void build();
    template <class T>
    T w_combo(bool forJ, const T& L1, const T& L2, const T& G, const T& H) const;
    Padic w_at_point(bool forJ, const Padic& x, const Padic& y, const Padic& L1v,
                     const Padic& L2v) const;
    const DiskData& locate(const PadicPoint& z_orig, Padic& t0) const;
    Padic eval_component(const PadicPoint& z, int which) const;
    void note_residual(const Series& s, const char* what) const;
    void note_residual(const Padic& v, const char* what) const;
};

// Exact base-disk data converted to p-adic series at precision prec.
Series to_padic_series(const QSeries& q, long p, int prec);

}  // namespace qc
