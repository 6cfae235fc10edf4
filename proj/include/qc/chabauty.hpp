#pragma once

#include <string>
#include <vector>

#include "qc/coleman.hpp"
#include "qc/curve.hpp"
#include "qc/series.hpp"

namespace qc {

// The locally analytic function cutting out the integral points: built on a
// Coleman system and an integral point y of infinite order.
class KimFunction {
public:
    KimFunction(const ColemanSystem& cs, const RatPoint& y);
    KimFunction(const ColemanSystem& cs, const PadicPoint& y);

    const ColemanSystem& system() const { return *cs_; }
    const PadicPoint& base_point() const { return y_; }
    Padic log_alpha_y() const { return la_y_; }
    Padic rho_y() const { return rho_y_; }
    Padic res_pairing_inv() const { return res_inv_; }

    // rho(z) = D2(z): the quadratic invariant (see src/chabauty.cpp for why
    // no log_alpha*log_beta term may be subtracted)
    Padic rho(const PadicPoint& z) const;
    Series rho_series(const ResidueDisk& D) const;

    // theta_y(z) = log_alpha(y)^2 rho(z) - log_alpha(z)^2 rho(y)
    Padic theta(const PadicPoint& z) const;
    Series theta_series(const ResidueDisk& D) const;

    // lambda(z) = log_alpha(z)/log_alpha(y)
    Padic lambda(const PadicPoint& z) const;

    // psi(z) = lambda^2 psiY + 2 (lambda^2 rho(y) - rho(z)) Res(v alpha)^-1
    Padic psi(const PadicPoint& z) const;

private:
    const ColemanSystem* cs_;
    PadicPoint y_;
    Padic la_y_, lb_y_, d2_y_, rho_y_, res_inv_, psi_y_, half_;
    void init();
};

// min over the samples of v_p of the discrepancy between the y1- and
// y2-normalized combinations rho(z) - (rho(y)/log_alpha(y)^2) log_alpha(z)^2
int independence_check(const ColemanSystem& cs, const PadicPoint& y1,
                       const PadicPoint& y2, const std::vector<PadicPoint>& sample);

struct RootReport {
    Padic t;  // disk parameter (short model x - xc)
    bool multiple = false;
    std::vector<std::string> matches;  // labels of known points hit
};

struct DiskReport {
    ResidueDisk disk;
    bool swept = false;
    bool inconclusive = false;
    std::string note;
    int content_val = 0;  // valuation cleared before the root search
    int strassman_bound = 0;
    std::vector<RootReport> roots;
};

struct SweepReport {
    std::string curve;
    long p = 0;
    int N = 0;
    std::string y;
    long search_bound = 0;
    std::vector<DiskReport> disks;
    std::vector<RatPoint> integral_points;       // brute force |x| <= bound
    std::vector<std::string> unmatched_points;   // integral points missing a root
    bool conclusive = true;  // no disk inconclusive/unswept
    int total_roots = 0;
    double seconds = 0.0;

    bool all_matched() const { return unmatched_points.empty(); }
    std::string to_json(bool with_timings = true) const;
    std::string to_table() const;
};

// All integral points (x, y) of the original model with |x| <= bound.
std::vector<RatPoint> integral_points_brute(const WeierstrassCurve& E, long bound);

SweepReport sweep(const ColemanSystem& cs, const RatPoint& y,
                  long search_bound = 10000, int jobs = 1, long multiple_bound = 16);

}  // namespace qc
