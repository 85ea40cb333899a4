#pragma once

// Test-only reference computations. Nothing here calls into the fitting or pricing code it checks,
// apart from the kernel function and YTM solver, which have their own tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include "curvekit/kr.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"

namespace oracle {

/// Eq. (3) written out longhand from the raw bond fields.
inline double bond_pv(const curvekit::Bond& bond, const std::function<double(double)>& yield) {
    double pv = 0.0;
    const std::size_t n = bond.cashflows.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = bond.cashflows[i].time;
        pv += bond.cashflows[i].amount * std::exp(-t * yield(t));
    }
    const double last_coupon = n > 0 ? bond.cashflows[n - 1].amount : 0.0;
    pv += (last_coupon + bond.face_value) * std::exp(-bond.maturity * yield(bond.maturity));
    return pv;
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-14,
                        unsigned max_depth = 15) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tolerance);
}

/// Central finite-difference gradient of f over a flat parameter vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                       double eps) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + eps;
        const double up = f(x);
        x[i] = x0 - eps;
        const double down = f(x);
        x[i] = x0;
        g[i] = (up - down) / (2.0 * eps);
    }
    return g;
}

/// |a - b| within rel * max(|a|, |b|) or an absolute floor.
inline bool close(double a, double b, double rel, double abs_floor) {
    const double diff = std::abs(a - b);
    return diff <= abs_floor || diff <= rel * std::max(std::abs(a), std::abs(b));
}

/// Kernel-ridge objective assembled directly from the bonds:
/// sum_j w_j (p_j - sum_i c_ji (1 + sum_l alpha_l k(t_ji, t_l)))^2 + lambda alpha' K alpha
struct KrObjective {
    Eigen::MatrixXd hessian; // symmetric PSD, objective = a' H a / 2 - g' a + const
    Eigen::VectorXd linear;
    double constant = 0.0;

    double operator()(const Eigen::VectorXd& a) const { return 0.5 * a.dot(hessian * a) - linear.dot(a) + constant; }
};

/// Conjugate gradients on a convex quadratic (a first-order method), restarted every n steps.
inline Eigen::VectorXd conjugate_gradient(const KrObjective& q, int iterations) {
    const Eigen::Index n = q.linear.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = q.linear - q.hessian * x;
    Eigen::VectorXd p = r;
    for (int it = 0; it < iterations; ++it) {
        if (it % n == 0) p = r;
        const double rr = r.dot(r);
        if (rr == 0.0) break;
        const Eigen::VectorXd hp = q.hessian * p;
        const double curv = p.dot(hp);
        if (!(curv > 0.0)) break;
        const double step = rr / curv;
        x += step * p;
        const Eigen::VectorXd r_next = q.linear - q.hessian * x; // recomputed, not updated, for stability
        p = r_next + (r_next.dot(r_next) / rr) * p;
        r = r_next;
    }
    return x;
}

/// The KR objective as a quadratic in alpha, assembled from raw bond fields.
inline KrObjective kr_objective(const curvekit::MarketSnapshot& s, double lambda, const curvekit::KernelParams& kp) {
    using namespace curvekit;
    std::vector<double> anchors;
    for (const auto& b : s.bonds) {
        for (const auto& cf : b.cashflows) anchors.push_back(cf.time);
        anchors.push_back(b.maturity);
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end(), [](double x, double y) { return y - x <= 1e-9; }),
                  anchors.end());
    const auto L = static_cast<Eigen::Index>(anchors.size()), M = static_cast<Eigen::Index>(s.bonds.size());
    Eigen::MatrixXd K(L, L), C = Eigen::MatrixXd::Zero(M, L);
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index j = 0; j < L; ++j) K(i, j) = kr_kernel(anchors[i], anchors[j], kp);
    auto column = [&](double t) {
        Eigen::Index best = 0;
        for (Eigen::Index l = 1; l < L; ++l)
            if (std::abs(anchors[l] - t) < std::abs(anchors[best] - t)) best = l;
        return best;
    };
    Eigen::VectorXd p(M), w(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Bond& b = s.bonds[static_cast<std::size_t>(j)];
        const std::size_t n = b.cashflows.size();
        for (std::size_t i = 0; i + 1 < n; ++i) C(j, column(b.cashflows[i].time)) += b.cashflows[i].amount;
        C(j, column(b.maturity)) += (n ? b.cashflows[n - 1].amount : 0.0) + b.face_value;
        p[j] = b.market_price;
        const double y = yield_to_maturity(b);
        double dp = 0.0, pv = 0.0;
        for (Eigen::Index l = 0; l < L; ++l) {
            const double df = C(j, l) * std::exp(-anchors[l] * y);
            pv += df;
            dp += anchors[l] * df;
        }
        const double duration = dp / pv;
        w[j] = 1.0 / (static_cast<double>(M) * std::pow(duration * b.market_price, 2));
    }
    const Eigen::VectorXd resid = p - C * Eigen::VectorXd::Ones(L);
    const Eigen::MatrixXd CtW = C.transpose() * w.asDiagonal();
    KrObjective q;
    q.hessian = 2.0 * (K * CtW * C * K + lambda * K);
    q.linear = 2.0 * K * CtW * resid;
    q.constant = resid.dot(w.asDiagonal() * resid);
    return q;
}

} // namespace oracle
