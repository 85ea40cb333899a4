#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"

namespace curvekit {

/// Weights of the smoothness norm ||g||^2 = int_0^inf a g'(u)^2 + b g''(u)^2 du,
/// applied to the discount deviation g = d - 1.
struct KernelParams {
    double a = 1.0;
    double b = 1.0;

    friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

inline void validate(const KernelParams& kp) {
    if (!(kp.a > 0.0) || !(kp.b >= 0.0) || !std::isfinite(kp.a) || !std::isfinite(kp.b))
        throw ValidationError("kernel params: require a > 0 and b >= 0");
}

/// Reproducing kernel of {g : g(0) = 0} under the (a, b) derivative norm on [0, inf).
///
/// With r = sqrt(a/b), m = min(s,t), M = max(s,t):
///   k(s,t) = (m - sinh(r m) e^{-r M} / r) / a,
/// which reduces to min(s,t)/a when b = 0.
inline double kr_kernel(double s, double t, const KernelParams& kp = {}) {
    if (!(s > 0.0) || !(t > 0.0)) throw DomainError("kr_kernel: arguments must be > 0");
    const double lo = std::min(s, t), hi = std::max(s, t);
    if (kp.b == 0.0) return lo / kp.a;
    const double r = std::sqrt(kp.a / kp.b);
    // sinh(r lo) e^{-r hi} = (e^{-r (hi - lo)} - e^{-r (hi + lo)}) / 2
    const double tail = 0.5 * (std::exp(-r * (hi - lo)) - std::exp(-r * (hi + lo)));
    return (lo - tail / r) / kp.a;
}

inline Eigen::MatrixXd kr_kernel_matrix(const std::vector<double>& times, const KernelParams& kp = {}) {
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            k(i, j) = k(j, i) = kr_kernel(times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)], kp);
    return k;
}

/// Discount curve d(t) = 1 + sum_l alpha_l k(t, t_l).
class KrModel final : public YieldCurve {
public:
    KrModel(std::vector<double> anchor_times, std::vector<double> alphas, double lambda, KernelParams kernel,
            double objective = 0.0)
        : anchor_times_(std::move(anchor_times)), alphas_(std::move(alphas)), lambda_(lambda), kernel_(kernel),
          objective_(objective) {
        validate(kernel_);
        if (!(lambda_ > 0.0)) throw ValidationError("KR: lambda must be > 0");
        if (anchor_times_.size() != alphas_.size()) throw ValidationError("KR: one alpha per anchor time required");
        for (std::size_t i = 0; i < anchor_times_.size(); ++i) {
            if (!(anchor_times_[i] > 0.0) || (i > 0 && !(anchor_times_[i] > anchor_times_[i - 1])))
                throw ValidationError("KR: anchor times must be positive and strictly increasing");
        }
    }

    double discount(double t) const {
        double d = 1.0;
        for (std::size_t l = 0; l < anchor_times_.size(); ++l) d += alphas_[l] * kr_kernel(t, anchor_times_[l], kernel_);
        return d;
    }

    double yield_at(double t) const override {
        if (!(t > 0.0)) throw DomainError("kr_yield: t must be > 0");
        const double d = discount(t);
        if (!(d > 0.0))
            throw InvalidDiscountError("kr_yield: fitted discount " + std::to_string(d) + " <= 0 at t=" + std::to_string(t));
        return -std::log(d) / t;
    }

    const std::vector<double>& anchor_times() const noexcept { return anchor_times_; }
    const std::vector<double>& alphas() const noexcept { return alphas_; }
    double lambda() const noexcept { return lambda_; }
    const KernelParams& kernel() const noexcept { return kernel_; }
    /// Regularized objective reached by the fit.
    double objective() const noexcept { return objective_; }

private:
    std::vector<double> anchor_times_;
    std::vector<double> alphas_;
    double lambda_;
    KernelParams kernel_;
    double objective_;
};

inline double kr_yield(const KrModel& model, double t) { return model.yield_at(t); }

/// Linear-algebra pieces of the kernel-ridge problem for one snapshot.
struct KrSystem {
    std::vector<double> anchors;  // union of payment dates
    Eigen::MatrixXd cashflows;    // M x L
    Eigen::MatrixXd kernel;       // L x L
    Eigen::VectorXd prices;       // M
    Eigen::VectorXd weights;      // M, duration weights

    /// sum_j w_j (p_j - C_j (1 + K alpha))^2
    double price_error(const Eigen::VectorXd& alpha) const {
        const Eigen::VectorXd fitted = cashflows * (Eigen::VectorXd::Ones(kernel.rows()) + kernel * alpha);
        return (weights.array() * (prices - fitted).array().square()).sum();
    }

    double objective(const Eigen::VectorXd& alpha, double lambda) const {
        return price_error(alpha) + lambda * alpha.dot(kernel * alpha);
    }
};

/// Payment dates of all bonds merged within 1e-9 years.
inline std::vector<double> kr_anchor_times(const MarketSnapshot& snapshot) {
    std::vector<double> times;
    for (const auto& bond : snapshot.bonds)
        for (const auto& cf : payment_schedule(bond)) times.push_back(cf.time);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times)
        if (out.empty() || t - out.back() > 1e-9) out.push_back(t);
    return out;
}

inline KrSystem kr_system(const MarketSnapshot& snapshot, const KernelParams& kp) {
    KrSystem sys;
    sys.anchors = kr_anchor_times(snapshot);
    const auto m = static_cast<Eigen::Index>(snapshot.bonds.size());
    const auto l = static_cast<Eigen::Index>(sys.anchors.size());
    sys.cashflows = Eigen::MatrixXd::Zero(m, l);
    sys.prices.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Bond& bond = snapshot.bonds[static_cast<std::size_t>(j)];
        for (const auto& cf : payment_schedule(bond)) {
            // nearest anchor; anchors are merged within 1e-9 so this is the one it was folded into
            auto it = std::lower_bound(sys.anchors.begin(), sys.anchors.end(), cf.time - 1e-9);
            sys.cashflows(j, std::distance(sys.anchors.begin(), it)) += cf.amount;
        }
        sys.prices[j] = bond.market_price;
    }
    sys.kernel = kr_kernel_matrix(sys.anchors, kp);
    const auto w = duration_weights(snapshot);
    sys.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), m);
    return sys;
}

/// Closed-form kernel-ridge fit. By the representer theorem alpha = C^T beta with
/// (C K C^T + lambda W^{-1}) beta = p - C 1.
inline KrModel fit_kr(const MarketSnapshot& snapshot, double lambda = 1e-2, const KernelParams& kp = {}) {
    if (!(lambda > 0.0)) throw ValidationError("fit_kr: lambda must be > 0");
    validate(kp);
    const KrSystem sys = kr_system(snapshot, kp);
    const auto m = sys.prices.size();

    Eigen::MatrixXd system = sys.cashflows * sys.kernel * sys.cashflows.transpose();
    system.diagonal() += lambda * sys.weights.cwiseInverse();
    const Eigen::VectorXd rhs = sys.prices - sys.cashflows.rowwise().sum();
    const double trace = system.trace();

    Eigen::VectorXd beta;
    bool solved = false;
    for (double jitter = 0.0; jitter <= 1e-6 * 1.0000001; jitter = (jitter == 0.0 ? 1e-12 : jitter * 10.0)) {
        Eigen::MatrixXd attempt = system;
        attempt.diagonal().array() += jitter * trace;
        Eigen::LLT<Eigen::MatrixXd> llt(attempt);
        if (llt.info() != Eigen::Success) continue;
        beta = llt.solve(rhs);
        if (beta.allFinite()) {
            solved = true;
            break;
        }
    }
    if (!solved) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system, Eigen::EigenvaluesOnly);
        const double lo = std::abs(eig.eigenvalues().minCoeff()), hi = std::abs(eig.eigenvalues().maxCoeff());
        const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        throw SingularSystemError("fit_kr: kernel system singular for " + std::to_string(m) +
                                      " bonds (condition estimate " + std::to_string(cond) +
                                      "); lambda too small or anchors duplicated",
                                  cond);
    }
    const Eigen::VectorXd alpha = sys.cashflows.transpose() * beta;
    std::vector<double> alphas(alpha.data(), alpha.data() + alpha.size());
    return KrModel(sys.anchors, std::move(alphas), lambda, kp, sys.objective(alpha, lambda));
}

} // namespace curvekit
