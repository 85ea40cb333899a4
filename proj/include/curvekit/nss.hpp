#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/nelder_mead.hpp"
#include "curvekit/pricing.hpp"

namespace curvekit {

/// Svensson parameters. Nelson-Siegel is the special case beta3 = 0.
struct NssParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double lambda1 = 1.0; // years
    double lambda2 = 5.0; // years

    friend bool operator==(const NssParams&, const NssParams&) = default;
};

inline constexpr double kNssMinLambda = 0.05;
inline constexpr double kNssMaxLambda = 30.0;

inline void validate(const NssParams& p) {
    if (!(p.lambda1 > 0.0) || !(p.lambda2 > 0.0)) throw ValidationError("NSS: lambda1 and lambda2 must be > 0");
    if (!(p.beta0 > -0.10)) throw ValidationError("NSS: beta0 must be > -0.10");
}

namespace detail {

/// (1 - e^{-x}) / x, with the series below 1e-4 where the direct form cancels.
inline double nss_loading(double x) {
    if (x < 1e-4) return 1.0 - x / 2.0 + x * x / 6.0;
    return -std::expm1(-x) / x;
}

/// Yield loadings on (beta0, beta1, beta2, beta3) at t > 0.
inline std::array<double, 4> nss_basis(double lambda1, double lambda2, double t) {
    const double x1 = t / lambda1, x2 = t / lambda2;
    const double g1 = nss_loading(x1), g2 = nss_loading(x2);
    return {1.0, g1, g1 - std::exp(-x1), g2 - std::exp(-x2)};
}

} // namespace detail

inline double nss_yield(const NssParams& p, double t) {
    if (!(t > 0.0)) throw DomainError("nss_yield: t must be > 0 (use nss_short_rate for the t -> 0 limit)");
    const auto basis = detail::nss_basis(p.lambda1, p.lambda2, t);
    return p.beta0 * basis[0] + p.beta1 * basis[1] + p.beta2 * basis[2] + p.beta3 * basis[3];
}

/// Analytic limit of the yield as t -> 0+.
inline double nss_short_rate(const NssParams& p) { return p.beta0 + p.beta1; }

inline double nss_forward(const NssParams& p, double t) {
    if (t < 0.0) throw DomainError("nss_forward: t must be >= 0");
    const double e1 = std::exp(-t / p.lambda1), e2 = std::exp(-t / p.lambda2);
    return p.beta0 + p.beta1 * e1 + p.beta2 * (t / p.lambda1) * e1 + p.beta3 * (t / p.lambda2) * e2;
}

class NssCurve final : public YieldCurve {
public:
    explicit NssCurve(NssParams params, double objective = 0.0) : params_(params), objective_(objective) {
        validate(params_);
    }

    double yield_at(double t) const override { return nss_yield(params_, t); }

    const NssParams& params() const noexcept { return params_; }
    /// Weighted price-error objective reached by the fit (0 when built from params).
    double objective() const noexcept { return objective_; }

private:
    NssParams params_;
    double objective_;
};

struct NssFitConfig {
    int starts = 8;
    int max_iterations = 4000; // per simplex run
    std::uint64_t seed = 0;
};

namespace detail {

struct NssProblem {
    std::vector<std::vector<Cashflow>> schedules;
    std::vector<double> prices;
    std::vector<double> sqrt_weights;

    /// x = (beta0..beta3, log lambda1, log lambda2)
    static NssParams unpack(const double* x) {
        NssParams p;
        p.beta0 = x[0];
        p.beta1 = x[1];
        p.beta2 = x[2];
        p.beta3 = x[3];
        p.lambda1 = std::clamp(std::exp(x[4]), kNssMinLambda, kNssMaxLambda);
        p.lambda2 = std::clamp(std::exp(x[5]), kNssMinLambda, kNssMaxLambda);
        return p;
    }

    double residual(std::size_t j, const NssParams& p) const {
        double pv = 0.0;
        for (const auto& cf : schedules[j]) pv += cf.amount * std::exp(-cf.time * nss_yield(p, cf.time));
        return sqrt_weights[j] * (prices[j] - pv);
    }

    double objective(const double* x) const {
        const NssParams p = unpack(x);
        if (!(p.beta0 > -0.10)) return std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::size_t j = 0; j < prices.size(); ++j) {
            const double r = residual(j, p);
            sum += r * r;
        }
        return sum;
    }
};

/// Residual functor in the shape Eigen's Levenberg-Marquardt expects.
struct NssResidualFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const NssProblem* problem;

    int inputs() const { return 6; }
    int values() const { return static_cast<int>(problem->prices.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        const NssParams p = NssProblem::unpack(x.data());
        for (std::size_t j = 0; j < problem->prices.size(); ++j) fvec[static_cast<Eigen::Index>(j)] = problem->residual(j, p);
        return 0;
    }
};

/// Least-squares betas for fixed decay scales, matching each bond's YTM at its maturity.
inline std::array<double, 4> nss_warm_betas(const std::vector<double>& maturities, const std::vector<double>& ytms,
                                            double lambda1, double lambda2) {
    const auto m = static_cast<Eigen::Index>(maturities.size());
    Eigen::MatrixXd design(m, 4);
    Eigen::VectorXd target(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto basis = nss_basis(lambda1, lambda2, maturities[static_cast<std::size_t>(j)]);
        for (Eigen::Index k = 0; k < 4; ++k) design(j, k) = basis[static_cast<std::size_t>(k)];
        target[j] = ytms[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    return {beta[0], beta[1], beta[2], beta[3]};
}

} // namespace detail

/// Fits Svensson parameters by minimizing sum_j w_j (p_j - p^_j)^2 with duration weights.
/// Multi-start simplex search over (beta, log lambda1, log lambda2), betas warm-started by
/// linear least squares on YTMs, then a Levenberg-Marquardt polish of the best start.
inline NssCurve fit_nss(const MarketSnapshot& snapshot, const NssFitConfig& config = {}) {
    if (snapshot.bonds.size() < 6) throw FitError("fit_nss: >= 6 bonds required");
    if (config.starts < 1) throw ValidationError("fit_nss: starts must be >= 1");

    detail::NssProblem problem;
    std::vector<double> maturities, ytms;
    const auto weights = duration_weights(snapshot);
    for (std::size_t j = 0; j < snapshot.bonds.size(); ++j) {
        const Bond& bond = snapshot.bonds[j];
        problem.schedules.push_back(payment_schedule(bond));
        problem.prices.push_back(bond.market_price);
        problem.sqrt_weights.push_back(std::sqrt(weights[j]));
        maturities.push_back(bond.maturity);
        ytms.push_back(yield_to_maturity(bond));
    }

    static constexpr std::array<std::array<double, 2>, 8> kSeedScales{
        {{1.0, 5.0}, {0.5, 3.0}, {2.0, 8.0}, {3.0, 12.0}, {0.25, 1.5}, {1.5, 20.0}, {5.0, 1.0}, {0.8, 10.0}}};
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> log_lambda(std::log(0.1), std::log(20.0));

    NelderMeadOptions nm_options;
    nm_options.max_iterations = config.max_iterations;
    const std::vector<double> steps{0.01, 0.01, 0.01, 0.01, 0.5, 0.5};
    auto objective = [&](const std::vector<double>& x) { return problem.objective(x.data()); };

    bool any_converged = false;
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int s = 0; s < config.starts; ++s) {
        double l1, l2;
        if (s < static_cast<int>(kSeedScales.size())) {
            l1 = kSeedScales[static_cast<std::size_t>(s)][0];
            l2 = kSeedScales[static_cast<std::size_t>(s)][1];
        } else {
            l1 = std::exp(log_lambda(rng));
            l2 = std::exp(log_lambda(rng));
        }
        const auto beta = detail::nss_warm_betas(maturities, ytms, l1, l2);
        std::vector<double> x0{beta[0], beta[1], beta[2], beta[3], std::log(l1), std::log(l2)};
        if (!(x0[0] > -0.10)) x0[0] = 0.0;

        NelderMeadResult run = nelder_mead(objective, x0, steps, nm_options);
        // One restart from the converged point rebuilds a collapsed simplex.
        if (run.converged) {
            NelderMeadResult again = nelder_mead(objective, run.x, steps, nm_options);
            if (again.value <= run.value) run = again;
        }
        any_converged = any_converged || run.converged;
        if (run.converged && run.value < best.value) best = run;
    }
    if (!any_converged)
        throw FitError("fit_nss: no start converged within " + std::to_string(config.max_iterations) + " iterations");

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(best.x.data(), 6);
    detail::NssResidualFunctor functor{&problem};
    Eigen::NumericalDiff<detail::NssResidualFunctor, Eigen::Central> numeric(functor);
    Eigen::LevenbergMarquardt<decltype(numeric)> lm(numeric);
    lm.parameters.maxfev = 2000;
    lm.minimize(x);
    double polished = problem.objective(x.data());
    if (std::isfinite(polished) && polished <= best.value) {
        best.value = polished;
        best.x.assign(x.data(), x.data() + 6);
    }
    return NssCurve(detail::NssProblem::unpack(best.x.data()), best.value);
}

} // namespace curvekit
