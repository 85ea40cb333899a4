#include <gtest/gtest.h>

#include <random>

#include "curvekit/kr.hpp"
#include "curvekit/scenario.hpp"
#include "oracles.hpp"

namespace curvekit {
namespace {

Bond zero_coupon(std::string id, double maturity, double price) {
    Bond b;
    b.id = std::move(id);
    b.maturity = maturity;
    b.market_price = price;
    return b;
}

MarketSnapshot noisy_snapshot(int n, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.n_bonds = n;
    spec.seed = seed;
    spec.price_noise_sd = 0.002;
    spec.regime = Regime::Rising;
    return generate_scenario(spec);
}

TEST(KrKernelTest, SymmetricAndPositive) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.01, 30.0), w(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        const KernelParams kp{w(rng), w(rng)};
        const double s = t(rng), u = t(rng);
        EXPECT_DOUBLE_EQ(kr_kernel(s, u, kp), kr_kernel(u, s, kp));
        EXPECT_GT(kr_kernel(s, s, kp), 0.0);
    }
}

TEST(KrKernelTest, FirstOrderNormGivesMin) {
    const KernelParams kp{2.0, 0.0};
    EXPECT_DOUBLE_EQ(kr_kernel(1.5, 4.0, kp), 0.75);
    EXPECT_DOUBLE_EQ(kr_kernel(4.0, 1.5, kp), 0.75);
    EXPECT_THROW(kr_kernel(0.0, 1.0), DomainError);
    EXPECT_THROW(validate(KernelParams{0.0, 1.0}), ValidationError);
    EXPECT_THROW(validate(KernelParams{1.0, -1.0}), ValidationError);
}

// <k(., s), g> = a int g_k' g' + b int g_k'' g'' should return g(s), for g = k(., t) and g = 1 - e^{-u}.
double inner_with_kernel(double s, const std::function<double(double)>& g, const KernelParams& kp,
                         std::vector<double> breaks) {
    const double h = 1e-4;
    auto d1 = [](const std::function<double(double)>& f, double u, double h) { return (f(u + h) - f(u - h)) / (2 * h); };
    auto d2 = [](const std::function<double(double)>& f, double u, double h) {
        return (f(u + h) - 2 * f(u) + f(u - h)) / (h * h);
    };
    // one-sided-safe kernel extension: k is odd-extended through 0 so FD at tiny u stays well defined
    std::function<double(double)> k = [&](double u) { return u > 0 ? kr_kernel(u, s, kp) : -kr_kernel(-u, s, kp); };
    auto integrand = [&](double u) { return kp.a * d1(k, u, h) * d1(g, u, h) + kp.b * d2(k, u, h) * d2(g, u, h); };
    breaks.push_back(0.0);
    breaks.push_back(s);
    const double r = std::sqrt(kp.a / kp.b);
    breaks.push_back(*std::max_element(breaks.begin(), breaks.end()) + 60.0 / std::min(r, 1.0));
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) total += oracle::integrate(integrand, breaks[i], breaks[i + 1], 1e-9, 8);
    return total;
}

TEST(KrKernelTest, ReproducingProperty) {
    for (const KernelParams kp : {KernelParams{1.0, 1.0}, KernelParams{2.0, 0.5}, KernelParams{0.5, 3.0}}) {
        for (double s : {0.5, 2.0, 7.0}) {
            for (double t : {1.0, 4.0}) {
                std::function<double(double)> g = [&](double u) {
                    return u > 0 ? kr_kernel(u, t, kp) : -kr_kernel(-u, t, kp);
                };
                EXPECT_NEAR(inner_with_kernel(s, g, kp, {t}), kr_kernel(s, t, kp), 1e-6) << s << " " << t;
            }
            std::function<double(double)> g = [](double u) { return -std::expm1(-u); };
            EXPECT_NEAR(inner_with_kernel(s, g, kp, {}), g(s), 1e-6) << s;
        }
    }
}

TEST(KrKernelTest, GramMatricesArePsd) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> t(0.01, 30.0);
    std::uniform_int_distribution<int> size(2, 40);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> times(static_cast<std::size_t>(size(rng)));
        for (auto& x : times) x = t(rng);
        const Eigen::MatrixXd k = kr_kernel_matrix(times);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(KrFitTest, HugeLambdaShrinksToFlatDiscount) {
    const auto model = fit_kr(noisy_snapshot(30, 1), 1e12);
    for (double a : model.alphas()) EXPECT_LE(std::abs(a), 1e-6);
}

TEST(KrFitTest, SingleZeroCouponTinyLambda) {
    MarketSnapshot s;
    s.bonds.push_back(zero_coupon("Z", 5.0, 100.0 * std::exp(-0.1)));
    const auto model = fit_kr(s, 1e-10);
    EXPECT_LE(std::abs(present_value(model, s.bonds[0]) - s.bonds[0].market_price), 0.1);
    EXPECT_NEAR(model.discount(1e-8), 1.0, 1e-6);
}

TEST(KrFitTest, ZeroCouponOnFlatCurve) {
    MarketSnapshot s;
    for (double t : {1.0, 2.0, 3.0, 5.0, 7.0, 10.0})
        s.bonds.push_back(zero_coupon("Z" + std::to_string(static_cast<int>(t)), t, 100.0 * std::exp(-0.02 * t)));
    const auto model = fit_kr(s, 1e-8);
    for (double t : {1.0, 2.0, 5.0, 10.0}) EXPECT_NEAR(kr_yield(model, t), 0.02, 1e-3) << t;
}

TEST(KrFitTest, ZeroAlphaMeansZeroYield) {
    const KrModel model({1.0, 2.0}, {0.0, 0.0}, 1.0, {});
    EXPECT_EQ(kr_yield(model, 3.0), 0.0);
    EXPECT_THROW(kr_yield(model, 0.0), DomainError);
}

TEST(KrFitTest, NonPositiveDiscountThrows) {
    const KrModel model({1.0}, {-10.0}, 1.0, {});
    EXPECT_LE(model.discount(5.0), 0.0);
    EXPECT_THROW(kr_yield(model, 5.0), InvalidDiscountError);
}

TEST(KrFitTest, ClosedFormMatchesFirstOrderOracle) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto s = noisy_snapshot(25, seed);
        for (double lambda : {1e-4, 1e-2, 1.0}) {
            const auto model = fit_kr(s, lambda);
            const auto q = oracle::kr_objective(s, lambda, {});
            const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(model.alphas().data(), model.alphas().size());
            ASSERT_EQ(alpha.size(), q.linear.size());
            const double ours = q(alpha);
            EXPECT_NEAR(model.objective(), ours, 1e-8 * std::max(1.0, std::abs(ours)));
            const Eigen::VectorXd cg = oracle::conjugate_gradient(q, 50 * static_cast<int>(alpha.size()));
            EXPECT_LE(ours, (1.0 + 1e-8) * q(cg)) << "seed " << seed << " lambda " << lambda;
        }
    }
}

TEST(KrFitTest, PriceErrorGrowsWithLambda) {
    const auto s = noisy_snapshot(40, 4);
    const KrSystem sys = kr_system(s, {});
    double previous = -1.0;
    for (double lambda : {1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
        const auto model = fit_kr(s, lambda);
        const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(model.alphas().data(), model.alphas().size());
        const double err = sys.price_error(alpha);
        EXPECT_GE(err, previous - 1e-12) << lambda;
        previous = err;
    }
}

TEST(KrFitTest, RejectsBadInputs) {
    const auto s = noisy_snapshot(10, 1);
    EXPECT_THROW(fit_kr(s, 0.0), ValidationError);
    EXPECT_THROW(fit_kr(s, 1e-2, KernelParams{0.0, 1.0}), ValidationError);
    EXPECT_THROW(KrModel({2.0, 1.0}, {0.0, 0.0}, 1.0, {}), ValidationError);
}

} // namespace
} // namespace curvekit
