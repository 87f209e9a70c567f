#include "shmcva/correlation.hpp"
#include "shmcva/error.hpp"

#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace shmcva;
using shmcva::testing::code_of;

namespace {

const corr::CorrMatrix kBaseR{0.1162656, 0.01965914, 0.1383345};

Eigen::Matrix3d as_matrix(const corr::CorrMatrix& r)
{
    Eigen::Matrix3d m;
    m << 1.0, r.rho12, r.rho13, r.rho12, 1.0, r.rho23, r.rho13, r.rho23, 1.0;
    return m;
}

double min_eigenvalue(const corr::CorrMatrix& r)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(as_matrix(r)).eigenvalues().minCoeff();
}

void expect_reconstructs(const corr::CorrMatrix& r, double tol)
{
    const auto a = corr::cholesky3(r);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = a[i][j];
    const Eigen::Matrix3d diff = m * m.transpose() - as_matrix(r);
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), tol);
    EXPECT_EQ(a[0][1], 0.0);
    EXPECT_EQ(a[0][2], 0.0);
    EXPECT_EQ(a[1][2], 0.0);
}

double sample_corr(const std::vector<double>& x, const std::vector<double>& y)
{
    return corr::pearson(x, y);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_statistic(std::vector<double> x)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double lag1_autocorr(const std::vector<double>& x)
{
    return corr::pearson(std::span(x).first(x.size() - 1), std::span(x).subspan(1));
}

std::vector<double> simulate_ou(const corr::OuCorrParams& p, double dt, std::size_t n, unsigned seed)
{
    const corr::OuStepper step(p, dt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> g(n);
    double v = p.g0;
    for (double& x : g) {
        x = v;
        v = step.step(v, z(rng));
    }
    return g;
}

} // namespace

TEST(Cholesky3, Identity)
{
    const auto a = corr::cholesky3({});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_EQ(a[i][j], i == j ? 1.0 : 0.0);
}

TEST(Cholesky3, ReferenceMatrix)
{
    expect_reconstructs(kBaseR, 1e-14);
    const auto a = corr::cholesky3(kBaseR);
    EXPECT_EQ(a[1][0], kBaseR.rho12);
    EXPECT_EQ(a[2][0], kBaseR.rho13);
    EXPECT_NEAR(a[1][1], std::sqrt(1.0 - 0.1162656 * 0.1162656), 1e-16);
}

TEST(Cholesky3, RejectsIndefiniteMatrix)
{
    const corr::CorrMatrix bad{0.9, 0.9, -0.9};
    EXPECT_LT(min_eigenvalue(bad), 0.0);
    EXPECT_EQ(code_of([&] { corr::cholesky3(bad); }), ErrorCode::NotPositiveSemiDefinite);
}

TEST(Cholesky3, Errors)
{
    EXPECT_EQ(code_of([] { corr::cholesky3({1.0, 0.5, 0.5}); }), ErrorCode::DegeneratePivot);
    EXPECT_EQ(code_of([] { corr::cholesky3({0.1, 1.2, 0.0}); }), ErrorCode::InvalidRho);
}

TEST(Cholesky3, RandomPsdTriplesReconstruct)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    int accepted = 0;
    while (accepted < 1000) {
        const corr::CorrMatrix r{u(rng), u(rng), u(rng)};
        if (min_eigenvalue(r) <= 1e-9) {
            EXPECT_EQ(code_of([&] { corr::cholesky3(r); }), ErrorCode::NotPositiveSemiDefinite);
            continue;
        }
        expect_reconstructs(r, 1e-14);
        ++accepted;
    }
}

TEST(StepOu, Examples)
{
    const corr::OuCorrParams still{2.0, 0.3, 0.0, 0.0};
    EXPECT_NEAR(corr::step_ou(still, 0.3, 0.1, 0.7), 0.3, 1e-16);
    const double dt = std::log(2.0) / still.theta;
    EXPECT_NEAR(corr::step_ou(still, 2.3, dt, 0.0), 1.3, 1e-15);
    EXPECT_EQ(code_of([&] { corr::step_ou(still, 0.0, 0.0, 0.0); }), ErrorCode::NonPositiveStep);
}

TEST(StepOu, StationaryVariance)
{
    const corr::OuCorrParams p{2.0, 0.3, 0.5, 0.3};
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    const int n = 100000;
    const double dt = 2.0; // four relaxation times, so successive samples are nearly independent
    double g = p.mu, sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        g = corr::step_ou(p, g, dt, std::sqrt(dt) * z(rng));
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = (sum2 - n * mean * mean) / (n - 1);
    const double target = p.sigma * p.sigma / (2.0 * p.theta);
    EXPECT_LT(std::abs(var - target), 4.0 * target * std::sqrt(2.0 / (n - 1)));
}

TEST(StepOu, StepperMatchesFunction)
{
    const corr::OuCorrParams p{1.3, -0.2, 0.7, 0.1};
    const double dt = 1.0 / 360.0;
    const corr::OuStepper s(p, dt);
    for (double z : {-2.0, 0.0, 0.4, 3.1})
        EXPECT_NEAR(s.step(0.45, z), corr::step_ou(p, 0.45, dt, z * std::sqrt(dt)), 1e-15);
}

TEST(RhoOfG, Examples)
{
    EXPECT_EQ(corr::rho_of_g(0.0), 0.0);
    EXPECT_NEAR(corr::rho_of_g(std::atanh(0.5)), 0.5, 1e-15);
    for (double g : {20.0, -20.0}) {
        const double r = corr::rho_of_g(g);
        EXPECT_NEAR(std::abs(r), 1.0, 1e-12);
        EXPECT_LT(std::abs(r), 1.0);
    }
    for (double g = -5.0; g <= 5.0; g += 0.01)
        EXPECT_NEAR(std::atanh(corr::rho_of_g(g)), g, 1e-12);
}

TEST(CorrelatedIncrements, IdentityStructure)
{
    const auto a = corr::cholesky3({});
    const std::array<double, 4> z{0.3, -1.2, 0.8, 2.0};
    const double dt = 0.04;
    const auto inc = corr::correlated_increments(a, 0.0, z, dt);
    EXPECT_NEAR(inc.psi, 0.2 * z[0], 1e-16);
    EXPECT_NEAR(inc.dom, 0.2 * z[1], 1e-16);
    EXPECT_NEAR(inc.fgn, 0.2 * z[2], 1e-16);
    EXPECT_NEAR(inc.lambda, 0.2 * z[3], 1e-16);
}

TEST(CorrelatedIncrements, PerfectCorrelation)
{
    const auto a = corr::cholesky3(kBaseR);
    const auto inc = corr::correlated_increments(a, 1.0, {0.5, 0.1, -0.3, 1.7}, 1.0 / 360.0);
    EXPECT_EQ(inc.lambda, inc.psi);
    EXPECT_EQ(code_of([&] { corr::correlated_increments(a, 1.1, {0, 0, 0, 0}, 0.1); }), ErrorCode::InvalidRho);
    EXPECT_EQ(code_of([&] { corr::correlated_increments(a, 0.1, {0, 0, 0, 0}, 0.0); }), ErrorCode::NonPositiveStep);
}

TEST(CorrelatedIncrements, SampleCorrelationsMatchInputs)
{
    const auto a = corr::cholesky3(kBaseR);
    const double dt = 1.0 / 360.0;
    const std::size_t n = 1000000;
    std::vector<double> psi(n), dom(n), fgn(n), lam(n);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z;
    double var_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto inc = corr::correlated_increments(a, 0.5, {z(rng), z(rng), z(rng), z(rng)}, dt);
        psi[i] = inc.psi;
        dom[i] = inc.dom;
        fgn[i] = inc.fgn;
        lam[i] = inc.lambda;
        var_sum += inc.lambda * inc.lambda;
    }
    EXPECT_NEAR(sample_corr(psi, dom), kBaseR.rho12, 0.005);
    EXPECT_NEAR(sample_corr(psi, fgn), kBaseR.rho13, 0.005);
    EXPECT_NEAR(sample_corr(dom, fgn), kBaseR.rho23, 0.005);
    EXPECT_NEAR(sample_corr(psi, lam), 0.5, 0.005);
    EXPECT_NEAR(var_sum / n / dt, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(CorrelatedIncrements, QuadraticCovariationTracksRhoIntegral)
{
    const corr::OuCorrParams ou{2.0, 0.3, 0.8, 0.0};
    const auto a = corr::cholesky3(kBaseR);
    const double dt = 1.0 / 360.0;
    const int paths = 10000, steps = 360;
    const corr::OuStepper step(ou, dt);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    double sum = 0.0, sum2 = 0.0;
    for (int j = 0; j < paths; ++j) {
        double g = ou.g0, covariation = 0.0, rho_integral = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double rho = corr::rho_of_g(g);
            const auto inc = corr::correlated_increments(a, rho, {z(rng), z(rng), z(rng), z(rng)}, dt);
            covariation += inc.psi * inc.lambda;
            rho_integral += rho * dt;
            g = step.step(g, z(rng));
        }
        const double gap = covariation - rho_integral;
        sum += gap;
        sum2 += gap * gap;
    }
    const double mean = sum / paths;
    const double se = std::sqrt((sum2 / paths - mean * mean) / paths);
    EXPECT_LT(std::abs(mean), 3.0 * se);
}

TEST(CorrelatedIncrements, LambdaDriverIsBrownianUnderStochasticRho)
{
    const corr::OuCorrParams ou{2.0, 0.3, 1.5, 0.5};
    const auto a = corr::cholesky3(kBaseR);
    const double dt = 1.0 / 360.0;
    const std::size_t n = 1000000;
    const corr::OuStepper step(ou, dt);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    std::vector<double> lam(n);
    double g = ou.g0, sum2 = 0.0;
    for (double& x : lam) {
        x = corr::correlated_increments(a, corr::rho_of_g(g), {z(rng), z(rng), z(rng), z(rng)}, dt).lambda;
        sum2 += x * x;
        g = step.step(g, z(rng));
    }
    EXPECT_NEAR(sum2 / n / dt, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_LT(std::abs(lag1_autocorr(lam)), 0.01);
}

TEST(CurrentRho, Specs)
{
    EXPECT_EQ(corr::current_rho(corr::ConstantCorrelation{0.25}, 3.0), 0.25);
    EXPECT_NEAR(corr::current_rho(corr::StochasticCorrelation{{2.0, 0.3, 0.5, 0.3}}, 0.4), std::tanh(0.4), 1e-16);
}

TEST(SlidingWindowCorr, SelfCorrelation)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::vector<double> x(500);
    for (double& v : x)
        v = z(rng);
    const auto r = corr::sliding_window_corr(x, x, 50);
    ASSERT_EQ(r.rho.size(), 451u);
    for (double v : r.rho)
        EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_TRUE(r.zero_variance.empty());
}

TEST(SlidingWindowCorr, IndependentSeriesAverageNearZero)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    const std::size_t n = 10000, w = 50;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = z(rng);
        y[i] = z(rng);
    }
    const auto r = corr::sliding_window_corr(x, y, w);
    ASSERT_EQ(r.rho.size(), n - w + 1);
    double abs_mean = 0.0, mean = 0.0;
    for (double v : r.rho) {
        EXPECT_LE(std::abs(v), 1.0);
        abs_mean += std::abs(v);
        mean += v;
    }
    abs_mean /= static_cast<double>(r.rho.size());
    mean /= static_cast<double>(r.rho.size());
    EXPECT_LT(abs_mean, 0.2);
    EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(double(w)));
}

TEST(SlidingWindowCorr, TracksLatentOuLevel)
{
    const corr::OuCorrParams ou{2.0, 0.3, 1.0, 0.3};
    const double dt = 1.0 / 360.0;
    const std::size_t n = 20000, w = 50;
    const auto g = simulate_ou(ou, dt, n, 3);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = corr::rho_of_g(g[i]);
        x[i] = z(rng);
        y[i] = rho * x[i] + std::sqrt(1.0 - rho * rho) * z(rng);
    }
    const auto r = corr::sliding_window_corr(x, y, w);
    std::vector<double> est, latent;
    for (std::size_t k = 0; k < r.rho.size(); ++k) {
        est.push_back(std::atanh(std::clamp(r.rho[k], -0.999, 0.999)));
        latent.push_back(g[k + w - 1]);
    }
    EXPECT_GT(corr::pearson(est, latent), 0.5);
}

TEST(SlidingWindowCorr, ConstantWindowIsFlagged)
{
    std::vector<double> x(60, 1.0), y(60);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = std::sin(0.3 * double(i));
    x[59] = 2.0;
    const auto r = corr::sliding_window_corr(x, y, 50);
    ASSERT_EQ(r.rho.size(), 11u);
    EXPECT_EQ(r.rho[0], 0.0);
    EXPECT_EQ(r.zero_variance.size(), 10u);
}

TEST(SlidingWindowCorr, Errors)
{
    const std::vector<double> x(40, 0.0), y(41, 0.0);
    EXPECT_EQ(code_of([&] { corr::sliding_window_corr(x, x, 50); }), ErrorCode::WindowTooLarge);
    EXPECT_EQ(code_of([&] { corr::sliding_window_corr(x, y, 10); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { corr::sliding_window_corr(x, x, 4); }), ErrorCode::InvalidArgument);
}

TEST(FitOuLsq, RecoversSimulatedParameters)
{
    const corr::OuCorrParams truth{2.0, 0.3, 0.5, 0.3};
    const double dt = 1.0 / 360.0;
    const auto g = simulate_ou(truth, dt, 100000, 11);
    std::vector<double> rho(g.size());
    std::transform(g.begin(), g.end(), rho.begin(), corr::rho_of_g);
    const auto fit = corr::fit_ou_lsq(rho, dt);
    EXPECT_NEAR(fit.theta / truth.theta, 1.0, 0.10);
    EXPECT_NEAR(fit.mu / truth.mu, 1.0, 0.10);
    EXPECT_NEAR(fit.sigma / truth.sigma, 1.0, 0.10);
    EXPECT_NEAR(fit.g0, g.back(), 1e-12);
}

TEST(FitOuLsq, DegenerateInputs)
{
    const auto flat = corr::fit_ou_lsq(std::vector<double>(30, 0.4), 1.0 / 360.0);
    EXPECT_EQ(flat.sigma, 0.0);
    EXPECT_NEAR(flat.mu, std::atanh(0.4), 1e-15);
    EXPECT_NEAR(flat.g0, std::atanh(0.4), 1e-15);

    std::vector<double> saturated(30, 0.2);
    saturated[7] = 1.0;
    EXPECT_EQ(code_of([&] { corr::fit_ou_lsq(saturated, 0.01); }), ErrorCode::SaturatedInput);
    EXPECT_EQ(code_of([] { corr::fit_ou_lsq(std::vector<double>(5, 0.1), 0.01); }), ErrorCode::TooShort);

    std::vector<double> trending(50);
    for (std::size_t i = 0; i < trending.size(); ++i)
        trending[i] = std::tanh(0.01 * std::exp(0.1 * double(i)));
    EXPECT_EQ(code_of([&] { corr::fit_ou_lsq(trending, 0.01); }), ErrorCode::ExplosiveFit);
}

TEST(ExtractResiduals, GeometricBrownianMotion)
{
    const double dt = 1.0 / 252.0, vol = 0.2;
    const std::size_t n = 10001;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> z;
    std::vector<double> level(n);
    double s = 100.0;
    for (double& v : level) {
        v = s;
        s *= std::exp((0.05 - 0.5 * vol * vol) * dt + vol * std::sqrt(dt) * z(rng));
    }
    const auto e = corr::extract_residuals(level, dt);
    ASSERT_EQ(e.size(), n - 1);
    double m = 0.0, v = 0.0;
    for (double x : e)
        m += x;
    m /= double(e.size());
    for (double x : e)
        v += (x - m) * (x - m);
    v /= double(e.size() - 1);
    EXPECT_NEAR(v, 1.0, 0.05);
    EXPECT_LT(std::abs(lag1_autocorr(e)), 0.05);
}

TEST(ExtractResiduals, StochasticVolatilityResidualsLookNormal)
{
    const double dt = 1.0 / 252.0;
    const std::size_t n = 5001;
    std::mt19937_64 rng(14);
    std::normal_distribution<double> z;
    std::vector<double> level(n);
    double s = 1.2, h = 0.0;
    for (double& v : level) {
        v = s;
        h = 0.98 * h + 0.2 * std::sqrt(1.0 - 0.98 * 0.98) * z(rng);
        const double vol = 0.1 * std::exp(h);
        s *= std::exp(-0.5 * vol * vol * dt + vol * std::sqrt(dt) * z(rng));
    }
    const auto e = corr::extract_residuals(level, dt);
    // 1% two-sided Kolmogorov-Smirnov critical value, asymptotic form
    EXPECT_LT(ks_statistic(e), 1.6276 / std::sqrt(double(e.size())));
}

TEST(ExtractResiduals, Errors)
{
    EXPECT_EQ(code_of([] { corr::extract_residuals(std::vector<double>(50, 1.3), 0.01); }), ErrorCode::ZeroVariance);
    EXPECT_EQ(code_of([] { corr::extract_residuals(std::vector<double>(10, 1.3), 0.01); }), ErrorCode::TooShort);
    std::vector<double> neg(50, 1.0);
    neg[3] = -1.0;
    EXPECT_EQ(code_of([&] { corr::extract_residuals(neg, 0.01); }), ErrorCode::NonPositiveLevel);
}
