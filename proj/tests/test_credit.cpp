#include "shmcva/credit.hpp"
#include "shmcva/error.hpp"

#include "test_support.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace shmcva;
using shmcva::testing::code_of;

namespace {

const credit::CirParams kBaseCir{0.2975, 0.3045, 0.1432, 0.3045, 0.25};

// Exact CIR transition: scaled noncentral chi-square drawn as a Poisson mixture of gammas.
class ExactCir {
public:
    ExactCir(const credit::CirParams& p, double dt)
        : c_(p.sigma * p.sigma * -std::expm1(-p.kappa * dt) / (4.0 * p.kappa)),
          decay_(std::exp(-p.kappa * dt)),
          dof_(4.0 * p.kappa * p.theta / (p.sigma * p.sigma))
    {
    }

    double operator()(double lambda, std::mt19937_64& rng) const
    {
        const double nc = lambda * decay_ / c_;
        const auto n = std::poisson_distribution<long>(0.5 * nc)(rng);
        return c_ * 2.0 * std::gamma_distribution<double>(0.5 * dof_ + static_cast<double>(n), 1.0)(rng);
    }

private:
    double c_;
    double decay_;
    double dof_;
};

// Monte Carlo E[exp(-int_0^T lambda)] with trapezoid integration over exact transitions.
std::pair<double, double> laplace_mc(const credit::CirParams& p, double T, int n_paths, int steps, unsigned seed)
{
    const double dt = T / steps;
    const ExactCir next(p, dt);
    std::mt19937_64 rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int j = 0; j < n_paths; ++j) {
        double lam = p.lambda0, integral = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double nxt = next(lam, rng);
            integral += 0.5 * (lam + nxt) * dt;
            lam = nxt;
        }
        const double v = std::exp(-integral);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n_paths;
    return {mean, std::sqrt((sum2 / n_paths - mean * mean) / n_paths)};
}

} // namespace

TEST(Feller, Examples)
{
    EXPECT_TRUE(credit::feller_satisfied(kBaseCir));
    EXPECT_NEAR(2.0 * kBaseCir.kappa * kBaseCir.theta, 0.18118, 1e-5);
    EXPECT_NEAR(kBaseCir.sigma * kBaseCir.sigma, 0.02051, 1e-5);
    EXPECT_FALSE(credit::feller_satisfied({1.0, 1.0, 2.0, 0.0, 0.25}));
    EXPECT_FALSE(credit::feller_satisfied({0.5, 1.0, 1.0, 0.0, 0.25}));
    EXPECT_NEAR(credit::feller_ratio({0.5, 1.0, 1.0, 0.0, 0.25}), 1.0, 1e-15);
}

TEST(CirParams, Validation)
{
    EXPECT_EQ(code_of([] { credit::validate({0.0, 0.3, 0.1, 0.3, 0.25}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { credit::validate({0.3, 0.3, 0.1, -0.1, 0.25}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { credit::validate({0.3, 0.3, 0.1, 0.3, 1.0}); }), ErrorCode::InvalidRecovery);
    EXPECT_NO_THROW(credit::validate(kBaseCir));
}

TEST(StepCir, Examples)
{
    credit::CirParams p = kBaseCir;
    p.sigma = 0.0;
    EXPECT_EQ(credit::step_cir(p, p.theta, 0.25, 1.0), p.theta);
    p.kappa = 1.0;
    p.theta = 0.04;
    EXPECT_NEAR(credit::step_cir(p, 0.0, 0.25, 0.7), 0.01, 1e-17);
    EXPECT_EQ(code_of([&] { credit::step_cir(p, 0.1, 0.0, 0.0); }), ErrorCode::NonPositiveStep);
}

TEST(StepCir, NegativeStateUsesTruncatedRate)
{
    // lambda < 0 behaves as 0 in both drift and diffusion
    EXPECT_NEAR(credit::step_cir(kBaseCir, -0.02, 0.01, 3.0), -0.02 + kBaseCir.kappa * kBaseCir.theta * 0.01, 1e-16);
}

TEST(StepCir, MonteCarloMeanMatchesClosedForm)
{
    const double dt = 1.0 / 360.0;
    const int n = 100000, steps = 360;
    credit::CirParams p = kBaseCir;
    p.lambda0 = 0.1;
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z;
    double sum = 0.0, sum2 = 0.0;
    for (int j = 0; j < n; ++j) {
        double lam = p.lambda0;
        for (int k = 0; k < steps; ++k)
            lam = credit::step_cir(p, lam, dt, std::sqrt(dt) * z(rng));
        sum += lam;
        sum2 += lam * lam;
    }
    const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    const double exact = p.theta + (p.lambda0 - p.theta) * std::exp(-p.kappa);
    EXPECT_NEAR(credit::cir_mean(p, p.lambda0, 1.0), exact, 1e-15);
    EXPECT_LT(std::abs(mean - exact), 4.0 * se);
}

TEST(SurvivalClosedForm, Examples)
{
    EXPECT_EQ(credit::survival_closed_form(kBaseCir, 2.0, 2.0, 0.4), 1.0);
    credit::CirParams quiet = kBaseCir;
    quiet.sigma = 1e-12;
    EXPECT_NEAR(credit::survival_closed_form(quiet, 1.0, 4.0, quiet.theta), std::exp(-quiet.theta * 3.0), 1e-6);
    EXPECT_EQ(code_of([] { credit::survival_closed_form(kBaseCir, 3.0, 1.0, 0.1); }), ErrorCode::ReversedTimes);
}

TEST(SurvivalClosedForm, MonotoneAndBounded)
{
    double prev_t = 1.0;
    for (int i = 1; i <= 60; ++i) {
        const double s = credit::survival_closed_form(kBaseCir, 0.0, 0.25 * i, 0.2);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, prev_t);
        prev_t = s;
    }
    double prev_l = 1.0;
    for (int i = 0; i <= 50; ++i) {
        const double s = credit::survival_closed_form(kBaseCir, 1.0, 6.0, 0.02 * i);
        EXPECT_LE(s, prev_l);
        EXPECT_LE(s, 1.0);
        prev_l = s;
    }
}

struct LaplaceCase {
    credit::CirParams p;
    int paths;
};

class SurvivalMonteCarlo : public ::testing::TestWithParam<LaplaceCase> {};

TEST_P(SurvivalMonteCarlo, ClosedFormMatchesExactSimulation)
{
    const auto& [p, paths] = GetParam();
    const auto [mc, se] = laplace_mc(p, 5.0, paths, 520, 17);
    const double exact = credit::survival_closed_form(p, 0.0, 5.0, p.lambda0);
    EXPECT_LT(std::abs(mc / exact - 1.0), 0.005) << "mc " << mc << " se " << se << " exact " << exact;
}

INSTANTIATE_TEST_SUITE_P(Triples, SurvivalMonteCarlo,
                         ::testing::Values(LaplaceCase{kBaseCir, 100000},
                                           LaplaceCase{{1.5, 0.05, 0.3, 0.02, 0.25}, 50000},
                                           LaplaceCase{{0.5, 0.1, 0.2, 0.15, 0.25}, 50000}));

TEST(PathSurvival, Examples)
{
    const std::vector<double> zero(9, 0.0);
    for (double s : credit::path_survival(zero, 0.25))
        EXPECT_EQ(s, 1.0);
    const std::vector<double> flat(5, 0.04);
    const auto s = credit::path_survival(flat, 0.25);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_NEAR(s[4], 0.960789, 1e-6);
    EXPECT_NEAR(s[4], std::exp(-0.04), 1e-15);
    EXPECT_EQ(code_of([] { credit::path_survival(std::vector<double>{}, 0.25); }), ErrorCode::EmptyPath);
    EXPECT_EQ(code_of([&] { credit::path_survival(flat, 0.0); }), ErrorCode::NonPositiveStep);
}

TEST(PathSurvival, RandomPathsAreNonincreasingInUnitInterval)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> lam(41);
        double l = 0.3;
        for (double& v : lam) {
            v = l;
            l = credit::step_cir(kBaseCir, l, 0.25, 0.5 * z(rng));
        }
        const auto s = credit::path_survival(lam, 0.25);
        EXPECT_EQ(s.front(), 1.0);
        for (std::size_t i = 1; i < s.size(); ++i) {
            EXPECT_LE(s[i], s[i - 1]);
            EXPECT_GT(s[i], 0.0);
        }
    }
}

TEST(DefaultIncrements, Examples)
{
    for (double q : credit::default_increments(std::vector<double>(6, 1.0)))
        EXPECT_EQ(q, 0.0);
    const auto q = credit::default_increments(std::vector<double>{1.0, 0.9, 0.8});
    ASSERT_EQ(q.size(), 2u);
    EXPECT_NEAR(q[0], 0.1, 1e-15);
    EXPECT_NEAR(q[1], 0.1, 1e-15);
    EXPECT_EQ(code_of([] { credit::default_increments(std::vector<double>{1.0, 0.8, 0.9}); }),
              ErrorCode::NonMonotoneSurvival);
}

TEST(DefaultIncrements, Telescoping)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s{1.0};
        for (int i = 0; i < 40; ++i)
            s.push_back(s.back() * (1.0 - u(rng)));
        const auto q = credit::default_increments(s);
        double partial = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            EXPECT_GE(q[i], 0.0);
            partial += q[i];
            EXPECT_NEAR(partial, 1.0 - s[i + 1], 1e-14);
        }
    }
}

TEST(SpreadsToIntensities, Examples)
{
    const auto l = credit::spreads_to_intensities(std::vector<double>{0.0075, 0.03}, 0.25);
    EXPECT_NEAR(l[0], 0.01, 1e-16);
    EXPECT_NEAR(l[1], 0.04, 1e-16);
    EXPECT_EQ(code_of([] { credit::spreads_to_intensities(std::vector<double>{0.01}, 1.0); }),
              ErrorCode::InvalidRecovery);
    EXPECT_EQ(code_of([] { credit::spreads_to_intensities(std::vector<double>{-0.01}, 0.25); }),
              ErrorCode::NonPositiveQuote);
}

TEST(UnconditionalIncrements, SumToOneMinusSurvival)
{
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i)
        grid.push_back(0.25 * i);
    const auto q = credit::unconditional_default_increments(kBaseCir, grid);
    ASSERT_EQ(q.size(), 40u);
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    EXPECT_NEAR(total, 1.0 - credit::survival_closed_form(kBaseCir, 0.0, 10.0, kBaseCir.lambda0), 1e-14);
}
