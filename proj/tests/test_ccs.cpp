#include "shmcva/ccs.hpp"
#include "shmcva/error.hpp"

#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace shmcva;
using shmcva::testing::code_of;

namespace {

ccs::ZcbFunction flat(double rate)
{
    return [rate](double t, double T) { return std::exp(-rate * (T - t)); };
}

// Nelson-Siegel-shaped forward curve seen from t; enough curvature to separate the legs.
ccs::ZcbFunction shaped(double level, double slope, double hump)
{
    return [=](double t, double T) {
        auto y = [&](double tau) {
            if (tau <= 0.0)
                return level + slope;
            const double x = tau / 2.0, f = (1.0 - std::exp(-x)) / x;
            return level + slope * f + hump * (f - std::exp(-x));
        };
        return std::exp(-y(T - t) * (T - t));
    };
}

const auto kContract = ccs::make_contract(1.1435, 1.1435, 0.0, 10.0, 0.25, ccs::Side::Payer);

} // namespace

TEST(Contract, Construction)
{
    EXPECT_NEAR(kContract.notional_for, 1.0, 1e-15);
    EXPECT_NEAR(kContract.notional_dom(), 1.1435, 1e-15);
    const auto dates = ccs::payment_dates(kContract);
    ASSERT_EQ(dates.size(), 41u);
    EXPECT_EQ(dates.front(), 0.0);
    EXPECT_NEAR(dates.back(), 10.0, 1e-12);
    EXPECT_EQ(code_of([] { ccs::make_contract(1.0, 1.0, 5.0, 5.0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { ccs::make_contract(1.0, 1.0, 0.0, 1.1, 0.25); }), ErrorCode::InvalidArgument);
}

TEST(ValuePayer, Examples)
{
    const auto p = shaped(0.02, -0.01, 0.004);
    EXPECT_NEAR(ccs::value_payer(kContract, 0.0, kContract.psi0, p, p), 0.0, 1e-15);
    EXPECT_NEAR(ccs::value_payer(kContract, 10.0, kContract.psi0, flat(0.03), flat(0.01)), 0.0, 1e-15);
}

TEST(ValuePayer, SeasonedMidLifeMatchesOracle)
{
    const auto c = ccs::make_contract(1.1435, 1.1435, 0.0, 10.0);
    const double psi = 1.2 * c.psi0;
    for (double t : {2.5, 4.75, 9.75}) {
        const double v = ccs::value_payer(c, t, psi, flat(0.02), flat(0.01));
        const double oracle = ccs::fra_sum_oracle(c, t, psi, flat(0.02), flat(0.01));
        EXPECT_NEAR(v, oracle, 1e-12);
        EXPECT_EQ(ccs::value_receiver(c, t, psi, flat(0.02), flat(0.01)), -v);
    }
}

TEST(ValuePayer, Errors)
{
    EXPECT_EQ(code_of([] { ccs::value_payer(kContract, 10.25, 1.0, flat(0.0), flat(0.0)); }),
              ErrorCode::MaturityPassed);
    EXPECT_EQ(code_of([] { ccs::value_payer(kContract, 1.1, 1.0, flat(0.0), flat(0.0)); }), ErrorCode::OffGridDate);
}

TEST(ValuePayer, ForwardStartingContractBeforeStart)
{
    const auto c = ccs::make_contract(1.0, 1.0, 2.0, 5.0, 0.5);
    const double v = ccs::value_payer(c, 0.7, 1.3, flat(0.03), flat(0.01));
    EXPECT_NEAR(v, ccs::fra_sum_oracle(c, 0.7, 1.3, flat(0.03), flat(0.01)), 1e-12);
}

TEST(FraSumOracle, Examples)
{
    const auto p = shaped(0.01, 0.02, -0.01);
    EXPECT_NEAR(ccs::fra_sum_oracle(kContract, 3.0, kContract.psi0, p, p), 0.0, 1e-14);
    EXPECT_EQ(ccs::simple_forward(0.97, 0.97, 0.25), 0.0);
    EXPECT_NEAR(ccs::simple_forward(1.0, 0.99, 0.25), (1.0 / 0.99 - 1.0) / 0.25, 1e-15);
}

TEST(FraSumOracle, TelescopingOnRandomFixtures)
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> level(-0.01, 0.06), slope(-0.03, 0.03), hump(-0.02, 0.02);
    std::uniform_real_distribution<double> spot(0.5, 2.0);
    std::uniform_int_distribution<int> step(0, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = ccs::make_contract(spot(rng), spot(rng), 0.0, 10.0, 0.25,
                                          trial % 2 ? ccs::Side::Payer : ccs::Side::Receiver);
        const auto pd = shaped(level(rng), slope(rng), hump(rng));
        const auto pf = shaped(level(rng), slope(rng), hump(rng));
        const double t = 0.25 * step(rng), psi = spot(rng);
        const double v = ccs::value_payer(c, t, psi, pd, pf);
        EXPECT_LT(std::abs(ccs::fra_sum_oracle(c, t, psi, pd, pf) - v), 1e-12 * (1.0 + std::abs(v)));
        EXPECT_EQ(ccs::value_receiver(c, t, psi, pd, pf) + v, 0.0);
        EXPECT_EQ(ccs::value(c, t, psi, pd, pf), c.side == ccs::Side::Payer ? v : -v);
    }
}

TEST(Exposure, Examples)
{
    EXPECT_EQ(ccs::exposure(-5.0), 0.0);
    EXPECT_EQ(ccs::exposure(3.0), 3.0);
    EXPECT_EQ(ccs::exposure(3.0, 1.0), 2.0);
}

TEST(Exposure, NondecreasingInSpotForPayer)
{
    const auto pd = shaped(0.03, -0.01, 0.0), pf = shaped(0.01, 0.005, 0.002);
    for (double t : {0.0, 1.0, 5.5, 9.75, 10.0}) {
        double prev = -1.0;
        for (double psi = 0.5; psi <= 2.0; psi += 0.01) {
            const double e = ccs::exposure(ccs::value_payer(kContract, t, psi, pd, pf));
            EXPECT_GE(e, prev);
            prev = e;
        }
    }
}
