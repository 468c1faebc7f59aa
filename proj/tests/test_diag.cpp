#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "weaknet/diag.hpp"

using namespace weaknet;

namespace {

Vector pmf(std::initializer_list<double> vals)
{
    Vector v(static_cast<Index>(vals.size()));
    Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

beliefs::LikelihoodModel::AgentModel binary_model(std::initializer_list<double> heads)
{
    beliefs::LikelihoodModel::AgentModel m;
    m.signals = {"H", "T"};
    m.table.resize(static_cast<Index>(heads.size()), 2);
    Index row = 0;
    for (double h : heads) {
        m.table(row, 0) = h;
        m.table(row, 1) = 1.0 - h;
        ++row;
    }
    return m;
}

Vector random_pmf(std::mt19937_64& rng, Index m)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector v(m);
    for (Index i = 0; i < m; ++i) v(i) = unit(rng);
    return v / v.sum();
}

} // namespace

// =============================================================================
// regrets
// =============================================================================

TEST_CASE("full mass on the support gives zero weak regret")
{
    CHECK(diag::regret_weak(pmf({0.4, 0.6, 0.0}), {0, 1}) == 0.0);
}

TEST_CASE("half mass gives log two")
{
    CHECK(diag::regret_weak(pmf({0.5, 0.2, 0.3}), {0}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("zero mass on the support is undefined")
{
    CHECK_THROWS_AS(diag::regret_weak(pmf({0.0, 1.0}), {0}), UndefinedRegretError);
}

TEST_CASE("true regret at certainty and at 1/e")
{
    CHECK(diag::regret_true(pmf({1.0, 0.0}), 0) == 0.0);
    CHECK(diag::regret_true(pmf({std::exp(-1.0), 1.0 - std::exp(-1.0)}), 0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(diag::regret_true(pmf({0.0, 1.0}), 0), UndefinedRegretError);
}

TEST_CASE("regrets are strictly positive away from full mass")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        Vector b = random_pmf(rng, 3);
        if (b(0) < 1.0) CHECK(diag::regret_true(b, 0) > 0.0);
        if (b(0) + b(1) < 1.0 - 1e-15) CHECK(diag::regret_weak(b, {0, 1}) > 0.0);
    }
}

// =============================================================================
// aggregate risk
// =============================================================================

TEST_CASE("aggregate of zero regrets is zero")
{
    CHECK(diag::aggregate_risk(pmf({0.0, 0.0}), pmf({0.5, 0.5})) == 0.0);
}

TEST_CASE("uniform weights halve a single regret")
{
    CHECK(diag::aggregate_risk(pmf({std::log(2.0), 0.0}), pmf({0.5, 0.5})) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("aggregate risk is linear and permutation-invariant")
{
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vector r1(3), r2(3);
        for (Index i = 0; i < 3; ++i) {
            r1(i) = unit(rng);
            r2(i) = unit(rng);
        }
        Vector y = random_pmf(rng, 3);
        double lhs = diag::aggregate_risk(r1 + 2.0 * r2, y);
        double rhs = diag::aggregate_risk(r1, y) + 2.0 * diag::aggregate_risk(r2, y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

        Vector pr(3), py(3);
        pr << r1(2), r1(0), r1(1);
        py << y(2), y(0), y(1);
        CHECK(diag::aggregate_risk(pr, py) ==
              doctest::Approx(diag::aggregate_risk(r1, y)).epsilon(1e-12));
    }
}

// =============================================================================
// forecast KL
// =============================================================================

TEST_CASE("point mass at the truth forecasts perfectly")
{
    auto m = binary_model({0.3, 0.8});
    CHECK(diag::forecast_kl(pmf({1.0, 0.0}), m, 0) == 0.0);
}

TEST_CASE("degenerate truth row against a uniform forecast")
{
    beliefs::LikelihoodModel::AgentModel m;
    m.signals = {"H", "T"};
    m.table.resize(2, 2);
    m.table << 1.0, 0.0,
               0.0, 1.0;
    // belief (0.5, 0.5) forecasts (0.5, 0.5); truth row is (1, 0)
    CHECK(diag::forecast_kl(pmf({0.5, 0.5}), m, 0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("undefined when the forecast misses the truth's support")
{
    beliefs::LikelihoodModel::AgentModel m;
    m.signals = {"H", "T"};
    m.table.resize(2, 2);
    m.table << 1.0, 0.0,
               0.0, 1.0;
    CHECK_THROWS_AS(diag::forecast_kl(pmf({0.0, 1.0}), m, 0), UndefinedKLError);
}

TEST_CASE("forecast KL is non-negative and zero only at the matching forecast")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        auto m = binary_model({unit(rng), unit(rng), unit(rng)});
        Vector b = random_pmf(rng, 3);
        double kl = diag::forecast_kl(b, m, 1);
        CHECK(kl >= 0.0);
        Vector point = pmf({0.0, 1.0, 0.0});
        CHECK(diag::forecast_kl(point, m, 1) == 0.0);
    }
}

// =============================================================================
// h_value
// =============================================================================

TEST_CASE("tau zero vanishes")
{
    auto m = binary_model({0.3, 0.8});
    CHECK(diag::h_value(pmf({0.5, 0.5}), m, 0, 0, 0.0) == 0.0);
}

TEST_CASE("uninformative likelihood vanishes")
{
    auto m = binary_model({0.4, 0.4, 0.4});
    CHECK(diag::h_value(pmf({0.2, 0.3, 0.5}), m, 1, 0, 0.7) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("bounded by one over a hundred thousand random draws")
{
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        Index states = 2 + static_cast<Index>(rng() % 4);
        beliefs::LikelihoodModel::AgentModel m;
        m.signals = {"H", "T"};
        m.table.resize(states, 2);
        for (Index t = 0; t < states; ++t) {
            double h = unit(rng);
            m.table(t, 0) = h;
            m.table(t, 1) = 1.0 - h;
        }
        Vector b = random_pmf(rng, states);
        Index theta = static_cast<Index>(rng() % states);
        Index z = static_cast<Index>(rng() % 2);
        double tau = unit(rng);
        double h = diag::h_value(b, m, theta, z, tau);
        if (std::abs(h) > 1.0) ++violations;
    }
    CHECK(violations == 0);
}
