#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "weaknet/graph.hpp"

using namespace weaknet;
using oracles::eight_agent_matrix;
using oracles::three_agent_matrix;

// =============================================================================
// validate
// =============================================================================

TEST_CASE("validate accepts the identity")
{
    auto m = graph::validate(Matrix::Identity(2, 2));
    CHECK(m.size() == 2);
    CHECK(m.labels == std::vector<std::string>{"1", "2"});
}

TEST_CASE("validate accepts the three-agent network")
{
    auto m = graph::validate(three_agent_matrix());
    CHECK(m.weights(0, 2) == doctest::Approx(0.1));
}

TEST_CASE("validate reports the first broken column")
{
    Matrix bad = three_agent_matrix();
    bad(2, 2) = 0.8;   // column 3 now sums to 1.1
    try {
        graph::validate(bad);
        FAIL("expected ColumnSumError");
    } catch (const ColumnSumError& e) {
        CHECK(e.col == 2);
        CHECK(e.sum == doctest::Approx(1.1));
        CHECK(std::string(e.what()).find("column 3") != std::string::npos);
    }
}

TEST_CASE("validate rejects negative entries and non-square input")
{
    Matrix neg = Matrix::Identity(2, 2);
    neg(0, 1) = -0.1;
    neg(1, 1) = 1.1;
    CHECK_THROWS_AS(graph::validate(neg), NegativeEntryError);
    CHECK_THROWS_AS(graph::validate(Matrix::Zero(2, 3)), NonSquareError);
}

TEST_CASE("validate renormalizes rounded columns exactly")
{
    Matrix near = Matrix::Identity(3, 3);
    near(0, 0) = 1.0 + 5e-10;
    auto m = graph::validate(near);
    CHECK(m.weights.col(0).sum() == 1.0);
}

TEST_CASE("validated random left-stochastic matrices keep unit columns")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Index n = 1 + static_cast<Index>(rng() % 10);
        Matrix a(n, n);
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < n; ++i) a(i, j) = unit(rng);
            a.col(j) /= a.col(j).sum();
        }
        auto m = graph::validate(a);
        for (Index j = 0; j < n; ++j)
            CHECK(std::abs(m.weights.col(j).sum() - 1.0) <= 1e-12);
    }
}

// =============================================================================
// strongly connected components
// =============================================================================

TEST_CASE("identity splits into singletons")
{
    auto comps = graph::strongly_connected_components(graph::validate(Matrix::Identity(3, 3)));
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<Index>{0});
    CHECK(comps[1] == std::vector<Index>{1});
    CHECK(comps[2] == std::vector<Index>{2});
}

TEST_CASE("three-agent network: two sources then the sink")
{
    auto comps = graph::strongly_connected_components(graph::validate(three_agent_matrix()));
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<Index>{0});
    CHECK(comps[1] == std::vector<Index>{1});
    CHECK(comps[2] == std::vector<Index>{2});
}

TEST_CASE("eight-agent network: three blocks in condensation order")
{
    auto comps = graph::strongly_connected_components(graph::validate(eight_agent_matrix()));
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<Index>{0, 1, 2});
    CHECK(comps[1] == std::vector<Index>{3, 4});
    CHECK(comps[2] == std::vector<Index>{5, 6, 7});
}

TEST_CASE("components agree with a reachability oracle on random patterns")
{
    // oracle: transitive closure by Floyd-Warshall; two agents share a
    // component iff they reach each other
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        Index n = 2 + static_cast<Index>(rng() % 9);
        Matrix a = Matrix::Zero(n, n);
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < n; ++i)
                if (unit(rng) < 0.3) a(i, j) = unit(rng) + 0.01;
            if (a.col(j).sum() == 0.0) a(j, j) = 1.0;
            a.col(j) /= a.col(j).sum();
        }
        auto m = graph::validate(a);
        auto comps = graph::strongly_connected_components(m);

        std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
        for (Index i = 0; i < n; ++i) reach[i][i] = 1;
        for (Index l = 0; l < n; ++l)
            for (Index k = 0; k < n; ++k)
                if (a(l, k) > 0.0) reach[l][k] = 1;
        for (Index mid = 0; mid < n; ++mid)
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    if (reach[i][mid] && reach[mid][j]) reach[i][j] = 1;

        std::vector<Index> comp_of(n, -1);
        for (Index c = 0; c < static_cast<Index>(comps.size()); ++c)
            for (Index v : comps[c]) comp_of[v] = c;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                bool mutual = reach[i][j] && reach[j][i];
                CHECK(mutual == (comp_of[i] == comp_of[j]));
            }

        // condensation order: information flows forward only
        for (Index l = 0; l < n; ++l)
            for (Index k = 0; k < n; ++k)
                if (a(l, k) > 0.0) CHECK(comp_of[l] <= comp_of[k]);
    }
}

// =============================================================================
// classify
// =============================================================================

TEST_CASE("three-agent network classification")
{
    auto p = graph::classify(graph::validate(three_agent_matrix()));
    REQUIRE(p.sending_blocks.size() == 2);
    REQUIRE(p.receiving_blocks.size() == 1);
    CHECK(p.sending_blocks[0] == std::vector<Index>{0});
    CHECK(p.sending_blocks[1] == std::vector<Index>{1});
    CHECK(p.receiving_blocks[0] == std::vector<Index>{2});
    CHECK(p.t_rr(0, 0) == doctest::Approx(0.7));
    CHECK(p.t_sr(0, 0) == doctest::Approx(0.1));
    CHECK(p.t_sr(1, 0) == doctest::Approx(0.2));
}

TEST_CASE("eight-agent network classification")
{
    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    CHECK(p.n_sending == 5);
    CHECK(p.n_receiving == 3);
    REQUIRE(p.sending_blocks.size() == 2);
    CHECK(p.sending_blocks[0] == std::vector<Index>{0, 1, 2});
    CHECK(p.sending_blocks[1] == std::vector<Index>{3, 4});
    CHECK(p.receiving_blocks[0] == std::vector<Index>{5, 6, 7});
    CHECK(p.subnet_sizes == std::vector<Index>{3, 2, 3});
    CHECK(p.warnings.empty());
}

TEST_CASE("fully strongly-connected network: all sending, no receiving")
{
    Matrix a(2, 2);
    a << 0.6, 0.4,
         0.4, 0.6;
    auto p = graph::classify(graph::validate(a));
    CHECK(p.sending_blocks.size() == 1);
    CHECK(p.receiving_blocks.empty());
    CHECK(p.n_receiving == 0);
    CHECK(p.t_rr.size() == 0);
}

TEST_CASE("closed period-two component is rejected")
{
    Matrix swap(2, 2);
    swap << 0.0, 1.0,
            1.0, 0.0;
    CHECK_THROWS_AS(graph::classify(graph::validate(swap)), NotWeaklyStructuredError);
}

TEST_CASE("closed component without self-loop but aperiodic is accepted")
{
    // 3-cycle plus a chord makes cycle lengths 2 and 3, gcd 1.
    Matrix a = Matrix::Zero(3, 3);
    a(1, 0) = 1.0;               // 0 -> 1
    a(2, 1) = 0.5; a(0, 1) = 0.5; // 1 -> 2 and 1 -> 0
    a(0, 2) = 1.0;               // 2 -> 0
    auto p = graph::classify(graph::validate(a));
    CHECK(p.sending_blocks.size() == 1);
}

TEST_CASE("block lookup by agent")
{
    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    CHECK(p.is_sending(0));
    CHECK(p.is_sending(4));
    CHECK_FALSE(p.is_sending(6));
    CHECK(p.block_of(2) == 0);
    CHECK(p.block_of(4) == 1);
    CHECK(p.block_of(7) == 0);   // first (and only) receiving block
}

TEST_CASE("classifying an already-canonical matrix returns the identity permutation")
{
    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    for (Index i = 0; i < 8; ++i) CHECK(p.permutation[i] == i);
    CHECK((p.canonical - graph::validate(eight_agent_matrix()).weights)
              .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("receiving group that is connected but not strongly connected warns")
{
    // agent 1 is a closed sender; receivers 2 <- 3 with no path back 2 -> 3
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(0, 1) = 0.5; a(1, 1) = 0.3; a(2, 1) = 0.2;  // 2 listens to 1, itself, 3
    a(0, 2) = 0.6; a(2, 2) = 0.4;                 // 3 listens to 1 and itself
    auto p = graph::classify(graph::validate(a));
    REQUIRE(p.receiving_blocks.size() == 1);
    CHECK(p.receiving_blocks[0] == std::vector<Index>{1, 2});
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("not strongly connected") != std::string::npos);
}

// =============================================================================
// perron_vector / spectral_radius
// =============================================================================

TEST_CASE("perron vector of a 1x1 block")
{
    Matrix one(1, 1);
    one << 1.0;
    Vector y = graph::perron_vector(one);
    CHECK(y(0) == doctest::Approx(1.0));
}

TEST_CASE("perron vector of a symmetric doubly-stochastic block")
{
    Matrix a(2, 2);
    a << 0.6, 0.4,
         0.4, 0.6;
    Vector y = graph::perron_vector(a);
    CHECK(y(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(y(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("perron vector of the first sending block matches the eigen oracle")
{
    Matrix block = eight_agent_matrix().topLeftCorner(3, 3);
    Vector y = graph::perron_vector(block, 1e-12);
    Vector oracle = oracles::eigen_perron_vector(block);
    CHECK((y - oracle).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(y.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((block * y - y).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(y.minCoeff() > 0.0);
}

TEST_CASE("perron vector rejects reducible blocks")
{
    CHECK_THROWS_AS(graph::perron_vector(Matrix::Identity(2, 2)), NotIrreducibleError);
}

TEST_CASE("spectral radius of scalars and receiving blocks")
{
    Matrix s(1, 1);
    s << 0.7;
    CHECK(graph::spectral_radius(s) == doctest::Approx(0.7).epsilon(1e-12));

    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    double rho = graph::spectral_radius(p.t_rr, 1e-12);
    CHECK(rho < 1.0);
    CHECK(std::abs(rho - oracles::eigen_spectral_radius(p.t_rr)) <= 1e-10);
}

TEST_CASE("spectral radius of a validated stochastic matrix is one")
{
    CHECK(graph::spectral_radius(graph::validate(eight_agent_matrix()).weights) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("perron vector residual and positivity on random irreducible blocks")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        Index n = 2 + static_cast<Index>(rng() % 5);
        Matrix a(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) a(i, j) = unit(rng);
        Vector y = graph::perron_vector(a, 1e-12);
        double rho = graph::spectral_radius(a, 1e-12);
        CHECK((a * y - rho * y).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, rho));
        CHECK(y.minCoeff() > 0.0);
        CHECK(y.sum() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

// =============================================================================
// influence / limiting power / confinement
// =============================================================================

TEST_CASE("three-agent influence column")
{
    auto p = graph::classify(graph::validate(three_agent_matrix()));
    Matrix w = graph::influence_matrix(p);
    REQUIRE(w.rows() == 2);
    REQUIRE(w.cols() == 1);
    CHECK(w(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(w(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("eight-agent influence matches the independent Neumann oracle")
{
    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    Matrix w = graph::influence_matrix(p);
    Matrix oracle = p.t_sr * oracles::neumann_inverse(p.t_rr, 200);
    CHECK((w - oracle).lpNorm<Eigen::Infinity>() <= 1e-10);
    for (Index j = 0; j < w.cols(); ++j) CHECK(w.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));

    // displayed reference values (the second column's first entry is exactly 53/131)
    Matrix wt = w.transpose();
    CHECK(std::abs(wt(0, 1) - 53.0 / 131.0) <= 1e-12);
    CHECK(std::abs(wt(0, 2) - 0.1489) <= 5e-5);
    CHECK(std::abs(wt(0, 3) - 0.4466) <= 5e-5);
    CHECK(std::abs(wt(1, 1) - 0.5267) <= 5e-5);
    CHECK(std::abs(wt(1, 2) - 0.1183) <= 5e-5);
    CHECK(std::abs(wt(1, 3) - 0.3550) <= 5e-5);
    CHECK(std::abs(wt(2, 1) - 0.7099) <= 5e-5);
    CHECK(std::abs(wt(2, 2) - 0.0725) <= 5e-5);
    CHECK(std::abs(wt(2, 3) - 0.2176) <= 5e-5);
}

TEST_CASE("zero cross coupling gives a zero influence matrix")
{
    // hypothetical: receivers listen only to themselves (rho < 1 via deficit)
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    // hand-build the partition: agent 1 sends, agent 2 receives nothing from it
    auto p = graph::classify(graph::validate(a));
    // both closed: no receiving part at all -> empty W
    Matrix w = graph::influence_matrix(p);
    CHECK(w.cols() == 0);

    // now a genuine zero T_SR with a leaky receiver
    graph::NetworkPartition q;
    q.n_sending = 1;
    q.n_receiving = 1;
    q.t_sr = Matrix::Zero(1, 1);
    q.t_rr = Matrix::Constant(1, 1, 0.5);
    Matrix w2 = graph::influence_matrix(q);
    CHECK(w2(0, 0) == 0.0);
}

TEST_CASE("limiting power of a singleton")
{
    auto m = graph::validate(Matrix::Identity(1, 1));
    auto p = graph::classify(m);
    CHECK(graph::limiting_power(m, p)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("three-agent limiting power closed form")
{
    auto m = graph::validate(three_agent_matrix());
    auto p = graph::classify(m);
    Matrix inf = graph::limiting_power(m, p);
    Matrix expected(3, 3);
    expected << 1, 0, 1.0 / 3.0,
                0, 1, 2.0 / 3.0,
                0, 0, 0;
    CHECK((inf - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((inf - oracles::matrix_power(m.weights, 200)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("eight-agent limiting power matches repeated multiplication")
{
    auto m = graph::validate(eight_agent_matrix());
    auto p = graph::classify(m);
    Matrix inf = graph::limiting_power(m, p);
    CHECK((inf - oracles::matrix_power(m.weights, 1000)).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("confinement matrix of scalars")
{
    graph::NetworkPartition p;
    p.n_sending = 1;
    p.n_receiving = 1;
    p.t_rr = Matrix::Constant(1, 1, 0.7);
    CHECK(graph::confinement_matrix(p)(0, 0) == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

    p.t_rr = Matrix::Zero(1, 1);
    CHECK(graph::confinement_matrix(p)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("eight-agent confinement matches the Neumann oracle and inverts exactly")
{
    auto p = graph::classify(graph::validate(eight_agent_matrix()));
    Matrix c = graph::confinement_matrix(p);
    Matrix oracle = oracles::neumann_inverse(p.t_rr.transpose(), 200);
    CHECK((c - oracle).lpNorm<Eigen::Infinity>() <= 1e-10);
    Matrix identity = c * (Matrix::Identity(3, 3) - p.t_rr.transpose());
    CHECK((identity - Matrix::Identity(3, 3)).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(c.minCoeff() >= 0.0);
}

TEST_CASE("singular system is rejected")
{
    graph::NetworkPartition p;
    p.n_sending = 1;
    p.n_receiving = 1;
    p.t_rr = Matrix::Constant(1, 1, 1.0 - 1e-12);
    p.t_sr = Matrix::Constant(1, 1, 1e-12);
    CHECK_THROWS_AS(graph::influence_matrix(p), SingularSystemError);
    CHECK_THROWS_AS(graph::confinement_matrix(p), SingularSystemError);
}

TEST_CASE("summary bundles the per-block spectral objects")
{
    auto m = graph::validate(eight_agent_matrix());
    auto p = graph::classify(m);
    auto s = graph::summarize(m, p);
    REQUIRE(s.sending_perron.size() == 2);
    REQUIRE(s.receiving_radii.size() == 1);
    REQUIRE(s.receiving_perron.size() == 1);

    // sending Perron pairs: A_s y = y
    Matrix a1 = eight_agent_matrix().topLeftCorner(3, 3);
    CHECK((a1 * s.sending_perron[0] - s.sending_perron[0]).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(s.sending_perron[0](0) == doctest::Approx(25.0 / 68.0).epsilon(1e-10));
    CHECK(s.sending_perron[1](0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // receiving Perron pair: T_RR y = rho y with rho < 1, y positive
    REQUIRE(s.receiving_perron[0].has_value());
    const Vector& yr = *s.receiving_perron[0];
    double rho = s.receiving_radii[0];
    CHECK(rho == doctest::Approx(0.7117531669289094).epsilon(1e-10));
    CHECK((p.t_rr * yr - rho * yr).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(yr.minCoeff() > 0.0);

    CHECK((s.influence - graph::influence_matrix(p)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((s.limit_power - graph::limiting_power(m, p)).lpNorm<Eigen::Infinity>() == 0.0);
}

// =============================================================================
// properties over random weak graphs
// =============================================================================

TEST_CASE("influence columns sum to one on random weak graphs")
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracles::random_weak_graph(rng);
        auto p = graph::classify(graph::validate(g.a));
        Matrix w = graph::influence_matrix(p);
        for (Index j = 0; j < w.cols(); ++j) {
            CHECK(w.col(j).minCoeff() >= 0.0);
            CHECK(std::abs(w.col(j).sum() - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("closed form limiting power equals iterated powers on shuffled graphs")
{
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 25; ++trial) {
        auto g = oracles::random_weak_graph(rng);
        auto [shuffled, order] = oracles::shuffle_agents(g.a, rng);
        auto m = graph::validate(shuffled);
        auto p = graph::classify(m);
        Matrix inf = graph::limiting_power(m, p);
        Matrix iterated = oracles::matrix_power(m.weights, 2000);
        CHECK((inf - iterated).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("confinement inverts its defining system on random weak graphs")
{
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = oracles::random_weak_graph(rng);
        auto p = graph::classify(graph::validate(g.a));
        if (p.n_receiving == 0) continue;
        Matrix c = graph::confinement_matrix(p);
        Matrix identity = c * (Matrix::Identity(p.n_receiving, p.n_receiving) -
                               p.t_rr.transpose());
        CHECK((identity - Matrix::Identity(p.n_receiving, p.n_receiving))
                  .lpNorm<Eigen::Infinity>() <= 1e-10);
    }
}
