#include <cmath>
#include <sstream>

#include "doctest.h"

#include "pcbo/ci_tests.hpp"
#include "pcbo/error.hpp"
#include "pcbo/gbn_sim.hpp"
#include "support.hpp"

using namespace pcbo;
using testing_support::make_gbn;

namespace {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mu;
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST_CASE("ScenarioSpec validation") {
    CHECK(ScenarioSpec{25, 2, 50}.density() == doctest::Approx(2.0 / 24.0));
    CHECK_NOTHROW(ScenarioSpec{2, 1, 2}.validate());
    CHECK_THROWS_AS((ScenarioSpec{1, 1, 10}.validate()), InvalidInput);
    CHECK_THROWS_AS((ScenarioSpec{5, 0, 10}.validate()), InvalidInput);
    CHECK_THROWS_AS((ScenarioSpec{5, 5, 10}.validate()), InvalidInput);
    CHECK_THROWS_AS((ScenarioSpec{5, 2, 1}.validate()), InvalidInput);
    CHECK(ScenarioSpec{50, 8, 100}.id() == "p50_n8_N100");
}

TEST_CASE("sample_dag") {
    RngStream rng(1);
    SUBCASE("forced edge") {
        for (int k = 0; k < 20; ++k) {
            const Dag g = sample_dag(2, 1.0, rng);
            CHECK(g.has_edge(0, 1));
        }
    }
    SUBCASE("tiny density gives empty graphs") {
        int nonempty = 0;
        for (int k = 0; k < 200; ++k) nonempty += sample_dag(10, 1e-9, rng).num_edges() > 0;
        CHECK(nonempty == 0);
        CHECK_THROWS_AS(sample_dag(10, 0.0, rng), InvalidInput);
    }
    SUBCASE("edge count matches the binomial mean, edges point forward") {
        const int draws = 10000;
        const double d = 2.0 / 24.0;
        double total = 0.0;
        bool forward = true;
        for (int k = 0; k < draws; ++k) {
            const Dag g = sample_dag(25, 2.0, rng);
            total += static_cast<double>(g.num_edges());
            for (auto [j, i] : g.edges()) forward = forward && j < i;
        }
        CHECK(forward);
        const double mean = total / draws;
        const double sd_of_mean = std::sqrt(300 * d * (1 - d) / draws);
        CHECK(std::abs(mean - 25.0) < 3 * sd_of_mean);
    }
}

TEST_CASE("sample_weights") {
    RngStream rng(2);
    const Gbn empty = sample_weights(Dag(4, {}), rng);
    CHECK(empty.beta().isZero());

    std::vector<Edge> edges;
    for (int i = 1; i < 60; ++i)
        for (int j = 0; j < i; ++j) edges.emplace_back(j, i);
    const Dag full(60, edges);
    double sum = 0.0;
    std::size_t count = 0;
    bool in_range = true;
    while (count < 100000) {
        const Gbn g = sample_weights(full, rng);
        for (auto [j, i] : edges) {
            const double w = g.beta()(j, i);
            in_range = in_range && w >= 0.1 && w <= 1.0;
            sum += w;
            ++count;
        }
        CHECK(g.beta()(1, 0) == 0.0);
    }
    CHECK(in_range);
    const double tol = 3 * (0.9 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(count));
    CHECK(std::abs(sum / count - 0.55) < tol);
}

TEST_CASE("Gbn rejects inconsistent weights") {
    const Dag g(2, {{0, 1}});
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(2, 2);
    beta(1, 0) = 0.5;
    CHECK_THROWS_AS(Gbn(g, beta, Eigen::VectorXd::Ones(2)), InvalidInput);
    beta.setZero();
    CHECK_THROWS_AS(Gbn(g, beta, Eigen::VectorXd::Zero(2)), InvalidInput);
}

TEST_CASE("implied_covariance") {
    CHECK(implied_covariance(make_gbn(3, {}, {})).isApprox(Eigen::MatrixXd::Identity(3, 3)));

    const Eigen::MatrixXd s = implied_covariance(make_gbn(2, {{0, 1}}, {0.5}));
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(0, 1) == doctest::Approx(0.5));
    CHECK(s(1, 0) == doctest::Approx(0.5));
    CHECK(s(1, 1) == doctest::Approx(1.25));

    // symmetric, positive definite for sampled networks
    RngStream rng(3);
    for (int k = 0; k < 50; ++k) {
        const Gbn g = sample_weights(sample_dag(12, 4.0, rng), rng);
        const Eigen::MatrixXd c = implied_covariance(g);
        CHECK((c - c.transpose()).norm() == 0.0);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("chain partial correlation vanishes given the middle node") {
    const Gbn g = make_gbn(3, {{0, 1}, {1, 2}}, {0.8, 0.8});
    const Eigen::MatrixXd corr = cov_to_corr(implied_covariance(g));
    const std::vector<int> mid{1};
    CHECK(std::abs(partial_correlation(corr, 0, 2, mid)) < 1e-12);
}

TEST_CASE("sample_data moments") {
    RngStream rng(4);
    SUBCASE("empty graph") {
        const Dataset d = sample_data(make_gbn(4, {}, {}), 100000, rng);
        CHECK(d.n_rows() == 100000);
        CHECK(d.p() == 4);
        Eigen::MatrixXd c = sample_cov(d.values());
        c.diagonal().setZero();
        CHECK(c.cwiseAbs().maxCoeff() < 0.02);
    }
    SUBCASE("single edge") {
        const Dataset d = sample_data(make_gbn(2, {{0, 1}}, {0.5}), 200000, rng);
        const Eigen::MatrixXd c = sample_cov(d.values());
        CHECK(c(0, 1) == doctest::Approx(0.5).epsilon(0.02));
        CHECK(c(1, 1) == doctest::Approx(1.25).epsilon(0.02));
    }
    SUBCASE("Monte Carlo covariance matches implied covariance") {
        const Gbn g = sample_weights(sample_dag(4, 1.5, rng), rng);
        const Dataset d = sample_data(g, 1000000, rng);
        const Eigen::MatrixXd diff = sample_cov(d.values()) - implied_covariance(g);
        CHECK(diff.cwiseAbs().maxCoeff() < 5e-3);
    }
}

TEST_CASE("simulation is deterministic per seed") {
    auto run = [](std::uint64_t seed) {
        RngStream rng(seed);
        const Gbn g = sample_weights(sample_dag(15, 3.0, rng), rng);
        return sample_data(g, 50, rng);
    };
    const Dataset a = run(99), b = run(99), c = run(100);
    CHECK(a.values() == b.values());
    CHECK(a.checksum() == b.checksum());
    CHECK(a.checksum() != c.checksum());
}

TEST_CASE("Dataset correlation and standardization") {
    Eigen::MatrixXd x(4, 3);
    x << 1, 2, 5, 2, 4, 5, 3, 6.5, 5, 4, 7, 5;
    const Dataset d(x);
    const Eigen::MatrixXd& r = d.corr();
    CHECK(r(0, 0) == doctest::Approx(1.0));
    {
        const double xs[] = {1, 2, 3, 4}, ys[] = {2, 4, 6.5, 7};
        double mx = 2.5, my = 19.5 / 4, sxy = 0, sxx = 0, syy = 0;
        for (int k = 0; k < 4; ++k) {
            sxy += (xs[k] - mx) * (ys[k] - my);
            sxx += (xs[k] - mx) * (xs[k] - mx);
            syy += (ys[k] - my) * (ys[k] - my);
        }
        CHECK(r(0, 1) == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-14));
    }
    CHECK(r(0, 2) == 0.0);  // constant column
    CHECK((r - r.transpose()).norm() == 0.0);
    const Eigen::MatrixXd& z = d.standardized();
    CHECK(std::abs(z.col(0).mean()) < 1e-14);
    CHECK(z.col(2).isZero());

    Eigen::MatrixXd bad = x;
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(Dataset{bad}, InvalidInput);
    CHECK_THROWS_AS(Dataset{Eigen::MatrixXd(0, 3)}, InvalidInput);
}

TEST_CASE("dataset and network text round trips") {
    RngStream rng(5);
    const Gbn g = sample_weights(sample_dag(6, 2.0, rng), rng);
    const Dataset d = sample_data(g, 20, rng);

    std::stringstream csv;
    write_dataset_csv(d, csv);
    const Dataset back = read_dataset_csv(csv);
    CHECK(back.values() == d.values());

    std::stringstream net;
    write_gbn(g, net);
    const Gbn gb = read_gbn(net);
    CHECK(gb.dag() == g.dag());
    CHECK(gb.beta() == g.beta());
    CHECK(gb.noise_var() == g.noise_var());

    std::stringstream broken("X1,X2\n1,2\n3\n");
    CHECK_THROWS_AS(read_dataset_csv(broken), InvalidInput);
}
