#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"

#include "pcbo/bo.hpp"
#include "pcbo/error.hpp"

using namespace pcbo;

namespace {

double convex(const Theta& t) {
    const double x = encode(t).x_alpha;
    return (x - 0.3) * (x - 0.3);
}

void check_trace(const std::vector<TrialRecord>& tr, int budget) {
    REQUIRE(static_cast<int>(tr.size()) == budget);
    double best = INFINITY;
    for (int k = 0; k < budget; ++k) {
        CHECK(tr[k].iteration == k + 1);
        CHECK((tr[k].theta.log10_alpha >= -5.0 && tr[k].theta.log10_alpha <= -1.0));
        best = std::min(best, tr[k].y);
        CHECK(tr[k].best_so_far == best);
        if (k > 0) CHECK(tr[k].best_so_far <= tr[k - 1].best_so_far);
    }
}

}  // namespace

TEST_CASE("method names") {
    CHECK(parse_method("bo") == Method::BO);
    CHECK(parse_method("RS") == Method::RS);
    CHECK(parse_method("Ec") == Method::EC);
    CHECK_THROWS_AS(parse_method("grid"), InvalidInput);
    CHECK(to_string(Method::RS) == "RS");
}

TEST_CASE("candidate grid") {
    const CandidateGrid g = CandidateGrid::standard();
    REQUIRE(g.size() == 404);
    CHECK(g.thetas[0] == Theta{-5.0, TestKind::FisherZ});
    CHECK(g.thetas[3].test == TestKind::MutualInfoShrink);
    CHECK(g.thetas[403] == Theta{-1.0, TestKind::MutualInfoShrink});
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(decode(g.points[k]) == g.thetas[k]);
        CHECK(encode(g.thetas[k]).x_alpha == g.points[k].x_alpha);
    }
}

TEST_CASE("entropy and pseudo-observation conditioning") {
    CHECK(gaussian_entropy(1.0) == doctest::Approx(0.5 * std::log(2 * std::numbers::pi * std::numbers::e)));
    CHECK(gaussian_entropy(1.0) == doctest::Approx(1.41894).epsilon(1e-5));
    CHECK(std::isfinite(gaussian_entropy(0.0)));

    JointPosterior j;
    j.mean = Eigen::Vector3d(0.0, 1.0, 2.0);
    j.cov = Eigen::Matrix3d{{1.0, 0.5, 0.0}, {0.5, 2.0, 0.0}, {0.0, 0.0, 1.0}};
    const auto c = condition_on_pseudo_observation(j, 0, -1.0, 0.25);
    // Gaussian conditioning by hand: gain = cov(., 0) / (1 + 0.25)
    CHECK(c[0].mean == doctest::Approx(0.0 + 1.0 / 1.25 * -1.0));
    CHECK(c[0].variance == doctest::Approx(1.0 - 1.0 / 1.25));
    CHECK(c[1].mean == doctest::Approx(1.0 + 0.5 / 1.25 * -1.0));
    CHECK(c[1].variance == doctest::Approx(2.0 - 0.25 / 1.25));
    CHECK(c[2].mean == 2.0);
    CHECK(c[2].variance == 1.0);
}

TEST_CASE("acquisition scores") {
    std::vector<EncodedPoint> x;
    std::vector<double> y;
    for (double a : {0.1, 0.5, 0.9}) {
        EncodedPoint p;
        p.x_alpha = a;
        p.x_cat[0] = 1.0;
        x.push_back(p);
    }
    y = {1.0, 0.0, 0.4};
    KernelHyper h;
    h.lengthscales = {0.2, 1, 1, 1, 1};
    h.noise = 1e-4;
    const GpModel model(x, y, h);

    SUBCASE("duplicate candidates score identically") {
        CandidateGrid g;
        for (double a : {0.3, 0.3, 0.7}) {
            Theta t{a * 4 - 5, TestKind::StudentT};
            g.thetas.push_back(t);
            g.points.push_back(encode(t));
        }
        RngStream rng(1);
        const auto s = pes_acquisition(model, {h, h}, g, rng);
        CHECK(s[0] == s[1]);
    }
    SUBCASE("the top candidate is not a well-observed high point") {
        const CandidateGrid g = CandidateGrid::standard();
        RngStream rng(2);
        const auto s = pes_acquisition(model, {h}, g, rng);
        for (double v : s) CHECK(std::isfinite(v));
        const std::size_t best = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
        const EncodedPoint& top = g.points[best];
        const bool near_high = top.category() == 0 && std::abs(top.x_alpha - 0.1) < 0.05;
        CHECK_FALSE(near_high);
        // the observed maximum itself scores below the best candidate
        const std::size_t at_high = 10 * kNumCategories + 0;
        CHECK(s[at_high] < s[best]);
    }
    SUBCASE("argument checks") {
        RngStream rng(3);
        CHECK_THROWS_AS(pes_acquisition(model, {}, CandidateGrid::standard(), rng), InvalidInput);
    }
}

TEST_CASE("suggest_next stays in bounds") {
    RngStream rng(4);
    const Theta first = suggest_next({}, rng);
    CHECK_NOTHROW(first.validate());
    std::vector<TrialRecord> hist;
    std::set<int> cats;
    for (int k = 0; k < 4; ++k) {
        const Theta t = suggest_next(hist, rng);
        cats.insert(static_cast<int>(t.test));
        hist.push_back({k + 1, t, 0.1 * k, 0.0, Method::BO, 0.0});
    }
    CHECK(cats.size() == 4);
    for (int k = 0; k < 3; ++k) {
        const Theta t = suggest_next(hist, rng);
        CHECK_NOTHROW(t.validate());
        hist.push_back({static_cast<int>(hist.size()) + 1, t, std::sin(3.0 * k), 0.0, Method::BO, 0.0});
    }
}

TEST_CASE("suggest_next explores away from a flat, densely sampled region") {
    int moved = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        RngStream rng(derive_seed(77, {static_cast<std::uint64_t>(s)}));
        std::vector<TrialRecord> hist;
        for (int k = 0; k < 12; ++k) {
            const double x = 0.1 + 0.1 * rng.uniform();
            const Theta t{x * 4 - 5, kAllTests[k % 4]};
            hist.push_back({k + 1, t, 0.3, 0.3, Method::BO, 0.0});
        }
        const Theta next = suggest_next(hist, rng);
        moved += std::abs(encode(next).x_alpha - 0.15) > 0.15;
    }
    CHECK(moved >= 18);
}

TEST_CASE("BO beats random search on a convex objective in paired seeds") {
    int wins = 0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        RngStream bo_rng(derive_seed(5, {static_cast<std::uint64_t>(s), 1}));
        RngStream rs_rng(derive_seed(5, {static_cast<std::uint64_t>(s), 2}));
        const auto bo = run_bo(convex, 30, bo_rng);
        const auto rs = run_random_search(convex, 30, rs_rng);
        check_trace(bo, 30);
        check_trace(rs, 30);
        wins += bo.back().best_so_far <= rs.back().best_so_far;
    }
    CHECK(wins >= 40);
}

TEST_CASE("BO keeps visiting every test on a pure-noise objective") {
    int covered = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        RngStream noise(derive_seed(9, {static_cast<std::uint64_t>(s), 0}));
        RngStream rng(derive_seed(9, {static_cast<std::uint64_t>(s), 1}));
        const auto tr = run_bo([&](const Theta&) { return noise.normal(); }, 30, rng);
        std::set<TestKind> seen;
        for (const auto& r : tr) seen.insert(r.theta.test);
        covered += seen.size() == 4;
    }
    CHECK(covered >= 10);
}

TEST_CASE("random search") {
    RngStream rng(6);
    int counts[4] = {0, 0, 0, 0};
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
        const Theta t = random_theta(rng);
        CHECK((t.log10_alpha >= -5.0 && t.log10_alpha <= -1.0));
        ++counts[static_cast<int>(t.test)];
    }
    const double sd = std::sqrt(draws * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - draws * 0.25) < 3 * sd);

    RngStream r2(7);
    check_trace(run_random_search(convex, 30, r2), 30);
    CHECK_THROWS_AS(run_random_search(convex, 0, r2), InvalidInput);
}

TEST_CASE("runs are reproducible") {
    RngStream a(11), b(11);
    const auto ta = run_bo(convex, 8, a);
    const auto tb = run_bo(convex, 8, b);
    for (std::size_t k = 0; k < ta.size(); ++k) {
        CHECK(ta[k].theta == tb[k].theta);
        CHECK(ta[k].y == tb[k].y);
    }
}

TEST_CASE("expert criterion") {
    const Theta e = expert_criterion();
    CHECK(e.alpha() == doctest::Approx(0.01));
    CHECK(e.test == TestKind::FisherZ);
    CHECK(encode(e).x_alpha == 0.75);
    int calls = 0;
    const auto tr = run_expert_criterion(
        [&](const Theta& t) {
            ++calls;
            return convex(t);
        },
        30);
    CHECK(calls == 1);
    check_trace(tr, 30);
    for (const auto& r : tr) {
        CHECK(r.theta == e);
        CHECK(r.y == convex(e));
    }
}
