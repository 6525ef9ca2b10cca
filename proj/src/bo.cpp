#include "pcbo/bo.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "pcbo/error.hpp"

namespace pcbo {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::BO: return "BO";
        case Method::RS: return "RS";
        case Method::EC: return "EC";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string up(name);
    for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == "BO") return Method::BO;
    if (up == "RS") return Method::RS;
    if (up == "EC") return Method::EC;
    throw InvalidInput("unknown method '" + std::string(name) + "' (expected bo, rs or ec)");
}

CandidateGrid CandidateGrid::standard(int n_alpha) {
    if (n_alpha < 2) throw InvalidInput("candidate grid needs at least two alpha points");
    CandidateGrid g;
    g.thetas.reserve(static_cast<std::size_t>(n_alpha) * kNumCategories);
    for (int a = 0; a < n_alpha; ++a) {
        EncodedPoint x;
        x.x_alpha = static_cast<double>(a) / (n_alpha - 1);
        for (int c = 0; c < kNumCategories; ++c) {
            x.x_cat.fill(0.0);
            x.x_cat[c] = 1.0;
            Theta th = decode(x);
            g.thetas.push_back(th);
            g.points.push_back(encode(th));
        }
    }
    return g;
}

double gaussian_entropy(double var, double floor) {
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * std::max(var, floor));
}

std::vector<Posterior> condition_on_pseudo_observation(const JointPosterior& joint, std::size_t at, double y_pseudo,
                                                       double noise_var) {
    const auto s = static_cast<Eigen::Index>(at);
    const double denom = std::max(joint.cov(s, s) + noise_var, 1e-300);
    const double resid = y_pseudo - joint.mean(s);
    std::vector<Posterior> out(static_cast<std::size_t>(joint.mean.size()));
    for (Eigen::Index c = 0; c < joint.mean.size(); ++c) {
        const double k = joint.cov(c, s);
        out[static_cast<std::size_t>(c)] = {joint.mean(c) + k / denom * resid,
                                            std::max(0.0, joint.cov(c, c) - k * k / denom)};
    }
    return out;
}

namespace {

// Lower Cholesky factor of a PSD matrix, with diagonal jitter escalation and
// an eigen-decomposition fallback.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    const auto m = cov.rows();
    const double base = std::max(cov.trace() / static_cast<double>(m), 1e-300);
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (double rel = 1e-10; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
        Eigen::MatrixXd a = cov;
        a.diagonal().array() += rel * base;
        llt.compute(a);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

std::vector<double> pes_acquisition(const GpModel& model, const std::vector<KernelHyper>& hyper_samples,
                                    const CandidateGrid& grid, RngStream& rng, const PesOptions& options) {
    if (hyper_samples.empty()) throw InvalidInput("pes_acquisition: need at least one hyperparameter sample");
    if (options.thompson_samples < 1) throw InvalidInput("pes_acquisition: need at least one Thompson sample");
    const std::size_t m = grid.size();
    std::vector<double> score(m, 0.0);

    double y_min = std::numeric_limits<double>::infinity();
    for (double v : model.outputs()) y_min = std::min(y_min, v);

    for (const auto& hyper : hyper_samples) {
        const GpModel fitted = model.with_hyper(hyper);
        const JointPosterior joint = fitted.joint_posterior(grid.points);
        const double noise = fitted.noise_variance();
        const Eigen::MatrixXd factor = psd_factor(joint.cov);

        // Minimizer of each Thompson draw; identical minimizers share one conditioning.
        std::map<std::size_t, int> minimizers;
        Eigen::VectorXd z(static_cast<Eigen::Index>(m));
        for (int t = 0; t < options.thompson_samples; ++t) {
            for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
            Eigen::VectorXd f = joint.mean + factor * z;
            Eigen::Index best = 0;
            f.minCoeff(&best);
            ++minimizers[static_cast<std::size_t>(best)];
        }

        const double base_y_min = std::isfinite(y_min) ? y_min : joint.mean.minCoeff();
        std::vector<double> expected_cond(m, 0.0);
        for (const auto& [at, count] : minimizers) {
            const auto s = static_cast<Eigen::Index>(at);
            const double delta = std::max(std::sqrt(std::max(joint.cov(s, s), 0.0)), options.delta_floor);
            const auto cond = condition_on_pseudo_observation(joint, at, base_y_min - delta, noise);
            for (std::size_t c = 0; c < m; ++c) {
                expected_cond[c] += count * gaussian_entropy(cond[c].variance + noise, options.variance_floor);
            }
        }
        for (std::size_t c = 0; c < m; ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            const double h0 = gaussian_entropy(std::max(joint.cov(ci, ci), 0.0) + noise, options.variance_floor);
            score[c] += h0 - expected_cond[c] / options.thompson_samples;
        }
    }
    for (double& s : score) s /= static_cast<double>(hyper_samples.size());
    return score;
}

Theta random_theta(RngStream& rng) {
    const double x = rng.uniform();
    const int c = rng.uniform_int(0, kNumCategories - 1);
    return Theta{x * 4.0 + kMinLog10Alpha, kAllTests[c]};
}

namespace {

Theta initial_design_point(const std::vector<TrialRecord>& history, RngStream& rng, const BoOptions& options,
                           const CandidateGrid& grid) {
    const int h = static_cast<int>(history.size());
    const int n_alpha = options.grid_alpha_points;
    if (h >= kNumCategories) {
        const int idx = rng.uniform_int(0, static_cast<int>(grid.size()) - 1);
        return grid.thetas[idx];
    }
    std::vector<int> unused;
    for (int c = 0; c < kNumCategories; ++c) {
        bool seen = std::any_of(history.begin(), history.end(),
                                [&](const TrialRecord& r) { return static_cast<int>(r.theta.test) == c; });
        if (!seen) unused.push_back(c);
    }
    const int cat = unused[rng.uniform_int(0, static_cast<int>(unused.size()) - 1)];
    const int slots = std::min(options.initial_design, kNumCategories);
    const int a = static_cast<int>(std::lround((n_alpha - 1) * (h + 0.5) / slots));
    return grid.thetas[static_cast<std::size_t>(a) * kNumCategories + cat];
}

}  // namespace

Theta suggest_next(const std::vector<TrialRecord>& history, RngStream& rng, const BoOptions& options) {
    const CandidateGrid grid = CandidateGrid::standard(options.grid_alpha_points);
    if (static_cast<int>(history.size()) < options.initial_design) {
        return initial_design_point(history, rng, options, grid);
    }

    std::vector<EncodedPoint> x;
    std::vector<double> y;
    for (const auto& r : history) {
        x.push_back(encode(r.theta));
        y.push_back(r.y);
    }
    std::vector<double> score;
    try {
        const GpModel model(std::move(x), std::move(y), prior_median_hyper());
        const auto samples = sample_hyperparameters(model, rng, options.sampler);
        score = pes_acquisition(model, samples, grid, rng, options.pes);
    } catch (const NumericalError&) {
        return grid.thetas[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(grid.size()) - 1))];
    }

    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < score.size(); ++k) {
        if (std::isfinite(score[k]) && score[k] > best_score) {
            best_score = score[k];
            best = k;
        }
    }
    return grid.thetas[best];
}

namespace {

template <typename Propose>
std::vector<TrialRecord> run_trace(const Objective& objective, int budget, Method method, Propose&& propose) {
    if (budget < 1) throw InvalidInput("budget must be at least 1");
    std::vector<TrialRecord> trace;
    trace.reserve(static_cast<std::size_t>(budget));
    double best = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= budget; ++t) {
        const auto start = std::chrono::steady_clock::now();
        const Theta theta = propose(trace);
        const double y = objective(theta);
        best = std::min(best, y);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.push_back({t, theta, y, best, method, secs});
    }
    return trace;
}

}  // namespace

std::vector<TrialRecord> run_bo(const Objective& objective, int budget, RngStream& rng, const BoOptions& options) {
    return run_trace(objective, budget, Method::BO,
                     [&](const std::vector<TrialRecord>& history) { return suggest_next(history, rng, options); });
}

std::vector<TrialRecord> run_random_search(const Objective& objective, int budget, RngStream& rng) {
    return run_trace(objective, budget, Method::RS, [&](const std::vector<TrialRecord>&) { return random_theta(rng); });
}

Theta expert_criterion() { return Theta{-2.0, TestKind::FisherZ}; }

std::vector<TrialRecord> run_expert_criterion(const Objective& objective, int budget) {
    if (budget < 1) throw InvalidInput("budget must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const Theta theta = expert_criterion();
    const double y = objective(theta);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::vector<TrialRecord> trace;
    for (int t = 1; t <= budget; ++t) trace.push_back({t, theta, y, y, Method::EC, t == 1 ? secs : 0.0});
    return trace;
}

}  // namespace pcbo
