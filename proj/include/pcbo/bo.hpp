#ifndef PCBO_BO_HPP
#define PCBO_BO_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pcbo/gp.hpp"
#include "pcbo/rng.hpp"
#include "pcbo/theta.hpp"

namespace pcbo {

enum class Method { BO, RS, EC };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// One evaluation of the tuning objective within a method's trace.
struct TrialRecord {
    int iteration = 1;
    Theta theta;
    double y = 0.0;
    double best_so_far = 0.0;
    Method method = Method::BO;
    double wall_time_s = 0.0;
};

/// Objective to minimize, deterministic for a fixed replica.
using Objective = std::function<double(const Theta&)>;

/// Acquisition search set: n_alpha equally spaced x_alpha in [0, 1] times
/// the four tests. Index = alpha_index * 4 + category, so index order is the
/// tie-breaking order.
struct CandidateGrid {
    std::vector<Theta> thetas;
    std::vector<EncodedPoint> points;

    static CandidateGrid standard(int n_alpha = 101);
    std::size_t size() const { return thetas.size(); }
};

/// Differential entropy 0.5 ln(2 pi e var), var floored at `floor`.
double gaussian_entropy(double var, double floor = 1e-12);

struct PesOptions {
    int thompson_samples = 32;
    double variance_floor = 1e-12;
    double delta_floor = 1e-6;
};

/// Predictive distribution at every candidate after conditioning the joint
/// posterior on a noisy pseudo-observation y_pseudo at candidate `at`.
std::vector<Posterior> condition_on_pseudo_observation(const JointPosterior& joint, std::size_t at,
                                                       double y_pseudo, double noise_var);

/// Entropy-search score per candidate, averaged over hyperparameter samples.
/// For each sample, Thompson draws on the grid give minimizer locations;
/// the score is H[y | D] minus the mean of H[y | D, pseudo-observation at
/// the sampled minimizer with value y_min - one posterior sd].
std::vector<double> pes_acquisition(const GpModel& model, const std::vector<KernelHyper>& hyper_samples,
                                    const CandidateGrid& grid, RngStream& rng, const PesOptions& options = {});

struct BoOptions {
    int initial_design = 4;
    int grid_alpha_points = 101;
    SamplerOptions sampler;
    PesOptions pes;
};

/// Next Theta for the BO trace: spread one-per-test initial design first,
/// then argmax of the acquisition over the candidate grid.
Theta suggest_next(const std::vector<TrialRecord>& history, RngStream& rng, const BoOptions& options = {});

std::vector<TrialRecord> run_bo(const Objective& objective, int budget, RngStream& rng, const BoOptions& options = {});

/// log-uniform alpha, uniform test.
Theta random_theta(RngStream& rng);
std::vector<TrialRecord> run_random_search(const Objective& objective, int budget, RngStream& rng);

/// alpha = 0.01 with Fisher's z.
Theta expert_criterion();
/// One evaluation of the expert setting, repeated across `budget` iterations.
std::vector<TrialRecord> run_expert_criterion(const Objective& objective, int budget);

}  // namespace pcbo

#endif  // PCBO_BO_HPP
