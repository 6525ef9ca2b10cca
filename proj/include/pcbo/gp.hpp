#ifndef PCBO_GP_HPP
#define PCBO_GP_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pcbo/rng.hpp"
#include "pcbo/theta.hpp"

namespace pcbo {

inline constexpr int kNumCategories = 4;
inline constexpr int kInputDim = 1 + kNumCategories;

/// GP input for a Theta: x_alpha = (log10(alpha) + 5) / 4 in [0, 1] followed
/// by a one-hot block for the test.
struct EncodedPoint {
    double x_alpha = 0.0;
    std::array<double, kNumCategories> x_cat{};

    /// The same point with its categorical block snapped to the nearest
    /// one-hot vertex (argmax, lowest index on ties).
    EncodedPoint canonical() const;
    int category() const;
};

EncodedPoint encode(const Theta& theta);
/// Inverse of encode: log10(alpha) = 4 x_alpha - 5, test = argmax category.
Theta decode(const EncodedPoint& x);

/// Matern-5/2 ARD hyperparameters, in the model's standardized y units.
struct KernelHyper {
    double amplitude = 1.0;  // sigma_f^2
    std::array<double, kInputDim> lengthscales{1.0, 1.0, 1.0, 1.0, 1.0};
    double noise = 1.0;  // sigma_n^2
    double mean = 0.0;   // constant prior mean m0

    bool valid() const;
};

/// sigma_f^2 (1 + sqrt5 d + 5 d^2 / 3) exp(-sqrt5 d), d the lengthscale-scaled
/// distance between the canonicalized points.
double matern52(const EncodedPoint& a, const EncodedPoint& b, const KernelHyper& hyper);
/// The same kernel as a function of the scaled distance, with sigma_f^2 = 1.
double matern52_profile(double d);

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

struct JointPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Exact GP regression with constant prior mean. Observations are
/// standardized internally (unless disabled); every query returns values in
/// the original y units.
class GpModel {
public:
    GpModel(std::vector<EncodedPoint> x, std::vector<double> y, KernelHyper hyper, bool standardize = true);

    /// Same observations, different hyperparameters.
    GpModel with_hyper(const KernelHyper& hyper) const;

    std::size_t num_observations() const { return x_.size(); }
    const std::vector<EncodedPoint>& inputs() const { return x_; }
    const std::vector<double>& outputs() const { return y_; }
    const KernelHyper& hyper() const { return hyper_; }
    double y_center() const { return center_; }
    double y_scale() const { return scale_; }
    /// Observation noise variance in original units.
    double noise_variance() const { return hyper_.noise * scale_ * scale_; }
    /// Diagonal jitter that was needed for the factorization (0 if none).
    double jitter() const { return jitter_; }

    /// Latent f posterior: mean and variance (variance clamped at 0).
    Posterior posterior(const EncodedPoint& x) const;
    JointPosterior joint_posterior(std::span<const EncodedPoint> xs) const;

    /// log p(y_std | hyper) for the standardized observations.
    double log_marginal_likelihood() const;

private:
    Eigen::VectorXd cross_kernel(const EncodedPoint& x) const;

    std::vector<EncodedPoint> x_;
    std::vector<double> y_;
    KernelHyper hyper_;
    bool standardize_;
    double center_ = 0.0;
    double scale_ = 1.0;
    double jitter_ = 0.0;
    Eigen::VectorXd y_std_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd weights_;  // (K + sigma_n^2 I)^{-1} (y_std - m0)
};

struct SamplerOptions {
    int samples = 10;
    int burn_in = 20;
    int thinning = 5;
    double step_width = 1.0;
    int max_step_out = 10;
};

/// Hyperparameters at the prior medians (amplitude, lengthscales, noise 1; mean 0).
KernelHyper prior_median_hyper();

/// Log prior: log-normal(0, 1) on amplitude, lengthscales and noise,
/// normal(0, 1) on the standardized mean.
double log_prior(const KernelHyper& hyper);

/// Univariate slice sampling of the hyperparameter posterior. Fewer than two
/// observations yield `samples` copies of the prior medians.
std::vector<KernelHyper> sample_hyperparameters(const GpModel& model, RngStream& rng,
                                                const SamplerOptions& options = {});

}  // namespace pcbo

#endif  // PCBO_GP_HPP
