#include "pcbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcbo/error.hpp"

namespace pcbo {

int EncodedPoint::category() const {
    return static_cast<int>(std::max_element(x_cat.begin(), x_cat.end()) - x_cat.begin());
}

EncodedPoint EncodedPoint::canonical() const {
    EncodedPoint out;
    out.x_alpha = x_alpha;
    out.x_cat[category()] = 1.0;
    return out;
}

EncodedPoint encode(const Theta& theta) {
    theta.validate();
    EncodedPoint x;
    x.x_alpha = std::clamp((theta.log10_alpha - kMinLog10Alpha) * 0.25, 0.0, 1.0);
    x.x_cat[static_cast<int>(theta.test)] = 1.0;
    return x;
}

Theta decode(const EncodedPoint& x) {
    if (!(x.x_alpha >= 0.0 && x.x_alpha <= 1.0)) throw InvalidInput("decode: x_alpha outside [0, 1]");
    return Theta{x.x_alpha * 4.0 + kMinLog10Alpha, kAllTests[x.category()]};
}

bool KernelHyper::valid() const {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(amplitude) || !(noise >= 0.0) || !std::isfinite(noise) || !std::isfinite(mean)) return false;
    return std::all_of(lengthscales.begin(), lengthscales.end(), pos);
}

double matern52_profile(double d) {
    const double s = std::sqrt(5.0) * d;
    return (1.0 + s + 5.0 * d * d / 3.0) * std::exp(-s);
}

double matern52(const EncodedPoint& a, const EncodedPoint& b, const KernelHyper& hyper) {
    const EncodedPoint ca = a.canonical();
    const EncodedPoint cb = b.canonical();
    double d2 = 0.0;
    {
        const double t = (ca.x_alpha - cb.x_alpha) / hyper.lengthscales[0];
        d2 += t * t;
    }
    for (int k = 0; k < kNumCategories; ++k) {
        const double t = (ca.x_cat[k] - cb.x_cat[k]) / hyper.lengthscales[k + 1];
        d2 += t * t;
    }
    return hyper.amplitude * matern52_profile(std::sqrt(d2));
}

GpModel::GpModel(std::vector<EncodedPoint> x, std::vector<double> y, KernelHyper hyper, bool standardize)
    : x_(std::move(x)), y_(std::move(y)), hyper_(hyper), standardize_(standardize) {
    if (x_.size() != y_.size()) throw InvalidInput("gp: input and output counts differ");
    if (!hyper_.valid()) throw InvalidInput("gp: invalid kernel hyperparameters");
    const auto n = static_cast<Eigen::Index>(x_.size());
    for (double v : y_) {
        if (!std::isfinite(v)) throw InvalidInput("gp: non-finite observation");
    }

    if (standardize_ && n > 0) {
        double sum = 0.0;
        for (double v : y_) sum += v;
        center_ = sum / static_cast<double>(n);
        if (n > 1) {
            double ss = 0.0;
            for (double v : y_) ss += (v - center_) * (v - center_);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            scale_ = sd > 1e-12 ? sd : 1.0;
        }
    }
    y_std_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) y_std_(i) = (y_[i] - center_) / scale_;
    if (n == 0) return;

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = matern52(x_[i], x_[j], hyper_);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    k.diagonal().array() += hyper_.noise;

    llt_.compute(k);
    if (llt_.info() != Eigen::Success) {
        const double base = k.trace() / static_cast<double>(n);
        bool ok = false;
        for (double rel = 1e-10; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
            Eigen::MatrixXd kj = k;
            kj.diagonal().array() += rel * base;
            llt_.compute(kj);
            if (llt_.info() == Eigen::Success) {
                jitter_ = rel * base;
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw NumericalError("gp: kernel matrix not positive definite after jitter up to 1e-4 (n=" +
                                 std::to_string(n) + ", amplitude=" + std::to_string(hyper_.amplitude) +
                                 ", noise=" + std::to_string(hyper_.noise) + ")");
        }
    }
    weights_ = llt_.solve((y_std_.array() - hyper_.mean).matrix());
}

GpModel GpModel::with_hyper(const KernelHyper& hyper) const { return GpModel(x_, y_, hyper, standardize_); }

Eigen::VectorXd GpModel::cross_kernel(const EncodedPoint& x) const {
    Eigen::VectorXd ks(static_cast<Eigen::Index>(x_.size()));
    for (std::size_t i = 0; i < x_.size(); ++i) ks(static_cast<Eigen::Index>(i)) = matern52(x, x_[i], hyper_);
    return ks;
}

Posterior GpModel::posterior(const EncodedPoint& x) const {
    const double prior_var = hyper_.amplitude;
    if (x_.empty()) return {center_ + scale_ * hyper_.mean, scale_ * scale_ * prior_var};
    Eigen::VectorXd ks = cross_kernel(x);
    const double mu = hyper_.mean + ks.dot(weights_);
    Eigen::VectorXd v = llt_.matrixL().solve(ks);
    const double var = std::max(0.0, prior_var - v.squaredNorm());
    return {center_ + scale_ * mu, scale_ * scale_ * var};
}

JointPosterior GpModel::joint_posterior(std::span<const EncodedPoint> xs) const {
    const auto m = static_cast<Eigen::Index>(xs.size());
    const auto n = static_cast<Eigen::Index>(x_.size());
    JointPosterior out;
    out.cov.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = matern52(xs[a], xs[b], hyper_);
            out.cov(a, b) = v;
            out.cov(b, a) = v;
        }
    }
    out.mean = Eigen::VectorXd::Constant(m, hyper_.mean);
    if (n > 0) {
        Eigen::MatrixXd ks(n, m);
        for (Eigen::Index a = 0; a < m; ++a) ks.col(a) = cross_kernel(xs[a]);
        out.mean += ks.transpose() * weights_;
        Eigen::MatrixXd v = llt_.matrixL().solve(ks);
        out.cov.noalias() -= v.transpose() * v;
    }
    out.mean = (center_ + scale_ * out.mean.array()).matrix();
    out.cov *= scale_ * scale_;
    return out;
}

double GpModel::log_marginal_likelihood() const {
    const auto n = static_cast<double>(x_.size());
    if (x_.empty()) return 0.0;
    const Eigen::VectorXd resid = (y_std_.array() - hyper_.mean).matrix();
    const double fit = -0.5 * resid.dot(weights_);
    const double logdet = llt_.matrixLLT().diagonal().array().log().sum();
    return fit - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

KernelHyper prior_median_hyper() { return KernelHyper{}; }

double log_prior(const KernelHyper& h) {
    auto lognormal = [](double v) {
        const double u = std::log(v);
        return -0.5 * u * u;  // in log coordinates, where the sampler works
    };
    double lp = lognormal(h.amplitude) + lognormal(h.noise) - 0.5 * h.mean * h.mean;
    for (double l : h.lengthscales) lp += lognormal(l);
    return lp;
}

namespace {

constexpr int kNumParams = 3 + kInputDim;

using ParamVec = std::array<double, kNumParams>;

// [log amplitude, log lengthscale x5, log noise, mean]
ParamVec to_params(const KernelHyper& h) {
    ParamVec u{};
    u[0] = std::log(h.amplitude);
    for (int k = 0; k < kInputDim; ++k) u[1 + k] = std::log(h.lengthscales[k]);
    u[1 + kInputDim] = std::log(h.noise);
    u[2 + kInputDim] = h.mean;
    return u;
}

KernelHyper from_params(const ParamVec& u) {
    KernelHyper h;
    h.amplitude = std::exp(u[0]);
    for (int k = 0; k < kInputDim; ++k) h.lengthscales[k] = std::exp(u[1 + k]);
    h.noise = std::exp(u[1 + kInputDim]);
    h.mean = u[2 + kInputDim];
    return h;
}

constexpr std::array<double, kNumParams> kLower{-7, -7, -7, -7, -7, -7, -16, -10};
constexpr std::array<double, kNumParams> kUpper{7, 5, 5, 5, 5, 5, 5, 10};

double log_posterior(const GpModel& base, const ParamVec& u) {
    for (int k = 0; k < kNumParams; ++k) {
        if (!(u[k] >= kLower[k] && u[k] <= kUpper[k])) return -std::numeric_limits<double>::infinity();
    }
    const KernelHyper h = from_params(u);
    try {
        const double ll = base.with_hyper(h).log_marginal_likelihood();
        const double lp = ll + log_prior(h);
        return std::isfinite(lp) ? lp : -std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace

std::vector<KernelHyper> sample_hyperparameters(const GpModel& model, RngStream& rng, const SamplerOptions& options) {
    if (options.samples < 0 || options.burn_in < 0 || options.thinning < 1) {
        throw InvalidInput("sampler: bad options");
    }
    if (model.num_observations() < 2) {
        return std::vector<KernelHyper>(static_cast<std::size_t>(options.samples), prior_median_hyper());
    }

    ParamVec u = to_params(prior_median_hyper());
    double cur = log_posterior(model, u);
    if (!std::isfinite(cur)) {
        u[1 + kInputDim] = std::log(0.1);
        cur = log_posterior(model, u);
    }
    if (!std::isfinite(cur)) throw NumericalError("sampler: no finite starting point");

    auto sweep = [&] {
        for (int k = 0; k < kNumParams; ++k) {
            const double level = cur + std::log(rng.uniform(1e-300, 1.0));
            const double x0 = u[k];
            double lo = x0 - options.step_width * rng.uniform();
            double hi = lo + options.step_width;
            auto eval_at = [&](double v) {
                ParamVec t = u;
                t[k] = v;
                return log_posterior(model, t);
            };
            for (int s = 0; s < options.max_step_out && eval_at(lo) > level; ++s) lo -= options.step_width;
            for (int s = 0; s < options.max_step_out && eval_at(hi) > level; ++s) hi += options.step_width;
            for (int attempt = 0; attempt < 200; ++attempt) {
                const double cand = rng.uniform(lo, hi);
                const double lp = eval_at(cand);
                if (lp > level) {
                    u[k] = cand;
                    cur = lp;
                    break;
                }
                if (cand < x0) {
                    lo = cand;
                } else {
                    hi = cand;
                }
            }
        }
    };

    for (int b = 0; b < options.burn_in; ++b) sweep();
    std::vector<KernelHyper> out;
    out.reserve(static_cast<std::size_t>(options.samples));
    for (int s = 0; s < options.samples; ++s) {
        for (int t = 0; t < options.thinning; ++t) sweep();
        out.push_back(from_params(u));
    }
    return out;
}

}  // namespace pcbo
