#ifndef PCBO_GBN_SIM_HPP
#define PCBO_GBN_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "pcbo/graph.hpp"
#include "pcbo/rng.hpp"

namespace pcbo {

/// A network-learning scenario: p nodes, average neighbour size n, N samples.
struct ScenarioSpec {
    int p = 2;
    double n = 1.0;
    int N = 2;

    /// Edge probability n / (p - 1).
    double density() const { return n / (p - 1); }
    /// Throws InvalidInput unless p >= 2, N >= 2 and 0 < density <= 1.
    void validate() const;
    std::string id() const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Gaussian Bayesian network: X_i = sum_{j in pa(i)} beta(j, i) X_j + eps_i,
/// eps_i ~ N(0, noise_var(i)).
class Gbn {
public:
    Gbn() = default;
    /// beta must be p x p and non-zero only on dag edges; noise_var strictly positive.
    Gbn(Dag dag, Eigen::MatrixXd beta, Eigen::VectorXd noise_var);

    int size() const { return dag_.size(); }
    const Dag& dag() const { return dag_; }
    /// beta(j, i) is the coefficient of X_j in the regression of X_i.
    const Eigen::MatrixXd& beta() const { return beta_; }
    const Eigen::VectorXd& noise_var() const { return noise_var_; }

private:
    Dag dag_;
    Eigen::MatrixXd beta_;
    Eigen::VectorXd noise_var_;
};

/// N x p sample matrix. The correlation matrix and the column-standardized
/// copy are computed on first use, at most once even under concurrent access.
/// Copies share the cache.
class Dataset {
public:
    Dataset() = default;
    /// Rejects non-finite entries and empty matrices.
    explicit Dataset(Eigen::MatrixXd values);

    int n_rows() const { return static_cast<int>(values_.rows()); }
    int p() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }

    /// Pearson correlation; constant columns get zero off-diagonal entries.
    const Eigen::MatrixXd& corr() const;
    /// Columns centred and scaled to unit sample standard deviation.
    const Eigen::MatrixXd& standardized() const;

    /// FNV-1a over the raw bytes of the values, for pairing checks.
    std::uint64_t checksum() const;

private:
    struct Cache;
    Eigen::MatrixXd values_;
    std::shared_ptr<Cache> cache_;
};

/// Random DAG with each pair j < i joined by j -> i with probability n/(p-1).
Dag sample_dag(int p, double n, RngStream& rng);

/// Edge weights i.i.d. Uniform[0.1, 1]; all noise variances set to noise_var.
Gbn sample_weights(const Dag& dag, RngStream& rng, double noise_var = 1.0);
/// Same, with weights drawn from Uniform[lo, hi].
Gbn sample_weights(const Dag& dag, RngStream& rng, double lo, double hi, double noise_var);

/// N rows drawn by evaluating the recursive regressions in topological order.
Dataset sample_data(const Gbn& gbn, int N, RngStream& rng);

/// Sigma = (I - B^T)^{-1} Omega (I - B^T)^{-T}.
Eigen::MatrixXd implied_covariance(const Gbn& gbn);

/// Rescales a covariance matrix to unit diagonal.
Eigen::MatrixXd cov_to_corr(const Eigen::MatrixXd& cov);

// CSV with header X1,...,Xp.
void write_dataset_csv(const Dataset& data, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

// Graph text format plus `j -> i : beta` and `node i : noise_var` lines.
void write_gbn(const Gbn& gbn, std::ostream& out);
Gbn read_gbn(std::istream& in);

}  // namespace pcbo

#endif  // PCBO_GBN_SIM_HPP
