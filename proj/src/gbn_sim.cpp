#include "pcbo/gbn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <vector>

#include "pcbo/error.hpp"

namespace pcbo {

void ScenarioSpec::validate() const {
    if (p < 2) throw InvalidInput("scenario: p must be at least 2");
    if (N < 2) throw InvalidInput("scenario: N must be at least 2");
    if (!(n > 0.0) || n > p - 1) {
        throw InvalidInput("scenario: average neighbour size must lie in (0, p-1], got n=" + std::to_string(n) +
                           " for p=" + std::to_string(p));
    }
}

std::string ScenarioSpec::id() const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "p%d_n%g_N%d", p, n, N);
    return buf;
}

Gbn::Gbn(Dag dag, Eigen::MatrixXd beta, Eigen::VectorXd noise_var)
    : dag_(std::move(dag)), beta_(std::move(beta)), noise_var_(std::move(noise_var)) {
    const int p = dag_.size();
    if (beta_.rows() != p || beta_.cols() != p) throw InvalidInput("gbn: beta must be p x p");
    if (noise_var_.size() != p) throw InvalidInput("gbn: noise_var must have p entries");
    for (int j = 0; j < p; ++j) {
        if (!(noise_var_(j) > 0.0) || !std::isfinite(noise_var_(j))) {
            throw InvalidInput("gbn: noise variance must be positive");
        }
        for (int i = 0; i < p; ++i) {
            if (!std::isfinite(beta_(j, i))) throw InvalidInput("gbn: non-finite weight");
            if (beta_(j, i) != 0.0 && !dag_.has_edge(j, i)) {
                throw InvalidInput("gbn: weight on a pair that is not an edge");
            }
        }
    }
}

struct Dataset::Cache {
    std::once_flag corr_once;
    std::once_flag std_once;
    Eigen::MatrixXd corr;
    Eigen::MatrixXd standardized;
};

Dataset::Dataset(Eigen::MatrixXd values) : values_(std::move(values)), cache_(std::make_shared<Cache>()) {
    if (values_.rows() < 1 || values_.cols() < 1) throw InvalidInput("dataset: empty matrix");
    if (!values_.allFinite()) throw InvalidInput("dataset: non-finite value");
}

const Eigen::MatrixXd& Dataset::standardized() const {
    std::call_once(cache_->std_once, [this] {
        const Eigen::Index n = values_.rows();
        Eigen::MatrixXd z = values_.rowwise() - values_.colwise().mean();
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            double ss = z.col(c).squaredNorm();
            double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            if (sd > 0.0) {
                z.col(c) /= sd;
            } else {
                z.col(c).setZero();
            }
        }
        cache_->standardized = std::move(z);
    });
    return cache_->standardized;
}

const Eigen::MatrixXd& Dataset::corr() const {
    std::call_once(cache_->corr_once, [this] {
        const Eigen::Index p = values_.cols();
        Eigen::MatrixXd centered = values_.rowwise() - values_.colwise().mean();
        Eigen::MatrixXd cross = centered.transpose() * centered;
        Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
        for (Eigen::Index a = 0; a < p; ++a) {
            for (Eigen::Index b = a + 1; b < p; ++b) {
                double denom = std::sqrt(cross(a, a) * cross(b, b));
                double v = denom > 0.0 ? cross(a, b) / denom : 0.0;
                v = std::clamp(v, -1.0, 1.0);
                r(a, b) = v;
                r(b, a) = v;
            }
        }
        cache_->corr = std::move(r);
    });
    return cache_->corr;
}

std::uint64_t Dataset::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= bytes[k];
            h *= 0x100000001b3ULL;
        }
    };
    std::int64_t dims[2] = {values_.rows(), values_.cols()};
    mix(dims, sizeof(dims));
    mix(values_.data(), sizeof(double) * static_cast<std::size_t>(values_.size()));
    return h;
}

Dag sample_dag(int p, double n, RngStream& rng) {
    if (p < 2) throw InvalidInput("sample_dag: p must be at least 2");
    if (!(n > 0.0) || n > p - 1) {
        throw InvalidInput("sample_dag: average neighbour size must lie in (0, p-1]");
    }
    const double d = n / (p - 1);
    std::vector<Edge> edges;
    for (int i = 1; i < p; ++i) {
        for (int j = 0; j < i; ++j) {
            if (rng.bernoulli(d)) edges.emplace_back(j, i);
        }
    }
    return Dag(p, edges);
}

Gbn sample_weights(const Dag& dag, RngStream& rng, double lo, double hi, double noise_var) {
    if (!(lo <= hi)) throw InvalidInput("sample_weights: empty weight interval");
    const int p = dag.size();
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
    for (auto [j, i] : dag.edges()) beta(j, i) = rng.uniform(lo, hi);
    return Gbn(dag, std::move(beta), Eigen::VectorXd::Constant(p, noise_var));
}

Gbn sample_weights(const Dag& dag, RngStream& rng, double noise_var) {
    return sample_weights(dag, rng, 0.1, 1.0, noise_var);
}

Dataset sample_data(const Gbn& gbn, int N, RngStream& rng) {
    if (N < 1) throw InvalidInput("sample_data: N must be positive");
    const int p = gbn.size();
    const auto order = gbn.dag().topological_order();
    std::vector<std::vector<int>> parents(p);
    for (int i = 0; i < p; ++i) parents[i] = gbn.dag().parents(i);
    Eigen::VectorXd sd = gbn.noise_var().cwiseSqrt();

    Eigen::MatrixXd x(N, p);
    for (int r = 0; r < N; ++r) {
        for (int i : order) {
            double v = sd(i) * rng.normal();
            for (int j : parents[i]) v += gbn.beta()(j, i) * x(r, j);
            x(r, i) = v;
        }
    }
    return Dataset(std::move(x));
}

Eigen::MatrixXd implied_covariance(const Gbn& gbn) {
    const int p = gbn.size();
    // X = B^T X + eps  =>  X = A eps with A = (I - B^T)^{-1}.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p) - gbn.beta().transpose();
    Eigen::MatrixXd a = m.fullPivLu().inverse();
    Eigen::MatrixXd sigma = a * gbn.noise_var().asDiagonal() * a.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd cov_to_corr(const Eigen::MatrixXd& cov) {
    Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd r = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    r.diagonal().setOnes();
    return r;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    for (int c = 0; c < data.p(); ++c) out << (c ? "," : "") << 'X' << c + 1;
    out << '\n';
    char buf[32];
    for (int r = 0; r < data.n_rows(); ++r) {
        for (int c = 0; c < data.p(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.values()(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("csv: missing header");
    int p = 1;
    for (char ch : line) p += ch == ',';
    std::vector<double> flat;
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ls, cell, ',')) {
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw InvalidInput("csv: bad number on data row " + std::to_string(rows + 1));
            if (!std::isfinite(v)) throw InvalidInput("csv: non-finite value on data row " + std::to_string(rows + 1));
            flat.push_back(v);
            ++cols;
        }
        if (cols != p) throw InvalidInput("csv: row " + std::to_string(rows + 1) + " has wrong column count");
        ++rows;
    }
    if (rows == 0) throw InvalidInput("csv: no data rows");
    Eigen::MatrixXd m(rows, p);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < p; ++c) m(r, c) = flat[static_cast<std::size_t>(r) * p + c];
    }
    return Dataset(std::move(m));
}

void write_gbn(const Gbn& gbn, std::ostream& out) {
    char buf[64];
    out << gbn.size() << '\n';
    for (auto [j, i] : gbn.dag().edges()) {
        std::snprintf(buf, sizeof(buf), "%.17g", gbn.beta()(j, i));
        out << j + 1 << " -> " << i + 1 << " : " << buf << '\n';
    }
    for (int i = 0; i < gbn.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", gbn.noise_var()(i));
        out << "node " << i + 1 << " : " << buf << '\n';
    }
}

Gbn read_gbn(std::istream& in) {
    std::string line;
    int p = -1;
    std::vector<Edge> edges;
    std::vector<double> weights;
    Eigen::VectorXd noise;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (p < 0) {
            if (!(ls >> p) || p < 1) throw InvalidInput("gbn: expected vertex count");
            noise = Eigen::VectorXd::Ones(p);
            continue;
        }
        std::string head;
        ls >> head;
        std::string colon;
        if (head == "node") {
            int i = 0;
            double v = 0.0;
            if (!(ls >> i >> colon >> v) || colon != ":" || i < 1 || i > p) {
                throw InvalidInput("gbn: malformed node line " + std::to_string(lineno));
            }
            noise(i - 1) = v;
            continue;
        }
        int j = std::atoi(head.c_str());
        int i = 0;
        std::string op;
        double w = 0.0;
        if (!(ls >> op >> i >> colon >> w) || op != "->" || colon != ":" || j < 1 || j > p || i < 1 || i > p) {
            throw InvalidInput("gbn: malformed edge line " + std::to_string(lineno));
        }
        edges.emplace_back(j - 1, i - 1);
        weights.push_back(w);
    }
    if (p < 0) throw InvalidInput("gbn: empty input");
    Dag dag(p, edges);
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < edges.size(); ++k) beta(edges[k].first, edges[k].second) = weights[k];
    return Gbn(std::move(dag), std::move(beta), std::move(noise));
}

}  // namespace pcbo
