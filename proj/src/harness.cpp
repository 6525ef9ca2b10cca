#include "pcbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "pcbo/error.hpp"

#ifndef PCBO_VERSION
#define PCBO_VERSION "dev"
#endif

namespace pcbo {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

ExperimentConfig ExperimentConfig::desk_scale() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::full_scale() {
    ExperimentConfig c;
    c.p_grid = {25, 50, 75, 100};
    c.n_grid = {2, 8};
    c.N_grid = {25, 50, 75, 100};
    c.replicas = 40;
    c.budget = 30;
    return c;
}

void ExperimentConfig::validate() const {
    if (p_grid.empty() || n_grid.empty() || N_grid.empty()) throw InvalidInput("config: scenario grids must be non-empty");
    if (replicas < 1) throw InvalidInput("config: replicas must be at least 1");
    if (budget < 1) throw InvalidInput("config: budget must be at least 1");
    if (methods.empty()) throw InvalidInput("config: no methods selected");
    if (!(noise_var > 0.0)) throw InvalidInput("config: noise_var must be positive");
    if (output_dir.empty()) throw InvalidInput("config: output_dir is empty");
    for (int p : p_grid) {
        for (double n : n_grid) {
            if (n >= p) {
                throw InvalidInput("config: average neighbour size " + std::to_string(n) + " is not below p=" +
                                   std::to_string(p));
            }
        }
    }
    for (const auto& s : build_scenarios(*this)) s.validate();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) throw InvalidInput("config: bad value for " + key + ": '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw InvalidInput("config: bad boolean for " + key + ": '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out << content;
        if (!out) throw InvalidInput("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << v;
    return ss.str();
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["p_grid"] = c.p_grid;
    j["n_grid"] = c.n_grid;
    j["N_grid"] = c.N_grid;
    j["replicas"] = c.replicas;
    j["budget"] = c.budget;
    j["base_seed"] = c.base_seed;
    std::vector<std::string> methods;
    for (Method m : c.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["output_dir"] = c.output_dir;
    j["noise_var"] = c.noise_var;
    j["max_cond"] = c.max_cond;
    j["record_wall_time"] = c.record_wall_time;
    return j;
}

// Fields that change results; output_dir, threads and the method list may differ on resume.
json result_fields(const ExperimentConfig& c) {
    json j = config_json(c);
    j.erase("output_dir");
    j.erase("methods");
    j.erase("record_wall_time");
    return j;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, ExperimentConfig c) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput("config: expected key = value on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "p_grid") {
            c.p_grid = parse_list<int>(key, value);
        } else if (key == "n_grid") {
            c.n_grid = parse_list<double>(key, value);
        } else if (key == "N_grid") {
            c.N_grid = parse_list<int>(key, value);
        } else if (key == "replicas") {
            c.replicas = parse_number<int>(key, value);
        } else if (key == "budget") {
            c.budget = parse_number<int>(key, value);
        } else if (key == "base_seed") {
            c.base_seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "methods") {
            c.methods.clear();
            for (const auto& m : split_list(value)) c.methods.push_back(parse_method(m));
        } else if (key == "output_dir") {
            c.output_dir = value;
        } else if (key == "noise_var") {
            c.noise_var = parse_number<double>(key, value);
        } else if (key == "max_cond") {
            c.max_cond = parse_number<int>(key, value);
        } else if (key == "record_wall_time") {
            c.record_wall_time = parse_bool(key, value);
        } else if (key == "threads") {
            c.threads = parse_number<int>(key, value);
        } else {
            throw InvalidInput("config: unknown key '" + key + "' on line " + std::to_string(lineno));
        }
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config " + path.string());
    return parse_config(in, std::move(base));
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

std::vector<ScenarioSpec> build_scenarios(const ExperimentConfig& config) {
    if (config.p_grid.empty() || config.n_grid.empty() || config.N_grid.empty()) {
        throw InvalidInput("config: scenario grids must be non-empty");
    }
    std::vector<ScenarioSpec> out;
    for (int p : config.p_grid) {
        for (double n : config.n_grid) {
            if (n >= p) throw InvalidInput("config: average neighbour size must be below p");
            for (int N : config.N_grid) out.push_back({p, n, N});
        }
    }
    return out;
}

ReplicaContext materialize_replica(const ExperimentConfig& config, const std::vector<ScenarioSpec>& scenarios,
                                   int replica) {
    ReplicaContext ctx;
    ctx.replica = replica;
    const RngStream root(derive_seed(config.base_seed, {static_cast<std::uint64_t>(replica)}));
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto& spec = scenarios[s];
        spec.validate();
        RngStream dag_rng = root.child({s, tag(StreamPurpose::Dag)});
        RngStream w_rng = root.child({s, tag(StreamPurpose::Weights)});
        RngStream data_rng = root.child({s, tag(StreamPurpose::Data)});
        Dag dag = sample_dag(spec.p, spec.n, dag_rng);
        Gbn gbn = sample_weights(dag, w_rng, config.noise_var);
        Dataset data = sample_data(gbn, spec.N, data_rng);
        Cpdag truth = dag_to_cpdag(dag);
        ctx.scenarios.push_back({spec, std::move(gbn), std::move(data), std::move(truth)});
    }
    return ctx;
}

std::uint64_t method_seed(const ExperimentConfig& config, int replica, Method method) {
    return derive_seed(config.base_seed,
                       {static_cast<std::uint64_t>(replica), tag(StreamPurpose::Method), static_cast<std::uint64_t>(method)});
}

std::string trace_line(const TrialRecord& r, int replica, std::uint64_t seed, bool with_wall_time) {
    json j;
    j["iteration"] = r.iteration;
    j["method"] = std::string(to_string(r.method));
    j["alpha"] = r.theta.alpha();
    j["test"] = std::string(to_string(r.theta.test));
    j["y"] = r.y;
    j["best_so_far"] = r.best_so_far;
    j["wall_time_s"] = with_wall_time ? r.wall_time_s : 0.0;
    j["replica"] = replica;
    j["seed"] = seed;
    return j.dump();
}

std::vector<TrialRecord> read_trace(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open trace " + path.string());
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        TrialRecord r;
        r.iteration = j.at("iteration").get<int>();
        r.method = parse_method(j.at("method").get<std::string>());
        r.theta = Theta{std::log10(j.at("alpha").get<double>()), parse_test_kind(j.at("test").get<std::string>())};
        r.y = j.at("y").get<double>();
        r.best_so_far = j.at("best_so_far").get<double>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        out.push_back(r);
    }
    return out;
}

namespace {

class Manifest {
public:
    Manifest(fs::path path, json initial) : path_(std::move(path)), doc_(std::move(initial)) {}

    bool unit_done(const std::string& unit) const {
        std::lock_guard lock(mu_);
        return doc_["units"].contains(unit) && doc_["units"][unit].value("status", "") == "done";
    }
    void record_unit(const std::string& unit, json entry) {
        std::lock_guard lock(mu_);
        doc_["units"][unit] = std::move(entry);
        flush_locked();
    }
    void record_replica(int replica, json entry) {
        std::lock_guard lock(mu_);
        doc_["replicas"][std::to_string(replica)] = std::move(entry);
        flush_locked();
    }
    void record_failure(const std::string& what) {
        std::lock_guard lock(mu_);
        doc_["failures"].push_back(what);
        flush_locked();
    }
    void flush() {
        std::lock_guard lock(mu_);
        flush_locked();
    }

private:
    void flush_locked() { write_atomic(path_, doc_.dump(2) + "\n"); }

    fs::path path_;
    mutable std::mutex mu_;
    json doc_;
};

struct ThetaKey {
    std::uint64_t bits;
    int test;
    bool operator==(const ThetaKey&) const = default;
};

struct ThetaKeyHash {
    std::size_t operator()(const ThetaKey& k) const { return std::hash<std::uint64_t>()(k.bits * 31 + k.test); }
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    const fs::path config_path = out_dir / "config.json";
    const fs::path manifest_path = out_dir / "manifest.json";

    json manifest_doc;
    if (fs::exists(manifest_path)) {
        manifest_doc = json::parse(read_file(manifest_path));
        if (fs::exists(config_path)) {
            const json previous = json::parse(read_file(config_path));
            ExperimentConfig prev_cfg;
            prev_cfg.p_grid = previous.at("p_grid").get<std::vector<int>>();
            prev_cfg.n_grid = previous.at("n_grid").get<std::vector<double>>();
            prev_cfg.N_grid = previous.at("N_grid").get<std::vector<int>>();
            prev_cfg.replicas = previous.at("replicas").get<int>();
            prev_cfg.budget = previous.at("budget").get<int>();
            prev_cfg.base_seed = previous.at("base_seed").get<std::uint64_t>();
            prev_cfg.noise_var = previous.at("noise_var").get<double>();
            prev_cfg.max_cond = previous.at("max_cond").get<int>();
            if (result_fields(prev_cfg) != result_fields(config)) {
                throw InvalidInput("output directory " + out_dir.string() +
                                   " holds results for a different configuration");
            }
        }
    } else {
        manifest_doc["software_version"] = PCBO_VERSION;
        manifest_doc["base_seed"] = config.base_seed;
        manifest_doc["units"] = json::object();
        manifest_doc["replicas"] = json::object();
        manifest_doc["failures"] = json::array();
    }
    write_atomic(config_path, config_to_json(config));
    Manifest manifest(manifest_path, std::move(manifest_doc));
    manifest.flush();

    const auto scenarios = build_scenarios(config);
    const PcOptions pc_options{config.max_cond >= 0 ? std::optional<int>(config.max_cond) : std::nullopt};

    RunSummary summary;
    summary.output_dir = out_dir;
    std::mutex summary_mu;
    std::atomic<std::size_t> evaluations{0};
    std::atomic<int> next_replica{0};

    auto unit_name = [](int r, Method m) { return "replica_" + std::to_string(r) + "/" + std::string(to_string(m)); };

    auto work = [&] {
        while (true) {
            const int r = next_replica.fetch_add(1);
            if (r >= config.replicas) return;
            std::vector<Method> pending;
            for (Method m : config.methods) {
                const fs::path trace = out_dir / ("replica_" + std::to_string(r)) / (std::string(to_string(m)) + ".jsonl");
                if (manifest.unit_done(unit_name(r, m)) && fs::exists(trace)) {
                    std::lock_guard lock(summary_mu);
                    ++summary.units_skipped;
                } else {
                    pending.push_back(m);
                }
            }
            if (pending.empty()) continue;

            ReplicaContext ctx;
            try {
                ctx = materialize_replica(config, scenarios, r);
            } catch (const std::exception& e) {
                const std::string msg = "replica_" + std::to_string(r) + ": " + e.what();
                manifest.record_failure(msg);
                std::lock_guard lock(summary_mu);
                summary.failures.push_back(msg);
                continue;
            }
            json rep;
            json checksums = json::array();
            json ids = json::array();
            for (const auto& sc : ctx.scenarios) {
                checksums.push_back(hex64(sc.data.checksum()));
                ids.push_back(sc.spec.id());
            }
            rep["scenarios"] = ids;
            rep["dataset_checksums"] = checksums;
            manifest.record_replica(r, rep);

            // Methods within a replica share one cache: the objective is deterministic in theta.
            std::unordered_map<ThetaKey, double, ThetaKeyHash> cache;
            const Objective objective = [&](const Theta& theta) {
                ThetaKey key{std::bit_cast<std::uint64_t>(theta.log10_alpha), static_cast<int>(theta.test)};
                if (auto it = cache.find(key); it != cache.end()) return it->second;
                const double v = pcbo::objective(theta, ctx, pc_options).mean_nshd;
                ++evaluations;
                cache.emplace(key, v);
                return v;
            };

            const fs::path rep_dir = out_dir / ("replica_" + std::to_string(r));
            fs::create_directories(rep_dir);
            for (Method m : pending) {
                const std::string unit = unit_name(r, m);
                const std::uint64_t seed = method_seed(config, r, m);
                try {
                    RngStream rng(seed);
                    std::vector<TrialRecord> trace;
                    switch (m) {
                        case Method::BO: trace = run_bo(objective, config.budget, rng); break;
                        case Method::RS: trace = run_random_search(objective, config.budget, rng); break;
                        case Method::EC: trace = run_expert_criterion(objective, config.budget); break;
                    }
                    std::string text;
                    double wall = 0.0;
                    for (const auto& rec : trace) {
                        text += trace_line(rec, r, seed, config.record_wall_time);
                        text += '\n';
                        wall += rec.wall_time_s;
                    }
                    write_atomic(rep_dir / (std::string(to_string(m)) + ".jsonl"), text);
                    json entry;
                    entry["status"] = "done";
                    entry["seed"] = seed;
                    entry["records"] = trace.size();
                    entry["wall_time_s"] = wall;
                    manifest.record_unit(unit, entry);
                    std::lock_guard lock(summary_mu);
                    ++summary.units_run;
                } catch (const std::exception& e) {
                    json entry;
                    entry["status"] = "failed";
                    entry["seed"] = seed;
                    entry["error"] = e.what();
                    manifest.record_unit(unit, entry);
                    manifest.record_failure(unit + ": " + e.what());
                    std::lock_guard lock(summary_mu);
                    summary.failures.push_back(unit + ": " + e.what());
                }
            }
        }
    };

    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.replicas);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    summary.objective_evaluations = evaluations.load();
    return summary;
}

namespace {

int alpha_bin(double alpha) {
    const double x = (std::log10(alpha) - kMinLog10Alpha) / (kMaxLog10Alpha - kMinLog10Alpha);
    return std::clamp(static_cast<int>(std::floor(x * kAlphaBins)), 0, kAlphaBins - 1);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

}  // namespace

ReportSummary report(const fs::path& results_dir) {
    if (!fs::is_directory(results_dir)) throw InvalidInput("no results directory at " + results_dir.string());

    std::vector<int> replica_ids;
    for (const auto& entry : fs::directory_iterator(results_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("replica_", 0) == 0) {
            replica_ids.push_back(std::stoi(name.substr(8)));
        }
    }
    std::sort(replica_ids.begin(), replica_ids.end());
    if (replica_ids.empty()) throw InvalidInput("no replica directories under " + results_dir.string());

    int budget = 0;
    if (fs::exists(results_dir / "config.json")) {
        budget = json::parse(read_file(results_dir / "config.json")).value("budget", 0);
    }

    std::map<Method, std::vector<std::vector<TrialRecord>>> traces;
    for (int r : replica_ids) {
        for (Method m : {Method::BO, Method::RS, Method::EC}) {
            const fs::path path = results_dir / ("replica_" + std::to_string(r)) / (std::string(to_string(m)) + ".jsonl");
            if (fs::exists(path)) traces[m].push_back(read_trace(path));
        }
    }
    if (traces.empty()) throw InvalidInput("no traces under " + results_dir.string());
    for (const auto& [m, reps] : traces) {
        for (const auto& t : reps) budget = std::max(budget, static_cast<int>(t.size()));
    }

    ReportSummary summary;
    summary.global_best = std::numeric_limits<double>::infinity();
    for (const auto& [m, reps] : traces) {
        for (const auto& t : reps) {
            for (const auto& rec : t) summary.global_best = std::min(summary.global_best, rec.y);
        }
    }

    const fs::path rep_dir = results_dir / "report";
    fs::create_directories(rep_dir);
    std::ostringstream curves, hist_tests, hist_alpha, summary_csv;
    curves << "method,iteration,mean,std,replicas,warning\n";
    hist_tests << "method,test,count\n";
    hist_alpha << "method,bin,alpha_lo,alpha_hi,count\n";
    summary_csv << "method,replicas,mode_test,alpha_mass_below_0.025,final_best_mean,warning\n";

    const int total_replicas = static_cast<int>(replica_ids.size());
    for (const auto& [m, reps] : traces) {
        MethodReport mr;
        mr.replicas = static_cast<int>(reps.size());
        mr.alpha_counts.assign(kAlphaBins, 0);
        for (TestKind t : kAllTests) mr.test_counts[t] = 0;
        for (const auto& t : reps) {
            if (static_cast<int>(t.size()) < budget) ++mr.incomplete;
        }
        const int missing = total_replicas - mr.replicas;
        std::string warning;
        if (missing > 0 || mr.incomplete > 0) {
            warning = "missing " + std::to_string(missing) + " incomplete " + std::to_string(mr.incomplete);
        }

        for (int it = 0; it < budget; ++it) {
            std::vector<double> vals;
            for (const auto& t : reps) {
                if (t.empty()) continue;
                const auto& rec = t[std::min<std::size_t>(it, t.size() - 1)];
                vals.push_back(std::log(rec.best_so_far - summary.global_best + kCurveEpsilon));
            }
            double mean = 0.0, sd = 0.0;
            if (!vals.empty()) {
                for (double v : vals) mean += v;
                mean /= static_cast<double>(vals.size());
                if (vals.size() > 1) {
                    for (double v : vals) sd += (v - mean) * (v - mean);
                    sd = std::sqrt(sd / static_cast<double>(vals.size() - 1));
                }
            }
            mr.curve_mean.push_back(mean);
            mr.curve_std.push_back(sd);
            curves << to_string(m) << ',' << it + 1 << ',' << fmt(mean) << ',' << fmt(sd) << ',' << vals.size() << ','
                   << warning << '\n';
        }

        int below = 0;
        for (const auto& t : reps) {
            if (t.empty()) continue;
            // Recommendation at the last iteration: the best observation so far.
            const TrialRecord* best = &t.front();
            for (const auto& rec : t) {
                if (rec.y < best->y) best = &rec;
            }
            ++mr.test_counts[best->theta.test];
            ++mr.alpha_counts[alpha_bin(best->theta.alpha())];
            if (best->theta.alpha() < 0.025) ++below;
            mr.final_best.push_back(t.back().best_so_far);
        }
        mr.alpha_mass_below_0025 = mr.replicas > 0 ? static_cast<double>(below) / mr.replicas : 0.0;
        int mode_count = -1;
        for (TestKind t : kAllTests) {
            if (mr.test_counts[t] > mode_count) {
                mode_count = mr.test_counts[t];
                mr.mode_test = t;
            }
            hist_tests << to_string(m) << ',' << to_string(t) << ',' << mr.test_counts[t] << '\n';
        }
        for (int b = 0; b < kAlphaBins; ++b) {
            const double lo = std::pow(10.0, kMinLog10Alpha + (kMaxLog10Alpha - kMinLog10Alpha) * b / kAlphaBins);
            const double hi = std::pow(10.0, kMinLog10Alpha + (kMaxLog10Alpha - kMinLog10Alpha) * (b + 1) / kAlphaBins);
            hist_alpha << to_string(m) << ',' << b << ',' << fmt(lo) << ',' << fmt(hi) << ',' << mr.alpha_counts[b] << '\n';
        }
        double final_mean = 0.0;
        for (double v : mr.final_best) final_mean += v;
        if (!mr.final_best.empty()) final_mean /= static_cast<double>(mr.final_best.size());
        summary_csv << to_string(m) << ',' << mr.replicas << ',' << to_string(mr.mode_test) << ','
                    << fmt(mr.alpha_mass_below_0025) << ',' << fmt(final_mean) << ',' << warning << '\n';
        summary.methods[m] = std::move(mr);
    }

    write_atomic(rep_dir / "curves.csv", curves.str());
    write_atomic(rep_dir / "hist_tests.csv", hist_tests.str());
    write_atomic(rep_dir / "hist_alpha.csv", hist_alpha.str());
    write_atomic(rep_dir / "summary.csv", summary_csv.str());
    return summary;
}

}  // namespace pcbo
