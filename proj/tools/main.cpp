#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jdcvi/jdcvi.hpp"

namespace {

struct GenerateOpts {
    std::string spec_path;
    std::string preset;
    std::string out;
    int n = 0;
    std::uint64_t seed = 0;
    CLI::Option* n_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

struct ClusterOpts {
    std::string data;
    std::string out;
    int k = 2;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    std::uint64_t seed = 0;
};

struct SweepOpts {
    std::string data;
    std::string config_path;
    std::string out;
    std::string divergence = "gaussian";
    std::string format = "csv";
    int k_min = 2;
    int k_max = 10;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    int restarts = 8;
    std::uint64_t seed = 0;
    CLI::Option* data_opt = nullptr;
    CLI::Option* k_min_opt = nullptr;
    CLI::Option* k_max_opt = nullptr;
    CLI::Option* m_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* divergence_opt = nullptr;
};

struct AltEvalOpts {
    std::string data;
    std::string config_path;
    std::string out;
    std::string divergence = "gaussian";
    std::string format = "csv";
    std::vector<int> k_list;
    int runs = 100;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    std::uint64_t seed = 0;
    CLI::Option* data_opt = nullptr;
    CLI::Option* k_list_opt = nullptr;
    CLI::Option* runs_opt = nullptr;
    CLI::Option* m_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* divergence_opt = nullptr;
};

struct JdOpts {
    std::string data;
    std::string backend = "gaussian";
    std::vector<int> pair = {0, 1};
    bool use_labels = false;
};

struct SimilarityOpts {
    std::string p1;
    std::string p2;
};

void run_generate(const GenerateOpts& opts) {
    jdcvi::MixtureSpec spec = opts.preset.empty() ? jdcvi::load_mixture_spec(opts.spec_path)
                                                  : jdcvi::preset_mixture(opts.preset);
    if (opts.n_opt->count() > 0) spec.n_total = opts.n;
    if (opts.seed_opt->count() > 0) spec.seed = opts.seed;
    jdcvi::Dataset ds = jdcvi::generate(spec);
    jdcvi::save_csv(ds, opts.out);
}

void run_cluster(const ClusterOpts& opts) {
    jdcvi::Dataset ds = jdcvi::load_csv(opts.data);
    jdcvi::FcmConfig cfg;
    cfg.k = opts.k;
    cfg.m = opts.m;
    cfg.tol = opts.tol;
    cfg.max_iter = opts.max_iter;
    cfg.seed = opts.seed;
    jdcvi::FcmResult result = jdcvi::fcm(ds, cfg);
    const auto& mm = result.membership;

    nlohmann::ordered_json j;
    j["type"] = "fcm";
    j["k"] = opts.k;
    j["m"] = opts.m;
    j["tol"] = opts.tol;
    j["max_iter"] = opts.max_iter;
    j["seed"] = opts.seed;
    j["objective"] = result.objective;
    j["iterations"] = result.iterations;
    j["centers"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < mm.k(); ++i) {
        std::vector<double> row(mm.centers().row(i).begin(), mm.centers().row(i).end());
        j["centers"].push_back(row);
    }
    j["u"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < mm.k(); ++i) {
        std::vector<double> row(mm.u().row(i).begin(), mm.u().row(i).end());
        j["u"].push_back(row);
    }
    j["assignment"] = jdcvi::harden(mm).assignment;
    jdcvi::write_text_file(opts.out, j.dump(2) + "\n");
}

jdcvi::Dataset sweep_dataset(const std::string& data_flag, CLI::Option* data_opt,
                             const jdcvi::RunConfig& rc, const std::string& subcommand) {
    if (data_opt->count() > 0) return jdcvi::load_csv(data_flag);
    if (rc.dataset_path || rc.mixture) return jdcvi::load_config_dataset(rc);
    throw CLI::ValidationError(subcommand, "--data or a config dataset is required");
}

void run_sweep(const SweepOpts& opts) {
    jdcvi::RunConfig rc;
    if (!opts.config_path.empty()) rc = jdcvi::load_run_config(opts.config_path);

    jdcvi::SweepConfig cfg;
    if (rc.k_range) {
        cfg.k_min = (*rc.k_range)[0];
        cfg.k_max = (*rc.k_range)[1];
    } else if (rc.k) {
        cfg.k_min = cfg.k_max = *rc.k;
    }
    cfg.m = rc.m;
    cfg.tol = rc.tol;
    cfg.max_iter = rc.max_iter;
    cfg.seed = rc.seed;
    cfg.backend = rc.backend;
    if (opts.k_min_opt->count() > 0) cfg.k_min = opts.k_min;
    if (opts.k_max_opt->count() > 0) cfg.k_max = opts.k_max;
    if (opts.m_opt->count() > 0) cfg.m = opts.m;
    if (opts.tol_opt->count() > 0) cfg.tol = opts.tol;
    if (opts.max_iter_opt->count() > 0) cfg.max_iter = opts.max_iter;
    cfg.restarts = opts.restarts;
    if (opts.seed_opt->count() > 0) cfg.seed = opts.seed;
    if (opts.divergence_opt->count() > 0) cfg.backend = jdcvi::backend_from_string(opts.divergence);

    jdcvi::Dataset ds = sweep_dataset(opts.data, opts.data_opt, rc, "sweep");
    jdcvi::SweepResult result = jdcvi::classic_sweep(ds, cfg);
    jdcvi::emit_report(result, jdcvi::report_format_from_string(opts.format), opts.out);
}

void run_alt_eval(const AltEvalOpts& opts) {
    jdcvi::RunConfig rc;
    if (!opts.config_path.empty()) rc = jdcvi::load_run_config(opts.config_path);

    jdcvi::AltEvalConfig cfg;
    if (rc.k_list)
        cfg.k_candidates = *rc.k_list;
    else if (rc.k_range)
        for (int k = (*rc.k_range)[0]; k <= (*rc.k_range)[1]; ++k) cfg.k_candidates.push_back(k);
    if (rc.runs) cfg.runs = *rc.runs;
    cfg.m = rc.m;
    cfg.tol = rc.tol;
    cfg.max_iter = rc.max_iter;
    cfg.seed = rc.seed;
    cfg.backend = rc.backend;
    if (opts.k_list_opt->count() > 0) cfg.k_candidates = opts.k_list;
    if (cfg.k_candidates.empty())
        for (int k = 2; k <= 10; ++k) cfg.k_candidates.push_back(k);
    if (opts.runs_opt->count() > 0) cfg.runs = opts.runs;
    if (opts.m_opt->count() > 0) cfg.m = opts.m;
    if (opts.tol_opt->count() > 0) cfg.tol = opts.tol;
    if (opts.max_iter_opt->count() > 0) cfg.max_iter = opts.max_iter;
    if (opts.seed_opt->count() > 0) cfg.seed = opts.seed;
    if (opts.divergence_opt->count() > 0) cfg.backend = jdcvi::backend_from_string(opts.divergence);

    jdcvi::Dataset ds = sweep_dataset(opts.data, opts.data_opt, rc, "alt-eval");
    jdcvi::AltEvalResult result = jdcvi::alt_eval(ds, cfg);
    jdcvi::emit_report(result, jdcvi::report_format_from_string(opts.format), opts.out);
}

void run_jd(const JdOpts& opts) {
    if (opts.pair.size() != 2)
        throw CLI::ValidationError("--pair", "expected two cluster ids, e.g. --pair 0,1");
    jdcvi::Dataset ds = jdcvi::load_csv(opts.data);
    jdcvi::CrispPartition p = jdcvi::partition_from_labels(ds.labels());
    for (int id : opts.pair)
        if (id < 0 || id >= p.k)
            throw std::invalid_argument("jd: cluster id " + std::to_string(id) +
                                        " outside [0, " + std::to_string(p.k) + ")");
    Eigen::MatrixXd a = jdcvi::cluster_members(p, ds, opts.pair[0]);
    Eigen::MatrixXd b = jdcvi::cluster_members(p, ds, opts.pair[1]);
    double value = 0.0;
    if (jdcvi::backend_from_string(opts.backend) == jdcvi::DivergenceBackend::Gaussian)
        value = jdcvi::jd_gaussian(jdcvi::fit_gaussian(a), jdcvi::fit_gaussian(b));
    else
        value = jdcvi::jd_kde(jdcvi::fit_kde(a), jdcvi::fit_kde(b));
    std::cout << jdcvi::detail::format_double(value) << "\n";
}

void run_similarity(const SimilarityOpts& opts) {
    jdcvi::Dataset d1 = jdcvi::load_csv(opts.p1);
    jdcvi::Dataset d2 = jdcvi::load_csv(opts.p2);
    jdcvi::CrispPartition p1 = jdcvi::partition_from_labels(d1.labels());
    jdcvi::CrispPartition p2 = jdcvi::partition_from_labels(d2.labels());
    jdcvi::PairCounts counts = jdcvi::pair_counts(p1, p2);
    std::string line;
    for (std::size_t m = 0; m < jdcvi::kMeasureNames.size(); ++m) {
        if (m > 0) line += ' ';
        try {
            line += jdcvi::detail::format_double(jdcvi::similarity_measure(m, counts));
        } catch (const jdcvi::Error&) {
            line += "NA";
        }
    }
    std::cout << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy clustering validity benchmark with a Jeffrey-divergence index"};
    app.name("jdcvi");
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* gen_cmd = app.add_subcommand("generate", "Generate a labeled Gaussian-mixture CSV");
    auto* gen_spec = gen_cmd->add_option("--spec", gen.spec_path, "Mixture spec JSON file");
    auto* gen_preset =
        gen_cmd->add_option("--preset", gen.preset, "Shipped recipe: s1, s2, s3, s4, or r15")
            ->check(CLI::IsMember({"s1", "s2", "s3", "s4", "r15"}));
    gen_spec->excludes(gen_preset);
    gen_preset->excludes(gen_spec);
    gen.n_opt = gen_cmd->add_option("--n", gen.n, "Override the spec's point count");
    gen.seed_opt = gen_cmd->add_option("--seed", gen.seed, "Override the spec's RNG seed");
    gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();
    gen_cmd->callback([&gen, gen_spec, gen_preset] {
        if (gen_spec->count() == 0 && gen_preset->count() == 0)
            throw CLI::RequiredError("--spec or --preset");
        run_generate(gen);
    });

    ClusterOpts clu;
    auto* clu_cmd = app.add_subcommand("cluster", "Run fuzzy C-means once and save the result");
    clu_cmd->add_option("--data", clu.data, "Input dataset CSV")->required();
    clu_cmd->add_option("--k", clu.k, "Number of clusters")->required();
    clu_cmd->add_option("--m", clu.m, "Fuzzifier exponent (> 1)");
    clu_cmd->add_option("--tol", clu.tol, "Convergence threshold on center movement");
    clu_cmd->add_option("--max-iter", clu.max_iter, "Iteration cap");
    clu_cmd->add_option("--seed", clu.seed, "RNG seed for initialization");
    clu_cmd->add_option("--out", clu.out, "Output JSON path")->required();
    clu_cmd->callback([&clu] { run_cluster(clu); });

    SweepOpts sw;
    auto* sw_cmd = app.add_subcommand("sweep", "Evaluate all validity indexes over a k range");
    sw.data_opt = sw_cmd->add_option("--data", sw.data, "Input dataset CSV");
    sw_cmd->add_option("--config", sw.config_path, "Run config JSON (flags override it)");
    sw.k_min_opt = sw_cmd->add_option("--k-min", sw.k_min, "Smallest k (default 2)");
    sw.k_max_opt = sw_cmd->add_option("--k-max", sw.k_max, "Largest k (default 10)");
    sw.m_opt = sw_cmd->add_option("--m", sw.m, "Fuzzifier exponent (> 1)");
    sw.tol_opt = sw_cmd->add_option("--tol", sw.tol, "Convergence threshold on center movement");
    sw.max_iter_opt = sw_cmd->add_option("--max-iter", sw.max_iter, "Iteration cap");
    sw_cmd->add_option("--restarts", sw.restarts, "FCM initializations screened per k (default 8)");
    sw.seed_opt = sw_cmd->add_option("--seed", sw.seed, "Base RNG seed for the sweep");
    sw.divergence_opt =
        sw_cmd->add_option("--divergence", sw.divergence, "Density backend for index I")
            ->check(CLI::IsMember({"gaussian", "kde"}));
    sw_cmd->add_option("--format", sw.format, "Report format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    sw_cmd->add_option("--out", sw.out, "Output report path")->required();
    sw_cmd->callback([&sw] { run_sweep(sw); });

    AltEvalOpts alt;
    auto* alt_cmd = app.add_subcommand(
        "alt-eval", "Score indexes against similarity-based reference partitions");
    alt.data_opt = alt_cmd->add_option("--data", alt.data, "Input dataset CSV with labels");
    alt_cmd->add_option("--config", alt.config_path, "Run config JSON (flags override it)");
    alt.runs_opt = alt_cmd->add_option("--runs", alt.runs, "Number of clustering runs (default 100)");
    alt.k_list_opt =
        alt_cmd->add_option("--k-list", alt.k_list, "Candidate cluster counts (default 2..10)")
            ->delimiter(',');
    alt.m_opt = alt_cmd->add_option("--m", alt.m, "Fuzzifier exponent (> 1)");
    alt.tol_opt = alt_cmd->add_option("--tol", alt.tol, "Convergence threshold on center movement");
    alt.max_iter_opt = alt_cmd->add_option("--max-iter", alt.max_iter, "Iteration cap");
    alt.seed_opt = alt_cmd->add_option("--seed", alt.seed, "Base RNG seed; run r derives its own");
    alt.divergence_opt =
        alt_cmd->add_option("--divergence", alt.divergence, "Density backend for index I")
            ->check(CLI::IsMember({"gaussian", "kde"}));
    alt_cmd->add_option("--format", alt.format, "Report format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    alt_cmd->add_option("--out", alt.out, "Output report path")->required();
    alt_cmd->callback([&alt] { run_alt_eval(alt); });

    JdOpts jd;
    auto* jd_cmd =
        app.add_subcommand("jd", "Print the Jeffrey divergence between two labeled clusters");
    jd_cmd->add_option("--data", jd.data, "Input dataset CSV with labels")->required();
    jd_cmd->add_flag("--labels", jd.use_labels, "Group points by the label column")->required();
    jd_cmd->add_option("--pair", jd.pair, "Two cluster ids, e.g. 0,1")->delimiter(',');
    jd_cmd->add_option("--backend", jd.backend, "Density backend (default gaussian)")
        ->check(CLI::IsMember({"gaussian", "kde"}));
    jd_cmd->callback([&jd] { run_jd(jd); });

    SimilarityOpts sim;
    auto* sim_cmd = app.add_subcommand(
        "similarity", "Print Rand, FM, Jaccard, and ARI between two labeled CSVs");
    sim_cmd->add_option("--p1", sim.p1, "First partition CSV (label column)")->required();
    sim_cmd->add_option("--p2", sim.p2, "Second partition CSV (label column)")->required();
    sim_cmd->callback([&sim] { run_similarity(sim); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const jdcvi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
