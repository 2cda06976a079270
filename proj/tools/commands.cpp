#include "commands.hpp"

#include "bmf/finite_sampler.hpp"
#include "bmf/ibp_sampler.hpp"
#include "bmf/io.hpp"
#include "bmf/posterior.hpp"
#include "bmf/synthgen.hpp"
#include "bmf/threads.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#ifndef BMF_VERSION_STRING
#define BMF_VERSION_STRING "0.1.0"
#endif

namespace bmf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

MatrixFormat format_for(const fs::path& path, const std::string& explicit_format)
{
    if (!explicit_format.empty()) return parse_format(explicit_format);
    return path.extension() == ".coo" ? MatrixFormat::sparse_coo : MatrixFormat::dense_csv;
}

std::string extension_for(MatrixFormat format)
{
    return format == MatrixFormat::sparse_coo ? ".coo" : ".csv";
}

unsigned parse_threads(const std::string& text)
{
    if (text == "auto") return resolve_threads(0);
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(text, &used);
        if (used == text.size() && v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("--threads expects 'auto' or a positive integer, got '" + text + "'");
}

void write_json(const json& j, const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

json manifest(const std::string& subcommand, json args, double seconds)
{
    return {{"tool", "bmf"},
            {"version", version_string()},
            {"subcommand", subcommand},
            {"args", std::move(args)},
            {"wall_clock_seconds", seconds}};
}

json summarize_chain(const Chain& chain, const BinaryMatrix* data, const BinaryMatrix* u_truth)
{
    const LSummary ls = l_summary(chain);
    json hist = json::object();
    for (const auto& [l, f] : ls.histogram) hist[std::to_string(l)] = f;
    double lambda_sum = 0.0;
    for (const ChainSample& s : chain.samples) lambda_sum += s.lambda;

    json summary = {{"model", chain.config.value("model", "unknown")},
                    {"n_recorded", chain.size()},
                    {"L", {{"mode", ls.mode}, {"mean", ls.mean}, {"histogram", hist}}},
                    {"lambda", {{"mean", lambda_sum / static_cast<double>(chain.size())},
                                {"last", chain.samples.back().lambda}}}};
    if (!chain.has_factors) return summary;
    const ChainSample& last = chain.samples.back();
    if (data) summary["reconstruction_error"] = reconstruction_error(*data, last.z, last.u);
    if (u_truth) {
        const FactorMatch match = match_factors(last.u, *u_truth);
        json pairs = json::array();
        for (std::size_t i = 0; i < match.pairs.size(); ++i)
            pairs.push_back({{"inferred", match.pairs[i].first},
                             {"true", match.pairs[i].second},
                             {"jaccard", match.scores[i]}});
        summary["factor_match"] = {{"mean_jaccard", match.mean_jaccard}, {"pairs", pairs}};
    }
    return summary;
}

void write_summary_files(const Chain& chain, const json& summary, const fs::path& dir)
{
    write_json(summary, dir / "summary.json");
    if (chain.has_factors) export_heatmap(marginal_mean_z(chain), dir / "heatmap.pgm");
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::size_t rows = 200;
    std::size_t cols = 500;
    std::size_t latent = 5;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "dense-csv";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    const auto start = Clock::now();
    if (a.latent == 0) throw UsageError("--latent must be at least 1");
    if (a.rows == 0 || a.cols == 0) throw UsageError("--rows and --cols must be positive");
    if (!(a.noise >= 0.0 && a.noise <= 0.5)) throw UsageError("--noise must lie in [0, 0.5]");
    const MatrixFormat format = parse_format(a.format);

    SyntheticDataset ds = generate(a.rows, a.cols, a.latent, a.seed);
    ds.noise_level = a.noise;
    const BinaryMatrix clean = ds.x;
    ds.x = add_noise(ds.x, a.noise, a.seed);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    const std::string ext = extension_for(format);
    save_matrix(ds.x, dir / ("data" + ext), format);
    save_matrix(ds.z_true, dir / ("z_true" + ext), format);
    save_matrix(ds.u_true, dir / ("u_true" + ext), format);

    const double flipped = static_cast<double>(prediction_counts(ds.x, ds.z_true, ds.u_true).wrong());
    const double density = static_cast<double>(ds.x.count_ones()) / static_cast<double>(a.rows * a.cols);
    json args = {{"rows", a.rows}, {"cols", a.cols}, {"latent", a.latent}, {"noise", a.noise},
                 {"seed", a.seed}, {"out", a.out},   {"format", format_name(format)}};
    json m = manifest("generate", args, seconds_since(start));
    m["data"] = {{"density", density},
                 {"flip_fraction", flipped / static_cast<double>(a.rows * a.cols)},
                 {"factor_density", balanced_factor_density(a.latent)},
                 {"clean_density", static_cast<double>(clean.count_ones()) / static_cast<double>(a.rows * a.cols)}};
    write_json(m, dir / "manifest.json");
    out << "wrote " << a.rows << "x" << a.cols << " dataset (L=" << a.latent << ", density " << density
        << ") to " << dir.string() << "\n";
    return kExitOk;
}

struct FitArgs {
    std::string model;
    std::string input;
    std::string input_format;
    std::optional<double> binarize = 0.0;
    bool strict = false;
    std::size_t samples = 200;
    std::size_t burn_in = 100;
    double alpha = 1.0;
    double q = 0.5;
    std::optional<std::size_t> latent;
    double prior_z = 0.5;
    std::size_t lprime_max = 10;
    double lambda_init = kLambdaInit;
    std::uint64_t seed = 0;
    std::string threads = "auto";
    bool traces_only = false;
    std::string out;
};

json fit_args_json(const FitArgs& a)
{
    json j = {{"model", a.model},
              {"input", a.input},
              {"input_format", a.input_format},
              {"binarize", a.strict ? json(nullptr) : json(*a.binarize)},
              {"samples", a.samples},
              {"burn_in", a.burn_in},
              {"alpha", a.alpha},
              {"q", a.q},
              {"latent", a.latent ? json(*a.latent) : json(nullptr)},
              {"prior_z", a.prior_z},
              {"lprime_max", a.lprime_max},
              {"lambda_init", a.lambda_init},
              {"seed", a.seed},
              {"threads", a.threads},
              {"traces_only", a.traces_only},
              {"out", a.out}};
    return j;
}

int cmd_fit(const FitArgs& a, std::ostream& out)
{
    const auto start = Clock::now();
    if (a.model != "finite" && a.model != "ibp") throw UsageError("--model must be 'finite' or 'ibp'");
    if (a.model == "finite" && !a.latent) throw UsageError("--latent is required for the finite model");
    if (a.samples <= a.burn_in) throw UsageError("--samples must exceed --burn-in");
    const unsigned threads = parse_threads(a.threads);

    const fs::path input(a.input);
    const BinaryMatrix x =
        load({input, format_for(input, a.input_format), a.strict ? std::nullopt : a.binarize});

    Chain chain;
    if (a.model == "finite") {
        FiniteConfig c;
        c.latent_dim = *a.latent;
        c.prior_z = a.prior_z;
        c.prior_u = a.q;
        c.n_samples = a.samples;
        c.burn_in = a.burn_in;
        c.seed = a.seed;
        c.lambda_init = a.lambda_init;
        c.threads = threads;
        c.record_factors = !a.traces_only;
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        chain = run_finite(x, c);
    } else {
        IbpConfig c;
        c.alpha = a.alpha;
        c.q = a.q;
        c.lprime_max = a.lprime_max;
        c.n_samples = a.samples;
        c.burn_in = a.burn_in;
        c.seed = a.seed;
        c.lambda_init = a.lambda_init;
        c.threads = threads;
        c.record_factors = !a.traces_only;
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        chain = run_ibp(x, c);
    }
    const double sampling_seconds = seconds_since(start);

    const fs::path dir(a.out);
    save_chain(chain, dir);
    const json summary = summarize_chain(chain, &x, nullptr);
    write_summary_files(chain, summary, dir);
    json m = manifest("fit", fit_args_json(a), seconds_since(start));
    m["sampling_seconds"] = sampling_seconds;
    write_json(m, dir / "manifest.json");

    out << "model " << a.model << ": L mode " << summary["L"]["mode"].get<std::size_t>() << ", mean "
        << summary["L"]["mean"].get<double>() << ", lambda " << chain.samples.back().lambda;
    if (summary.contains("reconstruction_error"))
        out << ", reconstruction error " << summary["reconstruction_error"].get<double>();
    out << "\nwall-clock " << sampling_seconds << " s\n";
    return kExitOk;
}

struct SummarizeArgs {
    std::string chain;
    std::string truth;
    std::string input;
    std::string out;
};

int cmd_summarize(const SummarizeArgs& a, std::ostream& out)
{
    const auto start = Clock::now();
    const Chain chain = load_chain(a.chain);
    std::optional<BinaryMatrix> data;
    std::optional<BinaryMatrix> truth;
    if (!a.input.empty()) data = load({a.input, format_for(a.input, ""), 0.0});
    if (!a.truth.empty()) truth = load({a.truth, format_for(a.truth, ""), std::nullopt});
    if (truth && !chain.has_factors) throw UsageError("--truth needs a chain recorded with factors");

    const json summary = summarize_chain(chain, data ? &*data : nullptr, truth ? &*truth : nullptr);
    const fs::path dir = a.out.empty() ? fs::path(a.chain) : fs::path(a.out);
    fs::create_directories(dir);
    write_summary_files(chain, summary, dir);
    write_json(manifest("summarize", {{"chain", a.chain}, {"truth", a.truth}, {"input", a.input}, {"out", a.out}},
                        seconds_since(start)),
               dir / "summarize_manifest.json");
    out << summary.dump(2) << "\n";
    return kExitOk;
}

struct BenchArgs {
    std::size_t rows = 301;
    std::size_t cols = 21000;
    double density = 0.35;
    std::size_t latent = 9;
    double noise = 0.05;
    std::size_t samples = 200;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    std::string threads = "auto";
    std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out)
{
    if (a.rows == 0 || a.cols == 0 || a.latent == 0) throw UsageError("--rows, --cols and --latent must be positive");
    if (!(a.density > 0.0 && a.density < 1.0)) throw UsageError("--density must lie in (0, 1)");
    if (a.samples <= a.burn_in) throw UsageError("--samples must exceed --burn-in");
    const unsigned threads = parse_threads(a.threads);

    // Noise flips push the density toward 0.5; calibrate the clean product so
    // the noisy data lands on the requested density.
    const double clean_target = (a.density - a.noise) / (1.0 - 2.0 * a.noise);
    if (!(clean_target > 0.0 && clean_target < 1.0)) throw UsageError("--density is unreachable at this --noise");
    const auto gen_start = Clock::now();
    SyntheticDataset ds = generate(a.rows, a.cols, a.latent, a.seed, factor_density_for(a.latent, clean_target));
    ds.x = add_noise(ds.x, a.noise, a.seed);
    const double gen_seconds = seconds_since(gen_start);

    IbpConfig c;
    c.n_samples = a.samples;
    c.burn_in = a.burn_in;
    c.seed = a.seed;
    c.threads = threads;
    c.record_factors = false;
    const auto start = Clock::now();
    const Chain chain = run_ibp(ds.x, c);
    const double seconds = seconds_since(start);
    const LSummary ls = l_summary(chain);

    const double density = static_cast<double>(ds.x.count_ones()) / static_cast<double>(a.rows * a.cols);
    json args = {{"rows", a.rows},     {"cols", a.cols},       {"density", a.density},
                 {"latent", a.latent}, {"noise", a.noise},     {"samples", a.samples},
                 {"burn_in", a.burn_in}, {"seed", a.seed},     {"threads", a.threads}, {"out", a.out}};
    json report = manifest("bench", args, seconds);
    report["threads_used"] = threads;
    report["generation_seconds"] = gen_seconds;
    report["sampling_seconds"] = seconds;
    report["samples_per_second"] = static_cast<double>(a.samples) / seconds;
    report["data_density"] = density;
    report["L"] = {{"mode", ls.mode}, {"mean", ls.mean}};
    if (!a.out.empty()) {
        const fs::path dir(a.out);
        fs::create_directories(dir);
        write_json(report, dir / "bench.json");
        save_chain(chain, dir / "chain");
    }
    out << report.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

std::string version_string()
{
    return BMF_VERSION_STRING;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Gibbs sampling for Boolean matrix factorisation with finite and Indian Buffet Process priors", "bmf"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Generate a synthetic Boolean-product dataset");
    generate_cmd->add_option("--rows", gen.rows, "Number of rows N")->capture_default_str();
    generate_cmd->add_option("--cols", gen.cols, "Number of columns D")->capture_default_str();
    generate_cmd->add_option("--latent", gen.latent, "Latent dimension L")->capture_default_str();
    generate_cmd->add_option("--noise", gen.noise, "Independent bit-flip probability")->capture_default_str();
    generate_cmd->add_option("--seed", gen.seed)->capture_default_str();
    generate_cmd->add_option("--format", gen.format, "dense-csv or sparse-coo")->capture_default_str();
    generate_cmd->add_option("--out", gen.out, "Output directory")->required();

    FitArgs fit;
    double binarize = 0.0;
    auto* fit_cmd = app.add_subcommand("fit", "Run a sampler on a binary data matrix");
    fit_cmd->add_option("--model", fit.model, "finite or ibp")->required();
    fit_cmd->add_option("--input", fit.input, "Data matrix (.csv dense, .coo sparse)")->required();
    fit_cmd->add_option("--input-format", fit.input_format, "Override format detection");
    fit_cmd->add_option("--binarize", binarize, "Entries above this threshold become 1")->capture_default_str();
    fit_cmd->add_flag("--strict", fit.strict, "Accept only literal 0/1 entries");
    fit_cmd->add_option("--samples", fit.samples)->capture_default_str();
    fit_cmd->add_option("--burn-in", fit.burn_in)->capture_default_str();
    fit_cmd->add_option("--alpha", fit.alpha, "IBP concentration")->capture_default_str();
    fit_cmd->add_option("--q", fit.q, "Bernoulli prior on U entries")->capture_default_str();
    fit_cmd->add_option("--latent", fit.latent, "Latent dimension (finite model)");
    fit_cmd->add_option("--prior-z", fit.prior_z, "Bernoulli prior on Z entries (finite model)")->capture_default_str();
    fit_cmd->add_option("--lprime-max", fit.lprime_max, "New-code truncation")->capture_default_str();
    fit_cmd->add_option("--lambda-init", fit.lambda_init)->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed)->capture_default_str();
    fit_cmd->add_option("--threads", fit.threads, "Worker threads or 'auto' (BMF_THREADS)")->capture_default_str();
    fit_cmd->add_flag("--traces-only", fit.traces_only, "Record L and lambda traces without factor snapshots");
    fit_cmd->add_option("--out", fit.out, "Output directory")->required();

    SummarizeArgs sum;
    auto* summarize_cmd = app.add_subcommand("summarize", "Recompute summaries from a saved chain");
    summarize_cmd->add_option("--chain", sum.chain, "Chain directory")->required();
    summarize_cmd->add_option("--truth", sum.truth, "Ground-truth U for factor matching");
    summarize_cmd->add_option("--input", sum.input, "Data matrix for the reconstruction error");
    summarize_cmd->add_option("--out", sum.out, "Output directory (default: the chain directory)");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time 200 IBP sweeps on single-cell-shaped synthetic data");
    bench_cmd->add_option("--rows", bench.rows)->capture_default_str();
    bench_cmd->add_option("--cols", bench.cols)->capture_default_str();
    bench_cmd->add_option("--density", bench.density, "Target data density")->capture_default_str();
    bench_cmd->add_option("--latent", bench.latent)->capture_default_str();
    bench_cmd->add_option("--noise", bench.noise)->capture_default_str();
    bench_cmd->add_option("--samples", bench.samples)->capture_default_str();
    bench_cmd->add_option("--burn-in", bench.burn_in)->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads)->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Directory for the report and traces");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << version_string() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*generate_cmd) return cmd_generate(gen, out);
        if (*fit_cmd) {
            fit.binarize = binarize;
            return cmd_fit(fit, out);
        }
        if (*summarize_cmd) return cmd_summarize(sum, out);
        if (*bench_cmd) return cmd_bench(bench, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace bmf::cli
