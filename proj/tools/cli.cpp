#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "wecure/io.hpp"
#include "wecure/metrics.hpp"

namespace wecure::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// JSON has no infinity, so non-finite metrics are written as strings.
nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

nlohmann::ordered_json recovery_json(Method method, double lambda, const std::optional<double>& gamma, double cg_tol,
                                     const std::optional<Index>& cg_max_iters) {
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(method));
    j["lambda"] = lambda;
    j["gamma"] = gamma ? nlohmann::ordered_json(*gamma) : nlohmann::ordered_json("|P|/|S|");
    j["cg_tol"] = cg_tol;
    j["cg_max_iters"] = cg_max_iters ? nlohmann::ordered_json(*cg_max_iters) : nlohmann::ordered_json("10*|U|");
    return j;
}

std::filesystem::path jsonl_path(const std::filesystem::path& report) {
    std::filesystem::path p = report;
    return p.replace_extension(".jsonl");
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

nlohmann::ordered_json RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["dataset"] = dataset;
    j["method"] = method;
    j["seed"] = seed;
    j["metrics"] = metrics;
    j["config"] = config;
    j["seconds"] = seconds;
    return j;
}

void append_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                const std::vector<std::string>& row) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
        out << '\n';
    };
    if (fresh) line(columns);
    line(row);
}

void append_jsonl(const std::filesystem::path& path, const nlohmann::ordered_json& value) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << value.dump() << '\n';
}

InpaintOutcome run_inpaint(const InpaintOptions& opts, std::ostream& log) {
    const GrayImage truth = io::load_image(opts.image);
    Mask mask = opts.mask ? io::load_mask(*opts.mask) : sample_mask(truth.rows(), truth.cols(), opts.sample_rate, opts.seed);
    if (!mask.matches(truth)) throw InvalidArgument("mask and image sizes differ");

    GrayImage observed = truth;
    for (Index k = 0; k < observed.size(); ++k) {
        if (!mask.observed[static_cast<std::size_t>(k)]) observed[k] = 0.0;
    }
    InpaintConfig cfg = opts.config;
    cfg.seed = opts.seed;

    const auto t0 = Clock::now();
    InpaintSession session(observed, mask, cfg);
    if (opts.verbose) {
        session.observer = [&log](const InpaintIterate& it) {
            log << "iteration " << it.iteration + 1 << " " << to_string(it.method) << " scale "
                << format_number(it.semilocal_scale) << " change " << format_number(it.relative_change) << '\n';
        };
    }
    session.run();
    InpaintOutcome outcome{session.current(), mask, {}};
    const double elapsed = seconds_since(t0);

    // Tables list the requested rate; the realized fraction (floor(rate * N) / N) goes to the JSON.
    const double fraction = static_cast<double>(mask.count()) / static_cast<double>(truth.size());
    const double rate = opts.mask ? fraction : opts.sample_rate;
    const double p = psnr(outcome.restored, truth);
    const SsimParams sp;
    const double s = truth.rows() >= sp.window && truth.cols() >= sp.window ? ssim(outcome.restored, truth, sp)
                                                                          : std::nan("");

    RunReport& r = outcome.report;
    r.command = "inpaint";
    r.dataset = opts.image.filename().string();
    r.method = std::string(to_string(cfg.method));
    r.seed = opts.seed;
    r.seconds = elapsed;
    r.metrics["rate"] = rate;
    r.metrics["observed_fraction"] = fraction;
    r.metrics["psnr_db"] = json_number(p);
    r.metrics["ssim"] = json_number(s);
    r.metrics["iterations"] = session.iteration();

    auto& c = r.config;
    c["image"] = opts.image.string();
    c["mask"] = opts.mask ? nlohmann::ordered_json(opts.mask->string()) : nlohmann::ordered_json(nullptr);
    c["sample_rate"] = opts.mask ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(opts.sample_rate);
    c["patch_size"] = {cfg.patch_h, cfg.patch_w};
    c["knn_sigma"] = cfg.graph.k_sigma;
    c["knn_trunc"] = cfg.graph.k_trunc;
    c["recovery"] = recovery_json(cfg.method, cfg.lambda, cfg.gamma, cfg.cg_tol, cfg.cg_max_iters);
    c["warm_start_iters"] = cfg.warm_start_iters;
    c["outer_iters"] = cfg.outer_iters;
    c["schedule"] = {cfg.schedule_start, cfg.schedule_floor};
    c["rel_change_tol"] = cfg.rel_change_tol;

    if (opts.out) io::write_image(outcome.restored, *opts.out);
    if (opts.mask_out) io::write_mask(mask, *opts.mask_out);
    if (opts.report) {
        append_csv(*opts.report, kInpaintColumns,
                   {r.dataset, r.method, format_number(rate), std::to_string(r.seed), format_number(p),
                    format_number(s), format_number(r.seconds)});
        append_jsonl(jsonl_path(*opts.report), r.to_json());
    }
    return outcome;
}

SslOutcome run_ssl(const SslOptions& opts, std::ostream& log) {
    const bool csv = !opts.labels && opts.data.extension() == ".csv";
    LabeledDataset ds;
    if (csv) {
        if (!opts.label_column) throw InvalidArgument("--label-column is required for CSV data");
        ds = io::load_pointcloud_csv(opts.data, {opts.label_column, opts.header});
    } else {
        if (!opts.labels) throw InvalidArgument("--labels is required for IDX data");
        ds.cloud = io::load_idx_images(opts.data);
        ds.labels = io::load_idx_labels(*opts.labels);
        if (static_cast<Index>(ds.labels.size()) != ds.cloud.size()) {
            throw InvalidArgument("image and label counts differ");
        }
    }
    const std::vector<int>& truth = ds.labels;
    const Index known = std::count_if(truth.begin(), truth.end(), [](int l) { return l != kUnlabeled; });

    Index count = 0;
    if (opts.labels_per_run) {
        count = *opts.labels_per_run;
    } else {
        const double rate = opts.label_rate.value_or(0.0);
        if (!(rate > 0.0 && rate <= 1.0)) throw InvalidArgument("--label-rate must lie in (0, 1]");
        count = std::max<Index>(1, static_cast<Index>(std::floor(rate * static_cast<double>(known))));
    }
    if (opts.repeats < 1) throw InvalidArgument("--repeats must be positive");

    const auto tg = Clock::now();
    const SparseWeightGraph graph = build_weight_graph(ds.cloud, opts.params.graph);
    const double graph_seconds = seconds_since(tg);

    SslOutcome outcome;
    std::ofstream predictions;
    if (opts.out) {
        predictions.open(*opts.out);
        if (!predictions) throw std::runtime_error("cannot write " + opts.out->string());
        predictions << "seed,index,truth,predicted,labeled\n";
    }

    for (Index rep = 0; rep < opts.repeats; ++rep) {
        const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
        const auto t0 = Clock::now();
        const std::vector<Index> chosen = sample_labeled_set(truth, count, seed);
        std::vector<int> labels(truth.size(), kUnlabeled);
        std::vector<std::uint8_t> is_labeled(truth.size(), 0);
        for (Index v : chosen) {
            labels[static_cast<std::size_t>(v)] = truth[static_cast<std::size_t>(v)];
            is_labeled[static_cast<std::size_t>(v)] = 1;
        }
        const Classification result = classify(graph, labels, opts.params.recovery);

        std::vector<Index> exclude;
        for (Index v = 0; v < static_cast<Index>(truth.size()); ++v) {
            if (is_labeled[static_cast<std::size_t>(v)] || truth[static_cast<std::size_t>(v)] == kUnlabeled) {
                exclude.push_back(v);
            }
        }
        if (static_cast<Index>(exclude.size()) == static_cast<Index>(truth.size())) {
            log << "warning: every point with a known label is in the labeled set; accuracy is trivially 1\n";
        }
        const double acc = accuracy(result.predicted, truth, exclude);

        RunReport r;
        r.command = "ssl";
        r.dataset = opts.data.filename().string();
        r.method = std::string(to_string(opts.params.recovery.method));
        r.seed = seed;
        r.seconds = seconds_since(t0) + (rep == 0 ? graph_seconds : 0.0);
        r.metrics["accuracy"] = acc;
        r.metrics["labels"] = count;
        r.metrics["evaluated"] = static_cast<Index>(truth.size() - exclude.size());
        r.metrics["graph_seconds"] = graph_seconds;
        auto& c = r.config;
        c["data"] = opts.data.string();
        c["labels_file"] = opts.labels ? nlohmann::ordered_json(opts.labels->string()) : nlohmann::ordered_json(nullptr);
        c["label_column"] = opts.label_column ? nlohmann::ordered_json(*opts.label_column) : nlohmann::ordered_json(nullptr);
        c["labels_per_run"] = count;
        c["knn_sigma"] = opts.params.graph.k_sigma;
        c["knn_trunc"] = opts.params.graph.k_trunc;
        const auto& rp = opts.params.recovery;
        c["recovery"] = recovery_json(rp.method, rp.lambda, rp.gamma, rp.cg_tol, rp.cg_max_iters);

        if (predictions.is_open()) {
            for (std::size_t v = 0; v < truth.size(); ++v) {
                predictions << seed << ',' << v << ',' << truth[v] << ',' << result.predicted[v] << ','
                            << int(is_labeled[v]) << '\n';
            }
        }
        if (opts.report) {
            append_csv(*opts.report, kSslColumns,
                       {r.dataset, r.method, std::to_string(count), std::to_string(seed), format_number(acc),
                        format_number(r.seconds)});
            append_jsonl(jsonl_path(*opts.report), r.to_json());
        }
        outcome.runs.push_back(std::move(r));
    }

    std::vector<double> accs;
    for (const auto& r : outcome.runs) accs.push_back(r.metrics["accuracy"].get<double>());
    outcome.mean_accuracy = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
    const auto [lo, hi] = std::minmax_element(accs.begin(), accs.end());
    outcome.spread = *hi - *lo;
    return outcome;
}

namespace {

struct RecoveryFlags {
    std::string method = "wecure";
    double lambda = 1.0;
    std::optional<double> gamma;
    double cg_tol = 1e-6;
    std::optional<Index> cg_max_iters;
    Index knn_sigma = 20;
    Index knn_trunc = 50;
};

void add_recovery_flags(CLI::App* cmd, RecoveryFlags& f) {
    cmd->add_option("--method", f.method, "ldmm, wnll, cure or wecure")
        ->check(CLI::IsMember({"ldmm", "wnll", "cure", "wecure"}, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "Curvature weight")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--gamma", f.gamma, "Labeled-term weight (default |P|/|S|)")->check(CLI::PositiveNumber);
    cmd->add_option("--cg-tol", f.cg_tol, "Relative CG residual")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cg-max-iters", f.cg_max_iters, "CG iteration cap (default 10 |U|)")->check(CLI::PositiveNumber);
    cmd->add_option("--knn-sigma", f.knn_sigma, "Neighbour rank that sets the bandwidth")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--knn-trunc", f.knn_trunc, "Neighbours kept per vertex")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph-based data recovery: inpainting and semi-supervised classification", "wecure"};
    app.require_subcommand(1);

    InpaintOptions ip;
    RecoveryFlags ipr;
    Index patch = 11;
    std::string mask_path;
    auto* inp = app.add_subcommand("inpaint", "Restore a subsampled grayscale image");
    inp->add_option("--image", ip.image, "Ground-truth image (PGM or PNG)")->required()->check(CLI::ExistingFile);
    auto* mask_opt = inp->add_option("--mask", mask_path, "Mask image, nonzero = observed")->check(CLI::ExistingFile);
    inp->add_option("--sample-rate", ip.sample_rate, "Fraction of pixels observed when no mask is given")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(mask_opt)
        ->capture_default_str();
    inp->add_option("--seed", ip.seed, "Seed for the mask and the initial fill")->capture_default_str();
    add_recovery_flags(inp, ipr);
    inp->add_option("--patch-size", patch, "Odd patch side")->capture_default_str();
    inp->add_option("--outer-iters", ip.config.outer_iters, "Total outer iterations")->capture_default_str();
    inp->add_option("--warm-start-iters", ip.config.warm_start_iters, "Leading WNLL iterations")->capture_default_str();
    inp->add_option("--rel-change-tol", ip.config.rel_change_tol, "Early stop on relative change (0 = off)")
        ->capture_default_str();
    inp->add_option("--out", ip.out, "Restored image (.png or PGM)");
    inp->add_option("--mask-out", ip.mask_out, "Write the mask that was used");
    inp->add_option("--report", ip.report, "CSV table to append to; a .jsonl sibling gets the full report");
    inp->add_flag("-v,--verbose", ip.verbose, "Log each outer iteration");

    SslOptions sp;
    RecoveryFlags spr;
    auto* ssl = app.add_subcommand("ssl", "Semi-supervised classification of a point cloud");
    ssl->add_option("--data", sp.data, "IDX image file or CSV point cloud")->required()->check(CLI::ExistingFile);
    ssl->add_option("--labels", sp.labels, "IDX label file (for IDX data)")->check(CLI::ExistingFile);
    ssl->add_option("--label-column", sp.label_column, "0-based label column (for CSV data)");
    ssl->add_flag("--header", sp.header, "CSV has a header line");
    auto* per_run = ssl->add_option("--labels-per-run", sp.labels_per_run, "Number of labeled points")
                        ->check(CLI::PositiveNumber);
    auto* rate = ssl->add_option("--label-rate", sp.label_rate, "Fraction of points labeled")
                     ->check(CLI::Range(0.0, 1.0));
    per_run->excludes(rate);
    ssl->add_option("--seed", sp.seed, "Seed of the first split")->capture_default_str();
    ssl->add_option("--repeats", sp.repeats, "Splits, seeded seed, seed+1, ...")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_recovery_flags(ssl, spr);
    ssl->add_option("--out", sp.out, "Per-point predictions CSV");
    ssl->add_option("--report", sp.report, "CSV table to append to; a .jsonl sibling gets the full report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*inp) {
            if (!mask_path.empty()) ip.mask = mask_path;
            ip.config.patch_h = ip.config.patch_w = patch;
            ip.config.graph = {ipr.knn_sigma, ipr.knn_trunc};
            ip.config.method = parse_method(ipr.method);
            ip.config.lambda = ipr.lambda;
            ip.config.gamma = ipr.gamma;
            ip.config.cg_tol = ipr.cg_tol;
            ip.config.cg_max_iters = ipr.cg_max_iters;
            const InpaintOutcome o = run_inpaint(ip, err);
            out << o.report.to_json().dump() << '\n';
        } else {
            if (!sp.labels_per_run && !sp.label_rate) throw InvalidArgument("one of --labels-per-run or --label-rate is required");
            sp.params.graph = {spr.knn_sigma, spr.knn_trunc};
            sp.params.recovery.method = parse_method(spr.method);
            sp.params.recovery.lambda = spr.lambda;
            sp.params.recovery.gamma = spr.gamma;
            sp.params.recovery.cg_tol = spr.cg_tol;
            sp.params.recovery.cg_max_iters = spr.cg_max_iters;
            const SslOutcome o = run_ssl(sp, err);
            nlohmann::ordered_json summary;
            summary["command"] = "ssl";
            summary["method"] = std::string(to_string(sp.params.recovery.method));
            summary["repeats"] = sp.repeats;
            summary["mean_accuracy"] = o.mean_accuracy;
            summary["spread"] = o.spread;
            summary["runs"] = nlohmann::ordered_json::array();
            for (const auto& r : o.runs) summary["runs"].push_back(r.to_json());
            out << summary.dump() << '\n';
        }
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

}  // namespace wecure::cli
