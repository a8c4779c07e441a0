#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wecure/inpaint.hpp"
#include "wecure/ssl.hpp"

namespace wecure::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

struct InpaintOptions {
    std::filesystem::path image;
    std::optional<std::filesystem::path> mask;
    double sample_rate = 0.2;  // used when no mask file is given
    std::uint64_t seed = 0;
    InpaintConfig config;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> mask_out;
    std::optional<std::filesystem::path> report;
    bool verbose = false;
};

struct SslOptions {
    std::filesystem::path data;
    std::optional<std::filesystem::path> labels;  // IDX label file
    std::optional<Index> label_column;            // CSV label column
    bool header = false;
    std::optional<Index> labels_per_run;
    std::optional<double> label_rate;
    std::uint64_t seed = 0;
    Index repeats = 1;
    SslParams params;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> report;
};

/// One row of a results table plus the configuration needed to rerun it.
struct RunReport {
    std::string command;
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    nlohmann::ordered_json metrics;
    nlohmann::ordered_json config;
    double seconds = 0.0;

    nlohmann::ordered_json to_json() const;
};

inline const std::vector<std::string> kInpaintColumns{"image", "method", "rate", "seed", "psnr_db", "ssim", "seconds"};
inline const std::vector<std::string> kSslColumns{"dataset", "method", "labels", "seed", "accuracy", "seconds"};

/// Appends one row, writing the header first when the file is new or empty.
void append_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                const std::vector<std::string>& row);
/// Appends the report as one JSON line.
void append_jsonl(const std::filesystem::path& path, const nlohmann::ordered_json& value);

std::string format_number(double v);

struct InpaintOutcome {
    GrayImage restored;
    Mask mask;
    RunReport report;
};
InpaintOutcome run_inpaint(const InpaintOptions& opts, std::ostream& log);

struct SslOutcome {
    std::vector<RunReport> runs;  // one per repeat, ascending seed
    double mean_accuracy = 0.0;
    double spread = 0.0;          // max - min over repeats
};
SslOutcome run_ssl(const SslOptions& opts, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wecure::cli
