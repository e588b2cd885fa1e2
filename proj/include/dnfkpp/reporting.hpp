#pragma once

#include "dnfkpp/critical.hpp"
#include "dnfkpp/dispersion.hpp"
#include "dnfkpp/kernels.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dnfkpp::report {

using json = nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

struct FamilyRange {
    double h_min = 0.0;
    double h_max = 0.0;
};

struct BranchConfig {
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    double delta = 0.0;
    int order = 16;
    double tol = 1e-12;
    int max_iter = 60;
};

struct StabilityConfig {
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    int order = 16;
};

struct EvolveConfig {
    double eps = 1e-3;
    int order = 16;
    double t_max = 1e5;
    std::optional<double> dt;
    std::string initial = "pattern-perturbation";
    double amplitude = 1e-3;
    std::string file;
    double tol = 1e-9;
};

struct LimitConfig {
    std::vector<double> sigma{0.2, 0.1, 0.05, 0.025};
};

struct UniquenessConfig {
    std::optional<double> period;
};

struct SweepConfig {
    std::vector<double> m;
    std::vector<double> h;
};

/// Parsed and validated experiment description. `canonical` is the config
/// re-serialized with sorted keys; its SHA-256 goes into the manifest.
struct ExperimentConfig {
    double kappa_plus = 1.0;
    double kappa_minus = 1.0;
    double m = 0.5;
    Kernel plus;
    Kernel minus;
    std::optional<FamilyRange> family;
    BranchConfig branch;
    StabilityConfig stability;
    EvolveConfig evolve;
    LimitConfig limit;
    UniquenessConfig uniqueness;
    SweepConfig sweep;
    std::uint64_t seed = 0;
    std::string canonical;

    ModelParams params() const { return ModelParams(kappa_plus, kappa_minus, m); }
    KernelPair kernels() const { return KernelPair{plus, minus}; }
    /// Shift family through the minus kernel; Config error without one.
    KernelFamily kernel_family() const;
};

/// Throws Error(Config, "<field path>: <reason>") on any schema violation.
/// Relative kernel-table paths resolve against `base_dir`.
ExperimentConfig parse_config(const json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string sha256_hex(const std::string& data);

/// Comma-separated table with a header row.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(const std::vector<double>& row);
    void add_text(std::vector<std::string> row);
    std::string csv() const;
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct SweepRow {
    double m = 0.0;
    double h = 0.0;
    double sup_alpha = 0.0;
    double argmax = 0.0;
    double omega = 0.0;
};

/// sup α(0,·) over the (m, h) grid on `threads` workers, sorted by (m, h).
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads);
Table sweep_table(const std::vector<SweepRow>& rows);

struct RunOptions {
    std::string subcommand;
    std::string out_dir = "out";
    int threads = 1;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    std::optional<double> t_max;
    std::optional<double> dt;
    std::optional<std::string> initial;
    std::optional<std::string> initial_file;
};

/// Runs one subcommand, writes its artifacts and manifest.json under out_dir.
/// Returns 0 on success and 3 on solver failure; configuration problems are
/// reported by parse_config and map to 2.
int run(const ExperimentConfig& cfg, const RunOptions& opt);

} // namespace dnfkpp::report
