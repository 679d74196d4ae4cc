#pragma once

// Success-rate experiments: sweep one parameter, run each point many times
// for the multi- and single-solution variant, count the runs whose best
// fitness falls below the success threshold.

#include <msp/engine.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace msp
{

enum class SweptParam { length, population };

std::string_view to_string(SweptParam p) noexcept;
SweptParam parse_swept_param(std::string_view name);

struct SweepSpec {
    TechniqueId technique = TechniqueId::mep;
    std::vector<FitnessMode> modes{FitnessMode::multi, FitnessMode::single};
    std::vector<ProblemId> problems{ProblemId::f1};
    // When set, every run uses these cases instead of sampling a problem; the
    // problem column then reads "dataset".
    std::optional<FitnessCaseSet> dataset;
    SweptParam param = SweptParam::length;
    std::vector<std::size_t> values;
    // Everything except technique, mode and the swept field.
    EvolutionConfig fixed;
    std::size_t runs = 100;
    std::uint64_t base_seed = 1;
    // Worker threads; 0 picks the hardware concurrency.
    std::size_t jobs = 1;
};

// Throws std::invalid_argument: empty or non-increasing values, runs == 0,
// no modes or problems, or a config the engine would reject.
void validate(const SweepSpec &spec);

struct ReportPoint {
    std::string variant;
    std::string problem;
    std::string param;
    std::size_t value = 0;
    std::size_t successes = 0;
    std::size_t runs = 0;

    double success_rate() const noexcept { return runs ? static_cast<double>(successes) / runs : 0.0; }
    bool operator==(const ReportPoint &) const = default;
};

struct ReportMetadata {
    std::uint64_t base_seed = 0;
    std::size_t runs = 0;
    std::string config_hash;
    std::string timestamp;
};

struct ExperimentReport {
    std::vector<ReportPoint> points;
    ReportMetadata meta;
};

// One line of the per-run log.
struct RunLog {
    std::string variant;
    std::string problem;
    std::string param;
    std::size_t value = 0;
    std::size_t run = 0;
    RunResult result;
};

std::string to_json_line(const RunLog &log);

// Stable text of the spec (used for the config hash).
std::string describe(const SweepSpec &spec);
std::string config_hash(const SweepSpec &spec);

// Run i of every point uses seed base_seed + i. The result does not depend on
// `jobs` or on execution order. `on_run` (optional) receives every run log in
// a fixed order after all runs finish.
ExperimentReport run_sweep(const SweepSpec &spec, const std::function<void(const RunLog &)> &on_run = {});

// Points sorted by (variant, problem, value).
std::vector<ReportPoint> sorted_points(std::vector<ReportPoint> points);

// Header `variant,problem,param,value,successes,runs,success_rate`, rates
// with four decimals.
std::string emit_csv(const ExperimentReport &report);
// Throws std::invalid_argument on a malformed document.
std::vector<ReportPoint> parse_csv(const std::string &text);

// SVG of every variant's success rate for one problem. Throws
// std::invalid_argument when the problem has no points.
std::string emit_plot(const ExperimentReport &report, const std::string &problem, const std::string &title);
// problem -> SVG for every problem in the report.
std::map<std::string, std::string> emit_plots(const ExperimentReport &report, const std::string &title);

struct PaperExperiment {
    std::string id;        // e.g. "mep-exp1"
    std::string figure;    // file stem, e.g. "figure1"
    std::string caption;
    SweepSpec spec;
};

std::vector<std::string> paper_experiment_ids();
// Throws std::invalid_argument for an unknown id.
PaperExperiment paper_experiment(std::string_view id);

struct WrittenFiles {
    std::string csv;
    std::vector<std::string> svgs;
};

// Writes <stem>.csv and <stem>_<problem>.svg into `dir` (created if needed).
WrittenFiles write_report_files(const ExperimentReport &report, const std::string &dir, const std::string &stem,
                                const std::string &title);

} // namespace msp
