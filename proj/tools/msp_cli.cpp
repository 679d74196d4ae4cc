// msp: command-line front end for the multi-solution GP toolkit.
//
//   msp run    --technique mep --problem f2 --mode multi --length 12 --pop 50 --seed 1
//   msp sweep  --technique lgp --problem f1 --param length --values 4,8,12 --runs 100
//   msp paper  mep-exp1 --out-dir results
//   msp plot   --csv results/figure1.csv --out-dir results
//
// Options can also come from --config FILE (key = value lines, [section]
// headers per subcommand, or a JSON object). Flags override the file.

#include <msp/harness.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

// Accepts the usual TOML/INI layout, or a JSON object whose nested objects
// name subcommands.
class JsonOrIniConfig : public CLI::ConfigTOML
{
public:
    std::vector<CLI::ConfigItem> from_config(std::istream &input) const override
    {
        std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream again(text);
            return CLI::ConfigTOML::from_config(again);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception &e) {
            throw CLI::ConversionError("config", e.what());
        }
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const nlohmann::json &v)
    {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    static void flatten(const nlohmann::json &obj, std::vector<std::string> parents, std::vector<CLI::ConfigItem> &out)
    {
        for (const auto &[key, value] : obj.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                flatten(value, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto &e : value) {
                    item.inputs.push_back(scalar(e));
                }
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

std::string default_out_dir()
{
    const char *env = std::getenv("MSP_OUTPUT_DIR");
    return env && *env ? env : ".";
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

const std::vector<std::string> techniques{"mep", "lgp", "ifgp"};
const std::vector<std::string> problems{"f1", "f2", "f3", "f4"};
const std::vector<std::string> modes{"multi", "single"};

struct EvoFlags {
    std::size_t length = 20;
    std::size_t population = 50;
    std::size_t generations = msp::default_generations;
    double crossover = msp::default_crossover_probability;
    std::size_t mutations = msp::default_mutations;

    void add(CLI::App &cmd)
    {
        cmd.add_option("--length", length, "Chromosome length: genes (MEP), instructions (LGP), symbols (IFGP)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--pop,--population", population, "Population size")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--generations", generations, "Number of generations")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--crossover", crossover, "Crossover probability")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd.add_option("--mutations", mutations, "Mutations per chromosome")->capture_default_str();
    }

    msp::EvolutionConfig config(msp::TechniqueId t, msp::FitnessMode mode) const
    {
        msp::EvolutionConfig cfg;
        cfg.technique = t;
        cfg.mode = mode;
        cfg.length = length;
        cfg.population_size = population;
        cfg.generations = generations;
        cfg.crossover_probability = crossover;
        cfg.mutations = mutations;
        return cfg;
    }
};

// An existing file, or empty for "not given" (so the echoed configuration
// can be fed back through --config).
const CLI::Validator optional_file(
    [](std::string &path) { return path.empty() ? std::string{} : CLI::ExistingFile(path); }, "FILE");

// The effective configuration as key=value lines, limited to the global options
// and the chosen subcommand. Empty values are left out so the text reads back
// through --config unchanged.
std::string effective_config(const CLI::App &app, const CLI::App &chosen)
{
    std::istringstream all(app.config_to_str(true, false));
    const std::string prefix = chosen.get_name() + ".";
    std::string out, line;
    while (std::getline(all, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.substr(eq + 1) == "\"\"") {
            continue;
        }
        const bool global = line.find('.') > eq;
        if (global || line.rfind(prefix, 0) == 0) {
            out += line + "\n";
        }
    }
    return out;
}

void print_report(const msp::ExperimentReport &report)
{
    std::cout << msp::emit_csv(report);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multi-solution genetic programming: MEP, LGP and IFGP with success-rate experiments"};
    app.config_formatter(std::make_shared<JsonOrIniConfig>());
    app.set_config("--config", "", "Read options from a key = value or JSON file");
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = default_out_dir();
    app.add_option("--out-dir", out_dir, "Output directory (env MSP_OUTPUT_DIR)")->capture_default_str();
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Do not echo the effective configuration");

    // run
    auto *run = app.add_subcommand("run", "Execute one evolution run");
    std::string run_technique = "mep", run_problem = "f2", run_mode = "multi", run_dataset, run_log;
    std::uint64_t run_seed = 1;
    EvoFlags run_flags;
    run->add_option("--technique", run_technique, "mep | lgp | ifgp")
        ->check(CLI::IsMember(techniques))
        ->capture_default_str();
    run->add_option("--problem", run_problem, "f1 | f2 | f3 | f4")->check(CLI::IsMember(problems))->capture_default_str();
    run->add_option("--mode", run_mode, "multi | single")->check(CLI::IsMember(modes))->capture_default_str();
    run->add_option("--seed", run_seed, "Random seed")->capture_default_str();
    run->add_option("--dataset", run_dataset, "CSV of fitness cases (x,target) replacing the sampled problem")
        ->check(optional_file);
    run->add_option("--log", run_log, "JSON run-log path (default: <out-dir>/run_<technique>_<problem>_<mode>_s<seed>.json)");
    run_flags.add(*run);

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Success rate over a swept parameter, multi and single variants");
    std::string sw_technique = "mep", sw_param = "length", sw_dataset, sw_name = "sweep", sw_runlog;
    std::vector<std::string> sw_problems{"f1", "f2", "f3", "f4"};
    std::vector<std::size_t> sw_values;
    std::size_t sw_runs = 100, sw_jobs = 0;
    std::uint64_t sw_seed = 1;
    EvoFlags sw_flags;
    sweep->add_option("--technique", sw_technique, "mep | lgp | ifgp")
        ->check(CLI::IsMember(techniques))
        ->capture_default_str();
    sweep->add_option("--problem", sw_problems, "Problems to run")
        ->check(CLI::IsMember(problems))
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--param", sw_param, "length | population")
        ->check(CLI::IsMember({"length", "population"}))
        ->capture_default_str();
    sweep->add_option("--values", sw_values, "Strictly increasing swept values")
        ->delimiter(',')
        ->required()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--runs", sw_runs, "Runs per point")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--seed", sw_seed, "Base seed; run i uses seed + i")->capture_default_str();
    sweep->add_option("--jobs", sw_jobs, "Worker threads (0 = all cores)")->capture_default_str();
    sweep->add_option("--dataset", sw_dataset, "CSV of fitness cases used for every run")->check(optional_file);
    sweep->add_option("--name", sw_name, "Output file stem")->capture_default_str();
    sweep->add_option("--runlog", sw_runlog, "Write one JSON line per run to this file");
    sw_flags.add(*sweep);

    // paper
    auto *paper = app.add_subcommand("paper", "Reproduce a preset experiment (CSV + one SVG per problem)");
    std::string paper_id, paper_runlog;
    std::size_t paper_jobs = 0, paper_runs = 100;
    std::uint64_t paper_seed = 1;
    paper->add_option("experiment", paper_id, "mep-exp1 | mep-exp2 | lgp-exp1 | lgp-exp2 | ifgp-exp1 | ifgp-exp2")
        ->required()
        ->check(CLI::IsMember(msp::paper_experiment_ids()));
    paper->add_option("--seed", paper_seed, "Base seed")->capture_default_str();
    paper->add_option("--jobs", paper_jobs, "Worker threads (0 = all cores)")->capture_default_str();
    paper->add_option("--runs", paper_runs, "Runs per point")->check(CLI::PositiveNumber)->capture_default_str();
    paper->add_option("--runlog", paper_runlog, "Write one JSON line per run to this file");

    // plot
    auto *plot = app.add_subcommand("plot", "Render SVG plots from a report CSV");
    std::string plot_csv, plot_title = "Success rate", plot_name;
    plot->add_option("--csv", plot_csv, "Report CSV")->required()->check(optional_file);
    plot->add_option("--title", plot_title, "Plot title")->capture_default_str();
    plot->add_option("--name", plot_name, "Output file stem (default: CSV file stem)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    if (!quiet) {
        std::cout << "# effective configuration\n" << effective_config(app, *app.get_subcommands().front()) << "# end configuration\n";
    }

    try {
        if (*run) {
            const auto technique = msp::parse_technique(run_technique);
            const auto mode = msp::parse_mode(run_mode);
            auto cfg = run_flags.config(technique, mode);
            msp::validate(cfg);
            msp::RandomSource rng(run_seed);
            const auto cases = run_dataset.empty() ? msp::make_problem(msp::parse_problem(run_problem), rng)
                                                   : msp::read_dataset_file(run_dataset);
            const auto result = msp::run_evolution(cfg, cases, rng);

            msp::RunLog log{msp::variant_name(technique, mode), run_dataset.empty() ? run_problem : "dataset",
                            "length", cfg.length, 0, result};
            auto j = nlohmann::json::parse(msp::to_json_line(log));
            j["technique"] = run_technique;
            j["mode"] = run_mode;
            j["population"] = cfg.population_size;
            j["generations"] = cfg.generations;
            j["crossover_probability"] = cfg.crossover_probability;
            j["mutations"] = cfg.mutations;
            j["best_per_generation"] = nlohmann::json::array();
            for (double v : result.best_per_generation) {
                j["best_per_generation"].push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
            }
            const auto path = run_log.empty() ? std::filesystem::path(out_dir)
                                                    / ("run_" + run_technique + "_" + run_problem + "_" + run_mode
                                                       + "_s" + std::to_string(run_seed) + ".json")
                                              : std::filesystem::path(run_log);
            write_text(path, j.dump(2) + "\n");

            char fitness[64];
            std::snprintf(fitness, sizeof fitness, "%.10g", result.best_fitness);
            std::cout << "variant: " << log.variant << "\n"
                      << "final fitness: " << fitness << "\n"
                      << "success: " << (result.success ? "true" : "false") << "\n"
                      << "evaluations: " << result.evaluations << "\n"
                      << "best expression: " << result.best_expression << "\n"
                      << "run log: " << path.string() << "\n";
            return 0;
        }

        auto run_and_write = [&](const msp::SweepSpec &spec, const std::string &stem, const std::string &title,
                                 const std::string &runlog_path) {
            std::ofstream runlog;
            if (!runlog_path.empty()) {
                const std::filesystem::path p(runlog_path);
                if (p.has_parent_path()) {
                    std::filesystem::create_directories(p.parent_path());
                }
                runlog.open(p, std::ios::binary);
                if (!runlog) {
                    throw std::runtime_error("cannot write '" + runlog_path + "'");
                }
            }
            const auto report = msp::run_sweep(spec, [&](const msp::RunLog &l) {
                if (runlog) {
                    runlog << msp::to_json_line(l) << '\n';
                }
            });
            const auto files = msp::write_report_files(report, out_dir, stem, title);
            print_report(report);
            std::cout << "config hash: " << report.meta.config_hash << "\n"
                      << "timestamp: " << report.meta.timestamp << "\n"
                      << "wrote " << files.csv << "\n";
            for (const auto &s : files.svgs) {
                std::cout << "wrote " << s << "\n";
            }
        };

        if (*sweep) {
            msp::SweepSpec spec;
            spec.technique = msp::parse_technique(sw_technique);
            spec.problems.clear();
            for (const auto &p : sw_problems) {
                spec.problems.push_back(msp::parse_problem(p));
            }
            if (!sw_dataset.empty()) {
                spec.dataset = msp::read_dataset_file(sw_dataset);
            }
            spec.param = msp::parse_swept_param(sw_param);
            spec.values = sw_values;
            spec.fixed = sw_flags.config(spec.technique, msp::FitnessMode::multi);
            spec.runs = sw_runs;
            spec.base_seed = sw_seed;
            spec.jobs = sw_jobs;
            run_and_write(spec, sw_name, "Success rate", sw_runlog);
            return 0;
        }

        if (*paper) {
            auto exp = msp::paper_experiment(paper_id);
            exp.spec.base_seed = paper_seed;
            exp.spec.jobs = paper_jobs;
            exp.spec.runs = paper_runs;
            run_and_write(exp.spec, exp.figure, exp.caption, paper_runlog);
            return 0;
        }

        if (*plot) {
            std::ifstream in(plot_csv, std::ios::binary);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            msp::ExperimentReport report;
            report.points = msp::parse_csv(text);
            const auto stem = plot_name.empty() ? std::filesystem::path(plot_csv).stem().string() : plot_name;
            for (const auto &[problem, svg] : msp::emit_plots(report, plot_title)) {
                const auto path = std::filesystem::path(out_dir) / (stem + "_" + problem + ".svg");
                write_text(path, svg);
                std::cout << "wrote " << path.string() << "\n";
            }
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
