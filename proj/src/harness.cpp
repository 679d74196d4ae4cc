#include <msp/harness.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace msp
{

namespace
{

std::string fmt(const char *format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Job {
    FitnessMode mode;
    std::size_t problem;
    std::size_t value;
    std::size_t run;
};

std::vector<std::string> split(const std::string &line, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::size_t parse_count(const std::string &s, std::size_t lineno)
{
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad integer '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

const char *const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string xml_escape(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

} // namespace

std::string_view to_string(SweptParam p) noexcept
{
    return p == SweptParam::length ? "length" : "population";
}

SweptParam parse_swept_param(std::string_view name)
{
    if (name == "length") {
        return SweptParam::length;
    }
    if (name == "population" || name == "pop") {
        return SweptParam::population;
    }
    throw std::invalid_argument("unknown swept parameter '" + std::string(name) + "'");
}

void validate(const SweepSpec &spec)
{
    if (spec.values.empty()) {
        throw std::invalid_argument("sweep has no values");
    }
    for (std::size_t i = 1; i < spec.values.size(); ++i) {
        if (spec.values[i] <= spec.values[i - 1]) {
            throw std::invalid_argument("swept values must be strictly increasing");
        }
    }
    if (spec.runs == 0) {
        throw std::invalid_argument("runs per point must be positive");
    }
    if (spec.modes.empty()) {
        throw std::invalid_argument("sweep has no variants");
    }
    if (spec.problems.empty() && !spec.dataset) {
        throw std::invalid_argument("sweep has no problems");
    }
    for (auto v : spec.values) {
        auto cfg = spec.fixed;
        cfg.technique = spec.technique;
        (spec.param == SweptParam::length ? cfg.length : cfg.population_size) = v;
        validate(cfg);
    }
}

std::string describe(const SweepSpec &spec)
{
    std::ostringstream os;
    os << "technique=" << to_string(spec.technique) << ";modes=";
    for (auto m : spec.modes) {
        os << to_string(m) << ',';
    }
    os << ";problems=";
    if (spec.dataset) {
        std::ostringstream ds;
        write_dataset(ds, *spec.dataset);
        os << "dataset:" << fnv1a(ds.str());
    } else {
        for (auto p : spec.problems) {
            os << to_string(p) << ',';
        }
    }
    os << ";param=" << to_string(spec.param) << ";values=";
    for (auto v : spec.values) {
        os << v << ',';
    }
    const auto &c = spec.fixed;
    os << ";population=" << c.population_size << ";generations=" << c.generations
       << ";crossover=" << fmt("%.17g", c.crossover_probability) << ";mutations=" << c.mutations
       << ";length=" << c.length << ";runs=" << spec.runs << ";base_seed=" << spec.base_seed;
    return os.str();
}

std::string config_hash(const SweepSpec &spec)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(describe(spec))));
    return buf;
}

std::string to_json_line(const RunLog &log)
{
    auto finite_or_null = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    nlohmann::json j;
    j["variant"] = log.variant;
    j["problem"] = log.problem;
    j["param"] = log.param;
    j["value"] = log.value;
    j["run"] = log.run;
    j["seed"] = log.result.seed;
    j["final_fitness"] = finite_or_null(log.result.best_fitness);
    j["success"] = log.result.success;
    j["evaluations"] = log.result.evaluations;
    j["best_expression"] = log.result.best_expression;
    return j.dump();
}

ExperimentReport run_sweep(const SweepSpec &spec, const std::function<void(const RunLog &)> &on_run)
{
    validate(spec);

    std::vector<std::string> problem_names;
    if (spec.dataset) {
        problem_names.emplace_back("dataset");
    } else {
        for (auto p : spec.problems) {
            problem_names.emplace_back(to_string(p));
        }
    }

    std::vector<Job> jobs;
    for (auto mode : spec.modes) {
        for (std::size_t p = 0; p < problem_names.size(); ++p) {
            for (std::size_t v = 0; v < spec.values.size(); ++v) {
                for (std::size_t r = 0; r < spec.runs; ++r) {
                    jobs.push_back({mode, p, v, r});
                }
            }
        }
    }

    std::vector<RunResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            const auto &job = jobs[i];
            try {
                auto cfg = spec.fixed;
                cfg.technique = spec.technique;
                cfg.mode = job.mode;
                (spec.param == SweptParam::length ? cfg.length : cfg.population_size) = spec.values[job.value];
                RandomSource rng(spec.base_seed + job.run);
                const auto cases = spec.dataset ? *spec.dataset : make_problem(spec.problems[job.problem], rng);
                results[i] = run_evolution(cfg, cases, rng);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };

    auto threads = spec.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.jobs;
    threads = std::min<std::size_t>(threads, jobs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ExperimentReport report;
    report.meta = {spec.base_seed, spec.runs, config_hash(spec), utc_timestamp()};
    const std::string param(to_string(spec.param));
    std::map<std::tuple<FitnessMode, std::size_t, std::size_t>, std::size_t> successes;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto &job = jobs[i];
        successes[{job.mode, job.problem, job.value}] += results[i].success ? 1 : 0;
        if (on_run) {
            on_run({variant_name(spec.technique, job.mode), problem_names[job.problem], param,
                    spec.values[job.value], job.run, results[i]});
        }
    }
    for (auto mode : spec.modes) {
        for (std::size_t p = 0; p < problem_names.size(); ++p) {
            for (std::size_t v = 0; v < spec.values.size(); ++v) {
                report.points.push_back({variant_name(spec.technique, mode), problem_names[p], param, spec.values[v],
                                         successes[{mode, p, v}], spec.runs});
            }
        }
    }
    report.points = sorted_points(std::move(report.points));
    return report;
}

std::vector<ReportPoint> sorted_points(std::vector<ReportPoint> points)
{
    std::stable_sort(points.begin(), points.end(), [](const ReportPoint &a, const ReportPoint &b) {
        return std::tie(a.variant, a.problem, a.value) < std::tie(b.variant, b.problem, b.value);
    });
    return points;
}

std::string emit_csv(const ExperimentReport &report)
{
    std::string out = "variant,problem,param,value,successes,runs,success_rate\n";
    for (const auto &p : sorted_points(report.points)) {
        out += p.variant + ',' + p.problem + ',' + p.param + ',' + std::to_string(p.value) + ','
               + std::to_string(p.successes) + ',' + std::to_string(p.runs) + ',' + fmt("%.4f", p.success_rate())
               + '\n';
    }
    return out;
}

std::vector<ReportPoint> parse_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "variant,problem,param,value,successes,runs,success_rate") {
        throw std::invalid_argument("csv: unexpected header");
    }
    std::vector<ReportPoint> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 7) {
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 7 columns");
        }
        ReportPoint p{cells[0], cells[1], cells[2], parse_count(cells[3], lineno), parse_count(cells[4], lineno),
                      parse_count(cells[5], lineno)};
        if (p.successes > p.runs) {
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": more successes than runs");
        }
        if (cells[6] != fmt("%.4f", p.success_rate())) {
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": success rate does not match counts");
        }
        points.push_back(std::move(p));
    }
    return points;
}

std::string emit_plot(const ExperimentReport &report, const std::string &problem, const std::string &title)
{
    std::vector<ReportPoint> pts;
    for (const auto &p : sorted_points(report.points)) {
        if (p.problem == problem) {
            pts.push_back(p);
        }
    }
    if (pts.empty()) {
        throw std::invalid_argument("no points to plot for problem '" + problem + "'");
    }
    std::vector<std::string> variants;
    for (const auto &p : pts) {
        if (std::find(variants.begin(), variants.end(), p.variant) == variants.end()) {
            variants.push_back(p.variant);
        }
    }

    constexpr double width = 640, height = 420;
    constexpr double left = 70, right = 150, top = 50, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    auto [min_it, max_it] = std::minmax_element(pts.begin(), pts.end(),
                                                [](const auto &a, const auto &b) { return a.value < b.value; });
    double x_lo = static_cast<double>(min_it->value);
    double x_hi = static_cast<double>(max_it->value);
    if (x_hi == x_lo) {
        x_lo -= 1;
        x_hi += 1;
    }
    auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double rate) { return top + (1.0 - rate) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(title + " (" + problem + ")") << "</text>\n";

    for (int g = 0; g <= 4; ++g) {
        const double rate = g / 4.0;
        const auto y = fmt("%.2f", py(rate));
        svg << "<line class=\"grid\" x1=\"" << fmt("%.2f", left) << "\" y1=\"" << y << "\" x2=\""
            << fmt("%.2f", left + plot_w) << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << fmt("%.2f", left - 8) << "\" y=\"" << y << "\" text-anchor=\"end\" dy=\"4\">"
            << fmt("%.2f", rate) << "</text>\n";
    }
    std::set<std::size_t> ticks;
    for (const auto &p : pts) {
        ticks.insert(p.value);
    }
    for (auto t : ticks) {
        const auto x = fmt("%.2f", px(static_cast<double>(t)));
        svg << "<text x=\"" << x << "\" y=\"" << fmt("%.2f", top + plot_h + 18) << "\" text-anchor=\"middle\">" << t
            << "</text>\n";
    }
    svg << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top + plot_h) << "\" x2=\""
        << fmt("%.2f", left + plot_w) << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top) << "\" x2=\"" << fmt("%.2f", left)
        << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\" stroke=\"black\"/>\n";
    const std::string x_label = pts.front().param == "population" ? "population size" : "chromosome length";
    svg << "<text x=\"" << fmt("%.2f", left + plot_w / 2) << "\" y=\"" << fmt("%.2f", height - 16)
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt("%.2f", top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt("%.2f", top + plot_h / 2) << ")\">success rate</text>\n";

    for (std::size_t s = 0; s < variants.size(); ++s) {
        const char *color = palette[s % std::size(palette)];
        std::string coords;
        std::string markers;
        for (const auto &p : pts) {
            if (p.variant != variants[s]) {
                continue;
            }
            const auto x = fmt("%.2f", px(static_cast<double>(p.value)));
            const auto y = fmt("%.2f", py(p.success_rate()));
            coords += (coords.empty() ? "" : " ") + x + "," + y;
            markers += "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        svg << "<polyline class=\"series\" data-variant=\"" << xml_escape(variants[s]) << "\" fill=\"none\" stroke=\""
            << color << "\" stroke-width=\"2\" points=\"" << coords << "\"/>\n"
            << markers;
        const double ly = top + 10 + 20.0 * static_cast<double>(s);
        svg << "<line class=\"legend\" x1=\"" << fmt("%.2f", left + plot_w + 15) << "\" y1=\"" << fmt("%.2f", ly)
            << "\" x2=\"" << fmt("%.2f", left + plot_w + 40) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt("%.2f", left + plot_w + 45) << "\" y=\"" << fmt("%.2f", ly) << "\" dy=\"4\">"
            << xml_escape(variants[s]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::map<std::string, std::string> emit_plots(const ExperimentReport &report, const std::string &title)
{
    std::map<std::string, std::string> out;
    for (const auto &p : report.points) {
        if (!out.contains(p.problem)) {
            out[p.problem] = emit_plot(report, p.problem, title);
        }
    }
    return out;
}

std::vector<std::string> paper_experiment_ids()
{
    return {"mep-exp1", "mep-exp2", "lgp-exp1", "lgp-exp2", "ifgp-exp1", "ifgp-exp2"};
}

PaperExperiment paper_experiment(std::string_view id)
{
    auto range = [](std::size_t from, std::size_t to, std::size_t step) {
        std::vector<std::size_t> v;
        for (auto x = from; x <= to; x += step) {
            v.push_back(x);
        }
        return v;
    };
    const std::string length_caption = "Success rate vs. chromosome length";
    const std::string population_caption = "Success rate vs. population size";

    PaperExperiment e;
    e.id = std::string(id);
    e.spec.problems = {all_problems.begin(), all_problems.end()};
    e.spec.runs = 100;
    e.spec.fixed = EvolutionConfig{};

    auto exp1 = [&](TechniqueId t, std::vector<std::size_t> lengths, const char *figure) {
        e.spec.technique = t;
        e.spec.param = SweptParam::length;
        e.spec.values = std::move(lengths);
        e.spec.fixed.population_size = 50;
        e.figure = figure;
        e.caption = length_caption;
    };
    auto exp2 = [&](TechniqueId t, std::size_t length, const char *figure) {
        e.spec.technique = t;
        e.spec.param = SweptParam::population;
        e.spec.values = range(10, 100, 10);
        e.spec.fixed.length = length;
        e.figure = figure;
        e.caption = population_caption;
    };

    if (id == "mep-exp1") {
        exp1(TechniqueId::mep, range(4, 40, 4), "figure1");
    } else if (id == "mep-exp2") {
        exp2(TechniqueId::mep, 10, "figure2");
    } else if (id == "lgp-exp1") {
        exp1(TechniqueId::lgp, range(4, 40, 4), "figure3");
    } else if (id == "lgp-exp2") {
        exp2(TechniqueId::lgp, 12, "figure4");
    } else if (id == "ifgp-exp1") {
        exp1(TechniqueId::ifgp, range(10, 60, 10), "figure6");
    } else if (id == "ifgp-exp2") {
        exp2(TechniqueId::ifgp, 30, "figure7");
    } else {
        throw std::invalid_argument("unknown experiment '" + std::string(id) + "'");
    }
    return e;
}

WrittenFiles write_report_files(const ExperimentReport &report, const std::string &dir, const std::string &stem,
                                const std::string &title)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [](const fs::path &path, const std::string &content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        out << content;
    };
    WrittenFiles files;
    const auto csv_path = fs::path(dir) / (stem + ".csv");
    write(csv_path, emit_csv(report));
    files.csv = csv_path.string();
    for (const auto &[problem, svg] : emit_plots(report, title)) {
        const auto path = fs::path(dir) / (stem + "_" + problem + ".svg");
        write(path, svg);
        files.svgs.push_back(path.string());
    }
    return files;
}

} // namespace msp
