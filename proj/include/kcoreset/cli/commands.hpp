#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kcoreset/bicriteria.hpp"
#include "kcoreset/coreset.hpp"
#include "kcoreset/coreset_json.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/io.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/pipeline.hpp"
#include "kcoreset/solvers.hpp"
#include "kcoreset/streaming.hpp"
#include "kcoreset/synthetic.hpp"

namespace kcoreset::cli {

inline constexpr const char* kTool = "kcoreset";
inline constexpr const char* kVersion = "0.1.0";

/// Bad or missing flags (exit code 1).
class UsageError : public InputError {
  public:
    using InputError::InputError;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kValidation = 3, kViolation = 4 };

struct RunConfig {
    std::string command;
    std::string input;
    std::string metric_matrix;
    std::size_t k = 3;
    double z = 1.0;
    double eps = 0.2;
    double delta = 0.1;
    std::optional<std::size_t> t;
    double c = 1.0;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool strict = false;
    std::size_t queries = 200;
    std::string query_file;
    std::string coreset;
    std::string type = "static";
    std::string method = "coreset";
    std::string profile = "desk";
    std::vector<std::size_t> n_list;
    std::vector<std::size_t> k_list;
    std::vector<double> eps_list;
    std::string csv;
    std::size_t dim = 2;
    std::size_t block_size = 0;
    std::size_t checkpoint_every = 0;
    std::string report;  // replay only

    bool needs_seed() const {
        if (command == "solve") {
            return method != "brute";
        }
        if (command == "verify") {
            return query_file.empty();
        }
        return command != "replay";
    }

    void validate() const {
        static const std::vector<std::string> commands = {"build-coreset", "bicriteria", "solve", "verify", "stream", "bench", "replay"};
        if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
            throw UsageError("unknown command '" + command + "'");
        }
        if (needs_seed() && !seed) {
            throw UsageError(command + " is randomized: --seed is required");
        }
        auto in_open = [](double v) { return v > 0.0 && v < 1.0; };
        auto range = [](bool ok, const std::string& what) {
            if (!ok) {
                throw InputError(what);
            }
        };
        range(in_open(eps), "--eps must lie in (0,1)");
        range(in_open(delta), "--delta must lie in (0,1)");
        range(k >= 1, "--k must be at least 1");
        range(z >= 1.0 && std::isfinite(z), "--z must be >= 1");
        range(c > 0.0 && std::isfinite(c), "--c must be positive");
        range(!t || *t >= 1, "--t must be at least 1");
        range(queries >= 1 || !query_file.empty(), "--queries must be at least 1");
        for (double e : eps_list) {
            range(in_open(e), "--eps-list values must lie in (0,1)");
        }
        for (std::size_t v : n_list) {
            range(v >= 1, "--n-list values must be positive");
        }
        for (std::size_t v : k_list) {
            range(v >= 1, "--k-list values must be positive");
        }
        if (type != "static" && type != "threshold") throw UsageError("--type must be static or threshold");
        if (method != "brute" && method != "local" && method != "constant-factor" && method != "coreset") {
            throw UsageError("--method must be brute, local, constant-factor or coreset");
        }
        if (profile != "desk" && profile != "literal") throw UsageError("--bicriteria-profile must be desk or literal");
        if (!input.empty() && !metric_matrix.empty()) throw UsageError("give either --input or --metric-matrix, not both");
        const bool needs_data = command == "build-coreset" || command == "bicriteria" || command == "solve" || command == "verify";
        if (needs_data && input.empty() && metric_matrix.empty()) throw UsageError(command + " needs --input or --metric-matrix");
        if ((command == "build-coreset" || command == "verify") && coreset.empty()) throw UsageError(command + " needs --coreset");
        if (command == "stream" && !metric_matrix.empty()) throw UsageError("stream reads Euclidean points only");
        if (command == "replay" && report.empty()) throw UsageError("replay needs --report");
    }

    BicriteriaProfile bicriteria_profile() const { return profile == "literal" ? BicriteriaProfile::literal() : BicriteriaProfile::desk(); }

    CoresetConfig coreset_config() const {
        CoresetConfig cfg;
        cfg.k = k;
        cfg.eps = eps;
        cfg.delta = delta;
        cfg.power = Power{z};
        cfg.c = c;
        cfg.t = t;
        cfg.profile = bicriteria_profile();
        return cfg;
    }

    Seed run_seed() const { return Seed{seed.value_or(0)}; }
};

inline nlohmann::json to_json(const RunConfig& c) {
    auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"command", c.command},
            {"input", c.input},
            {"metric_matrix", c.metric_matrix},
            {"k", c.k},
            {"z", c.z},
            {"eps", c.eps},
            {"delta", c.delta},
            {"t", opt(c.t)},
            {"c", c.c},
            {"seed", opt(c.seed)},
            {"out", c.out},
            {"strict", c.strict},
            {"queries", c.queries},
            {"query_file", c.query_file},
            {"coreset", c.coreset},
            {"type", c.type},
            {"method", c.method},
            {"bicriteria_profile", c.profile},
            {"n_list", c.n_list},
            {"k_list", c.k_list},
            {"eps_list", c.eps_list},
            {"csv", c.csv},
            {"dim", c.dim},
            {"block_size", c.block_size},
            {"checkpoint_every", c.checkpoint_every},
            {"report", c.report}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    try {
        RunConfig c;
        c.command = j.at("command").get<std::string>();
        c.input = j.at("input").get<std::string>();
        c.metric_matrix = j.at("metric_matrix").get<std::string>();
        c.k = j.at("k").get<std::size_t>();
        c.z = j.at("z").get<double>();
        c.eps = j.at("eps").get<double>();
        c.delta = j.at("delta").get<double>();
        if (!j.at("t").is_null()) c.t = j.at("t").get<std::size_t>();
        c.c = j.at("c").get<double>();
        if (!j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        c.out = j.at("out").get<std::string>();
        c.strict = j.at("strict").get<bool>();
        c.queries = j.at("queries").get<std::size_t>();
        c.query_file = j.at("query_file").get<std::string>();
        c.coreset = j.at("coreset").get<std::string>();
        c.type = j.at("type").get<std::string>();
        c.method = j.at("method").get<std::string>();
        c.profile = j.at("bicriteria_profile").get<std::string>();
        c.n_list = j.at("n_list").get<std::vector<std::size_t>>();
        c.k_list = j.at("k_list").get<std::vector<std::size_t>>();
        c.eps_list = j.at("eps_list").get<std::vector<double>>();
        c.csv = j.at("csv").get<std::string>();
        c.dim = j.at("dim").get<std::size_t>();
        c.block_size = j.at("block_size").get<std::size_t>();
        c.checkpoint_every = j.at("checkpoint_every").get<std::size_t>();
        c.report = j.value("report", std::string{});
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report has no usable config: ") + e.what());
    }
}

struct Report {
    std::string command;
    nlohmann::json config;
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();
    int exit_code = kOk;
};

inline nlohmann::json to_json(const Report& r) {
    return {{"tool", kTool}, {"version", kVersion}, {"command", r.command}, {"config", r.config}, {"results", r.results}, {"timings", r.timings}};
}

/// Milliseconds spent in each named stage.
class StageTimer {
  public:
    explicit StageTimer(nlohmann::json& sink) : sink_(sink) {}

    template <class Fn>
    decltype(auto) run(const std::string& stage, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            decltype(auto) value = fn();
            record(stage, start);
            return value;
        }
    }

  private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        sink_[stage + "_ms"] = ms;
    }

    nlohmann::json& sink_;
};

namespace detail {

inline nlohmann::json point_json(const Coords& p) { return p; }
inline nlohmann::json point_json(std::size_t p) { return p; }

template <class Point>
nlohmann::json points_json(const std::vector<Point>& pts) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : pts) {
        out.push_back(point_json(p));
    }
    return out;
}

template <class Space>
struct Data {
    Space space;
    PointSet<PointOf<Space>> points;
    std::string fingerprint;
    std::size_t dim = 0;
};

inline Data<EuclideanSpace> load_euclidean(const std::string& path) {
    auto pts = load_points(path);
    const std::size_t dim = pts.front().size();
    Data<EuclideanSpace> d{EuclideanSpace(dim), PointSet<Coords>{}, fingerprint(pts), dim};
    d.points = PointSet<Coords>(std::move(pts));
    return d;
}

inline Data<MatrixSpace> load_metric(const std::string& path, Seed seed) {
    auto space = load_matrix(path);
    const auto check = space.validate(seed);
    if (!check.ok) {
        throw ValidationError("metric matrix " + path + ": " + check.violation);
    }
    Data<MatrixSpace> d{space, all_items(space), fingerprint(space), space.size()};
    return d;
}

/// Calls fn(Data<Space>&) with the loaded data set.
template <class Fn>
decltype(auto) with_data(const RunConfig& config, Fn&& fn) {
    if (!config.metric_matrix.empty()) {
        auto data = load_metric(config.metric_matrix, config.run_seed());
        return fn(data);
    }
    auto data = load_euclidean(config.input);
    return fn(data);
}

template <class Point>
Point point_from_json(const nlohmann::json& j);

template <>
inline Coords point_from_json<Coords>(const nlohmann::json& j) {
    return j.get<Coords>();
}

template <>
inline std::size_t point_from_json<std::size_t>(const nlohmann::json& j) {
    return j.get<std::size_t>();
}

/// One {"centers": [...]} object per line.
template <class Space>
std::vector<CenterSet<Space>> load_query_file(const Space& space, const std::string& path) {
    auto in = open_input(path);
    std::vector<CenterSet<Space>> queries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        CenterSet<Space> x;
        try {
            const auto parsed = nlohmann::json::parse(line);
            for (const auto& c : parsed.at("centers")) {
                x.push_back(point_from_json<PointOf<Space>>(c));
            }
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (x.empty()) {
            throw InputError(path + ":" + std::to_string(line_no) + ": empty center set");
        }
        for (const auto& p : x) {
            space.check_point(p);
        }
        queries.push_back(std::move(x));
    }
    if (queries.empty()) {
        throw IoError("no queries in " + path);
    }
    return queries;
}

template <class Space>
std::vector<CenterSet<Space>> queries_for(const RunConfig& config, const Data<Space>& data, Power power, nlohmann::json& results) {
    if (!config.query_file.empty()) {
        results["query_source"] = "file";
        return load_query_file(data.space, config.query_file);
    }
    auto queries = random_queries(data.points, config.k, config.queries, derive_seed(config.run_seed(), 21));
    const auto hard = optimum_queries(data.space, data.points, config.k, power, derive_seed(config.run_seed(), 22));
    queries.insert(queries.end(), hard.queries.begin(), hard.queries.end());
    results["query_source"] = "random+optimum";
    results["optimum_exact"] = hard.exact_optimum;
    results["optimum_cost"] = hard.optimum_cost;
    return queries;
}

inline std::string text_fingerprint(const std::string& text) {
    Fingerprint fp;
    fp.add(text.data(), text.size());
    return fp.hex();
}

struct BuildOutcome {
    nlohmann::json results;
    std::string file_text;
};

template <class Space>
BuildOutcome build_coreset_file(const RunConfig& config, const Data<Space>& data, StageTimer& timer) {
    using Point = PointOf<Space>;
    const auto cfg = config.coreset_config();
    const Seed seed = config.run_seed();
    nlohmann::json r;
    CoresetFile<Point> file;
    file.dim = data.dim;
    file.provenance.seed = seed;
    file.provenance.input_fingerprint = data.fingerprint;
    file.provenance.params = {{"k", cfg.k}, {"z", cfg.power.z}, {"eps", cfg.eps}, {"delta", cfg.delta}, {"c", cfg.c},
                              {"t", config.t ? nlohmann::json(*config.t) : nlohmann::json(nullptr)},
                              {"bicriteria_profile", config.profile}, {"type", config.type}};
    r["n"] = data.points.size();
    r["dim"] = data.dim;
    if (config.type == "static") {
        const auto built = timer.run("build", [&] { return build_strong_coreset(data.space, data.points, cfg, seed); });
        const auto& C = built.coreset;
        file.provenance.bicriteria_cost = built.bicriteria_cost;
        file.coreset = C;
        std::size_t negatives = 0;
        for (double w : C.points.weights) {
            negatives += w < 0.0 ? 1 : 0;
        }
        r["coreset_type"] = "static";
        r["size"] = C.points.size();
        r["draws"] = C.draws;
        r["centers"] = C.centers;
        r["t"] = built.t;
        r["inflation_eps"] = built.inflation_eps;
        r["weight_sum"] = C.points.total_weight();
        r["expected_weight_sum"] = C.expected_weight_sum;
        r["weight_sum_ok"] = weight_sum_holds(C);
        r["min_weight"] = min_weight(C);
        r["negative_weights"] = negatives;
        r["nonnegativity_t"] = nonnegativity_sample_size(C.centers, std::max(built.inflation_eps, 1e-12), cfg.delta, cfg.c);
        r["bicriteria_cost"] = built.bicriteria_cost;
        r["calibrated_c"] = cfg.c;
        r["degenerate"] = C.degenerate;
        if (config.strict && !weight_sum_holds(C)) {
            throw GuaranteeViolation("weight sum " + std::to_string(C.points.total_weight()) + " differs from " +
                                     std::to_string(C.expected_weight_sum));
        }
    } else {
        const auto bic = timer.run("bicriteria", [&] {
            return metric_kmedian_bicriteria(data.space, data.points, cfg.k, cfg.eps, cfg.delta, derive_seed(seed, 11), cfg.profile, cfg.power);
        });
        const std::size_t t = coreset_sample_size(data.space, data.points.size(), cfg);
        const auto T = timer.run("build", [&] {
            return metric_b_coreset(data.space, data.points, std::span<const Point>(bic.B), t, cfg.eps, cfg.power, derive_seed(seed, 12));
        });
        file.provenance.bicriteria_cost = bic.total_cost;
        file.coreset = T;
        std::size_t projected = 0;
        for (const auto& p : T.projected) {
            projected += p.thresholds.size();
        }
        r["coreset_type"] = "threshold";
        r["sampled"] = T.sampled.size();
        r["projected_entries"] = projected;
        r["centers"] = T.B.size();
        r["t"] = t;
        r["bicriteria_cost"] = bic.total_cost;
        r["calibrated_c"] = cfg.c;
        r["degenerate"] = T.degenerate;
    }
    BuildOutcome out;
    out.file_text = to_json(file).dump(1) + "\n";
    r["coreset_fingerprint"] = text_fingerprint(out.file_text);
    out.results = std::move(r);
    return out;
}

template <class Space>
nlohmann::json verify_coreset(const RunConfig& config, const Data<Space>& data, const CoresetFile<PointOf<Space>>& file,
                              StageTimer& timer) {
    nlohmann::json r;
    const Power power = std::visit([](const auto& C) { return C.power; }, file.coreset);
    const auto queries = timer.run("queries", [&] { return queries_for(config, data, power, r); });
    const auto report = timer.run("verify", [&] {
        return std::visit([&](const auto& C) { return verify_strong_coreset(data.space, data.points, C, queries, config.eps); }, file.coreset);
    });
    r["queries"] = queries.size();
    r["eps"] = config.eps;
    r["max_relative_error"] = real_or_null(report.max_discrepancy);
    r["argmax_query"] = report.argmax_x;
    r["argmax_query_centers"] = points_json(queries[report.argmax_x]);
    r["pass"] = report.pass;
    return r;
}

}  // namespace detail

inline Report cmd_build_coreset(const RunConfig& config) {
    Report report{config.command, to_json(config)};
    StageTimer timer(report.timings);
    auto outcome = detail::with_data(config, [&](auto& data) { return detail::build_coreset_file(config, data, timer); });
    write_file_atomic(config.coreset, outcome.file_text);
    report.results = std::move(outcome.results);
    return report;
}

inline Report cmd_verify(const RunConfig& config) {
    Report report{config.command, to_json(config)};
    StageTimer timer(report.timings);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(read_file(config.coreset));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(config.coreset + ": " + e.what());
    }
    report.results = detail::with_data(config, [&](auto& data) {
        using Point = PointOf<std::decay_t<decltype(data.space)>>;
        const auto file = coreset_from_json<Point>(parsed);
        if (file.provenance.input_fingerprint != data.fingerprint) {
            throw ValidationError("coreset was built from different data (fingerprint " + file.provenance.input_fingerprint + ", input " +
                                  data.fingerprint + ")");
        }
        if (file.dim != data.dim) {
            throw ValidationError("coreset dimension does not match the input");
        }
        return detail::verify_coreset(config, data, file, timer);
    });
    if (config.strict && !report.results.at("pass").get<bool>()) {
        report.exit_code = kViolation;
    }
    return report;
}

inline Report cmd_bicriteria(const RunConfig& config) {
    Report report{config.command, to_json(config)};
    StageTimer timer(report.timings);
    report.results = detail::with_data(config, [&](auto& data) {
        const Power power{config.z};
        const auto bic = timer.run("bicriteria", [&] {
            return metric_kmedian_bicriteria(data.space, data.points, config.k, config.eps, config.delta, config.run_seed(),
                                             config.bicriteria_profile(), power);
        });
        nlohmann::json r;
        r["B"] = detail::points_json(bic.B);
        r["total_cost"] = bic.total_cost;
        r["alpha"] = bic.alpha;
        r["beta"] = bic.beta;
        r["size_bound"] = bic.size_bound;
        r["peel_rounds"] = bic.peel_rounds;
        r["eps_internal"] = bic.eps_internal;
        r["peel_threshold"] = bic.peel_threshold;
        nlohmann::json rounds = nlohmann::json::array();
        std::vector<char> seen(data.points.size(), 0);
        bool partition = true;
        for (const auto& round : bic.rounds) {
            for (std::size_t i : round.G) {
                partition = partition && !seen[i];
                seen[i] = 1;
            }
            rounds.push_back({{"G", round.G}, {"Y", detail::points_json(round.Y)}, {"terminal", round.terminal}});
        }
        partition = partition && std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
        r["rounds"] = std::move(rounds);
        r["partition_ok"] = partition;
        r["size_ok"] = bic.B.size() <= bic.size_bound;
        const double bound = (1.0 + config.eps) * bic.alpha;
        r["guarantee_factor"] = bound;
        if (combinations(data.points.size(), config.k) <= kMaxCombinations) {
            const auto opt = timer.run("oracle", [&] {
                return brute_force_k_median(data.space, data.points, config.k, std::span<const PointOf<std::decay_t<decltype(data.space)>>>(data.points.points), power);
            });
            r["opt_lower_bound"] = opt.cost;
            r["ratio"] = opt.cost > 0.0 ? nlohmann::json(bic.total_cost / opt.cost) : nlohmann::json(nullptr);
            r["guarantee_ok"] = leq_tol(bic.total_cost, bound * opt.cost);
        } else {
            r["opt_lower_bound"] = nullptr;
        }
        return r;
    });
    if (config.strict) {
        const bool ok = report.results["partition_ok"].get<bool>() && report.results["size_ok"].get<bool>() &&
                        report.results.value("guarantee_ok", true);
        if (!ok) {
            report.exit_code = kViolation;
        }
    }
    return report;
}

inline Report cmd_solve(const RunConfig& config) {
    Report report{config.command, to_json(config)};
    StageTimer timer(report.timings);
    report.results = detail::with_data(config, [&](auto& data) {
        using Space = std::decay_t<decltype(data.space)>;
        using Point = PointOf<Space>;
        const Power power{config.z};
        const std::span<const Point> candidates(data.points.points);
        nlohmann::json r;
        SolveResult<Space> result;
        if (config.method == "brute") {
            result = timer.run("solve", [&] { return brute_force_k_median(data.space, data.points, config.k, candidates, power); });
        } else if (config.method == "local") {
            result = timer.run("solve", [&] { return weighted_local_search(data.space, data.points, config.k, candidates, power, config.run_seed()); });
        } else if (config.method == "constant-factor") {
            result = timer.run("solve", [&] {
                return constant_factor_metric_kmedian(data.space, data.points, config.k, config.eps, config.delta, config.run_seed(),
                                                      config.bicriteria_profile(), power);
            });
        } else {
            const auto audit = timer.run("solve", [&] { return solve_on_coreset(data.space, data.points, config.coreset_config(), config.run_seed()); });
            result = audit.solution;
            r["audit"] = {{"coreset_cost", audit.coreset_cost},
                          {"true_cost", audit.true_cost},
                          {"coreset_size", audit.coreset.coreset.points.size()},
                          {"relative_gap", audit.true_cost > 0.0 ? std::abs(audit.coreset_cost - audit.true_cost) / audit.true_cost : 0.0}};
        }
        r["centers"] = detail::points_json(result.centers);
        r["cost"] = result.cost;
        r["method"] = to_string(result.method);
        r["evaluations"] = result.evaluations;
        r["swaps"] = result.swaps;
        return r;
    });
    return report;
}

inline std::vector<Coords> read_stream_line(const std::string& line, std::size_t line_no, std::size_t& dim) {
    const std::string text = kcoreset::detail::trim(line);
    if (text.empty() || text.front() == '#') {
        return {};
    }
    auto row = kcoreset::detail::parse_csv_row(text, line_no);
    if (dim == 0) {
        dim = row.size();
    } else if (row.size() != dim) {
        throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " columns");
    }
    return {std::move(row)};
}

/// Default block: max(64, eps-approximation size at the level-0 eps).
inline std::size_t default_block_size(const RunConfig& config, std::size_t dim) {
    StreamConfig sc;
    sc.eps = config.eps;
    SampleParams sp{sc.level_eps(0), config.delta, config.k * dim, config.c};
    return std::max<std::size_t>(64, eps_approx_sample_size(sp));
}

inline Report cmd_stream(const RunConfig& config, std::istream& stdin_stream) {
    Report report{config.command, to_json(config)};
    StageTimer timer(report.timings);
    std::ifstream file;
    std::istream* in = &stdin_stream;
    if (!config.input.empty() && config.input != "-") {
        file = open_input(config.input);
        in = &file;
    }
    std::optional<MergeReduceStream<EuclideanSpace>> stream;
    std::size_t dim = 0;
    std::size_t line_no = 0;
    std::size_t block = 0;
    std::size_t every = 0;
    nlohmann::json checkpoints = nlohmann::json::array();
    auto checkpoint = [&] {
        nlohmann::json levels = nlohmann::json::array();
        const auto occupancy = stream->occupancy();
        for (std::size_t l = 0; l < occupancy.size(); ++l) {
            if (occupancy[l]) {
                levels.push_back(l);
            }
        }
        checkpoints.push_back({{"points_seen", stream->points_seen()}, {"stored_points", stream->stored_points()}, {"bucket_levels", levels}});
    };
    std::string line;
    timer.run("stream", [&] {
        while (std::getline(*in, line)) {
            ++line_no;
            auto rows = read_stream_line(line, line_no, dim);
            if (rows.empty()) {
                continue;
            }
            if (!stream) {
                StreamConfig sc;
                sc.k = config.k;
                sc.eps = config.eps;
                sc.delta = config.delta;
                sc.power = Power{config.z};
                sc.profile = config.bicriteria_profile();
                block = config.block_size ? config.block_size : default_block_size(config, dim);
                sc.block_size = block;
                every = config.checkpoint_every ? config.checkpoint_every : block;
                stream.emplace(EuclideanSpace(dim), sc, config.run_seed());
            }
            stream->push(rows.front());
            if (stream->points_seen() % every == 0) {
                checkpoint();
            }
        }
    });
    if (!stream) {
        throw IoError("stream: no points read");
    }
    nlohmann::json r;
    r["block_size"] = block;
    r["points_seen"] = stream->points_seen();
    r["stored_points"] = stream->stored_points();
    r["level_bound"] = stream->level_bound();
    nlohmann::json levels = nlohmann::json::array();
    const auto occupancy = stream->occupancy();
    for (std::size_t l = 0; l < occupancy.size(); ++l) {
        if (occupancy[l]) {
            levels.push_back(l);
        }
    }
    r["bucket_levels"] = levels;
    r["stored_weight"] = stream->stored_weight();
    r["nominal_weight"] = stream->nominal_weight();
    r["weight_ok"] = std::abs(stream->stored_weight() - stream->nominal_weight()) <= 1e-9 * std::max(1.0, stream->nominal_weight());
    r["space_ok"] = stream->stored_points() <= block * (stream->level_bound() + 1);
    r["checkpoints"] = std::move(checkpoints);
    if (!config.query_file.empty()) {
        const auto queries = detail::load_query_file(EuclideanSpace(dim), config.query_file);
        nlohmann::json costs = nlohmann::json::array();
        for (const auto& x : queries) {
            costs.push_back(stream->query(std::span<const Coords>(x)));
        }
        r["query_costs"] = std::move(costs);
    }
    report.results = std::move(r);
    if (config.strict && !(report.results["weight_ok"].get<bool>() && report.results["space_ok"].get<bool>())) {
        report.exit_code = kViolation;
    }
    return report;
}

/// Sweeps n x k x eps. Each cell is build-coreset followed by verify on the
/// same seed, over synthetic Gaussian mixtures (or prefixes of --input).
inline Report cmd_bench(const RunConfig& config) {
    Report report{config.command, to_json(config)};
    const auto n_list = config.n_list.empty() ? std::vector<std::size_t>{1000} : config.n_list;
    const auto k_list = config.k_list.empty() ? std::vector<std::size_t>{config.k} : config.k_list;
    const auto eps_list = config.eps_list.empty() ? std::vector<double>{config.eps} : config.eps_list;
    std::optional<std::vector<Coords>> loaded;
    if (!config.input.empty()) {
        loaded = load_points(config.input);
    }
    nlohmann::json cells = nlohmann::json::array();
    nlohmann::json cell_times = nlohmann::json::array();
    std::ostringstream csv;
    csv << "n,k,eps,size,max_relative_error,pass,build_ms,verify_ms\n";
    std::size_t index = 0;
    for (std::size_t n : n_list) {
        for (std::size_t k : k_list) {
            for (double eps : eps_list) {
                RunConfig cell = config;
                cell.k = k;
                cell.eps = eps;
                cell.validate();
                std::vector<Coords> pts;
                if (loaded) {
                    require(n <= loaded->size(), "bench: n exceeds the input size");
                    pts.assign(loaded->begin(), loaded->begin() + static_cast<std::ptrdiff_t>(n));
                } else {
                    pts = gaussian_mixture(n, config.dim, k, 10.0, derive_seed(config.run_seed(), 1000 + index));
                }
                detail::Data<EuclideanSpace> data{EuclideanSpace(pts.front().size()), PointSet<Coords>{}, fingerprint(pts), pts.front().size()};
                data.points = PointSet<Coords>(std::move(pts));
                nlohmann::json times = nlohmann::json::object();
                StageTimer timer(times);
                const auto built = detail::build_coreset_file(cell, data, timer);
                const auto file = coreset_from_json<Coords>(nlohmann::json::parse(built.file_text));
                const auto verified = detail::verify_coreset(cell, data, file, timer);
                nlohmann::json row = {{"n", n}, {"k", k}, {"eps", eps}, {"build", built.results}, {"verify", verified}};
                csv << n << ',' << k << ',' << eps << ',' << built.results.value("size", built.results.value("sampled", 0)) << ','
                    << verified["max_relative_error"].dump() << ',' << (verified["pass"].get<bool>() ? "true" : "false") << ','
                    << times.value("build_ms", 0.0) << ',' << times.value("verify_ms", 0.0) << '\n';
                cells.push_back(std::move(row));
                cell_times.push_back(std::move(times));
                ++index;
            }
        }
    }
    report.results["cells"] = std::move(cells);
    report.results["grid_size"] = index;
    report.timings["cells"] = std::move(cell_times);
    if (!config.csv.empty()) {
        write_file_atomic(config.csv, csv.str());
    }
    return report;
}

inline Report run_command(const RunConfig& config, std::istream& stdin_stream);

/// Re-runs the config echoed in a report and compares every non-timing
/// result field. Files the original run wrote are redirected to a temporary
/// directory so the originals are never overwritten.
inline Report cmd_replay(const RunConfig& config, std::istream& stdin_stream) {
    Report report{config.command, to_json(config)};
    nlohmann::json original;
    try {
        original = nlohmann::json::parse(read_file(config.report));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(config.report + ": " + e.what());
    }
    RunConfig again = config_from_json(original.at("config"));
    const auto scratch = std::filesystem::temp_directory_path() /
                         ("kcoreset-replay-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(scratch);
    if (again.command == "build-coreset") {
        again.coreset = (scratch / "coreset.json").string();
    }
    if (!again.csv.empty()) {
        again.csv = (scratch / "bench.csv").string();
    }
    again.out.clear();
    std::optional<Report> rerun;
    try {
        rerun = run_command(again, stdin_stream);
    } catch (...) {
        std::filesystem::remove_all(scratch);
        throw;
    }
    std::filesystem::remove_all(scratch);
    const auto& before = original.at("results");
    const auto& after = rerun->results;
    nlohmann::json differences = nlohmann::json::array();
    for (const auto& item : before.items()) {
        if (!after.contains(item.key()) || after.at(item.key()).dump() != item.value().dump()) {
            differences.push_back(item.key());
        }
    }
    for (const auto& item : after.items()) {
        if (!before.contains(item.key())) {
            differences.push_back(item.key());
        }
    }
    report.results = {{"replayed_command", again.command}, {"identical", differences.empty()}, {"differences", differences}};
    if (!differences.empty()) {
        report.exit_code = kViolation;
    }
    return report;
}

inline Report run_command(const RunConfig& config, std::istream& stdin_stream) {
    config.validate();
    if (config.command == "build-coreset") return cmd_build_coreset(config);
    if (config.command == "verify") return cmd_verify(config);
    if (config.command == "bicriteria") return cmd_bicriteria(config);
    if (config.command == "solve") return cmd_solve(config);
    if (config.command == "stream") return cmd_stream(config, stdin_stream);
    if (config.command == "bench") return cmd_bench(config);
    return cmd_replay(config, stdin_stream);
}

/// Runs a command, writes its report (atomically to --out, else stdout) and
/// returns the process exit code. Errors go to `err`.
inline int execute(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
    try {
        const Report report = run_command(config, in);
        const std::string text = to_json(report).dump(2) + "\n";
        if (config.out.empty()) {
            out << text;
        } else {
            write_file_atomic(config.out, text);
        }
        if (report.exit_code == kViolation) {
            err << "guarantee violated; see the report\n";
        }
        return report.exit_code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const GuaranteeViolation& e) {
        err << "guarantee violated: " << e.what() << '\n';
        return kViolation;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace kcoreset::cli
