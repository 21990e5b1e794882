#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kcoreset/cli/commands.hpp"

namespace {

using kcoreset::cli::RunConfig;

void add_problem_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--k", c.k, "number of centers")->capture_default_str();
    cmd->add_option("--z", c.z, "distance power (1 = k-median)")->capture_default_str();
    cmd->add_option("--eps", c.eps, "target error")->capture_default_str();
    cmd->add_option("--delta", c.delta, "failure probability")->capture_default_str();
    cmd->add_option("--seed", c.seed, "64-bit run seed");
    cmd->add_option("--bicriteria-profile", c.profile, "desk or literal")->capture_default_str();
    cmd->add_option("--out", c.out, "report path (default stdout)");
    cmd->add_flag("--strict", c.strict, "exit 4 when a checked guarantee fails");
}

void add_data_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--input", c.input, "points as CSV or JSONL");
    cmd->add_option("--metric-matrix", c.metric_matrix, "explicit n x n distance matrix (CSV)");
}

void add_size_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--t", c.t, "sample size override");
    cmd->add_option("--c", c.c, "sample-size constant")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kcoreset: coresets for k-median and k-means style clustering"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kcoreset::cli::kVersion);
    RunConfig c;

    auto* build = app.add_subcommand("build-coreset", "build a coreset and write it to --coreset");
    add_data_flags(build, c);
    add_problem_flags(build, c);
    add_size_flags(build, c);
    build->add_option("--coreset", c.coreset, "coreset output path")->required();
    build->add_option("--type", c.type, "static or threshold")->capture_default_str();

    auto* bic = app.add_subcommand("bicriteria", "run the bicriteria approximation");
    add_data_flags(bic, c);
    add_problem_flags(bic, c);

    auto* solve = app.add_subcommand("solve", "solve k-median");
    add_data_flags(solve, c);
    add_problem_flags(solve, c);
    add_size_flags(solve, c);
    solve->add_option("--method", c.method, "brute, local, constant-factor or coreset")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "check a coreset against its data");
    add_data_flags(verify, c);
    add_problem_flags(verify, c);
    verify->add_option("--coreset", c.coreset, "coreset file")->required();
    verify->add_option("--queries", c.queries, "random center sets")->capture_default_str();
    verify->add_option("--query-file", c.query_file, "JSONL of {\"centers\": [...]}");

    auto* stream = app.add_subcommand("stream", "merge-and-reduce over CSV points from stdin");
    stream->add_option("--input", c.input, "read points from a file instead of stdin");
    add_problem_flags(stream, c);
    stream->add_option("--c", c.c, "sample-size constant for the default block")->capture_default_str();
    stream->add_option("--block-size", c.block_size, "points per block (default from eps)");
    stream->add_option("--checkpoint-every", c.checkpoint_every, "points between checkpoints (default one block)");
    stream->add_option("--query-file", c.query_file, "JSONL of {\"centers\": [...]}");

    auto* bench = app.add_subcommand("bench", "sweep n x k x eps");
    bench->add_option("--input", c.input, "take prefixes of this data instead of synthetic mixtures");
    add_problem_flags(bench, c);
    add_size_flags(bench, c);
    bench->add_option("--n-list", c.n_list, "sizes")->delimiter(',');
    bench->add_option("--k-list", c.k_list, "center counts")->delimiter(',');
    bench->add_option("--eps-list", c.eps_list, "errors")->delimiter(',');
    bench->add_option("--dim", c.dim, "synthetic dimension")->capture_default_str();
    bench->add_option("--queries", c.queries, "random center sets per cell")->capture_default_str();
    bench->add_option("--type", c.type, "static or threshold")->capture_default_str();
    bench->add_option("--csv", c.csv, "CSV output path");

    auto* replay = app.add_subcommand("replay", "re-run a report and compare results");
    replay->add_option("--report", c.report, "report to replay")->required();
    replay->add_option("--out", c.out, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kcoreset::cli::kUsage;
    }
    c.command = app.get_subcommands().front()->get_name();
    return kcoreset::cli::execute(c, std::cin, std::cout, std::cerr);
}
