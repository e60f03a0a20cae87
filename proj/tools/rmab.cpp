// rmab: discount bounds, greedy-vs-optimal comparison, grid sweeps and
// reward-assumption checks from the command line.

#include <iostream>

#include <CLI11.hpp>

#include "rmab/cli.hpp"

namespace {

void add_model_options(CLI::App* cmd, rmab::cli::ModelArgs& m) {
    cmd->add_option("--p01", m.p01, "P(good | previously bad)")->required();
    cmd->add_option("--p11", m.p11, "P(good | previously good)")->required();
    cmd->add_option("--n", m.n, "number of channels")->required();
    cmd->add_option("--k", m.k, "channels sensed per slot")->required();
    cmd->add_option("--reward", m.reward, "or | and | sum | path to a reward-spec JSON file");
    cmd->add_option("--a", m.a, "per-channel weight of the sum reward");
    cmd->add_option("--box", m.box, "belief box lo,hi for the derivative bounds (default p01,p11)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greedy sensing policy analysis for positively correlated Gilbert-Elliott channels"};
    app.require_subcommand(1);

    rmab::cli::BoundArgs bound;
    auto* bound_cmd = app.add_subcommand("bound", "print F'min, F'max and the discount-factor bound");
    add_model_options(bound_cmd, bound);
    bound_cmd->add_option("--beta", bound.beta, "also report the verdict for this discount factor");

    rmab::cli::CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "greedy vs optimal value on one instance");
    add_model_options(compare_cmd, compare);
    compare_cmd->add_option("--beta", compare.beta, "discount factor in [0,1]");
    compare_cmd->add_option("--horizon", compare.horizon, "number of slots T");
    compare_cmd->add_option("--initial", compare.initial, "comma-separated beliefs or 'stationary'");
    compare_cmd->add_option("--out", compare.out_dir, "directory for compare.csv");

    rmab::cli::SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "counterexample search and structural checks over a grid");
    sweep_cmd->add_option("--grid", sweep.grid_path, "grid JSON file")->required();
    sweep_cmd->add_option("--out", sweep.out_dir, "directory for cells.csv, gaps.csv, summary.json");
    sweep_cmd->add_option("--seed", sweep.seed, "override the grid seed");
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = hardware concurrency)");

    rmab::cli::CheckRewardArgs check;
    auto* check_cmd = app.add_subcommand("check-reward", "test symmetry, affineness and monotonicity of a reward");
    check_cmd->add_option("--spec", check.spec_path, "reward-spec JSON file")->required();
    check_cmd->add_option("--samples", check.samples, "random points per check");
    check_cmd->add_option("--seed", check.seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rmab::cli::kInputError;
    }

    if (*bound_cmd) return rmab::cli::cmd_bound(bound, std::cout, std::cerr);
    if (*compare_cmd) return rmab::cli::cmd_compare(compare, std::cout, std::cerr);
    if (*sweep_cmd) return rmab::cli::cmd_sweep(sweep, std::cout, std::cerr);
    return rmab::cli::cmd_check_reward(check, std::cout, std::cerr);
}
