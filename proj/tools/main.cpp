#include "lwp/error.hpp"
#include "lwp/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renewal and linearwise Markov process simulator and verifier"};
    app.require_subcommand(1);

    lwp::RunOptions opts;
    std::uint64_t seed = 0;
    std::size_t replicas = 0;
    double grid_step = 0.0;
    std::string out_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the scenario seed");
        cmd->add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--replicas", replicas, "override the replica count")->check(CLI::PositiveNumber);
        cmd->add_option("--grid-step", grid_step, "override the renewal grid step")->check(CLI::PositiveNumber);
    };

    std::string file;
    auto* run = app.add_subcommand("run", "run one scenario file");
    run->add_option("file", file, "scenario YAML file")->required();
    add_common(run);
    out_dir = "out";
    run->add_option("--out-dir", out_dir, "directory for reports")->capture_default_str();

    auto* verify = app.add_subcommand("verify-all", "run every bundled scenario and print the verdict matrix");
    add_common(verify);
    verify->add_option("--out-dir", out_dir, "directory for reports (none when omitted)");
    std::string dir = LWP_SCENARIO_DIR;
    verify->add_option("--scenario-dir", dir, "directory of scenarios to verify");

    auto* list = app.add_subcommand("list-scenarios", "list the bundled scenarios");
    list->add_option("--scenario-dir", dir, "directory of scenarios to list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    auto apply = [&](CLI::App* cmd) {
        if (cmd->count("--seed")) opts.seed = seed;
        if (cmd->count("--replicas")) opts.replicas = replicas;
        if (cmd->count("--grid-step")) opts.grid_step = grid_step;
    };

    try {
        if (*run) {
            apply(run);
            opts.out_dir = out_dir;
            lwp::Scenario sc;
            try {
                sc = lwp::load_scenario(file);
            } catch (const lwp::Error& e) {
                std::cerr << e.what() << '\n';
                return kUsage;
            }
            const lwp::RunResult res = lwp::run_scenario(sc, opts);
            lwp::print_result(res, std::cout);
            return res.passed() ? kPass : kFail;
        }
        if (*verify) {
            apply(verify);
            if (verify->count("--out-dir")) opts.out_dir = out_dir;
            const lwp::VerifySummary summary = lwp::verify_all(opts, dir);
            if (summary.rows.empty()) {
                std::cerr << "no scenarios found in " << dir << '\n';
                return kUsage;
            }
            lwp::print_matrix(summary, std::cout);
            return summary.passed() ? kPass : kFail;
        }
        if (*list) {
            for (const auto& path : lwp::bundled_scenarios(dir)) {
                try {
                    const lwp::Scenario sc = lwp::load_scenario(path);
                    std::cout << sc.name << "  " << lwp::to_string(sc.mode) << "  criteria:";
                    for (int c : sc.criteria) std::cout << ' ' << c;
                    std::cout << "  " << path.string() << '\n';
                } catch (const lwp::Error& e) {
                    std::cout << path.filename().string() << "  INVALID  " << e.what() << '\n';
                }
            }
            return kPass;
        }
    } catch (const lwp::Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == lwp::ErrorCode::InvalidArgument ? kUsage : kFail;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
