#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "stochexp/acceptance.hpp"
#include "stochexp/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;

int run(const std::string& path, std::optional<std::uint64_t> seed,
        std::optional<std::string> out, std::optional<unsigned> workers) {
    stochexp::ExperimentConfig config;
    try {
        config = stochexp::ExperimentConfig::load(path);
        if (seed) config.seed = *seed;
        if (out) config.output = *out;
        if (workers) config.workers = *workers;
        return stochexp::run_experiment(config, std::cout);
    } catch (const stochexp::ConfigError& e) {
        std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const stochexp::NoFiniteSamples& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        return kExitUnstable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int selftest(unsigned workers) {
    stochexp::AcceptanceOptions options;
    options.workers = workers;
    const auto dir = std::filesystem::temp_directory_path() / "stochexp_selftest";
    options.scratch_dir = dir.string();
    const auto outcomes = stochexp::run_acceptance(std::cout, options);
    std::size_t failed = 0;
    for (const auto& o : outcomes) failed += o.passed ? 0 : 1;
    std::cout << outcomes.size() - failed << '/' << outcomes.size() << " criteria passed\n";
    std::error_code ignored;
    std::filesystem::remove_all(dir, ignored);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo toolkit for stochastic exponentials and their integrability criteria"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "key=value config file")->required();
    run_cmd->add_option("--seed", seed, "override the master seed");
    run_cmd->add_option("--out", out, "override the CSV output path");
    run_cmd->add_option("--workers", workers, "worker threads (results do not depend on it)");

    app.add_subcommand("list", "List processes, criteria, stopping rules and function syntax");

    unsigned selftest_workers = std::max(1u, std::thread::hardware_concurrency());
    auto* selftest_cmd = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest_cmd->add_option("--workers", selftest_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*run_cmd) return run(config_path, seed, out, workers);
    if (*selftest_cmd) return selftest(selftest_workers);
    std::cout << stochexp::list_catalog();
    return 0;
}
