#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spotter/harness.h"

namespace {

std::vector<int> parse_int_list(const std::string &text, const std::string &flag) {
    std::vector<int> out;
    std::string current;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            if (current.empty())
                throw spotter::harness::UsageError(flag + ": empty list entry");
            out.push_back(std::stoi(current));
            current.clear();
        } else {
            current += text[i];
        }
    }
    return out;
}

std::pair<double, double> parse_eps(const std::string &text) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw spotter::harness::UsageError("--eps expects <start>:<final>, e.g. 0.9:0.05");
    double start = std::stod(text.substr(0, colon));
    double final_eps = std::stod(text.substr(colon + 1));
    return {start, final_eps};
}

int run_command(const std::string &mode, const std::string &puzzles,
                const std::string &episodes, double alpha, double gamma, double tau,
                const std::string &eps, int eps_horizon, uint64_t seed, int runs,
                const std::string &out, bool defer, int log_every, bool render,
                const std::string &load_ops, int width, int height, int budget,
                int jobs) {
    spotter::harness::ExperimentConfig config;
    config.mode = spotter::harness::parse_mode(mode);
    config.puzzles = parse_int_list(puzzles, "--puzzles");
    config.episodes = parse_int_list(episodes, "--episodes");
    config.alpha = alpha;
    config.gamma = gamma;
    config.tau = tau;
    auto [eps_start, eps_final] = parse_eps(eps);
    config.eps_max = eps_start;
    config.eps_min = eps_final;
    config.eps_horizon = eps_horizon;
    config.master_seed = seed;
    config.runs = runs;
    config.out_dir = out;
    config.defer_operators = defer;
    config.log_every = log_every;
    config.render = render;
    config.load_operators = load_ops;
    config.width = width;
    config.height = height;
    config.genprecon_budget = static_cast<std::size_t>(budget);
    config.jobs = jobs;

    spotter::harness::RunResult result = spotter::harness::run_experiment(config);

    int discovered = 0;
    for (const auto &seed_result : result.seeds)
        discovered += static_cast<int>(seed_result.discovered.size());
    std::cerr << "completed " << result.seeds.size() << " run(s)";
    if (config.mode == spotter::harness::Mode::Spotter)
        std::cerr << ", " << discovered << " operator(s) discovered";
    std::cerr << "\n";
    return 0;
}

int summarize_command(const std::vector<std::string> &inputs, const std::string &out,
                      bool normalize) {
    std::vector<std::vector<spotter::harness::MetricsRow>> per_seed;
    for (const std::string &path : inputs)
        per_seed.push_back(spotter::harness::read_metrics_csv(path));
    auto rows = spotter::harness::summarize(per_seed, normalize);
    if (out.empty()) {
        std::cout << "puzzle,episode,mean_reward,std_reward\n";
        for (const auto &row : rows)
            std::cout << row.puzzle << ',' << row.episode << ',' << row.mean_reward << ','
                      << row.std_reward << '\n';
    } else {
        spotter::harness::write_summary_csv(out, rows);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"two-room planning and operator discovery experiments"};
    app.require_subcommand(1);

    std::string mode = "spotter", puzzles = "1,2,3", episodes = "10000,20000,10000";
    std::string eps = "0.9:0.05", out_dir, load_ops;
    double alpha = 0.1, gamma = 0.99, tau = 0.9;
    uint64_t seed = 1;
    int runs = 1, log_every = 50, width = 11, height = 7, budget = 32, jobs = 0;
    int eps_horizon = 0;
    bool defer = false, render = false;

    CLI::App *run = app.add_subcommand("run", "run an experiment");
    run->add_option("--mode", mode, "spotter, vql, hlaql or hlalql");
    run->add_option("--puzzles", puzzles, "comma-separated puzzle list");
    run->add_option("--episodes", episodes, "episodes per puzzle, comma-separated");
    run->add_option("--alpha", alpha, "learning rate");
    run->add_option("--gamma", gamma, "discount factor");
    run->add_option("--tau", tau, "precondition value threshold");
    run->add_option("--eps", eps, "exploration schedule <start>:<final>");
    run->add_option("--eps-horizon", eps_horizon,
                    "episodes over which the schedule decays (default: per-puzzle count)");
    run->add_option("--seed", seed, "master seed; runs use consecutive seeds");
    run->add_option("--runs", runs, "number of seeds");
    run->add_option("--out", out_dir, "output directory for CSVs and dumps");
    run->add_flag("--defer-operators", defer, "log operators instead of installing them");
    run->add_option("--log-every", log_every, "episodes between operator logs");
    run->add_flag("--render-ascii", render, "render each episode start to stderr");
    run->add_option("--load-operators", load_ops, "operator dump to preinstall");
    run->add_option("--width", width, "grid width");
    run->add_option("--height", height, "grid height");
    run->add_option("--genprecon-budget", budget, "precondition search node budget");
    run->add_option("--jobs", jobs, "parallel seed workers (0 = all cores)");

    std::vector<std::string> inputs;
    std::string summary_out;
    bool normalize = false;
    CLI::App *sum = app.add_subcommand("summarize", "merge metrics CSVs");
    sum->add_option("inputs", inputs, "metrics CSV files")->required();
    sum->add_option("--out", summary_out, "summary CSV path (default: stdout)");
    sum->add_flag("--normalize", normalize, "scale by the maximum mean reward");

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return run_command(mode, puzzles, episodes, alpha, gamma, tau, eps,
                               eps_horizon, seed, runs, out_dir, defer, log_every,
                               render, load_ops, width, height, budget, jobs);
        if (sum->parsed())
            return summarize_command(inputs, summary_out, normalize);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    } catch (const spotter::harness::UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const spotter::harness::IoError &e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
