// Command-line driver for tamed-adaptive Euler-Maruyama experiments.
//
// Subcommands: simulate, rate, cost, moments, check, describe.  Every run
// prints a JSON summary including a manifest of all resolved parameters, so
// outputs are reproducible bit-for-bit on the same build.  Parallelism is
// controlled by the TAEM_THREADS environment variable (default: all cores).

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "taem/coupling.hpp"
#include "taem/json_io.hpp"
#include "taem/registry.hpp"
#include "taem/rng.hpp"
#include "taem/scheme.hpp"
#include "taem/stats.hpp"
#include "taem/transform.hpp"
#include "taem/version.hpp"
#include "taem/yamada_watanabe.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitExperiment = 3;
constexpr int kExitIo = 4;

// Shortest round-trip decimal formatting.
std::string fmt(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

nlohmann::json manifest(const std::string& command, nlohmann::json params) {
    return nlohmann::json{
        {"command", command},
        {"parameters", std::move(params)},
        {"tool_version", taem::version},
        {"timestamp", timestamp()},
    };
}

taem::LogBase parse_log_base(const std::string& s) {
    if (s == "natural") return taem::LogBase::natural;
    if (s == "10") return taem::LogBase::base10;
    throw CLI::ValidationError("--log-base must be 'natural' or '10'");
}

std::vector<std::string> validity_warnings(const taem::ValidityReport& r) {
    std::vector<std::string> w;
    if (!r.taming_ok) {
        w.push_back("step parameter outside validity range: eps2 >= eps1");
    }
    if (!r.separation_ok) {
        w.push_back("step parameter outside validity range: eps1 >= eps0/2");
    }
    return w;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    out << content;
    if (!out.good()) throw std::ios_base::failure("write to '" + path + "' failed");
}

int run(int argc, char** argv) {
    CLI::App app{"Tamed-adaptive Euler-Maruyama toolkit"};
    app.require_subcommand(1);

    std::string problem_name = "ex1";
    std::string log_base_str = "natural";
    std::string out_path;
    std::string record_path;
    double delta = 1e-4;
    double delta0 = 1e-3;
    double t_end = 1.0;
    double t_end_b = 5.0;
    std::uint64_t seed = 1;
    std::size_t paths = 1;
    int levels = 4;
    std::vector<std::size_t> samples{200};
    std::vector<double> deltas;
    std::vector<double> times{1.0};
    int order = 2;
    double yw_delta = 2.0;
    double yw_eps = 0.1;
    int yw_samples = 1000;

    auto* sim = app.add_subcommand("simulate", "simulate adaptive paths");
    sim->add_option("--problem", problem_name)->required();
    sim->add_option("--delta", delta)->required();
    sim->add_option("--t-end", t_end)->required();
    sim->add_option("--seed", seed)->required();
    sim->add_option("--paths", paths);
    sim->add_option("--log-base", log_base_str);
    sim->add_option("--record", record_path, "write first path trajectory as CSV");

    auto* rate = app.add_subcommand("rate", "two-level strong convergence rate");
    rate->add_option("--problem", problem_name)->required();
    rate->add_option("--delta0", delta0)->required();
    rate->add_option("--levels", levels)->required();
    rate->add_option("--samples", samples, "per-level sample counts (single value applies to all)")
        ->required();
    rate->add_option("--t-end", t_end)->required();
    rate->add_option("--seed", seed)->required();
    rate->add_option("--log-base", log_base_str);
    rate->add_option("--out", out_path, "per-level CSV output");

    auto* cost = app.add_subcommand("cost", "adaptive step-count scaling");
    cost->add_option("--problem", problem_name)->required();
    cost->add_option("--deltas", deltas)->required();
    cost->add_option("--samples", samples)->required();
    cost->add_option("--t-end", t_end)->required();
    cost->add_option("--seed", seed)->required();
    cost->add_option("--log-base", log_base_str);
    cost->add_option("--out", out_path);

    auto* moments = app.add_subcommand("moments", "empirical moments of the scheme");
    moments->add_option("--problem", problem_name)->required();
    moments->add_option("--delta", delta)->required();
    moments->add_option("--order", order);
    moments->add_option("--paths", paths)->required();
    moments->add_option("--times", times)->required();
    moments->add_option("--seed", seed)->required();
    moments->add_option("--log-base", log_base_str);

    auto* check = app.add_subcommand("check", "verify analytic constructions");
    auto* check_yw = check->add_subcommand("yw", "Yamada-Watanabe property report");
    check_yw->add_option("--delta", yw_delta)->required();
    check_yw->add_option("--eps", yw_eps)->required();
    check_yw->add_option("--samples", yw_samples);
    auto* check_tr = check->add_subcommand("transform", "drift transform property report");
    check_tr->add_option("--problem", problem_name)->required();
    check->require_subcommand(1);

    auto* desc = app.add_subcommand("describe", "problem metadata");
    desc->add_option("--problem", problem_name)->required();

    auto* shift = app.add_subcommand("intercept-shift", "rate intercepts at two horizons");
    shift->add_option("--problem", problem_name)->required();
    shift->add_option("--delta0", delta0)->required();
    shift->add_option("--levels", levels)->required();
    shift->add_option("--samples", samples)->required();
    shift->add_option("--t-end-a", t_end)->required();
    shift->add_option("--t-end-b", t_end_b)->required();
    shift->add_option("--seed", seed)->required();
    shift->add_option("--log-base", log_base_str);

    CLI11_PARSE(app, argc, argv);
    taem::LogBase log_base = parse_log_base(log_base_str);

    if (sim->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        taem::SchemeConfig config;
        config.delta = delta;
        config.t_end = t_end;
        config.log_base = log_base;
        config.record_trajectory = !record_path.empty();
        auto validity = taem::validate_delta(config, problem);
        auto warnings = validity_warnings(validity);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

        auto outcomes = taem::parallel_map(paths, [&](std::size_t i) {
            taem::SchemeConfig c = config;
            c.record_trajectory = config.record_trajectory && i == 0;
            auto stream = taem::NormalStream::derived(seed, i);
            return taem::simulate_path(problem, c, stream);
        });
        double sum = 0.0, sum2 = 0.0, steps = 0.0;
        for (const auto& o : outcomes) {
            sum += o.y_end;
            sum2 += o.y_end * o.y_end;
            steps += static_cast<double>(o.n_steps);
        }
        double mean = sum / paths;
        double stderr_ = 0.0;
        if (paths >= 2) {
            double var = (sum2 - sum * sum / paths) / (paths - 1);
            stderr_ = std::sqrt(std::max(var, 0.0) / paths);
        }
        if (!record_path.empty()) {
            std::string csv = "t,y\n";
            for (auto& [t, y] : outcomes.front().trajectory) {
                csv += fmt(t) + "," + fmt(y) + "\n";
            }
            write_file(record_path, csv);
        }
        nlohmann::json summary{
            {"y_end_mean", mean},
            {"y_end_stderr", stderr_},
            {"n_steps_mean", steps / paths},
            {"delta", delta},
            {"warnings", warnings},
            {"validity", taem::validity_to_json(validity)},
            {"problem", taem::describe(problem)},
            {"manifest", manifest("simulate", {{"problem", problem_name},
                                               {"delta", delta},
                                               {"t_end", t_end},
                                               {"seed", seed},
                                               {"paths", paths},
                                               {"log_base", log_base_str}})},
        };
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    if (rate->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        if (samples.size() == 1) samples.assign(levels, samples.front());
        auto exp = taem::estimate_rate(problem, delta0, levels, samples, t_end, seed, log_base);
        if (!out_path.empty()) {
            std::string csv = "k,delta_coarse,delta_fine,n_samples,mean_abs_diff,stderr\n";
            for (const auto& lvl : exp.per_level) {
                csv += std::to_string(lvl.k) + "," + fmt(lvl.delta_coarse) + "," +
                       fmt(lvl.delta_fine) + "," + std::to_string(lvl.stats.n_samples) + "," +
                       fmt(lvl.stats.mean) + "," + fmt(lvl.stats.stderr_) + "\n";
            }
            write_file(out_path, csv);
        }
        nlohmann::json summary{
            {"fit", taem::fit_to_json(exp.fit)},
            {"alpha_hat", exp.fit.slope},
            {"problem", taem::describe(problem)},
            {"manifest", manifest("rate", {{"problem", problem_name},
                                           {"delta0", delta0},
                                           {"levels", levels},
                                           {"samples", samples},
                                           {"t_end", t_end},
                                           {"seed", seed},
                                           {"log_base", log_base_str}})},
        };
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    if (cost->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        auto exp = taem::estimate_cost(problem, deltas, samples.front(), t_end, seed, log_base);
        if (!out_path.empty()) {
            std::string csv = "delta,n_samples,mean_steps,stderr\n";
            for (const auto& pt : exp.per_delta) {
                csv += fmt(pt.delta) + "," + std::to_string(pt.n_samples) + "," +
                       fmt(pt.mean_steps) + "," + fmt(pt.stderr_) + "\n";
            }
            write_file(out_path, csv);
        }
        nlohmann::json summary{
            {"fit", taem::fit_to_json(exp.fit)},
            {"zeta_hat", exp.fit.slope},
            {"problem", taem::describe(problem)},
            {"manifest", manifest("cost", {{"problem", problem_name},
                                           {"deltas", deltas},
                                           {"samples", samples.front()},
                                           {"t_end", t_end},
                                           {"seed", seed},
                                           {"log_base", log_base_str}})},
        };
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    if (moments->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        taem::SchemeConfig config;
        config.delta = delta;
        config.log_base = log_base;
        std::sort(times.begin(), times.end());
        config.t_end = times.back();
        auto est = taem::empirical_moment(problem, config, order, paths, times, seed);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : est) {
            rows.push_back({{"t", e.t}, {"mean", e.mean}, {"stderr", e.stderr_}});
        }
        nlohmann::json summary{
            {"order", order},
            {"moments", rows},
            {"problem", taem::describe(problem)},
            {"manifest", manifest("moments", {{"problem", problem_name},
                                              {"delta", delta},
                                              {"order", order},
                                              {"paths", paths},
                                              {"times", times},
                                              {"seed", seed},
                                              {"log_base", log_base_str}})},
        };
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    if (check_yw->parsed()) {
        auto report = taem::verify_yw({yw_delta, yw_eps}, yw_samples);
        const double tol = 1e-8;
        nlohmann::json summary{
            {"mass_error", report.mass_error},
            {"yw1_max_violation", report.yw1},
            {"yw2_max_violation", report.yw2},
            {"yw3_max_violation", report.yw3},
            {"yw4_max_violation", report.yw4},
            {"yw5_max_violation", report.yw5},
            {"pass", report.mass_error < 1e-6 && report.yw1 < tol && report.yw2 < tol &&
                         report.yw3 < tol && report.yw4 < tol && report.yw5 < tol},
            {"manifest", manifest("check yw", {{"delta", yw_delta},
                                               {"eps", yw_eps},
                                               {"samples", yw_samples}})},
        };
        std::cout << summary.dump(2) << '\n';
        return summary["pass"].get<bool>() ? 0 : kExitExperiment;
    }

    if (check_tr->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        taem::DriftTransform tr(problem);
        auto rep = taem::verify_transform(tr, problem);
        bool pass = rep.min_phi_prime >= 1.0 - 1e-9 && rep.max_p4_residual_scaled < 1e-6 &&
                    rep.junction_gap_xi0 < 1e-8 && rep.junction_gap_xik1 < 1e-8;
        nlohmann::json summary{
            {"xi0", tr.xi0()},
            {"xi_k1", tr.xi_k1()},
            {"pb1", tr.pb1()},
            {"pb2", tr.pb2()},
            {"K", tr.K_const()},
            {"H", tr.H_bound()},
            {"l_psi", tr.l_psi()},
            {"L_psi", tr.L_psi()},
            {"min_phi_prime", rep.min_phi_prime},
            {"max_p4_residual_scaled", rep.max_p4_residual_scaled},
            {"junction_gap_xi0", rep.junction_gap_xi0},
            {"junction_gap_xik1", rep.junction_gap_xik1},
            {"pass", pass},
            {"manifest", manifest("check transform", {{"problem", problem_name}})},
        };
        std::cout << summary.dump(2) << '\n';
        return pass ? 0 : kExitExperiment;
    }

    if (desc->parsed()) {
        std::cout << taem::describe(taem::get_problem(problem_name)).dump(2) << '\n';
        return 0;
    }

    if (shift->parsed()) {
        const auto& problem = taem::get_problem(problem_name);
        if (samples.size() == 1) samples.assign(levels, samples.front());
        auto res = taem::intercept_shift(problem, delta0, levels, samples, t_end, t_end_b, seed,
                                         log_base);
        nlohmann::json summary{
            {"intercept_a", res.intercept_a},
            {"intercept_b", res.intercept_b},
            {"abs_difference", res.abs_difference},
            {"fit_a", taem::fit_to_json(res.at_a.fit)},
            {"fit_b", taem::fit_to_json(res.at_b.fit)},
            {"manifest", manifest("intercept-shift", {{"problem", problem_name},
                                                      {"delta0", delta0},
                                                      {"levels", levels},
                                                      {"samples", samples},
                                                      {"t_end_a", t_end},
                                                      {"t_end_b", t_end_b},
                                                      {"seed", seed},
                                                      {"log_base", log_base_str}})},
        };
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError&) {
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitExperiment;
    }
}
