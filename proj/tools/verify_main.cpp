#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "drinfeld/parallel.hpp"
#include "drinfeld/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace drinfeld;

int main(int argc, char** argv) {
    CLI::App app{"scenario runner for the Drinfeld/Anderson period verification suites"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run the verification tasks of one or more configs");
    std::vector<std::string> config_paths;
    std::vector<std::string> task_filter;
    std::string out_path, format = "json", data_dir = "data/appendix";
    verify->add_option("--config", config_paths, "scenario config JSON file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("--task", task_filter, "run only these tasks (subset of the config's)");
    verify->add_option("--out", out_path, "write the report(s) here instead of stdout");
    verify->add_option("--format", format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
    verify->add_option("--data-dir", data_dir, "directory with the appendix golden files");

    CLI11_PARSE(app, argc, argv);

    std::vector<ScenarioConfig> cfgs;
    for (const auto& path : config_paths) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            ScenarioConfig cfg = ScenarioConfig::parse(ss.str());
            if (!task_filter.empty()) {
                std::vector<std::string> keep;
                for (const auto& t : cfg.tasks)
                    for (const auto& f : task_filter)
                        if (t == f) keep.push_back(t);
                if (keep.empty()) {
                    std::cerr << path << ": none of the requested tasks are in the config\n";
                    return 2;
                }
                cfg.tasks = keep;
            }
            cfgs.push_back(std::move(cfg));
        } catch (const ConfigParseError& e) {
            std::cerr << path << ": " << e.what() << "\n";
            return 2;
        }
    }

    // scenarios are independent; one report writer
    std::vector<ScenarioReport> reports(cfgs.size());
    std::vector<double> seconds(cfgs.size(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallelism_degree())
#endif
    for (int i = 0; i < (int)cfgs.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        reports[i] = run_scenario(cfgs[i], data_dir);
        auto t1 = std::chrono::steady_clock::now();
        seconds[i] = std::chrono::duration<double>(t1 - t0).count();
    }

    std::ostringstream out;
    bool all_ok = true;
    for (size_t i = 0; i < reports.size(); ++i) {
        if (format == "json") {
            out << reports[i].to_json();
        } else {
            if (reports.size() > 1) out << "== " << config_paths[i] << " ==\n";
            out << reports[i].to_text();
        }
        std::cerr << config_paths[i] << ": " << seconds[i] << " s\n";
        all_ok = all_ok && reports[i].all_ok;
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream of(out_path);
        of << out.str();
    }
    return all_ok ? 0 : 1;
}
