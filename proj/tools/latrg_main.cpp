#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "latrg/config.hpp"
#include "latrg/report.hpp"
#include "latrg/runner.hpp"
#include "latrg/util.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lattice block-spin renormalization engine"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config_path;
    std::string out_dir;
    std::string format = "json,csv";
    bool parallel = false;
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: config's, else '.')");
    run->add_flag("--parallel", parallel, "run independent tasks concurrently");
    run->add_option("--format", format, "output formats: json,csv");

    CLI11_PARSE(app, argc, argv);

    try {
        const latrg::ExperimentConfig cfg = latrg::load_config(config_path);
        const latrg::Report report = latrg::run_experiment(cfg, parallel);

        std::string dir = !out_dir.empty() ? out_dir
                          : !cfg.output_dir.empty() ? cfg.output_dir
                                                    : std::string(".");
        const bool json = format.find("json") != std::string::npos;
        const bool csv = format.find("csv") != std::string::npos;
        const auto written = latrg::emit_report(report, dir, json, csv);
        for (const auto& p : written) std::printf("wrote %s\n", p.c_str());

        int failed = 0;
        for (const auto& t : report.tasks)
            for (const auto& v : t.verdicts)
                if (!v.pass) {
                    ++failed;
                    std::printf("FAIL %s/%s: %s\n", t.task.c_str(), v.name.c_str(),
                                v.detail.c_str());
                }
        std::printf("%s: %d task(s), %s\n", cfg.config_hash.c_str(),
                    int(report.tasks.size()),
                    report.all_pass ? "all verdicts pass" : "verdicts failed");
        return report.all_pass ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
