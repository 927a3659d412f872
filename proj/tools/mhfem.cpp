// Command-line runner for the multiharmonic majorant pipeline.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mhfem/pipeline.hpp"
#include "mhfem/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverFailure = 3;

int emit(const mhfem::RunConfig& cfg, const mhfem::RunOutcome& outcome) {
    std::ostringstream body;
    if (cfg.format == "csv") {
        mhfem::write_csv(body, cfg.problem_name, outcome.report);
    } else {
        mhfem::write_table(body, cfg.problem_name, outcome.report);
    }
    if (cfg.out == "-" || cfg.out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) {
            std::cerr << "error: cannot open output file " << cfg.out << "\n";
            return kExitConfigError;
        }
        f << body.str();
    }
    if (outcome.solver_failure) {
        std::cerr << "solver failure: " << outcome.failure_detail << "\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}

std::vector<int> parse_levels(const std::string& levels_csv, bool& ok) {
    std::vector<int> levels;
    std::stringstream ss(levels_csv);
    std::string tok;
    ok = true;
    while (std::getline(ss, tok, ',')) {
        try {
            levels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            ok = false;
            return levels;
        }
    }
    return levels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiharmonic FEM solver with guaranteed a posteriori error majorants"};
    app.require_subcommand(1);

    std::string levels_csv = "9,27,81,243";
    double tol = 1e-6;
    std::string out = "-";
    std::string format = "table";
    int truncation = 8;
    std::string config_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--levels", levels_csv, "comma-separated cells-per-side values");
        sub->add_option("--tol", tol, "relative solver tolerance");
        sub->add_option("--out", out, "output path, or - for stdout");
        sub->add_option("--format", format, "csv or table")
            ->check(CLI::IsMember({"csv", "table"}));
    };

    CLI::App* ex1 = app.add_subcommand("example1", "time-harmonic source with known solution");
    add_common(ex1);
    CLI::App* ex2 = app.add_subcommand("example2", "time-analytic source, modes 0..N");
    add_common(ex2);
    ex2->add_option("-N,--modes", truncation, "truncation index N");
    CLI::App* custom = app.add_subcommand("custom", "run a problem described by a config file");
    custom->add_option("--config", config_path, "key=value config file")->required();
    add_common(custom);

    CLI11_PARSE(app, argc, argv);

    bool levels_ok = true;
    const std::vector<int> levels = parse_levels(levels_csv, levels_ok);
    if (!levels_ok) {
        std::cerr << "config error: malformed --levels\n";
        return kExitConfigError;
    }

    try {
        mhfem::RunConfig cfg;
        if (ex1->parsed()) {
            cfg = mhfem::example1_config(levels);
        } else if (ex2->parsed()) {
            cfg = mhfem::example2_config(levels, truncation);
        } else {
            std::ifstream f(config_path);
            if (!f) {
                std::cerr << "config error: cannot open " << config_path << "\n";
                return kExitConfigError;
            }
            mhfem::ConfigParseResult parsed = mhfem::parse_config(f);
            if (!parsed.ok) {
                std::cerr << "config error: " << parsed.error << "\n";
                return kExitConfigError;
            }
            cfg = parsed.config;
            // command line overrides file-level defaults where given
            if (custom->count("--levels") > 0) cfg.levels = levels;
            if (custom->count("--format") > 0) cfg.format = format;
            if (custom->count("--out") > 0) cfg.out = out;
            if (custom->count("--tol") > 0) cfg.rel_tol = tol;
        }
        if (!custom->parsed()) {
            cfg.rel_tol = tol;
            cfg.out = out;
            cfg.format = format;
        }
        cfg.validate();
        mhfem::ProblemRunner runner(cfg);
        return emit(cfg, runner.run());
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
}
