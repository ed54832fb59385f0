#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <dyntree/harness.hpp>

using namespace dyntree;

namespace {

void write_report(const nlohmann::json& rep, const std::string& path) {
    if (path.empty()) {
        std::cout << rep.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot open report file " + path);
    out << rep.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic tree embedding harness"};
    app.require_subcommand(1);

    std::string trace_path, stack = "decr", report_path, family = "rand-decr", out_path;
    double beta = 0.1, a = 2.0, w = 16.0;
    int depth = 2, copies = 0, seeds = 100, n = 16, m = 32, workers = 0;
    std::uint64_t seed = 1;
    bool no_check = false;

    auto add_stack_flags = [&](CLI::App* cmd) {
        cmd->add_option("--trace", trace_path, "trace file")->required();
        cmd->add_option("--stack", stack, "ldd|decr|full|oracle|bab");
        cmd->add_option("--beta", beta, "decomposition parameter (ldd stack)");
        cmd->add_option("--a", a, "confidence parameter");
        cmd->add_option("--depth", depth, "recursion depth (full/oracle/bab)");
        cmd->add_option("--copies", copies, "oracle copies, 0 = ceil(a log2 n)");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--report", report_path, "report JSON path (default stdout)");
        cmd->add_flag("--no-check", no_check, "skip hard assertions at observe points");
    };

    CLI::App* creplay = app.add_subcommand("replay", "run one seeded replay of a trace");
    add_stack_flags(creplay);

    CLI::App* cmc = app.add_subcommand("mc", "Monte Carlo over consecutive seeds");
    add_stack_flags(cmc);
    cmc->add_option("--seeds", seeds, "number of seeds")->required();
    cmc->add_option("--workers", workers, "worker threads, 0 = hardware");

    CLI::App* cgen = app.add_subcommand("gen", "generate a trace");
    cgen->add_option("--family", family, "rand-decr|rand-full|dumbbell")->required();
    cgen->add_option("--n", n, "node count")->required();
    cgen->add_option("--m", m, "edge count / churn bound");
    cgen->add_option("--w", w, "max edge weight");
    cgen->add_option("--seed", seed, "generator seed");
    cgen->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cgen->parsed()) {
            Trace t = gen_trace(family, n, m, w, seed);
            if (out_path.empty()) {
                std::cout << format_trace(t);
            } else {
                std::ofstream out(out_path);
                if (!out) throw InvalidParameter("cannot open " + out_path);
                out << format_trace(t);
            }
            return 0;
        }
        Config cfg;
        cfg.stack = parse_stack(stack);
        cfg.beta = beta;
        cfg.a = a;
        cfg.depth = depth;
        cfg.copies = copies;
        cfg.seed = seed;
        cfg.check = !no_check;
        Trace t = load_trace(trace_path);
        nlohmann::json rep = creplay->parsed() ? replay(t, cfg)
                                               : montecarlo(t, seeds, cfg, workers);
        write_report(rep, report_path);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
