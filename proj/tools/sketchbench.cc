// sketchbench: timing and accuracy experiments for the sketching library.
//
//   sketchbench sketch|lsq|kappa-sweep [--d 2^16,2^18] [--n 16,32] [--methods a,b]
//               [--reps N] [--seed S] [--threads T] [--kappa 1e2,1e4]
//               [--noise consistent|easy|hard] [--block-threshold B] [--out FILE]
//
// Exit status is 2 for configuration errors and 0 otherwise; solver failures
// are reported in the CSV status column.

#include "sketchla/bench.hh"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using sketchla::ConfigError;

std::size_t parse_size(const std::string& text) {
    try {
        std::size_t pos = 0;
        if (const auto caret = text.find('^'); caret != std::string::npos) {
            const unsigned long long base = std::stoull(text.substr(0, caret), &pos);
            if (pos != caret)
                throw ConfigError("");
            const unsigned long long exp = std::stoull(text.substr(caret + 1), &pos);
            if (pos != text.size() - caret - 1 || exp > 62)
                throw ConfigError("");
            unsigned long long v = 1;
            for (unsigned long long i = 0; i < exp; ++i)
                v *= base;
            return v;
        }
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size() || text[0] == '-')
            throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("not a size: '" + text + "'");
    }
}

double parse_real(const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size())
            throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized sketching benchmarks (CSV output)"};
    app.require_subcommand(1, 1);

    std::vector<std::string> d_list, n_list, kappa_list, methods;
    std::size_t reps = 3, block = sketchla::kDefaultFwhtBlock;
    std::uint64_t seed = 42, memory_mb = 0;
    int threads = 0;
    std::string noise, out_path;
    bool keep_warmup = false;

    std::vector<CLI::App*> subs;
    for (const char* name : {"sketch", "lsq", "kappa-sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--d", d_list, "row counts, e.g. 2^16,2^18")->delimiter(',');
        sub->add_option("--n", n_list, "column counts")->delimiter(',');
        sub->add_option("--methods", methods, "methods to run")->delimiter(',');
        sub->add_option("--reps", reps, "timed repetitions (after one warm-up)");
        sub->add_option("--seed", seed, "seed for all generated data");
        sub->add_option("--threads", threads, "OpenMP threads (default: SKETCHBENCH_THREADS or all)");
        sub->add_option("--kappa", kappa_list, "condition numbers")->delimiter(',');
        sub->add_option("--noise", noise, "consistent|easy|hard");
        sub->add_option("--block-threshold", block, "FWHT block size in doubles");
        sub->add_option("--memory-budget-mb", memory_mb, "skip runs larger than this");
        sub->add_flag("--keep-warmup", keep_warmup, "also record the warm-up repetition");
        sub->add_option("--out", out_path, "output file (default: stdout)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        auto cfg = sketchla::default_config(*sketchla::parse_command(sub->get_name()));
        cfg.d.clear();
        cfg.n.clear();
        cfg.methods = methods;
        cfg.kappa.clear();
        for (const auto& s : d_list)
            cfg.d.push_back(parse_size(s));
        for (const auto& s : n_list)
            cfg.n.push_back(parse_size(s));
        for (const auto& s : kappa_list)
            cfg.kappa.push_back(parse_real(s));
        cfg.reps = reps;
        cfg.seed = seed;
        cfg.block_threshold = block;
        cfg.keep_warmup = keep_warmup;
        cfg.memory_budget = memory_mb * (std::uint64_t{1} << 20);
        if (!noise.empty()) {
            const auto mode = sketchla::parse_noise_mode(noise);
            if (!mode)
                throw ConfigError("unknown noise mode '" + noise + "'");
            cfg.noise = *mode;
        }
        if (sub->count("--threads") > 0) {
            if (threads < 1)
                throw ConfigError("--threads must be at least 1");
            cfg.threads = threads;
        } else if (const char* env = std::getenv("SKETCHBENCH_THREADS")) {
            const std::size_t t = parse_size(env);
            if (t < 1)
                throw ConfigError("SKETCHBENCH_THREADS must be at least 1");
            cfg.threads = static_cast<int>(t);
        }
        sketchla::finalize_config(cfg);

        if (out_path.empty()) {
            sketchla::run_bench(cfg, std::cout);
        } else {
            std::ofstream out(out_path);
            if (!out)
                throw ConfigError("cannot open '" + out_path + "' for writing");
            sketchla::run_bench(cfg, out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "sketchbench: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
