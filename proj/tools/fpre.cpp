// fpre command-line interface: benchmark harness, instruction accounting and
// self-verification.
//
//   fpre bench --suite {micro|apps|all} --backend {baseline|fpaddre-sim|both}
//              --reps N --l1-bytes B --format {csv|md} [--freq-ghz F] [--out PATH]
//   fpre opcounts
//   fpre verify
//
// Exit codes: 0 success, 1 invalid flags, 2 opcount/verification failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpre/fpre.hpp"

namespace {

struct bench_cli {
    std::string suite = "all";
    std::string backend = "both";
    int reps = 1000;
    std::size_t l1_bytes = 16384;
    std::string format = "csv";
    double freq_ghz = 0.0;
    double min_rep_ms = 10.0;
    std::string out_path;
};

std::vector<fpre::eft_backend> backends_for(const std::string& name) {
    if (name == "baseline") return {fpre::eft_backend::baseline};
    if (name == "fpaddre-sim") return {fpre::eft_backend::fpaddre_simulated};
    return {fpre::eft_backend::baseline, fpre::eft_backend::fpaddre_simulated};
}

int run_bench(const bench_cli& cli) {
    if (!fpre::pin_to_cpu(0))
        std::cerr << "fpre: warning: could not pin to a single cpu; timings may be noisier\n";

    fpre::bench_options opt;
    opt.l1_bytes = cli.l1_bytes;
    opt.min_rep_seconds = cli.min_rep_ms / 1000.0;
    if (cli.freq_ghz > 0.0) opt.freq_ghz = cli.freq_ghz;

    const bool micro = cli.suite == "micro" || cli.suite == "all";
    const bool apps = cli.suite == "apps" || cli.suite == "all";
    std::vector<fpre::bench_record> records;
    for (fpre::eft_backend bk : backends_for(cli.backend)) {
        if (micro) {
            const std::size_t l1_elems = fpre::l1_resident_elements(opt);
            for (fpre::benchmark_id id :
                 {fpre::benchmark_id::dd_add_latency, fpre::benchmark_id::dd_mul_latency}) {
                fpre::bench_spec spec{id, bk, l1_elems, cli.reps};
                std::cerr << "fpre: running " << to_string(id) << " / " << to_string(bk) << "\n";
                records.push_back(fpre::run_latency(spec, opt));
            }
            for (fpre::benchmark_id id : {fpre::benchmark_id::dd_add_throughput,
                                          fpre::benchmark_id::dd_mul_throughput}) {
                fpre::bench_spec spec{id, bk, l1_elems, cli.reps};
                std::cerr << "fpre: running " << to_string(id) << " / " << to_string(bk) << "\n";
                records.push_back(fpre::run_throughput(spec, opt));
            }
        }
        if (apps) {
            for (fpre::benchmark_id id :
                 {fpre::benchmark_id::horner15, fpre::benchmark_id::dot_product,
                  fpre::benchmark_id::comp_dot_product, fpre::benchmark_id::ddgemm_kernel}) {
                fpre::bench_spec spec{id, bk, 0, cli.reps};
                std::cerr << "fpre: running " << to_string(id) << " / " << to_string(bk) << "\n";
                auto rs = fpre::run_app(spec, opt);
                records.insert(records.end(), rs.begin(), rs.end());
            }
        }
    }

    fpre::report_format fmt =
        cli.format == "md" ? fpre::report_format::markdown : fpre::report_format::csv;
    std::string text = fpre::report(records, fmt, opt);
    if (cli.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cli.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "fpre: cannot open " << cli.out_path << " for writing\n";
            return 1;
        }
        f << text;
    }
    return 0;
}

int run_opcounts() {
    fpre::opcount_table table = fpre::tally_opcounts();
    std::cout << fpre::format(table);
    return 0;
}

int run_verify() {
    bool ok = true;
    for (const fpre::verification_result& r : fpre::run_verification()) {
        if (r.passed())
            std::printf("PASS  %-32s (%zu cases)\n", r.name.c_str(), r.cases);
        else
            std::printf("FAIL  %-32s (%zu of %zu cases failed)\n", r.name.c_str(), r.failures,
                        r.cases);
        ok = ok && r.passed();
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"high-precision floating-point toolkit benchmark harness"};
    app.require_subcommand(1);

    bench_cli cli;
    CLI::App* bench = app.add_subcommand("bench", "run the benchmark suites");
    bench->add_option("--suite", cli.suite, "micro | apps | all")
        ->check(CLI::IsMember({"micro", "apps", "all"}));
    bench->add_option("--backend", cli.backend, "baseline | fpaddre-sim | both")
        ->check(CLI::IsMember({"baseline", "fpaddre-sim", "both"}));
    bench->add_option("--reps", cli.reps, "replications per measurement (default 1000)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--l1-bytes", cli.l1_bytes, "L1-resident payload budget in bytes");
    bench->add_option("--format", cli.format, "csv | md")
        ->check(CLI::IsMember({"csv", "md"}));
    bench->add_option("--freq-ghz", cli.freq_ghz, "frequency for cycle estimates in the report");
    bench->add_option("--min-rep-ms", cli.min_rep_ms, "minimum duration of one replication");
    bench->add_option("--out", cli.out_path, "write the report to a file instead of stdout");

    CLI::App* opcounts = app.add_subcommand("opcounts", "print instruction and latency-slot counts");
    CLI::App* verify = app.add_subcommand("verify", "run the exhaustive soft-float and oracle suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bench->parsed()) return run_bench(cli);
        if (opcounts->parsed()) return run_opcounts();
        if (verify->parsed()) return run_verify();
    } catch (const fpre::opcount_mismatch& e) {
        std::cerr << "fpre: " << e.what() << "\n";
        return 2;
    } catch (const fpre::substitution_error& e) {
        std::cerr << "fpre: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fpre: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
