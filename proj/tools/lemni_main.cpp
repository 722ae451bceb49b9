#include <array>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lemni/errors.hpp"
#include "lemni/generator.hpp"
#include "lemni/json_io.hpp"
#include "lemni/svg.hpp"
#include "lemni/verify.hpp"
#include "lemni/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_level_list(const std::string& text) {
    std::vector<double> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size())
            throw std::invalid_argument("bad level value: " + item);
        levels.push_back(v);
    }
    if (levels.empty()) throw std::invalid_argument("empty level list");
    return levels;
}

std::pair<int, int> parse_degree_range(const std::string& text) {
    const size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--degrees expects lo:hi, got " + text);
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    if (lo < 1 || hi < lo) throw std::invalid_argument("--degrees range must satisfy 1 <= lo <= hi");
    return {lo, hi};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        lemni::write_text_file(out_path, text);
}

struct GenArgs {
    int n = 0;
    std::uint64_t seed = 0;
    std::string weights;
    std::string out;
};

int run_gen(const GenArgs& a) {
    if (a.n < 1) throw std::invalid_argument("--n must be >= 1");
    lemni::GenSpec spec{a.n, a.seed, std::nullopt};
    if (!a.weights.empty()) {
        const std::vector<double> w = parse_level_list(a.weights);
        if (w.size() != 3)
            throw std::invalid_argument("--mult-weights expects three comma-separated weights");
        spec.multiplicity_weights = std::array<double, 3>{w[0], w[1], w[2]};
    }
    const lemni::Instance inst = lemni::generate(spec);
    const std::string text = lemni::write_instance_text(inst, a.seed);
    emit(text, a.out);
    if (a.out.empty())
        std::cerr << inst.digest() << "\n";
    else
        std::cout << inst.digest() << "\n";
    return kExitPass;
}

struct VerifyArgs {
    std::string input;
    int n = 0;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string degrees;
    lemni::VerifyConfig cfg;
    std::string out;
};

int run_verify(const VerifyArgs& a) {
    std::ostream& log = a.out.empty() ? std::cerr : std::cout;
    if (a.trials > 0) {
        if (a.degrees.empty())
            throw std::invalid_argument("batch mode needs --degrees lo:hi");
        const auto range = parse_degree_range(a.degrees);
        const lemni::BatchSummary batch =
            lemni::verify_batch(a.trials, range, a.seed, a.cfg);
        emit(lemni::batch_to_json(batch).dump(2) + "\n", a.out);
        bool any_error = false;
        for (const auto& t : batch.trials) any_error = any_error || !t.error.empty();
        log << batch.n_pass << "/" << batch.n_trials << " trials passed, "
            << batch.total_verdicts() << " verdicts, median residual "
            << batch.median_residual() << "\n";
        if (any_error) return kExitNumerical;
        return batch.all_pass() ? kExitPass : kExitFail;
    }

    lemni::Instance inst = [&] {
        if (!a.input.empty()) return lemni::read_instance_file(a.input);
        if (a.n >= 1) return lemni::generate({a.n, a.seed, std::nullopt});
        throw std::invalid_argument("need --input, --trials, or --n");
    }();

    const lemni::VerificationReport report = lemni::verify_instance(inst, a.cfg);
    emit(lemni::report_to_json(report).dump(2) + "\n", a.out);
    log << "digest " << report.digest << ": " << report.verdicts.size() << " verdicts, staircase "
        << lemni::staircase_compact(report) << ", "
        << (report.overall_pass ? "PASS" : "FAIL") << "\n";
    return report.overall_pass ? kExitPass : kExitFail;
}

struct PlotArgs {
    std::string input;
    std::string levels = "auto";
    std::string out;
    int size = 800;
    bool show_critical = false;
    int grid = 512;
    int threads = 0;
};

int run_plot(const PlotArgs& a) {
    const lemni::Instance inst = lemni::read_instance_file(a.input);
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    lemni::PlotSpec spec;
    spec.size_px = a.size;
    spec.show_critical = a.show_critical;
    spec.grid = a.grid;
    spec.threads = a.threads;
    spec.levels = a.levels == "auto" ? lemni::auto_levels(inst, ladder)
                                     : parse_level_list(a.levels);
    emit(lemni::render_svg(inst, ladder, spec), a.out);
    return kExitPass;
}

struct CriticalArgs {
    std::string input;
    std::string out;
    double rel_gap = 0.1;
};

int run_critical(const CriticalArgs& a) {
    const lemni::Instance inst = lemni::read_instance_file(a.input);
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    const lemni::BracketSet brackets = lemni::bracket_ladder(ladder, a.rel_gap);
    emit(lemni::ladder_to_json(ladder, brackets).dump(2) + "\n", a.out);
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lemni: level curves |f(z)| = C of complex polynomials, their critical "
                 "points, and the zeros-of-f vs zeros-of-f' invariant on each closed curve"};
    app.set_version_flag("--version", LEMNI_VERSION);
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a random instance (zeros in the unit disk)");
    gen->add_option("--n", gen_args.n, "number of zeros")->required();
    gen->add_option("--seed", gen_args.seed, "RNG seed (default 0)");
    gen->add_option("--mult-weights", gen_args.weights,
                    "w1,w2,w3 relative weights for multiplicities 1,2,3");
    gen->add_option("--out", gen_args.out, "output JSON path (default stdout)");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Check the invariant on one instance or a batch");
    verify->add_option("--input", verify_args.input, "instance JSON path");
    verify->add_option("--n", verify_args.n, "generate an instance with this many zeros");
    verify->add_option("--seed", verify_args.seed, "seed for --n or --trials mode");
    verify->add_option("--trials", verify_args.trials, "batch mode: number of random trials");
    verify->add_option("--degrees", verify_args.degrees, "batch mode: degree range lo:hi");
    verify->add_option("--rel-gap", verify_args.cfg.rel_gap,
                       "bracket half-width fraction (default 0.1)");
    verify->add_option("--grid", verify_args.cfg.grid, "grid nodes per axis (default 512)");
    verify->add_option("--max-grid", verify_args.cfg.max_grid,
                       "refinement cap (default 2048)");
    verify->add_option("--margin", verify_args.cfg.margin, "window padding (default 0.5)");
    verify->add_option("--threads", verify_args.cfg.threads, "worker threads (0 = auto)");
    verify->add_option("--out", verify_args.out, "report JSON path (default stdout)");

    PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot", "Render level curves to SVG");
    plot->add_option("--input", plot_args.input, "instance JSON path")->required();
    plot->add_option("--levels", plot_args.levels, "'auto' or comma-separated ln|f| values");
    plot->add_option("--out", plot_args.out, "SVG output path (default stdout)");
    plot->add_option("--size", plot_args.size, "image width in px (default 800)");
    plot->add_flag("--show-critical", plot_args.show_critical, "mark critical points");
    plot->add_option("--grid", plot_args.grid, "grid nodes per axis (default 512)");
    plot->add_option("--threads", plot_args.threads, "worker threads (0 = auto)");

    CriticalArgs critical_args;
    auto* critical = app.add_subcommand("critical", "Solve for critical points and brackets");
    critical->add_option("--input", critical_args.input, "instance JSON path")->required();
    critical->add_option("--out", critical_args.out, "ladder JSON path (default stdout)");
    critical->add_option("--rel-gap", critical_args.rel_gap,
                         "bracket half-width fraction (default 0.1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (plot->parsed()) return run_plot(plot_args);
        if (critical->parsed()) return run_critical(critical_args);
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lemni::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
