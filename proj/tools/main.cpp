#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <string>
#include <vector>

#include "fse/cost_model.hpp"
#include "fse/engine_spatial.hpp"
#include "fse/engine_spectral.hpp"
#include "fse/grid.hpp"
#include "fse/image_io.hpp"
#include "fse/pattern.hpp"
#include "fse/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Anything wrong with how the tool was invoked (exit code 1); everything else
// that throws is a runtime failure (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string algorithm = "fofse";
    double gamma = 0.2;
    int iterations = 200;
    int fft_size = 64;
    double rho_hat = 0.8;
    int block = 16;
    int support = 16;
    int spacing = 48;
    int count_limit = 81;
    std::string pattern;  // pattern file; empty selects the grid generator
    int threads = 1;
    long long seed = 0;
    std::string out_dir;
    int stride = 5;
    std::string input;
};

const std::vector<std::pair<const char*, const char*>> kConfigKeys = {
    {"algorithm", "--algorithm"}, {"gamma", "--gamma"},
    {"iterations", "--iterations"}, {"fft_size", "--fft-size"},
    {"rho_hat", "--rho-hat"}, {"block", "--block"},
    {"support", "--support"}, {"spacing", "--spacing"},
    {"count_limit", "--count-limit"}, {"pattern", "--pattern"},
    {"threads", "--threads"}, {"seed", "--seed"},
    {"out_dir", "--out-dir"}, {"stride", "--stride"},
    {"input", "--input"}};

json to_json(const Options& o) {
    return json{{"algorithm", o.algorithm}, {"gamma", o.gamma},
                {"iterations", o.iterations}, {"fft_size", o.fft_size},
                {"rho_hat", o.rho_hat}, {"block", o.block},
                {"support", o.support}, {"spacing", o.spacing},
                {"count_limit", o.count_limit}, {"pattern", o.pattern},
                {"threads", o.threads}, {"seed", o.seed},
                {"out_dir", o.out_dir}, {"stride", o.stride},
                {"input", o.input}};
}

void assign_from_json(Options& o, const std::string& key, const json& v) {
    if (key == "algorithm") o.algorithm = v.get<std::string>();
    else if (key == "gamma") o.gamma = v.get<double>();
    else if (key == "iterations") o.iterations = v.get<int>();
    else if (key == "fft_size") o.fft_size = v.get<int>();
    else if (key == "rho_hat") o.rho_hat = v.get<double>();
    else if (key == "block") o.block = v.get<int>();
    else if (key == "support") o.support = v.get<int>();
    else if (key == "spacing") o.spacing = v.get<int>();
    else if (key == "count_limit") o.count_limit = v.get<int>();
    else if (key == "pattern") o.pattern = v.get<std::string>();
    else if (key == "threads") o.threads = v.get<int>();
    else if (key == "seed") o.seed = v.get<long long>();
    else if (key == "out_dir") o.out_dir = v.get<std::string>();
    else if (key == "stride") o.stride = v.get<int>();
    else if (key == "input") o.input = v.get<std::string>();
    else throw UsageError("config file: unknown key '" + key + "'");
}

// CLI flags beat the config file, which beats the defaults.
void apply_config_file(const std::string& path, CLI::App* cmd, Options& o) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError(path + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw UsageError(path + ": config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const char* flag = nullptr;
        for (const auto& [k, f] : kConfigKeys)
            if (key == k) flag = f;
        if (!flag) throw UsageError(path + ": unknown key '" + key + "'");
        if (cmd->count(flag) == 0) assign_from_json(o, key, value);
    }
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string fingerprint(const std::string& command, const Options& o) {
    std::string fp = "config: command=" + command;
    fp += " algorithm=" + o.algorithm;
    fp += " gamma=" + format_g(o.gamma);
    fp += " iterations=" + std::to_string(o.iterations);
    fp += " fft_size=" + std::to_string(o.fft_size);
    fp += " rho_hat=" + format_g(o.rho_hat);
    fp += " block=" + std::to_string(o.block);
    fp += " support=" + std::to_string(o.support);
    fp += " spacing=" + std::to_string(o.spacing);
    fp += " count_limit=" + std::to_string(o.count_limit);
    fp += " pattern=" + (o.pattern.empty() ? std::string("grid") : o.pattern);
    fp += " threads=" + std::to_string(o.threads);
    fp += " seed=" + std::to_string(o.seed);
    fp += " stride=" + std::to_string(o.stride);
    fp += " input=" + o.input;
    return fp;
}

fs::path resolve_out_dir(const Options& o) {
    std::string dir = o.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("FSE_OUT_DIR");
        dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        const size_t end = s.find(sep, start);
        if (end == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

fse::Rect parse_rect(const std::string& s) {
    const std::vector<std::string> parts = split(s, ',');
    if (parts.size() != 4) throw UsageError("expected 'row,col,height,width', got '" + s + "'");
    try {
        return {std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]),
                std::stoi(parts[3])};
    } catch (const std::exception&) {
        throw UsageError("expected four integers in '" + s + "'");
    }
}

fse::ConcealConfig conceal_config(const Options& o) {
    fse::ConcealConfig cc;
    cc.algorithm = fse::parse_algorithm(o.algorithm);
    cc.gamma = o.gamma;
    cc.iterations = o.iterations;
    cc.transform_size = o.fft_size;
    cc.rho_hat = o.rho_hat;
    cc.support_width = o.support;
    cc.threads = o.threads;
    return cc;
}

fse::LossPattern resolve_pattern(const Options& o, const fse::SampleGrid& img) {
    if (!o.pattern.empty()) return fse::load_pattern(o.pattern, img.width, img.height);
    return fse::generate_grid_pattern(img.width, img.height, o.block, o.spacing, o.count_limit);
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& emit) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    emit(out);
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

int cmd_extrapolate(const Options& o, const std::vector<std::string>& missing_flags,
                    const std::vector<std::string>& outside_flags, const std::string& basis_name) {
    const fse::SampleGrid window = fse::read_image(o.input);

    std::vector<fse::Rect> missing;
    for (const std::string& s : missing_flags) missing.push_back(parse_rect(s));
    if (missing.empty())
        missing.push_back({(window.height - o.block) / 2, (window.width - o.block) / 2, o.block,
                           o.block});
    std::vector<fse::Rect> outside;
    for (const std::string& s : outside_flags) outside.push_back(parse_rect(s));

    const fse::RegionMask mask =
        fse::build_region_mask(window.width, window.height, missing, outside);

    fse::ConcealConfig cc = conceal_config(o);
    if (basis_name == "dct")
        cc.basis = fse::BasisKind::dct2d;
    else if (basis_name != "dft")
        throw UsageError("unknown basis '" + basis_name + "' (expected dft or dct)");
    cc.record_traces = true;

    const fse::WindowRun run = fse::extrapolate_window(window, mask, cc);

    const fs::path dir = resolve_out_dir(o);
    fse::write_pgm((dir / "extrapolated.pgm").string(), run.model);
    const std::string fp = fingerprint("extrapolate", o);
    write_file(dir / "trace.csv", [&](std::ostream& os) { run.trace.write_csv(os, fp); });

    std::cout << "iterations=" << run.trace.records.size() << " converged="
              << (run.trace.converged ? "true" : "false") << " wrote "
              << (dir / "extrapolated.pgm").string() << ", " << (dir / "trace.csv").string()
              << "\n";
    return 0;
}

int cmd_conceal(const Options& o) {
    const fse::SampleGrid image = fse::read_image(o.input);
    const fse::LossPattern pattern = resolve_pattern(o, image);
    const fse::ConcealConfig cc = conceal_config(o);

    const fse::ConcealOutput result = fse::conceal(image, pattern, cc);

    fse::SampleGrid damaged = image;
    for (const fse::Rect& b : pattern.blocks)
        for (int r = b.row; r < b.row + b.height; ++r)
            for (int c = b.col; c < b.col + b.width; ++c) damaged.at(r, c) = 0.0;

    const fs::path dir = resolve_out_dir(o);
    fse::write_pgm((dir / "restored.pgm").string(), result.restored);
    fse::write_pgm((dir / "damaged.pgm").string(), damaged);
    const std::string fp = fingerprint("conceal", o);
    const std::string name = fs::path(o.input).filename().string();
    write_file(dir / "report.csv", [&](std::ostream& os) {
        fse::write_report_csv(os, result.report, name, fp);
    });

    std::cout << "blocks=" << pattern.blocks.size() << " psnr_db="
              << fse::format_psnr(result.report.psnr)
              << " sec_per_block=" << result.report.mean_seconds_per_block << " wrote "
              << (dir / "restored.pgm").string() << ", " << (dir / "damaged.pgm").string() << ", "
              << (dir / "report.csv").string() << "\n";
    return 0;
}

int cmd_sweep_gamma(const Options& o, const std::string& gamma_list) {
    std::vector<double> gammas;
    for (const std::string& s : split(gamma_list, ',')) {
        if (s.empty()) continue;
        try {
            gammas.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw UsageError("bad gamma value '" + s + "'");
        }
    }
    if (gammas.empty()) throw UsageError("sweep-gamma: at least one gamma value is required");
    for (double g : gammas)
        if (!(g > 0.0) || g > 1.0) throw UsageError("sweep-gamma: gamma must lie in (0, 1]");

    const fse::SampleGrid image = fse::read_image(o.input);
    const fse::LossPattern pattern = resolve_pattern(o, image);

    std::vector<fse::ConcealConfig> configs;
    for (double g : gammas) {
        fse::ConcealConfig cc = conceal_config(o);
        cc.algorithm = fse::Algorithm::fofse;
        cc.gamma = g;
        configs.push_back(cc);
    }
    fse::ConcealConfig fse_ref = conceal_config(o);
    fse_ref.algorithm = fse::Algorithm::fse;
    configs.push_back(fse_ref);
    fse::ConcealConfig ofse_ref = conceal_config(o);
    ofse_ref.algorithm = fse::Algorithm::ofse;
    configs.push_back(ofse_ref);

    const std::vector<fse::CurveSeries> curves =
        fse::psnr_vs_iterations(image, pattern, configs, o.iterations, o.stride);

    const fs::path dir = resolve_out_dir(o);
    const std::string fp = fingerprint("sweep-gamma", o);
    for (const fse::CurveSeries& series : curves) {
        const fs::path path = dir / ("curve_" + series.label + ".csv");
        write_file(path, [&](std::ostream& os) { fse::write_curve_csv(os, series, fp); });
        double peak = -1.0;
        int peak_at = 0;
        for (const fse::CurvePoint& p : series.points)
            if (p.psnr_db > peak) {
                peak = p.psnr_db;
                peak_at = p.iteration;
            }
        std::cout << "series=" << series.label << " peak_db=" << peak << " peak_at=" << peak_at
                  << " wrote " << path.string() << "\n";
    }
    return 0;
}

int cmd_bench(const Options& o, const std::string& algo_list, int repetitions, int warmup,
              int block_limit, const std::string& engine_override) {
    if (repetitions < 1) throw UsageError("bench: repetitions must be >= 1");
    if (warmup < 0) throw UsageError("bench: warmup must be >= 0");
    if (block_limit < 1) throw UsageError("bench: blocks must be >= 1");

    const fse::SampleGrid image = fse::read_image(o.input);
    const fse::LossPattern pattern = resolve_pattern(o, image);
    std::vector<fse::BlockWindow> windows = fse::extract_windows(image, pattern, o.support);
    if (windows.size() > static_cast<size_t>(block_limit)) windows.resize(block_limit);

    struct Row {
        std::string algorithm, engine;
        double mean = 0.0, stddev = 0.0;
        std::int64_t ops = 0;
    };
    std::vector<Row> rows;

    for (const std::string& name : split(algo_list, ',')) {
        if (name != "ofse" && name != "fofse")
            throw UsageError("bench supports ofse and fofse, got '" + name + "'");

        std::string engine = engine_override;
        if (engine == "auto") engine = (name == "ofse") ? "spatial" : "spectral";
        if (engine != "spatial" && engine != "spectral")
            throw UsageError("unknown engine '" + engine + "'");

        fse::ConcealConfig cc = conceal_config(o);
        cc.algorithm = fse::parse_algorithm(name);
        const fse::ExtrapolationConfig ec = cc.engine_config();

        auto run_window = [&](const fse::BlockWindow& bw) {
            if (engine == "spectral") {
                fse::extrapolate_window(bw.window, bw.mask, cc);
            } else {
                fse::spatial::run(bw.window, bw.mask, ec, fse::BasisKind::dft2d);
            }
        };

        for (int wrep = 0; wrep < warmup; ++wrep)
            for (const auto& bw : windows) run_window(bw);

        std::vector<double> rep_means;
        for (int rep = 0; rep < repetitions; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            for (const auto& bw : windows) run_window(bw);
            const auto t1 = std::chrono::steady_clock::now();
            rep_means.push_back(std::chrono::duration<double>(t1 - t0).count() /
                                static_cast<double>(windows.size()));
        }
        const double mean =
            std::accumulate(rep_means.begin(), rep_means.end(), 0.0) / rep_means.size();
        double var = 0.0;
        for (double v : rep_means) var += (v - mean) * (v - mean);
        const double stddev = rep_means.size() > 1 ? std::sqrt(var / (rep_means.size() - 1)) : 0.0;

        const fse::CostReport cost =
            fse::count_ops(name == "ofse" ? fse::CostAlgorithm::ofse : fse::CostAlgorithm::fofse,
                           o.block, o.block, o.fft_size, o.iterations);
        rows.push_back({name, engine, mean, stddev, cost.total()});
    }

    const fs::path dir = resolve_out_dir(o);
    const std::string fp = fingerprint("bench", o);
    write_file(dir / "bench.csv", [&](std::ostream& os) {
        os << "# " << fp << "\n";
        os << "algorithm,engine,iterations,repetitions,mean_sec_per_block,stddev_sec_per_block,"
              "model_total_ops\n";
        for (const Row& r : rows)
            os << r.algorithm << "," << r.engine << "," << o.iterations << "," << repetitions
               << "," << r.mean << "," << r.stddev << "," << r.ops << "\n";
    });

    for (const Row& r : rows)
        std::cout << "algorithm=" << r.algorithm << " engine=" << r.engine
                  << " mean_sec_per_block=" << r.mean << " stddev=" << r.stddev << "\n";
    const Row* ofse_row = nullptr;
    const Row* fofse_row = nullptr;
    for (const Row& r : rows) {
        if (r.algorithm == "ofse") ofse_row = &r;
        if (r.algorithm == "fofse") fofse_row = &r;
    }
    if (ofse_row && fofse_row && fofse_row->mean > 0.0)
        std::cout << "speedup=" << ofse_row->mean / fofse_row->mean << "\n";
    std::cout << "wrote " << (dir / "bench.csv").string() << "\n";
    return 0;
}

int cmd_cost_model(const Options& o, const std::string& iteration_list) {
    std::vector<int> iterations;
    for (const std::string& s : split(iteration_list, ',')) {
        if (s.empty()) continue;
        try {
            iterations.push_back(std::stoi(s));
        } catch (const std::exception&) {
            throw UsageError("bad iteration count '" + s + "'");
        }
    }
    if (iterations.empty()) throw UsageError("cost-model: at least one iteration count required");

    const fs::path dir = resolve_out_dir(o);
    const std::string fp = fingerprint("cost-model", o);
    write_file(dir / "cost.csv", [&](std::ostream& os) {
        os << "# " << fp << "\n";
        os << "iterations,algorithm,category,ops\n";
        for (int it : iterations)
            for (fse::CostAlgorithm a : {fse::CostAlgorithm::ofse, fse::CostAlgorithm::fofse}) {
                const fse::CostReport r = fse::count_ops(a, o.block, o.block, o.fft_size, it);
                const std::pair<const char*, std::int64_t> cats[] = {
                    {"mul", r.mul}, {"mem", r.mem}, {"add", r.add}, {"func", r.func}};
                for (const auto& [cat, ops] : cats)
                    os << it << "," << fse::to_string(a) << "," << cat << "," << ops << "\n";
            }
    });
    std::cout << "wrote " << (dir / "cost.csv").string() << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, Options& o, std::string& config_path,
                      std::string& dump_path) {
    cmd->add_option("--algorithm", o.algorithm, "fse, ofse or fofse");
    cmd->add_option("--gamma", o.gamma, "compensation factor in (0,1]");
    cmd->add_option("--iterations", o.iterations, "iteration budget");
    cmd->add_option("--fft-size", o.fft_size, "transform grid size T");
    cmd->add_option("--rho-hat", o.rho_hat, "isotropic weight decay in (0,1)");
    cmd->add_option("--block", o.block, "lost block edge length");
    cmd->add_option("--support", o.support, "support frame width");
    cmd->add_option("--spacing", o.spacing, "grid pattern spacing");
    cmd->add_option("--count-limit", o.count_limit, "grid pattern block budget");
    cmd->add_option("--pattern", o.pattern, "loss pattern file (default: generated grid)");
    cmd->add_option("--threads", o.threads, "worker thread count");
    cmd->add_option("--seed", o.seed, "seed recorded in output fingerprints");
    cmd->add_option("--out-dir", o.out_dir, "output directory (env FSE_OUT_DIR)");
    cmd->add_option("--stride", o.stride, "curve checkpoint stride");
    cmd->add_option("--config", config_path, "JSON config file (flags take precedence)");
    cmd->add_option("--dump-config", dump_path,
                    "write the effective config as JSON and exit ('-' for stdout)");
}

int dump_config(const Options& o, const std::string& path) {
    const std::string text = to_json(o).dump(2) + "\n";
    if (path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-selective signal extrapolation and block-loss concealment"};
    app.require_subcommand(1);

    Options o;
    std::string config_path, dump_path;
    std::vector<std::string> missing_flags, outside_flags;
    std::string basis_name = "dft";
    std::string gamma_list;
    std::string algo_list = "ofse,fofse";
    std::string engine_override = "auto";
    std::string iteration_list = "10,20,50,100,200,500";
    int repetitions = 5, warmup = 1, block_limit = 1;

    CLI::App* extrapolate =
        app.add_subcommand("extrapolate", "extrapolate one window (debug aid)");
    extrapolate->add_option("--input", o.input, "window image (PGM or PNG)")->required();
    extrapolate->add_option("--missing", missing_flags,
                            "missing rect row,col,height,width (repeatable)");
    extrapolate->add_option("--outside", outside_flags,
                            "outside rect row,col,height,width (repeatable)");
    extrapolate->add_option("--basis", basis_name, "dft or dct");
    add_common_flags(extrapolate, o, config_path, dump_path);

    CLI::App* conceal = app.add_subcommand("conceal", "conceal lost blocks in an image");
    conceal->add_option("--input", o.input, "image (PGM or PNG)")->required();
    add_common_flags(conceal, o, config_path, dump_path);

    CLI::App* bench =
        app.add_subcommand("bench", "wall-clock per-block timing, direct vs spectral");
    bench->add_option("--input", o.input, "image (PGM or PNG)")->required();
    bench->add_option("--algorithms", algo_list, "comma list from {ofse,fofse}");
    bench->add_option("--engine", engine_override, "auto, spatial or spectral");
    bench->add_option("--repetitions", repetitions, "measured repetitions");
    bench->add_option("--warmup", warmup, "unmeasured warmup repetitions");
    bench->add_option("--blocks", block_limit, "number of pattern blocks to time");
    add_common_flags(bench, o, config_path, dump_path);

    CLI::App* sweep = app.add_subcommand("sweep-gamma", "PSNR-vs-iteration curves per gamma");
    sweep->add_option("--input", o.input, "image (PGM or PNG)")->required();
    sweep->add_option("--gammas", gamma_list, "comma list of gamma values")->required();
    add_common_flags(sweep, o, config_path, dump_path);

    CLI::App* cost = app.add_subcommand("cost-model", "analytic operation counts CSV");
    cost->add_option("--iterations-list", iteration_list, "comma list of iteration counts");
    add_common_flags(cost, o, config_path, dump_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(config_path, active, o);
        if (active->count("--dump-config") > 0) return dump_config(o, dump_path);

        if (active == extrapolate)
            return cmd_extrapolate(o, missing_flags, outside_flags, basis_name);
        if (active == conceal) return cmd_conceal(o);
        if (active == bench)
            return cmd_bench(o, algo_list, repetitions, warmup, block_limit, engine_override);
        if (active == sweep) return cmd_sweep_gamma(o, gamma_list);
        if (active == cost) return cmd_cost_model(o, iteration_list);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
