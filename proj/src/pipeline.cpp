#include "fse/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fse/engine_spectral.hpp"

namespace fse {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::fse: return "fse";
        case Algorithm::ofse: return "ofse";
        case Algorithm::fofse: return "fofse";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "fse") return Algorithm::fse;
    if (name == "ofse") return Algorithm::ofse;
    if (name == "fofse") return Algorithm::fofse;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected fse, ofse or fofse)");
}

void ConcealConfig::validate() const {
    engine_config().validate();
    if (support_width < 1) throw std::invalid_argument("config: support width must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: thread count must be >= 1");
}

ExtrapolationConfig ConcealConfig::engine_config() const {
    ExtrapolationConfig ec;
    ec.iterations = iterations;
    ec.transform_size = transform_size;
    ec.rho_hat = rho_hat;
    ec.gamma = gamma;
    switch (algorithm) {
        case Algorithm::fse:
            ec.selection = SelectionRule::min_distance;
            ec.compensation = Compensation::none;
            break;
        case Algorithm::ofse:
            ec.selection = SelectionRule::min_distance;
            ec.compensation = Compensation::full_od;
            break;
        case Algorithm::fofse:
            ec.selection = SelectionRule::max_weighted_portion;
            ec.compensation = Compensation::constant_gamma;
            break;
    }
    return ec;
}

std::string series_label(const ConcealConfig& config) {
    if (config.algorithm != Algorithm::fofse) return to_string(config.algorithm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fofse_g%g", config.gamma);
    return buf;
}

namespace {

struct WindowCase {
    SampleGrid window;
    RegionMask mask;
    Rect block;
};

// Window = block + support frame on every side. Samples outside the image or
// inside a different lost block are OUTSIDE.
WindowCase build_window(const SampleGrid& image, const std::vector<unsigned char>& lost,
                        const LossPattern& pattern, size_t block_index, int support) {
    const Rect& b = pattern.blocks[block_index];
    const int row0 = b.row - support;
    const int col0 = b.col - support;
    const int wh = b.height + 2 * support;
    const int ww = b.width + 2 * support;

    WindowCase wc;
    wc.block = b;
    wc.window = SampleGrid(ww, wh, 0.0);
    wc.mask.width = ww;
    wc.mask.height = wh;
    wc.mask.labels.assign(static_cast<size_t>(ww) * wh, Region::outside);

    for (int r = 0; r < wh; ++r)
        for (int c = 0; c < ww; ++c) {
            const int gr = row0 + r;
            const int gc = col0 + c;
            const bool in_block = gr >= b.row && gr < b.row + b.height && gc >= b.col &&
                                  gc < b.col + b.width;
            Region label = Region::outside;
            if (in_block) {
                label = Region::missing;
            } else if (gr >= 0 && gr < image.height && gc >= 0 && gc < image.width) {
                const bool other_loss = lost[static_cast<size_t>(gr) * image.width + gc] != 0;
                label = other_loss ? Region::outside : Region::support;
                if (label == Region::support) wc.window.at(r, c) = image.at(gr, gc);
            }
            wc.mask.labels[static_cast<size_t>(r) * ww + c] = label;
        }
    return wc;
}

std::vector<unsigned char> lost_map(const SampleGrid& image, const LossPattern& pattern) {
    std::vector<unsigned char> lost(static_cast<size_t>(image.width) * image.height, 0);
    for (const Rect& b : pattern.blocks)
        for (int r = b.row; r < b.row + b.height; ++r)
            for (int c = b.col; c < b.col + b.width; ++c)
                lost[static_cast<size_t>(r) * image.width + c] = 1;
    return lost;
}

void check_pattern_fits(const SampleGrid& image, const LossPattern& pattern,
                        const ConcealConfig& config) {
    validate_pattern(pattern);
    if (pattern.image_width != image.width || pattern.image_height != image.height)
        throw std::invalid_argument("conceal: pattern dimensions do not match the image");
    const int window_h = pattern.block_height + 2 * config.support_width;
    const int window_w = pattern.block_width + 2 * config.support_width;
    if (window_h > config.transform_size || window_w > config.transform_size)
        throw std::invalid_argument("conceal: block + support frame exceeds the transform grid");
}

// Runs fn(i) for i in [0, n) across the configured number of threads,
// rethrowing the first failure after all workers join.
void parallel_blocks(size_t n, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const size_t count = std::min<size_t>(threads, n);
    pool.reserve(count);
    for (size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double clamp_pixel(double v) { return v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v); }

}  // namespace

std::vector<BlockWindow> extract_windows(const SampleGrid& image, const LossPattern& pattern,
                                         int support_width) {
    validate_pattern(pattern);
    const std::vector<unsigned char> lost = lost_map(image, pattern);
    std::vector<BlockWindow> out;
    out.reserve(pattern.blocks.size());
    for (size_t i = 0; i < pattern.blocks.size(); ++i) {
        WindowCase wc = build_window(image, lost, pattern, i, support_width);
        out.push_back({std::move(wc.window), std::move(wc.mask), wc.block});
    }
    return out;
}

WindowRun extrapolate_window(const SampleGrid& window, const RegionMask& mask,
                             const ConcealConfig& config) {
    const ExtrapolationConfig ec = config.engine_config();
    if (config.basis == BasisKind::dft2d) {
        const WeightField weight = build_isotropic_weight(mask, ec.rho_hat);
        spectral::Spectrum spec = spectral::init_spectra(window, mask, weight, ec.transform_size);
        switch (config.algorithm) {
            case Algorithm::fse:
                spectral::fast_iterate(spec, 1.0, ec.iterations);
                break;
            case Algorithm::fofse:
                spectral::fast_iterate(spec, ec.gamma, ec.iterations);
                break;
            case Algorithm::ofse:
                spectral::fast_iterate_full_od(spec, ec.iterations);
                break;
        }
        SampleGrid model = spectral::synthesize_model(spec);
        return {std::move(model), std::move(spec.trace)};
    }
    spatial::RunResult r = spatial::run(window, mask, ec, config.basis);
    return {std::move(r.model), std::move(r.trace)};
}

ConcealOutput conceal(const SampleGrid& image, const LossPattern& pattern,
                      const ConcealConfig& config) {
    config.validate();
    check_pattern_fits(image, pattern, config);

    const std::vector<unsigned char> lost = lost_map(image, pattern);
    ConcealOutput out;
    out.restored = image;
    out.report.algorithm = to_string(config.algorithm);
    out.report.gamma = config.algorithm == Algorithm::fofse ? config.gamma : 1.0;
    out.report.iterations = config.iterations;
    out.report.block_results.resize(pattern.blocks.size());

    SampleGrid& restored = out.restored;
    auto conceal_block = [&](size_t i) {
        try {
            const WindowCase wc = build_window(image, lost, pattern, i, config.support_width);
            const auto t0 = std::chrono::steady_clock::now();
            WindowRun run = extrapolate_window(wc.window, wc.mask, config);
            const auto t1 = std::chrono::steady_clock::now();

            const Rect& b = wc.block;
            const int row0 = b.row - config.support_width;
            const int col0 = b.col - config.support_width;
            for (int r = 0; r < wc.mask.height; ++r)
                for (int c = 0; c < wc.mask.width; ++c)
                    if (wc.mask.at(r, c) == Region::missing)
                        restored.at(row0 + r, col0 + c) = clamp_pixel(run.model.at(r, c));

            BlockResult& br = out.report.block_results[i];
            br.block = b;
            br.seconds = std::chrono::duration<double>(t1 - t0).count();
            if (config.record_traces) br.trace = std::move(run.trace);
        } catch (const std::exception& e) {
            const Rect& b = pattern.blocks[i];
            throw std::runtime_error("block " + std::to_string(i) + " at (" +
                                     std::to_string(b.row) + "," + std::to_string(b.col) +
                                     "): " + e.what());
        }
    };
    parallel_blocks(pattern.blocks.size(), config.threads, conceal_block);

    double total_seconds = 0.0;
    for (const BlockResult& br : out.report.block_results) total_seconds += br.seconds;
    out.report.mean_seconds_per_block =
        pattern.blocks.empty() ? 0.0 : total_seconds / static_cast<double>(pattern.blocks.size());

    RegionMask image_mask;
    image_mask.width = image.width;
    image_mask.height = image.height;
    image_mask.labels.assign(lost.size(), Region::support);
    for (size_t i = 0; i < lost.size(); ++i)
        if (lost[i]) image_mask.labels[i] = Region::missing;
    out.report.psnr = pattern.blocks.empty()
                          ? PsnrResult{true, 0.0}
                          : psnr(image, restored, image_mask, Region::missing, 255.0);
    return out;
}

std::vector<CurveSeries> psnr_vs_iterations(const SampleGrid& image, const LossPattern& pattern,
                                            std::span<const ConcealConfig> algorithms,
                                            int max_iterations, int stride) {
    if (stride < 1) throw std::invalid_argument("psnr_vs_iterations: stride must be >= 1");
    if (max_iterations < 0)
        throw std::invalid_argument("psnr_vs_iterations: iterations must be >= 0");

    std::vector<int> checkpoints;
    for (int it = stride; it <= max_iterations; it += stride) checkpoints.push_back(it);

    std::vector<CurveSeries> out;
    if (checkpoints.empty()) {
        for (const ConcealConfig& cfg : algorithms) out.push_back({series_label(cfg), {}});
        return out;
    }

    const std::vector<unsigned char> lost = lost_map(image, pattern);
    size_t missing_total = 0;
    for (unsigned char v : lost) missing_total += v;

    for (const ConcealConfig& cfg : algorithms) {
        cfg.validate();
        check_pattern_fits(image, pattern, cfg);

        // sq[block][checkpoint], reduced in block order for determinism.
        std::vector<std::vector<double>> sq(pattern.blocks.size(),
                                            std::vector<double>(checkpoints.size(), 0.0));
        auto run_block = [&](size_t i) {
            const WindowCase wc = build_window(image, lost, pattern, i, cfg.support_width);
            const ExtrapolationConfig ec = cfg.engine_config();
            const Rect& b = wc.block;
            const int row0 = b.row - cfg.support_width;
            const int col0 = b.col - cfg.support_width;

            auto accumulate = [&](const SampleGrid& model, size_t ck) {
                double acc = 0.0;
                for (int r = 0; r < wc.mask.height; ++r)
                    for (int c = 0; c < wc.mask.width; ++c)
                        if (wc.mask.at(r, c) == Region::missing) {
                            const double d =
                                image.at(row0 + r, col0 + c) - clamp_pixel(model.at(r, c));
                            acc += d * d;
                        }
                sq[i][ck] = acc;
            };

            if (cfg.basis == BasisKind::dft2d) {
                const WeightField weight = build_isotropic_weight(wc.mask, ec.rho_hat);
                spectral::Spectrum spec =
                    spectral::init_spectra(wc.window, wc.mask, weight, ec.transform_size);
                int done = 0;
                for (size_t ck = 0; ck < checkpoints.size(); ++ck) {
                    const int target = checkpoints[ck];
                    if (cfg.algorithm == Algorithm::ofse)
                        spectral::fast_iterate_full_od(spec, target - done);
                    else
                        spectral::fast_iterate(
                            spec, cfg.algorithm == Algorithm::fse ? 1.0 : cfg.gamma,
                            target - done);
                    done = target;
                    accumulate(spectral::synthesize_model(spec), ck);
                }
                return;
            }

            const BasisSet basis(cfg.basis, ec.transform_size);
            const WeightField weight = build_isotropic_weight(wc.mask, ec.rho_hat);
            spatial::ModelState state = spatial::init_state(wc.window, wc.mask);
            int done = 0;
            for (size_t ck = 0; ck < checkpoints.size(); ++ck) {
                for (; done < checkpoints[ck]; ++done)
                    if (!spatial::step(state, ec, basis, weight)) break;
                done = checkpoints[ck];
                SampleGrid model(wc.window.width, wc.window.height, 0.0);
                const int t = ec.transform_size;
                for (const auto& [key, cval] : state.coefficients) {
                    const Index k{key / t, key % t};
                    if (basis.kind() == BasisKind::dft2d && !basis.canonical(k)) continue;
                    const bool paired =
                        basis.kind() == BasisKind::dft2d && !basis.self_conjugate(k);
                    for (int r = 0; r < model.height; ++r)
                        for (int c = 0; c < model.width; ++c) {
                            const std::complex<double> phi = basis.value(k, r, c);
                            model.at(r, c) +=
                                paired ? 2.0 * (cval * phi).real() : cval.real() * phi.real();
                        }
                }
                accumulate(model, ck);
            }
        };
        parallel_blocks(pattern.blocks.size(), cfg.threads, run_block);

        CurveSeries series;
        series.label = series_label(cfg);
        for (size_t ck = 0; ck < checkpoints.size(); ++ck) {
            double total = 0.0;
            for (size_t i = 0; i < sq.size(); ++i) total += sq[i][ck];
            const double mse = missing_total ? total / static_cast<double>(missing_total) : 0.0;
            const double db = mse > 0.0 ? 10.0 * std::log10(255.0 * 255.0 / mse)
                                        : std::numeric_limits<double>::infinity();
            series.points.push_back({checkpoints[ck], db});
        }
        out.push_back(std::move(series));
    }
    return out;
}

namespace {

std::string format_db(const PsnrResult& p) {
    if (p.identical) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", p.db);
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& os, const ConcealmentReport& report,
                      const std::string& image_name, const std::string& fingerprint) {
    if (!fingerprint.empty()) os << "# " << fingerprint << "\n";
    os << "image,algorithm,gamma,iterations,psnr_db,sec_per_block\n";
    os << image_name << "," << report.algorithm << "," << format_double(report.gamma) << ","
       << report.iterations << "," << format_db(report.psnr) << ","
       << format_double(report.mean_seconds_per_block) << "\n";
}

void write_curve_csv(std::ostream& os, const CurveSeries& series, const std::string& fingerprint) {
    if (!fingerprint.empty()) os << "# " << fingerprint << "\n";
    os << "iteration,psnr_db\n";
    for (const CurvePoint& p : series.points)
        os << p.iteration << "," << format_double(p.psnr_db) << "\n";
}

}  // namespace fse
