#pragma once

#include <span>
#include <string>
#include <vector>

#include "fse/engine_spatial.hpp"
#include "fse/grid.hpp"
#include "fse/pattern.hpp"
#include "fse/trace.hpp"

namespace fse {

enum class Algorithm { fse, ofse, fofse };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ConcealConfig {
    Algorithm algorithm = Algorithm::fofse;
    double gamma = 0.2;
    int iterations = 200;
    int transform_size = 64;
    double rho_hat = 0.8;
    int support_width = 16;
    int threads = 1;
    bool record_traces = false;
    BasisKind basis = BasisKind::dft2d;

    void validate() const;
    // The engine-level settings this algorithm maps onto.
    ExtrapolationConfig engine_config() const;
};

// Series name used in sweep outputs: "fse", "ofse", or "fofse_g<gamma>".
std::string series_label(const ConcealConfig& config);

struct BlockResult {
    Rect block;
    double seconds = 0.0;
    Trace trace;  // populated when record_traces is set
};

struct ConcealmentReport {
    std::string algorithm;
    double gamma = 0.0;
    int iterations = 0;
    PsnrResult psnr;  // over MISSING samples only
    double mean_seconds_per_block = 0.0;
    std::vector<BlockResult> block_results;
};

struct ConcealOutput {
    SampleGrid restored;
    ConcealmentReport report;
};

struct BlockWindow {
    SampleGrid window;
    RegionMask mask;
    Rect block;
};

// Extraction windows (block + support frame) for every block of the pattern,
// with OUTSIDE marking for image borders and neighbouring losses.
std::vector<BlockWindow> extract_windows(const SampleGrid& image, const LossPattern& pattern,
                                         int support_width);

struct WindowRun {
    SampleGrid model;
    Trace trace;
};

// Single-window extrapolation under the algorithm mapping: the spectral
// engine serves the DFT set, the direct engine everything else.
WindowRun extrapolate_window(const SampleGrid& window, const RegionMask& mask,
                             const ConcealConfig& config);

// Extrapolates each lost block from its surrounding support frame and writes
// the model back over the missing samples only. Neighbouring losses and
// out-of-image samples count as OUTSIDE, so restored blocks never feed each
// other's support.
ConcealOutput conceal(const SampleGrid& image, const LossPattern& pattern,
                      const ConcealConfig& config);

struct CurvePoint {
    int iteration = 0;
    double psnr_db = 0.0;
};

struct CurveSeries {
    std::string label;
    std::vector<CurvePoint> points;
};

// PSNR over the pattern's missing samples at every `stride` iterations, from
// one continued run per block (no restarts between checkpoints).
std::vector<CurveSeries> psnr_vs_iterations(const SampleGrid& image, const LossPattern& pattern,
                                            std::span<const ConcealConfig> algorithms,
                                            int max_iterations, int stride);

void write_report_csv(std::ostream& os, const ConcealmentReport& report,
                      const std::string& image_name, const std::string& fingerprint);
void write_curve_csv(std::ostream& os, const CurveSeries& series, const std::string& fingerprint);

}  // namespace fse
