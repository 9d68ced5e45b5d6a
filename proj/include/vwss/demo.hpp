#pragma once

#include <filesystem>
#include <vector>

namespace vwss {

/// End-to-end seeded demonstration on a synthetic daily price series:
/// generate a bursty market, label down movements, build lookback windows,
/// train the bundled network for 50 epochs, calibrate and select two
/// ensembles (thresholds optimized for the plain TSS and for its
/// value-weighted variant), evaluate both on the test split, and run the
/// trading simulation for each. Every artifact lands under out_dir; the
/// returned list names the files written, in writing order. All seeds are
/// fixed constants, so two runs of the same build produce byte-identical
/// trees.
std::vector<std::filesystem::path> run_demo(
    const std::filesystem::path& out_dir);

}  // namespace vwss
