#pragma once

#include "salem/dyadic.hpp"
#include "salem/spectral.hpp"
#include "salem/walks.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace salem {

// One walk sample per stage-m construction interval: the walk value at the
// level-n dyadic point nearest the interval midpoint (always inside when the
// walk grid resolves the stage, 2^-n <= xi^m).
std::vector<double> image_points(const WalkPath& path, const CantorSpec& spec, int m);

struct BoxCountResult {
    std::vector<double> scales;        // box sides, descending
    std::vector<std::uint64_t> counts; // occupied boxes per scale
    double dimension = 0.0;            // slope of log N(d) vs log(1/d)
    double r_squared = 0.0;
    bool degenerate = false;           // all points coincident
};

// Counts floor(p/scale) occupancy; needs >= 4 scales spanning >= 3 octaves.
BoxCountResult box_count(const std::vector<double>& points,
                         const std::vector<double>& scales);

struct CapacityResult {
    double crossover = 0.0;            // alpha where energy growth switches on
    std::vector<double> alphas;
    std::vector<double> growth;        // per-level slope of log energy at each alpha
    bool flagged = false;              // no crossover inside the grid / degenerate
    double threshold = 0.0;            // slope cutoff used
};

// Growth-rate classification of the off-diagonal energy of level-n atomizations:
// bounded (slope <= 0.2 log 2) vs growing; linear interpolation at the switch.
CapacityResult capacity_dim(const TreeFlowMeasure& flow, const std::vector<int>& depths,
                            const std::vector<double>& alpha_grid);

struct DimensionReport {
    // inputs
    std::string ratio;                 // "p/q"
    int depth = 0;                     // walk/flow level n
    int stage = 0;                     // construction stage m used for image points
    std::uint64_t seed = 0;
    double u_max = 0.0;
    // targets
    double target_beta = 0.0;
    double target_gamma = 0.0;         // min(1, 2 beta)
    // estimates
    BoxCountResult box;
    CapacityResult capacity;
    DecayFit decay;
    double fourier_exponent = 0.0;     // achieved decay exponent of the image measure
    double fourier_dim_estimate = 0.0; // min(1, 2 * exponent)
    double salem_gap = 0.0;            // |fourier_dim_estimate - box.dimension|
    // health
    FlowCheckReport flow_report;
    FrostmanReport frostman;
    std::vector<double> ladder_distances;
    bool fourier_below_box = false;    // fourier_dim_estimate <= box_dim + 0.1
    bool consistent = false;           // above plus both estimates near target_gamma
};

// Full pipeline: flow -> ladder -> decay fit -> image points -> box count ->
// capacity crossover, with every sub-report attached.
DimensionReport salem_report(const CantorSpec& spec, std::uint64_t seed, int n, double u_max);

} // namespace salem
