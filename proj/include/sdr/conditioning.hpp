#pragma once

#include "sdr/feature_matrix.hpp"

namespace sdr {

// Replaces masked frames column-wise with cubic-spline values through the
// observed frames (not-a-knot boundary, which reproduces cubic signals
// exactly). Falls back to piecewise-linear interpolation when fewer than 4
// frames are observed. Frames outside the first/last observed frame hold
// the boundary value. An absent mask is treated as all-observed. The
// output mask is all-true.
FeatureMatrix interpolate_missing(const FeatureMatrix& m);

// Column-wise Savitzky-Golay smoothing. Interior frames use the standard
// convolution coefficients; edge frames are fitted with a least-squares
// polynomial over the truncated one-sided window (order reduced when the
// window holds fewer than order+1 points). Requires a fully observed
// matrix: run interpolate_missing first.
FeatureMatrix savgol_smooth(const FeatureMatrix& m, int window, int order);

// Interior filter coefficients (length = window) for given window/order.
// Exposed for the oracle cross-checks in tests.
Vec savgol_coefficients(int window, int order);

}  // namespace sdr
