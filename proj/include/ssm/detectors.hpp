#pragma once
#include <cstdint>
#include <ssm/constellation.hpp>

namespace ssm {

struct DetectionResult
{
    int antenna = 0;
    int point_index = 0;
    BitWord bits;
    /// Complex multiplications executed, under the accounting rules below.
    std::int64_t cm_count = 0;
    /// ||y - h_j x||^2 of the decision.
    double metric = 0.0;
};

// Complexity accounting (one unit = one complex multiplication):
//   h_j^H y               N_r per antenna
//   ||h_j||^2             N_r per antenna
//   |x_m|^2               1 per constellation point
//   conj(x) (h_j^H y)     1
//   |x|^2 ||h_j||^2       1
//   |h_j^H y|^2           1
//   |g - x_m|^2           1
//   per-axis slicer       log2 M (binary search depth)
// Real divisions and additions are not counted. The decision metric is
// evaluated in the expanded form |x|^2 ||h_j||^2 - 2 Re(conj(x) h_j^H y),
// which differs from ||y - h_j x||^2 by the constant ||y||^2.

/// Exhaustive search over every (antenna, point) pair; ties go to the
/// lexicographically lowest (j, m).
DetectionResult detect_joint_ml(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c);

/// Per-antenna matched filter g_j = h_j^H y / ||h_j||^2, nearest-point
/// slicing of g_j, then a running minimum of the metric over all antennas.
/// Decisions coincide with detect_joint_ml.
DetectionResult detect_proposed(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c);

/// Two-stage detector: antenna by largest |h_j^H y| / ||h_j||, then the
/// nearest point to g_j on that antenna.
DetectionResult detect_suboptimal(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c);

std::int64_t cm_formula_joint_ml(int n_t, int n_r, int order);
std::int64_t cm_formula_proposed(int n_t, int n_r, int order);
std::int64_t cm_formula_suboptimal(int n_t, int n_r, int order);

} // namespace ssm
