#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vwm/core/types.hpp"
#include "vwm/tsdf/volume.hpp"
#include "vwm/worldsim/scene.hpp"

namespace vwm {

/// One generated frame of a palindrome run, with the masks needed for the
/// restricted comparison. Empty masks mean all-true.
struct RecallFrame {
    Image image;
    std::vector<std::uint8_t> static_mask;    // ground-truth static pixels
    std::vector<std::uint8_t> rendered_mask;  // condition-view coverage
};

struct RecallPair {
    int pose_index = 0;  // i of the pair (i, n-1-i)
    double psnr = 0.0;
    double ssim = 0.0;
    // Restricted to static_mask AND rendered_mask of both frames; absent
    // when that mask is empty.
    std::optional<double> masked_psnr;
};

struct RecallReport {
    std::vector<RecallPair> pairs;
    double mean_psnr = 0.0, median_psnr = 0.0;
    double mean_ssim = 0.0, median_ssim = 0.0;
    double mean_masked_psnr = 0.0, median_masked_psnr = 0.0;
    std::size_t masked_pair_count = 0;

    std::size_t pair_count() const { return pairs.size(); }
};

/// Pairs frame i with frame n-1-i along a palindromic trajectory (n =
/// trajectory length; a pair is scored when both frames exist) and computes
/// full-image PSNR/SSIM plus the masked PSNR variant. Throws if the
/// trajectory is not a palindrome or no pair is complete.
RecallReport view_recall_eval(const std::vector<RecallFrame>& frames,
                              const std::vector<CameraPose>& trajectory);

void write_recall_report_json(const std::filesystem::path& path, const RecallReport& report);
void write_recall_report_csv(const std::filesystem::path& path, const RecallReport& report);

/// Ground-truth dynamic-suppression scores for an extraction from `volume`:
///   dynamic_leak_rate  — fraction of extracted points inside any dynamic
///                        object's swept volume over frames [0, max_frame],
///                        inflated by one voxel;
///   static_recall      — fraction of voxels on the observable static
///                        surface (within voxel/2 of the union boundary of
///                        the static solids) observed with W >= min_weight
///                        that pass extraction.
struct SuppressionReport {
    double dynamic_leak_rate = 0.0;
    double static_recall = 0.0;
    std::size_t extracted_points = 0;
    std::size_t leaked_points = 0;
    std::size_t surface_voxels_observed = 0;
    std::size_t surface_voxels_recalled = 0;
};

SuppressionReport suppression_metrics(const PointCloud& extracted, const TsdfVolume& volume,
                                      const SyntheticScene& scene, const FusionConfig& cfg,
                                      int max_frame);

void write_suppression_report_json(const std::filesystem::path& path,
                                   const SuppressionReport& report);

}  // namespace vwm
