#include "vwm/eval/recall.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vwm/core/error.hpp"
#include "vwm/eval/metrics.hpp"

namespace vwm {

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / double(values.size());
}

bool pose_equal(const CameraPose& a, const CameraPose& b) {
    return (a.rotation - b.rotation).cwiseAbs().maxCoeff() <= 1e-12 &&
           (a.translation - b.translation).cwiseAbs().maxCoeff() <= 1e-12;
}

// Intersection of the per-frame restriction masks; empty inputs mean
// all-true. Returns an empty vector when every pixel survives (so the
// caller can fall back to the cheaper unmasked path).
std::vector<std::uint8_t> combined_mask(const RecallFrame& a, const RecallFrame& b,
                                        std::size_t pixels) {
    const std::vector<std::uint8_t>* parts[4] = {&a.static_mask, &a.rendered_mask, &b.static_mask,
                                                 &b.rendered_mask};
    std::vector<std::uint8_t> mask;
    for (const auto* part : parts) {
        if (part->empty()) continue;
        if (part->size() != pixels)
            throw ValidationError("recall: mask size does not match the images");
        if (mask.empty()) {
            mask = *part;
        } else {
            for (std::size_t i = 0; i < pixels; ++i) mask[i] = mask[i] && (*part)[i];
        }
    }
    return mask;
}

}  // namespace

RecallReport view_recall_eval(const std::vector<RecallFrame>& frames,
                              const std::vector<CameraPose>& trajectory) {
    const std::size_t n = trajectory.size();
    if (n < 2 || n % 2 != 0)
        throw ValidationError("recall: trajectory must have a positive even length");
    for (std::size_t i = 0; i < n / 2; ++i) {
        if (!pose_equal(trajectory[i], trajectory[n - 1 - i]))
            throw ValidationError("recall: trajectory is not a palindrome at index " +
                                  std::to_string(i));
    }
    if (frames.size() > n)
        throw ValidationError("recall: more frames than trajectory poses");

    RecallReport report;
    std::vector<double> psnrs, ssims, masked;
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        if (j >= frames.size()) continue;  // pair incomplete
        const RecallFrame& fa = frames[i];
        const RecallFrame& fb = frames[j];

        RecallPair pair;
        pair.pose_index = int(i);
        pair.psnr = psnr(fa.image, fb.image);
        pair.ssim = ssim(fa.image, fb.image);

        const auto mask = combined_mask(fa, fb, fa.image.pixel_count());
        if (mask.empty()) {
            pair.masked_psnr = pair.psnr;  // all restriction masks absent
        } else {
            const bool any = std::find(mask.begin(), mask.end(), std::uint8_t(1)) != mask.end();
            if (any) pair.masked_psnr = psnr(fa.image, fb.image, &mask);
        }

        psnrs.push_back(pair.psnr);
        ssims.push_back(pair.ssim);
        if (pair.masked_psnr) masked.push_back(*pair.masked_psnr);
        report.pairs.push_back(pair);
    }
    if (report.pairs.empty()) throw ValidationError("recall: no complete pose pair to score");

    report.mean_psnr = mean(psnrs);
    report.median_psnr = median(psnrs);
    report.mean_ssim = mean(ssims);
    report.median_ssim = median(ssims);
    report.mean_masked_psnr = mean(masked);
    report.median_masked_psnr = median(masked);
    report.masked_pair_count = masked.size();
    return report;
}

namespace {

using nlohmann::json;

void dump_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw ValidationError(path.string() + ": write failed");
}

}  // namespace

void write_recall_report_json(const std::filesystem::path& path, const RecallReport& report) {
    json doc;
    doc["pair_count"] = report.pair_count();
    doc["mean_psnr"] = report.mean_psnr;
    doc["median_psnr"] = report.median_psnr;
    doc["mean_ssim"] = report.mean_ssim;
    doc["median_ssim"] = report.median_ssim;
    doc["masked_pair_count"] = report.masked_pair_count;
    doc["mean_masked_psnr"] = report.mean_masked_psnr;
    doc["median_masked_psnr"] = report.median_masked_psnr;
    doc["pairs"] = json::array();
    for (const RecallPair& p : report.pairs) {
        json row = {{"pose_index", p.pose_index}, {"psnr", p.psnr}, {"ssim", p.ssim}};
        if (p.masked_psnr) row["masked_psnr"] = *p.masked_psnr;
        doc["pairs"].push_back(row);
    }
    dump_json(path, doc);
}

void write_recall_report_csv(const std::filesystem::path& path, const RecallReport& report) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");
    out << "pose_index,psnr,ssim,masked_psnr\n";
    out.precision(17);
    for (const RecallPair& p : report.pairs) {
        out << p.pose_index << "," << p.psnr << "," << p.ssim << ",";
        if (p.masked_psnr) out << *p.masked_psnr;
        out << "\n";
    }
    if (!out) throw ValidationError(path.string() + ": write failed");
}

SuppressionReport suppression_metrics(const PointCloud& extracted, const TsdfVolume& volume,
                                      const SyntheticScene& scene, const FusionConfig& cfg,
                                      int max_frame) {
    SuppressionReport report;
    report.extracted_points = extracted.size();

    for (const Vec3& p : extracted.positions) {
        if (scene.in_dynamic_swept_volume(p, max_frame, volume.voxel_size)) ++report.leaked_points;
    }
    report.dynamic_leak_rate =
        extracted.empty() ? 0.0 : double(report.leaked_points) / double(extracted.size());

    // Recall over voxels sitting on a static surface that were actually
    // observed often enough; recalled = passes the extraction predicate.
    const double half_voxel = 0.5 * volume.voxel_size;
    for (int ix = 0; ix < volume.dims[0]; ++ix) {
        for (int iy = 0; iy < volume.dims[1]; ++iy) {
            for (int iz = 0; iz < volume.dims[2]; ++iz) {
                const std::size_t idx = volume.linear_index(ix, iy, iz);
                if (volume.w[idx] < cfg.min_weight) continue;
                if (!scene.near_static_surface(volume.voxel_center(ix, iy, iz), half_voxel))
                    continue;
                ++report.surface_voxels_observed;
                const bool in_band = std::abs(volume.d[idx]) <= cfg.surface_band;
                const bool variance_ok =
                    !cfg.variance_filter_enabled || volume.variance_at(idx) <= cfg.variance_cap;
                if (in_band && variance_ok) ++report.surface_voxels_recalled;
            }
        }
    }
    report.static_recall = report.surface_voxels_observed == 0
                               ? 0.0
                               : double(report.surface_voxels_recalled) /
                                     double(report.surface_voxels_observed);
    return report;
}

void write_suppression_report_json(const std::filesystem::path& path,
                                   const SuppressionReport& report) {
    dump_json(path, json{{"dynamic_leak_rate", report.dynamic_leak_rate},
                         {"static_recall", report.static_recall},
                         {"extracted_points", report.extracted_points},
                         {"leaked_points", report.leaked_points},
                         {"surface_voxels_observed", report.surface_voxels_observed},
                         {"surface_voxels_recalled", report.surface_voxels_recalled}});
}

}  // namespace vwm
