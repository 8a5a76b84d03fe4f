#pragma once

#include <string>
#include <vector>

#include "wmlab/image.h"
#include "wmlab/spectral.h"

namespace wmlab {

struct ArtifactScores {
    double boundary = 0.0;  // frame-vs-interior gradient excess
    double ring = 0.0;      // radial-profile peak prominence
    double square = 0.0;    // row/column max-projection peak prominence
};

enum class ClusterLabel { NoArtifact, Boundary, FourierRing, FourierSquare };

std::string to_string(ClusterLabel label);
ClusterLabel cluster_from_string(const std::string& s);

struct ClusterThresholds {
    double boundary = 0.5;
    double ring = 11.0;
    double square = 10.0;
};

/// Width of the border frame compared against the interior.
inline constexpr int kBoundaryFrame = 8;
/// Half-width of the excluded DC cross (|u| <= 1 or |v| <= 1).
inline constexpr int kDcCrossHalfWidth = 1;

/// (max - median) / (MAD + eps) of a profile after subtracting a running
/// median of the given half-window. Steps survive the running median, so only
/// isolated peaks score high.
double peak_prominence(const std::vector<double>& profile, int half_window = 3);

ArtifactScores artifact_scores(const RasterImage& img);

/// Priority Boundary > FourierRing > FourierSquare > NoArtifact.
ClusterLabel classify_cluster(const ArtifactScores& scores, const ClusterThresholds& thresholds = {});

}  // namespace wmlab
