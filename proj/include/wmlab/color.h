#pragma once

#include "wmlab/image.h"

namespace wmlab {

/// CIE L*a*b* planes (D65 white, sRGB companding). L in [0,100], a/b nominally
/// in [-128,127] but not clamped.
struct LabImage {
    Plane L;
    Plane a;
    Plane b;

    int width() const { return L.width; }
    int height() const { return L.height; }
};

struct ChannelStats {
    double mean = 0.0;
    double std = 0.0;  // population convention
};

LabImage srgb_to_lab(const RasterImage& img);

/// Inverse of srgb_to_lab; out-of-gamut colours are clamped to [0,1].
RasterImage lab_to_srgb(const LabImage& lab);

/// Unclamped linear-domain inverse, exposed for tests that need to see
/// pre-clip values.
void lab_to_srgb_pixel(double L, double a, double b, double rgb[3]);
void srgb_to_lab_pixel(const double rgb[3], double& L, double& a, double& b);

ChannelStats plane_stats(const Plane& p);
ChannelStats luminance_stats(const LabImage& img);

}  // namespace wmlab
