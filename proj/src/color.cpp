#include "wmlab/color.h"

#include <algorithm>
#include <cmath>

namespace wmlab {

namespace {

// Linear sRGB -> XYZ, derived from the sRGB primaries and the D65
// chromaticity (0.3127, 0.3290). The reference white is the image of RGB
// (1,1,1), so white maps to a = b = 0.
constexpr double kToXyz[3][3] = {{0.4123907992659595, 0.35758433938387796, 0.1804807884018343},
                                 {0.21263900587151036, 0.7151686787677559, 0.07219231536073371},
                                 {0.01933081871559185, 0.11919477979462599, 0.9505321522496606}};
constexpr double kFromXyz[3][3] = {{3.2409699419045213, -1.5373831775700935, -0.4986107602930033},
                                   {-0.9692436362808798, 1.8759675015077206, 0.04155505740717561},
                                   {0.05563007969699361, -0.20397695888897657, 1.0569715142428786}};
constexpr double kXn = kToXyz[0][0] + kToXyz[0][1] + kToXyz[0][2];
constexpr double kYn = kToXyz[1][0] + kToXyz[1][1] + kToXyz[1][2];
constexpr double kZn = kToXyz[2][0] + kToXyz[2][1] + kToXyz[2][2];

constexpr double kEpsilon = 216.0 / 24389.0;  // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;     // (29/3)^3

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double f) {
    double f3 = f * f * f;
    return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

}  // namespace

void srgb_to_lab_pixel(const double rgb[3], double& L, double& a, double& b) {
    double r = srgb_to_linear(rgb[0]);
    double g = srgb_to_linear(rgb[1]);
    double bl = srgb_to_linear(rgb[2]);
    double X = kToXyz[0][0] * r + kToXyz[0][1] * g + kToXyz[0][2] * bl;
    double Y = kToXyz[1][0] * r + kToXyz[1][1] * g + kToXyz[1][2] * bl;
    double Z = kToXyz[2][0] * r + kToXyz[2][1] * g + kToXyz[2][2] * bl;
    double fx = lab_f(X / kXn);
    double fy = lab_f(Y / kYn);
    double fz = lab_f(Z / kZn);
    L = 116.0 * fy - 16.0;
    a = 500.0 * (fx - fy);
    b = 200.0 * (fy - fz);
}

void lab_to_srgb_pixel(double L, double a, double b, double rgb[3]) {
    double fy = (L + 16.0) / 116.0;
    double fx = fy + a / 500.0;
    double fz = fy - b / 200.0;
    double X = kXn * lab_f_inv(fx);
    double Y = kYn * lab_f_inv(fy);
    double Z = kZn * lab_f_inv(fz);
    double r = kFromXyz[0][0] * X + kFromXyz[0][1] * Y + kFromXyz[0][2] * Z;
    double g = kFromXyz[1][0] * X + kFromXyz[1][1] * Y + kFromXyz[1][2] * Z;
    double bl = kFromXyz[2][0] * X + kFromXyz[2][1] * Y + kFromXyz[2][2] * Z;
    // Negative linear values have no sRGB encoding; clamp before companding.
    rgb[0] = linear_to_srgb(std::max(r, 0.0));
    rgb[1] = linear_to_srgb(std::max(g, 0.0));
    rgb[2] = linear_to_srgb(std::max(bl, 0.0));
}

LabImage srgb_to_lab(const RasterImage& img) {
    LabImage out{Plane(img.width(), img.height()), Plane(img.width(), img.height()),
                 Plane(img.width(), img.height())};
    auto src = img.data();
    for (std::size_t i = 0; i < out.L.size(); ++i)
        srgb_to_lab_pixel(&src[3 * i], out.L.v[i], out.a.v[i], out.b.v[i]);
    return out;
}

RasterImage lab_to_srgb(const LabImage& lab) {
    if (lab.a.width != lab.L.width || lab.b.width != lab.L.width ||
        lab.a.height != lab.L.height || lab.b.height != lab.L.height)
        throw Error("lab_to_srgb: channel planes differ in size");
    std::vector<double> rgb(lab.L.size() * 3);
    for (std::size_t i = 0; i < lab.L.size(); ++i)
        lab_to_srgb_pixel(lab.L.v[i], lab.a.v[i], lab.b.v[i], &rgb[3 * i]);
    return RasterImage(lab.width(), lab.height(), std::move(rgb));  // clamps
}

ChannelStats plane_stats(const Plane& p) {
    if (p.v.empty()) return {};
    double sum = 0.0;
    for (double v : p.v) sum += v;
    double mean = sum / double(p.v.size());
    double ss = 0.0;
    for (double v : p.v) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / double(p.v.size()))};
}

ChannelStats luminance_stats(const LabImage& img) { return plane_stats(img.L); }

}  // namespace wmlab
