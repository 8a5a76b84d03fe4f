#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wmlab/image.h"
#include "wmlab/spectral.h"

namespace wmlab {

/// Ordered payload bits. Bit value 1 modulates its pattern with +1, 0 with -1.
class BitMessage {
public:
    BitMessage() = default;
    explicit BitMessage(std::vector<std::uint8_t> bits);

    static BitMessage random(std::uint64_t seed, std::size_t length = 100);
    static BitMessage from_hex(const std::string& hex, std::size_t length);

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    BitMessage inverse() const;
    std::string to_hex() const;
    /// Fractional Hamming distance; lengths must agree.
    double distance(const BitMessage& other) const;

    friend bool operator==(const BitMessage&, const BitMessage&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

enum class Family { SpreadSpectrum, FourierRing, BoundaryFrame, FourierSquare };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct WatermarkKey {
    std::uint64_t seed = 0;
    Family family = Family::SpreadSpectrum;
    double amplitude = 0.02;
    // SpreadSpectrum: pass band as fractions of the Nyquist radius.
    double band_low = 0.45;
    double band_high = 1.0;
    // FourierRing: integer radii (frequency bins).
    std::vector<int> radii{8, 12, 16, 20};
    // FourierSquare: lattice period in frequency bins.
    int comb_period = 16;

    static WatermarkKey spread_spectrum(std::uint64_t seed, double amplitude = 0.02);
    static WatermarkKey fourier_ring(std::uint64_t seed, double amplitude = 0.015);
    static WatermarkKey boundary_frame(std::uint64_t seed, double amplitude = 0.03);
    static WatermarkKey fourier_square(std::uint64_t seed, double amplitude = 0.015);

    std::string to_json() const;
    static WatermarkKey from_json(const std::string& text);
    /// Stable digest of all fields, used to tag trained filters and reports.
    std::uint64_t fingerprint() const;
};

// ---------------------------------------------------------------------------
// Spread spectrum: one band-limited zero-mean pattern per bit, disjoint
// frequency supports, added to luminance.

/// Pattern set for a key and image size. Patterns are on a 2^-20 grid and sum
/// to exactly zero; the combined modulated pattern has RMS 1/2 for any signs.
struct SpreadPatterns {
    int width = 0;
    int height = 0;
    std::vector<Plane> patterns;
    // Per bit: linear spectrum indices (half-plane representatives) and the
    // matching unit coefficients, for fast correlation in the Fourier domain.
    std::vector<std::vector<std::size_t>> bins;
    std::vector<std::vector<cplx>> coeffs;
};

std::shared_ptr<const SpreadPatterns> spread_patterns(const WatermarkKey& key, int width, int height,
                                                      std::size_t bits);

std::size_t ss_capacity(int width, int height);

RasterImage ss_embed(const RasterImage& cover, const WatermarkKey& key, const BitMessage& msg);

struct DecodeResult {
    BitMessage message;
    std::vector<double> correlations;
    /// Fractional Hamming distance to the reference, or -1 without one.
    double distance = -1.0;
};

DecodeResult ss_decode(const RasterImage& img, const WatermarkKey& key, std::size_t bits = 100,
                       const BitMessage* reference = nullptr);

// ---------------------------------------------------------------------------
// Fourier-domain patterns (rings and square lattices) with key-derived phases.

/// Half-plane representative bins of the key's pattern, as linear indices
/// into a Spectrum of the given size.
std::vector<std::size_t> fourier_pattern_bins(const WatermarkKey& key, int width, int height);

/// Adds sign * pattern; the residual RMS is amplitude / sqrt(2).
RasterImage fourier_embed(const RasterImage& cover, const WatermarkKey& key, double sign = 1.0);

/// Normalised complex correlation in [-1,1] between the image spectrum on the
/// pattern bins and the key phases.
double fourier_detect(const RasterImage& img, const WatermarkKey& key);

RasterImage ring_embed(const RasterImage& cover, const WatermarkKey& key);
double ring_detect(const RasterImage& img, const WatermarkKey& key);

RasterImage square_embed(const RasterImage& cover, const WatermarkKey& key);
double square_detect(const RasterImage& img, const WatermarkKey& key);

// ---------------------------------------------------------------------------
// Frame injector: key-derived +-amplitude luminance noise in the outer frame.

inline constexpr int kFrameWidth = 4;

RasterImage boundary_embed(const RasterImage& cover, const WatermarkKey& key);
/// Normalised correlation of the frame pixels' luminance with the key frame.
double boundary_detect(const RasterImage& img, const WatermarkKey& key);

// ---------------------------------------------------------------------------

struct ImagePair {
    RasterImage watermarked;  // carries m (or +pattern)
    RasterImage inverse;      // carries inverse(m) (or -pattern)
};

struct PairedDataset {
    WatermarkKey key;
    std::vector<ImagePair> pairs;
};

/// n pairs from the first n covers. SpreadSpectrum keys draw a fresh
/// 100-bit message per pair from `seed`; FourierRing/FourierSquare keys use
/// +pattern / -pattern.
PairedDataset make_paired_dataset(const std::vector<RasterImage>& covers, const WatermarkKey& key,
                                  std::size_t n, std::uint64_t seed, std::size_t bits = 100);

/// Generic embed dispatch: SpreadSpectrum uses msg, others ignore it.
RasterImage embed(const RasterImage& cover, const WatermarkKey& key, const BitMessage* msg);

}  // namespace wmlab
