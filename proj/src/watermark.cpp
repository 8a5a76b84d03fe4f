#include "wmlab/watermark.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "json.hpp"
#include "wmlab/rng.h"

namespace wmlab {

namespace {

constexpr std::uint64_t kStreamMessage = 0x4d5347;  // "MSG"
constexpr std::uint64_t kStreamSpread = 0x535350;   // "SSP"
constexpr std::uint64_t kStreamPhase = 0x504853;    // "PHS"
constexpr std::uint64_t kStreamFrame = 0x46524d;    // "FRM"

constexpr double kPatternGrid = 0x1.0p20;   // pattern quantisation
constexpr double kResidualGrid = 0x1.0p16;  // embedded residual quantisation

bool is_self_conjugate(int u, int v, int h, int w) {
    return (u == 0 || 2 * u == h) && (v == 0 || 2 * v == w);
}

/// Half-plane representative: exactly one of {k, -k} is chosen.
bool is_representative(int u, int v, int h, int w) {
    if (is_self_conjugate(u, v, h, w)) return false;
    int mu = freq_index(-u, h), mv = freq_index(-v, w);
    return std::make_pair(u, v) < std::make_pair(mu, mv);
}

std::size_t mirror_index(std::size_t k, int h, int w) {
    int u = int(k / w), v = int(k % w);
    return std::size_t(freq_index(-u, h)) * w + freq_index(-v, w);
}

/// Real plane from coefficients on representative bins (mirrors are filled
/// with conjugates).
Plane synthesize(int h, int w, const std::vector<std::size_t>& bins, const std::vector<cplx>& coeffs,
                 double scale) {
    Spectrum s(w, h);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        s.coeffs[bins[i]] = coeffs[i] * scale;
        s.coeffs[mirror_index(bins[i], h, w)] = std::conj(coeffs[i]) * scale;
    }
    return ifft2(s);
}

Plane quantize(const Plane& p, double grid) {
    Plane out = p;
    for (double& v : out.v) v = std::round(v * grid) / grid;
    return out;
}

cplx key_phase(std::uint64_t seed, std::size_t bin) {
    double phi = 2.0 * std::numbers::pi * rng::uniform(seed, kStreamPhase, bin);
    return std::polar(1.0, phi);
}

void require_family(const WatermarkKey& key, Family f, const char* what) {
    if (key.family != f)
        throw Error(std::string(what) + ": key family must be " + to_string(f));
}

class PatternCache {
public:
    static PatternCache& instance() {
        static PatternCache c;
        return c;
    }
    using Key = std::tuple<std::uint64_t, int, int, std::size_t>;

    std::shared_ptr<const SpreadPatterns> find(const Key& k) {
        std::lock_guard lock(mu_);
        auto it = map_.find(k);
        return it == map_.end() ? nullptr : it->second;
    }
    void insert(const Key& k, std::shared_ptr<const SpreadPatterns> p) {
        std::lock_guard lock(mu_);
        if (map_.size() > 64) map_.clear();
        map_.emplace(k, std::move(p));
    }

private:
    std::mutex mu_;
    std::map<Key, std::shared_ptr<const SpreadPatterns>> map_;
};

}  // namespace

// ---------------------------------------------------------------------------

BitMessage::BitMessage(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw Error("BitMessage: length must be at least 1");
    for (auto& b : bits_) b = b ? 1 : 0;
}

BitMessage BitMessage::random(std::uint64_t seed, std::size_t length) {
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) bits[i] = rng::hash(seed, kStreamMessage, i) >> 63;
    return BitMessage(std::move(bits));
}

BitMessage BitMessage::inverse() const {
    BitMessage out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
}

std::string BitMessage::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
        int nib = 0;
        for (std::size_t j = 0; j < 4; ++j)
            nib = (nib << 1) | (i + j < bits_.size() ? bits_[i + j] : 0);
        out.push_back(digits[nib]);
    }
    return out;
}

BitMessage BitMessage::from_hex(const std::string& hex, std::size_t length) {
    if (length == 0 || hex.size() * 4 < length)
        throw Error("BitMessage::from_hex: hex string too short for the requested length");
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        char c = hex[i / 4];
        int nib;
        if (c >= '0' && c <= '9') nib = c - '0';
        else if (c >= 'a' && c <= 'f') nib = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') nib = c - 'A' + 10;
        else throw Error("BitMessage::from_hex: invalid hex digit");
        bits[i] = (nib >> (3 - i % 4)) & 1;
    }
    return BitMessage(std::move(bits));
}

double BitMessage::distance(const BitMessage& other) const {
    if (other.size() != size()) throw Error("BitMessage::distance: length mismatch");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < size(); ++i) diff += bits_[i] != other.bits_[i];
    return double(diff) / double(size());
}

std::string to_string(Family f) {
    switch (f) {
        case Family::SpreadSpectrum: return "spread_spectrum";
        case Family::FourierRing: return "fourier_ring";
        case Family::BoundaryFrame: return "boundary_frame";
        case Family::FourierSquare: return "fourier_square";
    }
    return "unknown";
}

Family family_from_string(const std::string& s) {
    if (s == "spread_spectrum" || s == "ss") return Family::SpreadSpectrum;
    if (s == "fourier_ring" || s == "ring") return Family::FourierRing;
    if (s == "boundary_frame" || s == "boundary") return Family::BoundaryFrame;
    if (s == "fourier_square" || s == "square") return Family::FourierSquare;
    throw Error("unknown watermark family: " + s);
}

WatermarkKey WatermarkKey::spread_spectrum(std::uint64_t seed, double amplitude) {
    WatermarkKey k;
    k.seed = seed;
    k.family = Family::SpreadSpectrum;
    k.amplitude = amplitude;
    return k;
}

WatermarkKey WatermarkKey::fourier_ring(std::uint64_t seed, double amplitude) {
    WatermarkKey k;
    k.seed = seed;
    k.family = Family::FourierRing;
    k.amplitude = amplitude;
    return k;
}

WatermarkKey WatermarkKey::boundary_frame(std::uint64_t seed, double amplitude) {
    WatermarkKey k;
    k.seed = seed;
    k.family = Family::BoundaryFrame;
    k.amplitude = amplitude;
    return k;
}

WatermarkKey WatermarkKey::fourier_square(std::uint64_t seed, double amplitude) {
    WatermarkKey k;
    k.seed = seed;
    k.family = Family::FourierSquare;
    k.amplitude = amplitude;
    return k;
}

std::string WatermarkKey::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["family"] = to_string(family);
    j["amplitude"] = amplitude;
    if (family == Family::SpreadSpectrum) j["band"] = {band_low, band_high};
    if (family == Family::FourierRing) j["radii"] = radii;
    if (family == Family::FourierSquare) j["comb_period"] = comb_period;
    return j.dump(2);
}

WatermarkKey WatermarkKey::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("key file: ") + e.what());
    }
    WatermarkKey k;
    k.seed = j.at("seed").get<std::uint64_t>();
    k.family = family_from_string(j.at("family").get<std::string>());
    k.amplitude = j.value("amplitude", k.amplitude);
    if (j.contains("band")) {
        auto band = j.at("band").get<std::vector<double>>();
        if (band.size() != 2) throw Error("key file: band must hold two values");
        k.band_low = band[0];
        k.band_high = band[1];
    }
    if (j.contains("radii")) k.radii = j.at("radii").get<std::vector<int>>();
    k.comb_period = j.value("comb_period", k.comb_period);
    if (!(k.amplitude >= 0.0)) throw Error("key file: amplitude must be non-negative");
    return k;
}

std::uint64_t WatermarkKey::fingerprint() const {
    std::uint64_t h = rng::splitmix64(seed ^ (std::uint64_t(family) << 56));
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = rng::splitmix64(h ^ bits);
    };
    mix(amplitude);
    mix(band_low);
    mix(band_high);
    for (int r : radii) mix(double(r));
    mix(double(comb_period));
    return h;
}

// ---------------------------------------------------------------------------

std::size_t ss_capacity(int width, int height) { return std::size_t(width) * height / 64; }

std::shared_ptr<const SpreadPatterns> spread_patterns(const WatermarkKey& key, int width, int height,
                                                      std::size_t bits) {
    require_family(key, Family::SpreadSpectrum, "spread_patterns");
    PatternCache::Key ck{key.fingerprint(), width, height, bits};
    if (auto hit = PatternCache::instance().find(ck)) return hit;

    if (bits == 0) throw Error("spread_patterns: message must hold at least one bit");
    if (bits > ss_capacity(width, height))
        throw Error("ss_embed: message longer than pattern capacity (H*W/64)");
    if (!(key.band_low >= 0.0 && key.band_high > key.band_low))
        throw Error("spread_patterns: invalid pass band");

    std::vector<std::size_t> band;
    for (int u = 0; u < height; ++u)
        for (int v = 0; v < width; ++v) {
            if (!is_representative(u, v, height, width)) continue;
            double fu = double(signed_freq(u, height)) / height;
            double fv = double(signed_freq(v, width)) / width;
            double r = 2.0 * std::hypot(fu, fv);  // 1.0 at the Nyquist radius
            if (r >= key.band_low && r <= key.band_high) band.push_back(std::size_t(u) * width + v);
        }
    if (band.size() < bits) throw Error("spread_patterns: pass band holds fewer bins than message bits");

    // Fisher-Yates on the band, then round-robin assignment to bits.
    rng::Stream rs(key.seed, kStreamSpread);
    for (std::size_t i = band.size(); i > 1; --i) std::swap(band[i - 1], band[rs.below(i)]);

    auto out = std::make_shared<SpreadPatterns>();
    out->width = width;
    out->height = height;
    out->bins.resize(bits);
    out->coeffs.resize(bits);
    for (std::size_t j = 0; j < band.size(); ++j) {
        out->bins[j % bits].push_back(band[j]);
        out->coeffs[j % bits].push_back(key_phase(key.seed, band[j]));
    }

    // Unit-magnitude coefficients on disjoint supports: the combined pattern
    // energy is 2*|band| / (H*W)^2 * (H*W) per pixel regardless of signs.
    double n = double(width) * height;
    double rms_unit = std::sqrt(2.0 * double(band.size())) / n;
    double scale = 0.5 / rms_unit;

    out->patterns.reserve(bits);
    for (std::size_t i = 0; i < bits; ++i) {
        Plane p = quantize(synthesize(height, width, out->bins[i], out->coeffs[i], scale), kPatternGrid);
        // Make the pixel sum exactly zero by nudging the first |sum| pixels
        // by one grid step; values stay on the grid so the sum is exact.
        double sum = 0.0;
        for (double v : p.v) sum += v;
        long long units = std::llround(sum * kPatternGrid);
        double step = units > 0 ? -1.0 / kPatternGrid : 1.0 / kPatternGrid;
        for (long long k = 0; k < std::llabs(units); ++k) p.v[std::size_t(k) % p.size()] += step;
        out->patterns.push_back(std::move(p));
    }
    PatternCache::instance().insert(ck, out);
    return out;
}

RasterImage ss_embed(const RasterImage& cover, const WatermarkKey& key, const BitMessage& msg) {
    require_family(key, Family::SpreadSpectrum, "ss_embed");
    if (cover.width() < 64 || cover.height() < 64) throw Error("ss_embed: image must be at least 64x64");
    if (msg.size() > ss_capacity(cover.width(), cover.height()))
        throw Error("ss_embed: message longer than pattern capacity (H*W/64)");
    if (key.amplitude == 0.0) return cover;

    auto pats = spread_patterns(key, cover.width(), cover.height(), msg.size());
    Plane sum(cover.width(), cover.height());
    for (std::size_t i = 0; i < msg.size(); ++i) {
        double s = msg[i] ? 1.0 : -1.0;
        const auto& p = pats->patterns[i].v;
        for (std::size_t k = 0; k < sum.size(); ++k) sum.v[k] += s * p[k];
    }
    // Sign-symmetric arithmetic: inverse(msg) yields exactly the negated
    // residual, so pair averages cancel exactly.
    for (double& v : sum.v) v = std::round(key.amplitude * v * kResidualGrid) / kResidualGrid;
    return add_luminance(cover, sum);
}

DecodeResult ss_decode(const RasterImage& img, const WatermarkKey& key, std::size_t bits,
                       const BitMessage* reference) {
    require_family(key, Family::SpreadSpectrum, "ss_decode");
    auto pats = spread_patterns(key, img.width(), img.height(), bits);
    Spectrum y = fft2(img);
    std::vector<std::uint8_t> out(bits);
    DecodeResult r;
    r.correlations.resize(bits);
    double n = double(img.width()) * img.height();
    for (std::size_t i = 0; i < bits; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < pats->bins[i].size(); ++j)
            acc += (y.coeffs[pats->bins[i][j]] * std::conj(pats->coeffs[i][j])).real();
        r.correlations[i] = 2.0 * acc / n;
        out[i] = r.correlations[i] > 0.0 ? 1 : 0;
    }
    r.message = BitMessage(std::move(out));
    if (reference) r.distance = reference->distance(r.message);
    return r;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> fourier_pattern_bins(const WatermarkKey& key, int width, int height) {
    std::vector<std::size_t> bins;
    if (key.family == Family::FourierRing) {
        if (key.radii.empty()) throw Error("ring key: radii set is empty");
        for (int r : key.radii)
            if (r <= 0 || 2 * r >= std::min(width, height))
                throw Error("ring_embed: radius must lie in (0, min(H,W)/2)");
        for (int u = 0; u < height; ++u)
            for (int v = 0; v < width; ++v) {
                if (!is_representative(u, v, height, width)) continue;
                int rr = int(std::lround(std::hypot(double(signed_freq(u, height)), double(signed_freq(v, width)))));
                if (std::find(key.radii.begin(), key.radii.end(), rr) != key.radii.end())
                    bins.push_back(std::size_t(u) * width + v);
            }
    } else if (key.family == Family::FourierSquare) {
        int p = key.comb_period;
        if (p < 2) throw Error("square key: comb period must be at least 2");
        for (int u = 0; u < height; ++u)
            for (int v = 0; v < width; ++v) {
                if (!is_representative(u, v, height, width)) continue;
                int fu = signed_freq(u, height), fv = signed_freq(v, width);
                if (fu == 0 || fv == 0 || fu % p != 0 || fv % p != 0) continue;
                if (2 * std::abs(fu) >= height || 2 * std::abs(fv) >= width) continue;
                bins.push_back(std::size_t(u) * width + v);
            }
    } else {
        throw Error("fourier pattern: key family must be fourier_ring or fourier_square");
    }
    if (bins.empty()) throw Error("fourier pattern: no frequency bins for this image size");
    return bins;
}

RasterImage fourier_embed(const RasterImage& cover, const WatermarkKey& key, double sign) {
    auto bins = fourier_pattern_bins(key, cover.width(), cover.height());
    if (key.amplitude == 0.0) return cover;
    std::vector<cplx> coeffs(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) coeffs[i] = key_phase(key.seed, bins[i]);
    double n = double(cover.width()) * cover.height();
    // RMS = amplitude/sqrt(2): the amplitude of an equivalent single sinusoid.
    double rms = key.amplitude / std::sqrt(2.0);
    double mag = rms * n / std::sqrt(2.0 * double(bins.size()));
    Plane residual = synthesize(cover.height(), cover.width(), bins, coeffs, sign * mag);
    return add_luminance(cover, residual);
}

double fourier_detect(const RasterImage& img, const WatermarkKey& key) {
    auto bins = fourier_pattern_bins(key, img.width(), img.height());
    Spectrum y = fft2(img);
    cplx acc = 0.0;
    double energy = 0.0;
    for (std::size_t b : bins) {
        acc += y.coeffs[b] * std::conj(key_phase(key.seed, b));
        energy += std::norm(y.coeffs[b]);
    }
    if (energy <= 0.0) return 0.0;
    return std::clamp(acc.real() / std::sqrt(energy * double(bins.size())), -1.0, 1.0);
}

RasterImage ring_embed(const RasterImage& cover, const WatermarkKey& key) {
    require_family(key, Family::FourierRing, "ring_embed");
    return fourier_embed(cover, key, 1.0);
}

double ring_detect(const RasterImage& img, const WatermarkKey& key) {
    require_family(key, Family::FourierRing, "ring_detect");
    return fourier_detect(img, key);
}

RasterImage square_embed(const RasterImage& cover, const WatermarkKey& key) {
    require_family(key, Family::FourierSquare, "square_embed");
    return fourier_embed(cover, key, 1.0);
}

double square_detect(const RasterImage& img, const WatermarkKey& key) {
    require_family(key, Family::FourierSquare, "square_detect");
    return fourier_detect(img, key);
}

// ---------------------------------------------------------------------------

namespace {

bool in_frame(int y, int x, int h, int w) {
    return y < kFrameWidth || x < kFrameWidth || y >= h - kFrameWidth || x >= w - kFrameWidth;
}

double frame_chip(std::uint64_t seed, int y, int x, int w) {
    return (rng::hash(seed, kStreamFrame, std::uint64_t(y) * w + x) >> 63) ? 1.0 : -1.0;
}

}  // namespace

RasterImage boundary_embed(const RasterImage& cover, const WatermarkKey& key) {
    require_family(key, Family::BoundaryFrame, "boundary_embed");
    if (key.amplitude == 0.0) return cover;
    int h = cover.height(), w = cover.width();
    Plane delta(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (in_frame(y, x, h, w)) delta(y, x) = key.amplitude * frame_chip(key.seed, y, x, w);
    return add_luminance(cover, delta);
}

double boundary_detect(const RasterImage& img, const WatermarkKey& key) {
    require_family(key, Family::BoundaryFrame, "boundary_detect");
    int h = img.height(), w = img.width();
    Plane y = luminance(img);
    // Correlate against the frame chips after removing the local mean along
    // the frame (3x3 box), which suppresses smooth cover content.
    double acc = 0.0, energy = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (!in_frame(r, c, h, w)) continue;
            double mean = 0.0;
            int m = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int rr = r + dy, cc = c + dx;
                    if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
                    mean += y(rr, cc);
                    ++m;
                }
            double hp = y(r, c) - mean / m;
            acc += hp * frame_chip(key.seed, r, c, w);
            energy += hp * hp;
            ++count;
        }
    if (energy <= 0.0) return 0.0;
    return std::clamp(acc / std::sqrt(energy * double(count)), -1.0, 1.0);
}

// ---------------------------------------------------------------------------

PairedDataset make_paired_dataset(const std::vector<RasterImage>& covers, const WatermarkKey& key,
                                  std::size_t n, std::uint64_t seed, std::size_t bits) {
    if (covers.empty()) throw Error("make_paired_dataset: no cover images");
    if (n > covers.size()) throw Error("make_paired_dataset: n exceeds the number of covers");
    PairedDataset ds;
    ds.key = key;
    ds.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (key.family) {
            case Family::SpreadSpectrum: {
                BitMessage m = BitMessage::random(rng::item_seed(seed, i), bits);
                ds.pairs.push_back({ss_embed(covers[i], key, m), ss_embed(covers[i], key, m.inverse())});
                break;
            }
            case Family::FourierRing:
            case Family::FourierSquare:
                ds.pairs.push_back({fourier_embed(covers[i], key, 1.0), fourier_embed(covers[i], key, -1.0)});
                break;
            default:
                throw Error("make_paired_dataset: unsupported key family " + to_string(key.family));
        }
    }
    return ds;
}

RasterImage embed(const RasterImage& cover, const WatermarkKey& key, const BitMessage* msg) {
    switch (key.family) {
        case Family::SpreadSpectrum:
            if (!msg) throw Error("embed: spread-spectrum keys need a message");
            return ss_embed(cover, key, *msg);
        case Family::FourierRing: return ring_embed(cover, key);
        case Family::FourierSquare: return square_embed(cover, key);
        case Family::BoundaryFrame: return boundary_embed(cover, key);
    }
    throw Error("embed: unknown family");
}

}  // namespace wmlab
