// gain.hpp - move proposals and exponentially binned gain histograms
#ifndef SHP_GAIN_HPP
#define SHP_GAIN_HPP

#include "shp/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace shp {

// Best move of a data vertex for the current iteration.
struct Proposal {
    BucketId target = kNoBucket;
    double gain = 0.0;

    bool valid() const { return target != kNoBucket; }
    bool operator==(const Proposal &) const = default;
};

// Candidate (bucket, gain) pairs for one vertex, excluding its own bucket.
// Picks the maximum gain, ties broken by the lowest bucket id. Non-positive
// best gains are still reported. Empty input yields an invalid proposal.
inline Proposal select_target(std::span<const std::pair<BucketId, double>> gains) {
    Proposal best;
    for (const auto &[bucket, gain] : gains) {
        if (!best.valid() || gain > best.gain || (gain == best.gain && bucket < best.target)) {
            best = Proposal{bucket, gain};
        }
    }
    return best;
}

// Bin layout: index 0 holds |gain| < unit. Index +b (b in 1..64) holds gains
// in [2^(b-1) u, 2^b u), index -b the negative gains by magnitude. Magnitudes
// beyond the last bin are clamped into it.
struct GainBins {
    static constexpr double kUnit = 1e-9;
    static constexpr int kMaxIndex = 64;
    static constexpr int kCount = 2 * kMaxIndex + 1;

    static int of(double gain) {
        const double mag = std::fabs(gain) / kUnit;
        if (!(mag >= 1.0)) {
            return 0;
        }
        int b = std::isinf(mag) ? kMaxIndex : std::ilogb(mag) + 1;
        b = b > kMaxIndex ? kMaxIndex : b;
        return gain > 0 ? b : -b;
    }

    // Midpoint of the bin's gain interval, signed.
    static double representative(int index) {
        if (index == 0) {
            return 0.0;
        }
        const int b = index > 0 ? index : -index;
        const double mid = 1.5 * std::ldexp(kUnit, b - 1);
        return index > 0 ? mid : -mid;
    }

    static std::size_t slot(int index) { return static_cast<std::size_t>(index + kMaxIndex); }
    static int index_of_slot(std::size_t slot) { return static_cast<int>(slot) - kMaxIndex; }
};

using BinCounts = std::array<std::uint64_t, GainBins::kCount>;

// Vertex counts per gain bin for one directed bucket pair.
class GainHistogram {
public:
    void add(int index, std::uint64_t n = 1) {
        counts_[GainBins::slot(index)] += n;
        total_ += n;
    }
    std::uint64_t count(int index) const { return counts_[GainBins::slot(index)]; }
    std::uint64_t total() const { return total_; }
    const BinCounts &counts() const { return counts_; }

    bool operator==(const GainHistogram &) const = default;

private:
    BinCounts counts_{};
    std::uint64_t total_ = 0;
};

using BucketPair = std::pair<BucketId, BucketId>;

} // namespace shp

#endif // SHP_GAIN_HPP
