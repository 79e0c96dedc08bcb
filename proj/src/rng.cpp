#include "pboost/rng.hpp"

#include <cmath>
#include <numbers>

namespace pboost {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
    std::uint64_t key = mix64(seed + kGamma);
    for (std::uint64_t p : path) {
        key = mix64(key ^ mix64(p + 0x632be59bd9b4e019ULL));
        key = mix64(key + kGamma);
    }
    return key;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)), key_(derive_key(seed_, path_)) {}

RngStream RngStream::child(std::uint64_t index) const {
    auto path = path_;
    path.push_back(index);
    return RngStream(seed_, std::move(path));
}

RngStream RngStream::child(std::initializer_list<std::uint64_t> indices) const {
    auto path = path_;
    path.insert(path.end(), indices.begin(), indices.end());
    return RngStream(seed_, std::move(path));
}

std::uint64_t RngStream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
    // Lemire's nearly-divisionless bounded draw.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t RngStream::integer(std::int64_t lo, std::int64_t hi) noexcept {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    return lo + static_cast<std::int64_t>(below(span));
}

double RngStream::normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pboost
