#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace pboost {

/// Counter-based splittable random stream keyed by (seed, path).
///
/// The key is a hash of the seed and every path element; draw n is a
/// bijective mix of (key, n). Two streams with equal seed and path produce
/// identical sequences regardless of what other streams did, so parallel
/// folds and iterations stay reproducible without sharing state. Child
/// streams extend the path and never overlap their parent.
///
/// All derived draws (uniform reals, bounded integers, normals) are computed
/// here rather than through <random> distributions, whose output is not
/// specified across standard library implementations.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::vector<std::uint64_t> path = {});

    RngStream child(std::uint64_t index) const;
    RngStream child(std::initializer_list<std::uint64_t> indices) const;

    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint64_t>& path() const noexcept { return path_; }

    std::uint64_t next_u64() noexcept;
    std::uint64_t operator()() noexcept { return next_u64(); }
    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept {
        return std::numeric_limits<std::uint64_t>::max();
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;
    /// Standard normal draw (Box-Muller, one value per call).
    double normal() noexcept;

    template <typename T>
    void shuffle(std::vector<T>& values) noexcept {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pboost
