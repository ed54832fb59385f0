#ifndef DYNTREE_RNG_HPP
#define DYNTREE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

#include "common.hpp"

namespace dyntree {

/// Named, seedable random stream. Streams for distinct (seed, tag) pairs are
/// derived by hashing the tag into the seed, so re-running one sub-structure
/// never perturbs the draws of a sibling.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::string tag)
        : seed_(seed), tag_(std::move(tag)), engine_(mix(seed_, tag_)) {}

    /// Child stream with tag "<tag>/<sub>". Shares the master seed only.
    RngStream derive(std::string_view sub) const {
        return RngStream(seed_, tag_ + "/" + std::string(sub));
    }

    std::uint64_t seed() const { return seed_; }
    const std::string& tag() const { return tag_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in the open interval (0,1).
    double uniform01() {
        // 53-bit mantissa, offset by half an ulp to exclude both endpoints.
        return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(engine_);
    }

    /// Number of Bernoulli(p) trials until the first success; S >= 1 with
    /// Pr[S >= k] = (1-p)^(k-1). Inversion sampling, one uniform per draw.
    long geometric(double p) {
        if (!(p > 0.0) || p > 1.0) throw InvalidParameter("geometric: p must be in (0,1]");
        if (p == 1.0) return 1;
        double u = uniform01();
        double s = std::ceil(std::log(u) / std::log1p(-p));
        if (s < 1.0) s = 1.0;
        return static_cast<long>(s);
    }

    /// Ball radius R = S - 1 >= 0 for the ball-growing process.
    long radius(double p) { return geometric(p) - 1; }

    /// Draw a key with probability weights[key] / sum(weights).
    template <typename K>
    K weighted_pick(const std::map<K, double>& weights) {
        double total = 0.0;
        for (const auto& [k, w] : weights) {
            if (w < 0.0) throw InvalidParameter("weighted_pick: negative weight");
            total += w;
        }
        if (total <= 0.0) throw EmptyDistribution("weighted_pick: all weights zero");
        double x = uniform01() * total;
        double acc = 0.0;
        const K* last = nullptr;
        for (const auto& [k, w] : weights) {
            if (w <= 0.0) continue;
            acc += w;
            last = &k;
            if (x <= acc) return k;
        }
        return *last;  // x landed in the last bucket via rounding
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // FNV-1a over the tag, folded into the master seed.
    static std::uint64_t mix(std::uint64_t seed, const std::string& tag) {
        std::uint64_t h = 14695981039346656037ULL;
        for (unsigned char c : tag) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return splitmix(seed ^ splitmix(h));
    }

    std::uint64_t seed_;
    std::string tag_;
    std::mt19937_64 engine_;
};

}  // namespace dyntree

#endif
