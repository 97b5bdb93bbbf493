#pragma once

// Random edge weights. Each weight is a pure function of (seed, edge id,
// distribution): a counter-based generator hashes the edge id with the seed
// and feeds the resulting uniform into the inverse CDF. No generator state
// exists, so enlarging the box, sharing a field between full-plane and
// half-plane computations, or recomputing a single edge all see identical
// values.
//
// Sampled values are rounded to the grid q = 2^-26 (and clamped positive).
// Every partial sum of such weights below 2^27 is exactly representable in
// double, so path sums are associative and all "exact" comparisons in the
// library are genuinely exact. At desk scale (boxes of a few hundred,
// light-tailed weights) sums stay far below that bound.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "lattice.hpp"

namespace fpp {

namespace detail {

// 64-bit finalizer (murmur3 style); full avalanche.
inline std::uint64_t mix64(std::uint64_t k)
{
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

inline std::uint64_t hash_edge(std::uint64_t seed, const EdgeId& e)
{
    std::uint64_t k = (std::uint64_t(std::uint32_t(e.anchor.x)) << 32) |
                      std::uint32_t(e.anchor.y);
    k = mix64(k ^ (e.dir == Orientation::Vertical ? 0x6a09e667f3bcc909ULL : 0));
    return mix64(k ^ mix64(seed ^ 0x9e3779b97f4a7c15ULL));
}

// Map 64 random bits to the open interval (0, 1).
inline double to_unit_open(std::uint64_t h)
{
    return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Independent stream seed for (base, stream-index); used to give each
// replicate its own field.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    return detail::mix64(base ^ detail::mix64(stream ^ 0xd1b54a32d192ed03ULL));
}

// Resolution of the weight grid; see the header comment.
inline constexpr double kWeightQuantum = 0x1.0p-26;

// Edge-weight distribution. The three random kinds are continuous with
// support in [0, infinity); Constant is a deterministic test-only kind
// (used for unit-weight closed forms and the ferromagnet round trip).
struct Distribution {
    enum class Kind : std::uint8_t { Exponential, Uniform, ShiftedPareto, Constant };

    Kind kind = Kind::Exponential;
    double p1 = 1.0;  // rate | a | alpha | c
    double p2 = 0.0;  // - | b | x_min | -

    static Distribution exponential(double rate)
    {
        if (!(rate > 0)) throw std::invalid_argument("exponential: need rate > 0");
        return {Kind::Exponential, rate, 0.0};
    }
    static Distribution uniform(double a, double b)
    {
        if (!(0 <= a && a < b)) throw std::invalid_argument("uniform: need 0 <= a < b");
        return {Kind::Uniform, a, b};
    }
    // Standard Pareto with support [x_min, infinity).
    static Distribution shifted_pareto(double alpha, double x_min)
    {
        if (!(alpha > 0 && x_min > 0))
            throw std::invalid_argument("shifted_pareto: need alpha > 0, x_min > 0");
        return {Kind::ShiftedPareto, alpha, x_min};
    }
    static Distribution constant(double c)
    {
        if (!(c > 0)) throw std::invalid_argument("constant: need c > 0");
        return {Kind::Constant, c, 0.0};
    }
    static Distribution unit() { return constant(1.0); }

    // Inverse CDF at u in (0,1), rounded to the weight grid, always > 0,
    // and kept inside the open support interval where one exists.
    double sample(double u) const
    {
        double raw = 0.0;
        switch (kind) {
            case Kind::Exponential: raw = -std::log(u) / p1; break;
            case Kind::Uniform: raw = p1 + u * (p2 - p1); break;
            case Kind::ShiftedPareto: raw = p2 * std::pow(u, -1.0 / p1); break;
            case Kind::Constant: return p1;
        }
        long long k = std::llround(raw / kWeightQuantum);
        if (kind == Kind::Uniform) {
            long long klo = (long long)std::floor(p1 / kWeightQuantum) + 1;
            long long khi = (long long)std::ceil(p2 / kWeightQuantum) - 1;
            if (k < klo) k = klo;
            if (k > khi) k = khi;
        }
        if (k < 1) k = 1;
        return double(k) * kWeightQuantum;
    }

    friend bool operator==(const Distribution&, const Distribution&) = default;
};

// A weight source exposes per-edge weights over a rectangular box.
template <typename F>
concept WeightSource = requires(const F& f, EdgeId e) {
    { f.box() } -> std::convertible_to<IntRect>;
    { f.weight(e) } -> std::convertible_to<double>;
};

// Procedurally generated field: weight(e) = icdf(hash(seed, e)).
class WeightField {
  public:
    WeightField(IntRect box, std::uint64_t seed, Distribution dist)
        : box_(box), seed_(seed), dist_(dist)
    {
    }

    const IntRect& box() const { return box_; }
    std::uint64_t seed() const { return seed_; }
    const Distribution& dist() const { return dist_; }

    // Weight of an edge inside the box; out-of-domain queries are errors.
    double weight(const EdgeId& e) const
    {
        if (!box_.contains(e))
            throw std::out_of_range("WeightField::weight: edge outside box");
        return weight_unchecked(e);
    }

    // The same value the boxed accessor would return, for callers that
    // already know the edge is in range (the shortest-path kernel).
    double weight_unchecked(const EdgeId& e) const
    {
        return dist_.sample(detail::to_unit_open(detail::hash_edge(seed_, e)));
    }

  private:
    IntRect box_;
    std::uint64_t seed_;
    Distribution dist_;
};

// Field over [-n, n]^2; n >= 1.
inline WeightField make_field(int n, std::uint64_t seed, Distribution dist)
{
    return WeightField(IntRect::square(n), seed, dist);
}

// Explicitly tabulated field (ferromagnet couplings, adversarial tests).
// Construction requires a strictly positive weight for every edge of the box.
class ExplicitField {
  public:
    using Map = std::unordered_map<EdgeId, double, EdgeIdHash>;

    ExplicitField(IntRect box, Map weights) : box_(box), weights_(std::move(weights))
    {
        for (const EdgeId& e : edges_in(box_)) {
            auto it = weights_.find(e);
            if (it == weights_.end())
                throw std::invalid_argument("ExplicitField: missing weight for an edge of the box");
            if (!(it->second > 0))
                throw std::invalid_argument("ExplicitField: weights must be strictly positive");
        }
    }

    const IntRect& box() const { return box_; }

    double weight(const EdgeId& e) const
    {
        auto it = weights_.find(e);
        if (it == weights_.end() || !box_.contains(e))
            throw std::out_of_range("ExplicitField::weight: edge outside box");
        return it->second;
    }
    double weight_unchecked(const EdgeId& e) const { return weights_.at(e); }

  private:
    IntRect box_;
    Map weights_;
};

static_assert(WeightSource<WeightField>);
static_assert(WeightSource<ExplicitField>);

}  // namespace fpp
