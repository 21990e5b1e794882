#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "kcoreset/error.hpp"

namespace kcoreset {

struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent sub-stream, a pure function of (base, stream).
inline Seed derive_seed(Seed base, std::uint64_t stream) {
    return Seed{splitmix64(splitmix64(base.value) ^ (stream * 0xd1b54a32d192ed03ULL + 1))};
}

/// Replayable generator.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard) seeded through splitmix64. Integer and real draws are derived
/// by hand rather than through <random> distributions, whose algorithms are
/// implementation-defined, so a seed produces the same stream everywhere.
class Rng {
  public:
    explicit Rng(Seed seed) : seed_(seed), engine_(splitmix64(seed.value)) {}

    Seed seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        require(n > 0, "Rng::below: empty range");
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) {
                return static_cast<std::size_t>(x % bound);
            }
        }
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Independent generator for a numbered sub-task; does not advance *this.
    Rng child(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  private:
    Seed seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Walker/Vose alias table: O(1) draws proportional to nonnegative weights.
class AliasTable {
  public:
    explicit AliasTable(std::span<const double> weights) {
        const std::size_t n = weights.size();
        require(n > 0, "AliasTable: no weights");
        double total = 0.0;
        for (double w : weights) {
            require(std::isfinite(w) && w >= 0.0, "AliasTable: weights must be finite and nonnegative");
            total += w;
        }
        require(total > 0.0, "AliasTable: total weight is zero");

        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small;
        std::vector<std::size_t> large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back();
            small.pop_back();
            const std::size_t l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for (std::size_t i : large) {
            prob_[i] = 1.0;
            alias_[i] = i;
        }
        for (std::size_t i : small) {
            prob_[i] = weights[i] > 0.0 ? 1.0 : 0.0;
            alias_[i] = i;
        }
        // A zero-weight column that survived rounding must never be returned.
        for (std::size_t i = 0; i < n; ++i) {
            if (weights[i] == 0.0 && alias_[i] == i) {
                alias_[i] = first_positive(weights);
                prob_[i] = 0.0;
            }
        }
    }

    std::size_t size() const { return prob_.size(); }

    std::size_t draw(Rng& rng) const {
        const std::size_t column = rng.below(prob_.size());
        return rng.uniform() < prob_[column] ? column : alias_[column];
    }

  private:
    static std::size_t first_positive(std::span<const double> weights) {
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) {
                return i;
            }
        }
        return 0;
    }

    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace kcoreset
