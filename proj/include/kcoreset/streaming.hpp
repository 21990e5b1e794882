#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kcoreset/bicriteria.hpp"
#include "kcoreset/coreset.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/solvers.hpp"

namespace kcoreset {

struct StreamConfig {
    std::size_t k = 2;
    double eps = 0.3;  // total budget; level l gets eps / (2 (l+1)^2)
    double delta = 0.1;
    Power power{};
    std::size_t block_size = 256;
    BicriteriaProfile profile = BicriteriaProfile::desk();

    void validate() const {
        require(k >= 1, "k must be at least 1");
        require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
        require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
        require(block_size >= 2 * k + 2, "block size too small for k");
        power.validate();
    }

    double level_eps(std::size_t level) const {
        const double l = static_cast<double>(level + 1);
        return eps / (2.0 * l * l);
    }

    double level_inflation(std::size_t level) const { return level_eps(level) / (40.0 * std::pow(2.0, power.z - 1.0)); }
};

/// One-pass merge-and-reduce: levels behave as a binary counter over full
/// blocks, two coresets at one level are concatenated and rebuilt one level
/// up. Queries sum every bucket plus the exact cost of the raw buffer.
template <class Space>
class MergeReduceStream {
  public:
    using Point = PointOf<Space>;

    struct Bucket {
        StaticCoreset<Point> coreset;
        double nominal_mass = 0.0;  // block count times the recorded inflations
    };

    MergeReduceStream(Space space, StreamConfig config, Seed seed) : space_(std::move(space)), config_(config), seed_(seed) {
        config_.validate();
    }

    void push(const Point& p) {
        space_.check_point(p);
        buffer_.push_back(p, 1.0);
        ++points_seen_;
        if (buffer_.size() == config_.block_size) {
            Bucket bucket = reduce(buffer_, 0);
            bucket.nominal_mass = static_cast<double>(config_.block_size) * (1.0 + 10.0 * config_.level_inflation(0));
            buffer_ = {};
            carry(std::move(bucket), 0);
        }
    }

    double query(std::span<const Point> x) const {
        require(points_seen_ > 0, "stream_query: no points seen");
        double total = 0.0;
        for (const auto& level : levels_) {
            if (level) {
                total += eval_coreset_cost(space_, level->coreset, x);
            }
        }
        if (!buffer_.empty()) {
            total += cost(space_, buffer_, x, config_.power);
        }
        return total;
    }

    std::size_t points_seen() const { return points_seen_; }
    std::size_t builds() const { return builds_; }
    const StreamConfig& config() const { return config_; }
    const PointSet<Point>& buffer() const { return buffer_; }
    const std::vector<std::optional<Bucket>>& levels() const { return levels_; }

    std::size_t stored_points() const {
        std::size_t total = buffer_.size();
        for (const auto& level : levels_) {
            if (level) {
                total += level->coreset.points.size();
            }
        }
        return total;
    }

    /// Occupied levels, lowest first; equals the bits of points_seen / block.
    std::vector<bool> occupancy() const {
        std::vector<bool> bits;
        for (const auto& level : levels_) {
            bits.push_back(level.has_value());
        }
        while (!bits.empty() && !bits.back()) {
            bits.pop_back();
        }
        return bits;
    }

    /// ceil(log2(points_seen / block)), zero up to one block.
    std::size_t level_bound() const {
        std::size_t levels = 0;
        while ((config_.block_size << levels) < points_seen_) {
            ++levels;
        }
        return levels;
    }

    double stored_weight() const {
        double total = buffer_.total_weight();
        for (const auto& level : levels_) {
            if (level) {
                total += level->coreset.points.total_weight();
            }
        }
        return total;
    }

    double nominal_weight() const {
        double total = buffer_.total_weight();
        for (const auto& level : levels_) {
            if (level) {
                total += level->nominal_mass;
            }
        }
        return total;
    }

  private:
    void carry(Bucket bucket, std::size_t level) {
        for (;;) {
            if (levels_.size() <= level) {
                levels_.resize(level + 1);
            }
            if (!levels_[level]) {
                levels_[level] = std::move(bucket);
                return;
            }
            Bucket other = std::move(*levels_[level]);
            levels_[level].reset();
            PointSet<Point> merged = std::move(other.coreset.points);
            for (std::size_t i = 0; i < bucket.coreset.points.size(); ++i) {
                merged.push_back(bucket.coreset.points.points[i], bucket.coreset.points.weights[i]);
            }
            const double mass = other.nominal_mass + bucket.nominal_mass;
            ++level;
            bucket = reduce(merged, level);
            bucket.nominal_mass = mass * (1.0 + 10.0 * config_.level_inflation(level));
        }
    }

    Bucket reduce(const PointSet<Point>& set, std::size_t level) {
        const Seed build_seed = derive_seed(seed_, builds_++);
        const double eps = config_.level_eps(level);
        PointSet<Point> magnitude = set;
        for (auto& w : magnitude.weights) {
            w = std::abs(w);
        }
        const std::size_t k = std::min(config_.k, set.size());
        auto B = metric_kmedian_bicriteria(space_, magnitude, k, eps, config_.delta, derive_seed(build_seed, 1), config_.profile, config_.power).B;
        if (B.size() > config_.block_size / 2) {
            B = constant_factor_metric_kmedian(space_, magnitude, k, eps, config_.delta, derive_seed(build_seed, 2), config_.profile,
                                               config_.power)
                    .centers;
        }
        const std::size_t t = config_.block_size - B.size();
        Bucket bucket;
        bucket.coreset = k_median_coreset(space_, set, std::span<const Point>(B), t, config_.level_inflation(level), config_.power,
                                          derive_seed(build_seed, 3));
        return bucket;
    }

    Space space_;
    StreamConfig config_;
    Seed seed_;
    PointSet<Point> buffer_;
    std::vector<std::optional<Bucket>> levels_;
    std::size_t points_seen_ = 0;
    std::size_t builds_ = 0;
};

}  // namespace kcoreset
