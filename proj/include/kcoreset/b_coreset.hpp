#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/sampling.hpp"

namespace kcoreset {

/// Items f with values f(x) >= 0, optional partners f', thresholds s_f(x)
/// and integer weights m_f >= 1.
template <class Query>
struct FunctionFamily {
    using Fn = std::function<double(std::size_t, const Query&)>;

    std::size_t size = 0;
    Fn f;
    Fn f_prime;                   // empty: no partner set, T vanishes
    Fn s;                         // empty: +infinity
    std::vector<std::uint64_t> m;  // empty: all ones

    std::uint64_t weight(std::size_t i) const { return m.empty() ? 1 : m[i]; }

    double threshold(std::size_t i, const Query& x) const { return s ? s(i, x) : std::numeric_limits<double>::infinity(); }

    /// f' > s_f: the item is served by its partner (t_f = f', g_f = 0).
    bool served_by_partner(std::size_t i, const Query& x) const { return f_prime && f_prime(i, x) > threshold(i, x); }

    double total_weight() const {
        double total = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            total += static_cast<double>(weight(i));
        }
        return total;
    }

    void validate() const {
        require(size > 0, "function family is empty");
        require(static_cast<bool>(f), "function family has no evaluator");
        require(m.empty() || m.size() == size, "one weight per function required");
        for (auto w : m) {
            require(w >= 1, "function weights must be >= 1");
        }
    }
};

/// Picks S from G, where G holds m_f copies of each g_f. S is returned as
/// a multiset of item indices (copies of the same g_f are identical).
using EpsApproxRoutine = std::function<std::vector<std::size_t>(std::span<const std::uint64_t> m)>;

/// S = G: every item m_f times.
inline EpsApproxRoutine take_all() {
    return [](std::span<const std::uint64_t> m) {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < m.size(); ++i) {
            all.insert(all.end(), m[i], i);
        }
        return all;
    };
}

/// i.i.d. sample of G of size eps_approx_sample_size(params).
inline EpsApproxRoutine iid_eps_approx(SampleParams params, Seed seed) {
    return [params, seed](std::span<const std::uint64_t> m) {
        std::vector<double> w(m.begin(), m.end());
        Rng rng(seed);
        return draw_indices(w, eps_approx_sample_size(params), rng);
    };
}

template <class Query>
class BCoreset {
  public:
    BCoreset(FunctionFamily<Query> family, std::vector<std::size_t> sample)
        : family_(std::move(family)), sample_(std::move(sample)), g_size_(family_.total_weight()) {
        require(!sample_.empty(), "B-coreset: empty sample");
        for (std::size_t i : sample_) {
            require(i < family_.size, "B-coreset: sample index out of range");
        }
    }

    const FunctionFamily<Query>& family() const { return family_; }
    const std::vector<std::size_t>& sample() const { return sample_; }
    double g_size() const { return g_size_; }
    double scale() const { return g_size_ / static_cast<double>(sample_.size()); }

    /// cost(T, x): partners of the items above their threshold.
    double cost_T(const Query& x) const {
        double total = 0.0;
        for (std::size_t i = 0; i < family_.size; ++i) {
            if (family_.served_by_partner(i, x)) {
                total += family_.f_prime(i, x);
            }
        }
        return total;
    }

    double g(std::size_t i, const Query& x) const {
        if (family_.served_by_partner(i, x)) {
            return 0.0;
        }
        return family_.f(i, x) / static_cast<double>(family_.weight(i));
    }

    /// cost(U, x) = |G|/|S| * sum over S of g_f(x).
    double cost_U(const Query& x) const {
        double total = 0.0;
        for (std::size_t i : sample_) {
            total += g(i, x);
        }
        return total * scale();
    }

    double cost(const Query& x) const { return cost_T(x) + cost_U(x); }

  private:
    FunctionFamily<Query> family_;
    std::vector<std::size_t> sample_;
    double g_size_;
};

template <class Query>
BCoreset<Query> b_coreset(FunctionFamily<Query> family, const EpsApproxRoutine& eps_approx) {
    family.validate();
    std::vector<std::uint64_t> m(family.size);
    for (std::size_t i = 0; i < family.size; ++i) {
        m[i] = family.weight(i);
    }
    auto sample = eps_approx(m);
    return BCoreset<Query>(std::move(family), std::move(sample));
}

template <class Query>
double family_cost(const FunctionFamily<Query>& family, const Query& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < family.size; ++i) {
        total += family.f(i, x);
    }
    return total;
}

struct ErrorBound {
    double error = 0.0;       // |cost(F,x) - cost(C,x)|
    double bound = 0.0;
    double partner_term = 0.0;
    double sample_term = 0.0;
    double eps = 0.0;          // range discrepancy of S against G at x
    bool assumption_holds = true;  // f <= 2 s_f on M(x)
};

/// Every term of the error bound at one query, with eps taken as the
/// measured range discrepancy of S with respect to G at that query:
///   sum_{f not in M} |f - f'| + 2 eps max_{f in M} (s_f / m_f) sum m_f.
template <class Query>
ErrorBound b_coreset_error_bound(const BCoreset<Query>& C, const Query& x) {
    const auto& family = C.family();
    ErrorBound out;
    std::vector<double> g_values(family.size);
    std::vector<double> g_weights(family.size);
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < family.size; ++i) {
        g_weights[i] = static_cast<double>(family.weight(i));
        if (family.served_by_partner(i, x)) {
            out.partner_term += std::abs(family.f(i, x) - family.f_prime(i, x));
            g_values[i] = 0.0;
        } else {
            const double s = family.threshold(i, x);
            if (!(family.f(i, x) <= 2.0 * s)) {
                out.assumption_holds = false;
            }
            max_ratio = std::max(max_ratio, s / g_weights[i]);
            g_values[i] = C.g(i, x);
        }
    }
    const auto report = verify_range_eps_approx(ValueGrid{g_values}, C.sample(), 1.0, g_weights);
    out.eps = report.max_discrepancy;
    out.sample_term = out.eps == 0.0 ? 0.0 : 2.0 * out.eps * max_ratio * C.g_size();
    out.bound = out.partner_term + out.sample_term;
    out.error = std::abs(family_cost(family, x) - C.cost(x));
    return out;
}

}  // namespace kcoreset
