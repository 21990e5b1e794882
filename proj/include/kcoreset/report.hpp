#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "kcoreset/random.hpp"

namespace kcoreset {

/// Outcome of a checked property: the worst value seen, where it was seen
/// and whether it stayed within the bound.
struct VerificationReport {
    std::string check;
    double max_discrepancy = 0.0;
    double bound = 0.0;
    std::size_t argmax_x = 0;
    double argmax_r = 0.0;
    bool pass = true;
    nlohmann::json params = nlohmann::json::object();
    std::optional<Seed> seed;
};

/// JSON has no infinity; non-finite reals are written as null.
inline nlohmann::json real_or_null(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

inline double real_from_json(const nlohmann::json& j) {
    if (j.is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    return j.get<double>();
}

inline nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json j;
    j["check"] = r.check;
    j["max_discrepancy"] = real_or_null(r.max_discrepancy);
    j["bound"] = real_or_null(r.bound);
    j["argmax_x"] = r.argmax_x;
    j["argmax_r"] = real_or_null(r.argmax_r);
    j["pass"] = r.pass;
    j["params"] = r.params;
    j["seed"] = r.seed ? nlohmann::json(r.seed->value) : nlohmann::json(nullptr);
    return j;
}

}  // namespace kcoreset
