#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "kcoreset/coreset.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/report.hpp"

namespace kcoreset {

struct Provenance {
    Seed seed{};
    nlohmann::json params = nlohmann::json::object();
    double bicriteria_cost = 0.0;
    std::string input_fingerprint;
};

template <class Point>
struct CoresetFile {
    std::variant<StaticCoreset<Point>, ThresholdCoreset<Point>> coreset;
    Provenance provenance;
    std::size_t dim = 0;  // coordinates per point, or the metric size
};

namespace detail {

inline void put_point(nlohmann::json& j, const Coords& p) { j["coords"] = p; }
inline void put_point(nlohmann::json& j, std::size_t p) { j["index"] = p; }

template <class Point>
Point get_point(const nlohmann::json& j);

template <>
inline Coords get_point<Coords>(const nlohmann::json& j) {
    return j.at("coords").get<Coords>();
}

template <>
inline std::size_t get_point<std::size_t>(const nlohmann::json& j) {
    return j.at("index").get<std::size_t>();
}

template <class Point>
constexpr const char* space_name() {
    return std::is_same_v<Point, Coords> ? EuclideanSpace::kind : MatrixSpace::kind;
}

}  // namespace detail

template <class Point>
nlohmann::json to_json(const CoresetFile<Point>& file) {
    nlohmann::json j;
    j["space"] = detail::space_name<Point>();
    j["dim"] = file.dim;
    nlohmann::json points = nlohmann::json::array();
    nlohmann::json projected = nlohmann::json::array();
    if (const auto* C = std::get_if<StaticCoreset<Point>>(&file.coreset)) {
        j["type"] = "static";
        j["z"] = C->power.z;
        j["eps"] = C->eps;
        for (std::size_t i = 0; i < C->points.size(); ++i) {
            nlohmann::json e;
            detail::put_point(e, C->points.points[i]);
            e["weight"] = C->points.weights[i];
            e["threshold"] = real_or_null(C->thresholds[i]);
            points.push_back(std::move(e));
        }
        j["stats"] = {{"draws", C->draws},
                      {"centers", C->centers},
                      {"input_mass", C->input_mass},
                      {"expected_weight_sum", C->expected_weight_sum},
                      {"degenerate", C->degenerate}};
    } else {
        const auto& T = std::get<ThresholdCoreset<Point>>(file.coreset);
        j["type"] = "threshold";
        j["z"] = T.power.z;
        j["eps"] = T.eps;
        for (const auto& s : T.sampled) {
            nlohmann::json e;
            detail::put_point(e, s.point);
            e["weight"] = s.base_weight;
            e["threshold"] = real_or_null(s.threshold);
            e["center"] = s.center;
            points.push_back(std::move(e));
        }
        for (std::size_t b = 0; b < T.B.size(); ++b) {
            const auto& proj = T.projected[b];
            for (std::size_t i = 0; i < proj.thresholds.size(); ++i) {
                nlohmann::json e;
                detail::put_point(e, T.B[b]);
                e["center"] = b;
                e["threshold"] = real_or_null(proj.thresholds[i]);
                e["multiplicity"] = proj.prefix[i + 1] - proj.prefix[i];
                projected.push_back(std::move(e));
            }
        }
        nlohmann::json centers = nlohmann::json::array();
        for (const auto& b : T.B) {
            nlohmann::json e;
            detail::put_point(e, b);
            centers.push_back(std::move(e));
        }
        j["centers"] = std::move(centers);
        j["stats"] = {{"n", T.n}, {"degenerate", T.degenerate}};
    }
    j["points"] = std::move(points);
    j["projected"] = std::move(projected);
    j["provenance"] = {{"seed", file.provenance.seed.value},
                       {"params", file.provenance.params},
                       {"bicriteria_cost", file.provenance.bicriteria_cost},
                       {"input_fingerprint", file.provenance.input_fingerprint}};
    return j;
}

template <class Point>
CoresetFile<Point> coreset_from_json(const nlohmann::json& j) {
    try {
        if (j.at("space").get<std::string>() != detail::space_name<Point>()) {
            throw ValidationError("coreset file is for a " + j.at("space").get<std::string>() + " space");
        }
        CoresetFile<Point> file;
        file.dim = j.at("dim").get<std::size_t>();
        const auto& prov = j.at("provenance");
        file.provenance.seed = Seed{prov.at("seed").get<std::uint64_t>()};
        file.provenance.params = prov.at("params");
        file.provenance.bicriteria_cost = prov.at("bicriteria_cost").get<double>();
        file.provenance.input_fingerprint = prov.at("input_fingerprint").get<std::string>();
        const auto type = j.at("type").get<std::string>();
        const Power power{j.at("z").get<double>()};
        power.validate();
        if (type == "static") {
            StaticCoreset<Point> C;
            C.power = power;
            C.eps = j.at("eps").get<double>();
            for (const auto& e : j.at("points")) {
                C.points.push_back(detail::get_point<Point>(e), e.at("weight").get<double>());
                C.thresholds.push_back(real_from_json(e.at("threshold")));
            }
            const auto& stats = j.at("stats");
            C.draws = stats.at("draws").get<std::size_t>();
            C.centers = stats.at("centers").get<std::size_t>();
            C.input_mass = stats.at("input_mass").get<double>();
            C.expected_weight_sum = stats.at("expected_weight_sum").get<double>();
            C.degenerate = stats.at("degenerate").get<bool>();
            file.coreset = std::move(C);
        } else if (type == "threshold") {
            ThresholdCoreset<Point> T;
            T.power = power;
            T.eps = j.at("eps").get<double>();
            for (const auto& e : j.at("centers")) {
                T.B.push_back(detail::get_point<Point>(e));
            }
            T.projected.resize(T.B.size());
            for (auto& proj : T.projected) {
                proj.prefix.push_back(0.0);
            }
            for (const auto& e : j.at("points")) {
                T.sampled.push_back({detail::get_point<Point>(e), e.at("center").get<std::size_t>(), e.at("weight").get<double>(),
                                     real_from_json(e.at("threshold"))});
                if (T.sampled.back().center >= T.B.size()) {
                    throw ValidationError("coreset file: center index out of range");
                }
            }
            for (const auto& e : j.at("projected")) {
                const auto b = e.at("center").get<std::size_t>();
                if (b >= T.B.size()) {
                    throw ValidationError("coreset file: center index out of range");
                }
                auto& proj = T.projected[b];
                const double tau = real_from_json(e.at("threshold"));
                if (!proj.thresholds.empty() && !(proj.thresholds.back() < tau)) {
                    throw ValidationError("coreset file: projected thresholds must increase per center");
                }
                proj.thresholds.push_back(tau);
                proj.prefix.push_back(proj.prefix.back() + e.at("multiplicity").get<double>());
            }
            const auto& stats = j.at("stats");
            T.n = stats.at("n").get<std::size_t>();
            T.degenerate = stats.at("degenerate").get<bool>();
            file.coreset = std::move(T);
        } else {
            throw ValidationError("unknown coreset type '" + type + "'");
        }
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed coreset file: ") + e.what());
    }
}

}  // namespace kcoreset
