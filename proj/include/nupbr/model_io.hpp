// Model files: exact, auditable JSON. Rationals travel as "num/den" strings
// (never decimals), the filtration as nested block lists per time, tau as a
// per-outcome time or "inf". parse(emit(model)) == model holds bit for bit
// because partitions are kept canonical and rationals in lowest terms.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "nupbr/generator.hpp"

namespace nupbr {

using Json = nlohmann::ordered_json;

struct ModelParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json model_to_json(const Model& model) {
    Json j;
    j["schema"] = 1;
    Json probs = Json::array();
    for (int w = 0; w < model.space.n_outcomes(); ++w)
        probs.push_back(rat_to_string(model.space.prob(w)));
    j["probs"] = std::move(probs);

    Json filtration = Json::array();
    for (int t = 0; t <= model.filt.horizon(); ++t) {
        Json level = Json::array();
        for (const auto& block : model.filt.at(t).blocks()) level.push_back(block);
        filtration.push_back(std::move(level));
    }
    j["filtration"] = std::move(filtration);

    Json assets = Json::array();
    for (const auto& comp : model.assets) {
        Json table = Json::array();
        for (int t = 0; t <= comp.horizon(); ++t) {
            Json row = Json::array();
            for (int w = 0; w < comp.n_outcomes(); ++w) row.push_back(rat_to_string(comp.at(t, w)));
            table.push_back(std::move(row));
        }
        assets.push_back(std::move(table));
    }
    j["assets"] = std::move(assets);

    Json tau = Json::array();
    for (int w = 0; w < model.space.n_outcomes(); ++w) {
        const int v = model.tau.at(w);
        if (v == kInfiniteTime)
            tau.push_back("inf");
        else
            tau.push_back(v);
    }
    j["tau"] = std::move(tau);
    return j;
}

namespace io_detail {

inline Rational parse_rational_at(const Json& j, const std::string& where) {
    if (!j.is_string())
        throw ModelParseError(where + ": rationals must be strings like \"num/den\"");
    try {
        return rat_from_string(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ModelParseError(where + ": " + e.what());
    }
}

}  // namespace io_detail

inline Model model_from_json(const Json& j) {
    using io_detail::parse_rational_at;
    if (!j.is_object()) throw ModelParseError("model: top level must be an object");
    if (!j.contains("schema") || j["schema"] != 1)
        throw ModelParseError("model: missing or unsupported schema (expected 1)");
    for (const char* key : {"probs", "filtration", "assets", "tau"})
        if (!j.contains(key) || !j[key].is_array())
            throw ModelParseError(std::string("model: missing array field '") + key + "'");

    RatVec probs;
    for (std::size_t i = 0; i < j["probs"].size(); ++i)
        probs.push_back(parse_rational_at(j["probs"][i], "probs[" + std::to_string(i) + "]"));
    FiniteProbSpace space = [&] {
        try {
            return FiniteProbSpace(std::move(probs));
        } catch (const std::exception& e) {
            throw ModelParseError(std::string("probs: ") + e.what());
        }
    }();
    const int n = space.n_outcomes();

    std::vector<Partition> levels;
    for (std::size_t t = 0; t < j["filtration"].size(); ++t) {
        const Json& level = j["filtration"][t];
        if (!level.is_array())
            throw ModelParseError("filtration[" + std::to_string(t) + "]: must be a block list");
        std::vector<std::vector<int>> blocks;
        for (const auto& block : level) {
            if (!block.is_array())
                throw ModelParseError("filtration[" + std::to_string(t) + "]: block must be an array");
            std::vector<int> outcomes;
            for (const auto& v : block) {
                if (!v.is_number_integer())
                    throw ModelParseError("filtration[" + std::to_string(t) +
                                          "]: outcome indices must be integers");
                outcomes.push_back(v.get<int>());
            }
            blocks.push_back(std::move(outcomes));
        }
        try {
            levels.emplace_back(n, std::move(blocks));
        } catch (const std::exception& e) {
            throw ModelParseError("filtration[" + std::to_string(t) + "]: " + e.what());
        }
    }
    Filtration filt = [&] {
        try {
            return Filtration(std::move(levels));
        } catch (const std::exception& e) {
            throw ModelParseError(std::string("filtration: ") + e.what());
        }
    }();
    const int T = filt.horizon();

    VectorProcess assets;
    for (std::size_t k = 0; k < j["assets"].size(); ++k) {
        const Json& table = j["assets"][k];
        const std::string where = "assets[" + std::to_string(k) + "]";
        if (!table.is_array() || static_cast<int>(table.size()) != T + 1)
            throw ModelParseError(where + ": needs horizon+1 = " + std::to_string(T + 1) +
                                  " rows");
        std::vector<RatVec> rows;
        for (std::size_t t = 0; t < table.size(); ++t) {
            if (!table[t].is_array() || static_cast<int>(table[t].size()) != n)
                throw ModelParseError(where + "[" + std::to_string(t) + "]: needs " +
                                      std::to_string(n) + " outcome values");
            RatVec row;
            for (std::size_t w = 0; w < table[t].size(); ++w)
                row.push_back(parse_rational_at(
                    table[t][w], where + "[" + std::to_string(t) + "][" + std::to_string(w) + "]"));
            rows.push_back(std::move(row));
        }
        Process comp(std::move(rows));
        if (!is_adapted(comp, filt))
            throw ModelParseError(where + ": values are not adapted to the filtration");
        assets.push_back(std::move(comp));
    }

    if (static_cast<int>(j["tau"].size()) != n)
        throw ModelParseError("tau: needs one entry per outcome");
    RandomTime tau;
    for (std::size_t w = 0; w < j["tau"].size(); ++w) {
        const Json& v = j["tau"][w];
        if (v.is_string()) {
            if (v.get<std::string>() != "inf")
                throw ModelParseError("tau[" + std::to_string(w) + "]: unknown token '" +
                                      v.get<std::string>() + "' (use an integer or \"inf\")");
            tau.tau.push_back(kInfiniteTime);
        } else if (v.is_number_integer()) {
            const int t = v.get<int>();
            if (t < 0 || t > T)
                throw ModelParseError("tau[" + std::to_string(w) + "]: time " + std::to_string(t) +
                                      " outside {0.." + std::to_string(T) + "}");
            tau.tau.push_back(t);
        } else {
            throw ModelParseError("tau[" + std::to_string(w) + "]: must be an integer or \"inf\"");
        }
    }

    return {std::move(space), std::move(filt), std::move(assets), std::move(tau)};
}

inline std::string emit_model(const Model& model) { return model_to_json(model).dump(2) + "\n"; }

inline Model parse_model(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ModelParseError(std::string("model: invalid JSON: ") + e.what());
    }
    return model_from_json(j);
}

// FNV-1a over the canonical serialization; reports embed this so every
// verdict names exactly which model produced it.
inline std::string model_digest(const Model& model) {
    const std::string text = emit_model(model);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace nupbr
