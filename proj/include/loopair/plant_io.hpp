#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopair/errors.hpp"
#include "loopair/model.hpp"

namespace loopair {

// Plant document schema (JSON):
//   {
//     "plant": { "name": ..., "outputs": [...], "inputs": [...] },
//     "element": [
//       { "output": 1, "input": 1, "kind": "fopdt",
//         "gain": ..., "tau": ..., "deadtime": ... },
//       { ..., "kind": "sopdt", "tau": ..., "tau2": ..., ... }
//     ]
//   }
// Indices are 1-based. Every (output, input) cell must appear exactly once.

namespace detail {

inline double require_number(const nlohmann::json& node, const std::string& key,
                             const std::string& where) {
    if (!node.contains(key)) throw ValidationError(where + ": missing \"" + key + "\"");
    if (!node[key].is_number()) throw ValidationError(where + ": \"" + key + "\" must be a number");
    return node[key].get<double>();
}

inline std::size_t require_index(const nlohmann::json& node, const std::string& key,
                                 std::size_t limit, const std::string& where) {
    if (!node.contains(key)) throw ValidationError(where + ": missing \"" + key + "\"");
    if (!node[key].is_number_integer())
        throw ValidationError(where + ": \"" + key + "\" must be an integer");
    const long long v = node[key].get<long long>();
    if (v < 1 || static_cast<std::size_t>(v) > limit) {
        throw ValidationError(where + ": \"" + key + "\" = " + std::to_string(v) +
                              " out of range 1.." + std::to_string(limit));
    }
    return static_cast<std::size_t>(v) - 1;
}

inline std::vector<std::string> require_names(const nlohmann::json& node, const std::string& key) {
    if (!node.contains(key) || !node[key].is_array() || node[key].empty()) {
        throw ValidationError("plant block needs a non-empty \"" + key + "\" list");
    }
    std::vector<std::string> names;
    for (const auto& item : node[key]) {
        if (!item.is_string()) throw ValidationError("\"" + key + "\" entries must be strings");
        names.push_back(item.get<std::string>());
    }
    return names;
}

}  // namespace detail

/// Parse and validate a plant document. Diagnostics name the offending
/// element block or cell.
inline TransferMatrix load_plant(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("plant document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("plant") || !doc["plant"].is_object()) {
        throw ValidationError("plant document needs a top-level \"plant\" block");
    }
    const auto& plant = doc["plant"];
    const std::string name = plant.contains("name") ? plant["name"].get<std::string>() : "plant";
    const auto outputs = detail::require_names(plant, "outputs");
    const auto inputs = detail::require_names(plant, "inputs");

    if (!doc.contains("element") || !doc["element"].is_array()) {
        throw ValidationError("plant document needs an \"element\" array");
    }

    const std::size_t r = outputs.size();
    const std::size_t s = inputs.size();
    std::vector<TransferElement> cells(r * s);
    std::vector<bool> seen(r * s, false);

    std::size_t block = 0;
    for (const auto& node : doc["element"]) {
        ++block;
        const std::string where = "element block " + std::to_string(block);
        if (!node.is_object()) throw ValidationError(where + ": must be an object");
        const std::size_t i = detail::require_index(node, "output", r, where);
        const std::size_t j = detail::require_index(node, "input", s, where);
        const std::string cell =
            "cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        if (seen[i * s + j]) throw ValidationError(where + ": duplicate entry for " + cell);
        seen[i * s + j] = true;

        TransferElement el;
        const std::string kind =
            node.contains("kind") ? node["kind"].get<std::string>() : "fopdt";
        if (kind == "fopdt") {
            el.kind = ElementKind::fopdt;
        } else if (kind == "sopdt") {
            el.kind = ElementKind::sopdt;
        } else {
            throw ValidationError(where + ": unknown kind \"" + kind + "\"");
        }
        el.gain = detail::require_number(node, "gain", where);
        el.tau1 = detail::require_number(node, "tau", where);
        if (el.kind == ElementKind::sopdt) {
            el.tau2 = detail::require_number(node, "tau2", where);
        } else if (node.contains("tau2")) {
            throw ValidationError(where + ": \"tau2\" is only valid for sopdt elements");
        }
        el.deadtime = node.contains("deadtime") ? detail::require_number(node, "deadtime", where)
                                                : 0.0;
        validate(el, cell);
        cells[i * s + j] = el;
    }

    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            if (!seen[i * s + j]) {
                throw ValidationError("missing element for cell (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ")");
            }
        }
    }
    return TransferMatrix(name, outputs, inputs, std::move(cells));
}

inline TransferMatrix load_plant_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open plant file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_plant(buf.str());
}

/// Serialize back to the document schema. Doubles round-trip exactly, so
/// load_plant(save_plant(tm)) reproduces an identical plant.
inline std::string save_plant(const TransferMatrix& tm) {
    nlohmann::ordered_json doc;
    doc["plant"]["name"] = tm.name();
    doc["plant"]["outputs"] = tm.output_names();
    doc["plant"]["inputs"] = tm.input_names();
    doc["element"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < tm.rows(); ++i) {
        for (std::size_t j = 0; j < tm.cols(); ++j) {
            const TransferElement& el = tm.at(i, j);
            nlohmann::ordered_json node;
            node["output"] = i + 1;
            node["input"] = j + 1;
            node["kind"] = el.kind == ElementKind::sopdt ? "sopdt" : "fopdt";
            node["gain"] = el.gain;
            node["tau"] = el.tau1;
            if (el.tau2.has_value()) node["tau2"] = *el.tau2;
            node["deadtime"] = el.deadtime;
            doc["element"].push_back(node);
        }
    }
    return doc.dump(2) + "\n";
}

}  // namespace loopair
