#pragma once

// Minimal JSON-Schema checker covering the subset used by
// docs/verdict.schema.json: type, enum, properties, required,
// additionalProperties. Returns an empty string on success, otherwise the
// first violation found.

#include <string>

#include <json.hpp>

namespace schema_check {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline std::string validate(const nlohmann::json& value, const nlohmann::json& schema,
                            const std::string& path = "$") {
    if (schema.contains("type")) {
        const auto& t = schema.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else {
            for (const auto& alt : t)
                if (type_matches(value, alt.get<std::string>())) ok = true;
        }
        if (!ok) return path + ": type mismatch";
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& alt : schema.at("enum"))
            if (alt == value) ok = true;
        if (!ok) return path + ": value not in enum";
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required"))
                if (!value.contains(key.get<std::string>()))
                    return path + ": missing required key '" + key.get<std::string>() + "'";
        }
        const bool closed =
            schema.contains("additionalProperties") && schema.at("additionalProperties") == false;
        for (const auto& [key, child] : value.items()) {
            const nlohmann::json* child_schema = nullptr;
            if (schema.contains("properties") && schema.at("properties").contains(key))
                child_schema = &schema.at("properties").at(key);
            if (child_schema == nullptr) {
                if (closed) return path + ": unexpected key '" + key + "'";
                continue;
            }
            std::string err = validate(child, *child_schema, path + "." + key);
            if (!err.empty()) return err;
        }
    }
    return {};
}

}  // namespace schema_check
