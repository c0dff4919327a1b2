#pragma once

#include <json.hpp>

#include <string>

#include "approxop/function_model.hpp"
#include "approxop/kernels1d.hpp"
#include "approxop/sequence_space.hpp"

namespace approxop {

/// Malformed or semantically invalid configuration input.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point form: {"head":[...], "tail":{"kind":"zero"} |
/// {"kind":"geometric","c":...,"r":...}, "space":"gamma"|"cube"|
/// {"kind":"interval","lo":...,"hi":...}}. "tail" and "space" are optional
/// (zero tail, gamma). Unbounded interval endpoints are the strings "inf" /
/// "-inf".
nlohmann::json to_json(const SequencePoint& p);
SequencePoint point_from_json(const nlohmann::json& j);

/// Descriptor form: {"form":"one"|"coord"|"coordsq"|"linear"|"normsq"|
/// "psisq"|"fbar"|"rank", ...} with per-form fields ("j", "coefficients",
/// "center", "terms") and an optional "tensor" vector. Black boxes and
/// custom rank factors are programmatic only and cannot be serialized.
nlohmann::json to_json(const MappingDescriptor& d);
MappingDescriptor descriptor_from_json(const nlohmann::json& j);

KernelFamily family_from_name(const std::string& name);

}  // namespace approxop
