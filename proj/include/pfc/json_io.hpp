#pragma once

#include "json.hpp"
#include "pfc/analysis.hpp"
#include "pfc/design.hpp"
#include "pfc/sim.hpp"
#include "pfc/smallsignal.hpp"

namespace pfc {

// snake_case JSON mirrors of the domain types. from_json for the spec/param
// types requires the core electrical fields and defaults the rest.
void to_json(nlohmann::json& j, const DesignSpec& s);
void from_json(const nlohmann::json& j, DesignSpec& s);

void to_json(nlohmann::json& j, const DesignOutput& o);
void from_json(const nlohmann::json& j, DesignOutput& o);

void to_json(nlohmann::json& j, const CircuitParams& c);
void from_json(const nlohmann::json& j, CircuitParams& c);

void to_json(nlohmann::json& j, const ControlParams& c);
void from_json(const nlohmann::json& j, ControlParams& c);

void to_json(nlohmann::json& j, const LineMetrics& m);
void from_json(const nlohmann::json& j, LineMetrics& m);

void to_json(nlohmann::json& j, const IecReport& r);

void to_json(nlohmann::json& j, const StabilityResult& r);

}  // namespace pfc
