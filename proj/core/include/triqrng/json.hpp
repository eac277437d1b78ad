#pragma once

#include <nlohmann/json.hpp>

#include "triqrng/entropy.hpp"
#include "triqrng/source.hpp"
#include "triqrng/stats.hpp"

// nlohmann::json conversions for the report types; field names follow the
// C++ member names.
namespace triqrng {

void to_json(nlohmann::json& j, const EntropyReport& r);
void from_json(const nlohmann::json& j, EntropyReport& r);
void to_json(nlohmann::json& j, const GofReport& r);
void to_json(nlohmann::json& j, const SweepPoint& p);

}  // namespace triqrng
