#pragma once

#include <string>

#include "simcal/calibration_model.hpp"

namespace simcal {

inline constexpr const char* kModelSchema = "simcal-model v1";

/// JSON model document. Doubles are written in shortest round-trip form, so
/// deserialize(serialize(m)) reproduces every parameter bit-for-bit.
std::string serialize(const CalibrationModel& model);

/// Parses and re-validates a model document; throws ValidationError on any
/// schema or invariant violation.
CalibrationModel deserialize(const std::string& text);

CalibrationModel load_model(const std::string& path);

}  // namespace simcal
