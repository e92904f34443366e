#pragma once

#include "degensink/experiments.hpp"
#include "degensink/sinkhorn.hpp"
#include "degensink/support.hpp"

#include <string>

namespace degensink {

// {"R": [[...], ...], "mu": [...], "nu": [...]}. Throws InvalidInput on
// malformed text or inconsistent shapes.
Instance parse_instance_json(const std::string& text);
Instance load_instance(const std::string& path);
std::string instance_to_json(const Instance& inst);

std::string report_to_json(const SolveReport& report);
std::string classification_to_json(const ScalabilityClass& cls);
std::string mask_to_json(const BipartiteSupport& mask);
std::string trace_to_json(const ProcedureTrace& trace);
std::string gap_trace_csv(const SolveReport& report);

}  // namespace degensink
