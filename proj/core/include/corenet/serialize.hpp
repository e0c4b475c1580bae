#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "corenet/compressor.hpp"
#include "corenet/dataset.hpp"
#include "corenet/eval.hpp"

namespace corenet {

using Json = nlohmann::json;

// "crc32:xxxxxxxx" of raw bytes, of a canonical JSON dump, or of a dataset.
std::string digest_bytes(std::string_view bytes);
std::string digest(const Json& value);
std::string digest(const Dataset& data);

Json to_json(const CompressionConfig& config);
Json to_json(const EpsilonSchedule& schedule);
Json to_json(const DeltaEstimates& estimates);
Json to_json(const CompressionPlan& plan);
Json to_json(const SensitivityProfile& profile);
Json to_json(const CompressionStats& stats);
Json to_json(const SweepConfig& config);
Json to_json(const CompressionReport& report);

// Report written next to a compressed network: sizes, per-layer nnz, plan
// parameters, warnings and provenance.
Json compression_report(const CompressionOutcome& outcome, const CompressionConfig& config);

// Overlays the keys present in `value` onto `config`. Unknown keys throw.
void apply_json(const Json& value, CompressionConfig& config);

}  // namespace corenet
