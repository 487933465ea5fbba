#pragma once

#include <string>

#include "json.hpp"

#include "pdmcausal/channels.hpp"
#include "pdmcausal/inference.hpp"
#include "pdmcausal/pdm.hpp"
#include "pdmcausal/tensor.hpp"

namespace pdmcausal {

using json = nlohmann::json;

// Matrices are {"factors": [...], "re": [[...]], "im": [[...]]}, rows first.
// Readers throw std::invalid_argument on malformed input.

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// Matrix fields plus optional "labels".
json state_to_json(const QuantumState& s);
QuantumState state_from_json(const json& j);

/// {"rep": "kraus"|"unitary"|"choi", "dim_in", "dim_out", ...}. Kraus uses
/// "operators", the others "matrix". Optional "in_factors"/"out_factors".
json channel_to_json(const QuantumChannel& ch);
QuantumChannel channel_from_json(const json& j);

/// Matrix fields plus "slots": [{"label", "qubits", "parties"?}]. Without
/// "slots" every tensor factor becomes its own time slot.
json pdm_to_json(const Pdm& r);
Pdm pdm_from_json(const json& j);

json verdict_to_json(const CausalVerdict& v);
json thresholds_to_json(const Thresholds& th);

/// Reads a file and parses it; I/O and parse failures become invalid_argument.
json read_json_file(const std::string& path);

}  // namespace pdmcausal
