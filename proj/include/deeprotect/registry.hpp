#pragma once

#include <string>
#include <vector>

namespace deeprotect {

// One row of the shipped inference catalogue: a known inference over mobile
// sensor data, the attribute values it predicts, and the sensors it has been
// computed from. Used only for labeling reports.
struct InferenceInfo {
  std::string name;
  std::string category;
  std::vector<std::string> sensors;
};

// The full catalogue, parsed once from the embedded copy of
// data/inference_registry.json (the file and the embedded copy are kept
// byte-identical; a test enforces it).
const std::vector<InferenceInfo>& inference_registry();

// Rows whose name matches exactly. Unknown names give an empty result, not
// an error.
std::vector<InferenceInfo> registry_lookup(const std::string& name);

// The embedded registry document, byte-identical to the shipped JSON file.
const std::string& inference_registry_json();

}  // namespace deeprotect
