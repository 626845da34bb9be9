#include "deeprotect/registry.hpp"

#include "json.hpp"

#include "deeprotect/errors.hpp"

namespace deeprotect {

namespace {

// Embedded copy of data/inference_registry.json. Keep the two byte-identical
// (test_registry checks); edit the file first, then mirror it here.
const char* const kRegistryJson = R"raw({
  "schema": "inference-registry/1",
  "inferences": [
    {
      "name": "Activity Mode Detection",
      "category": "walking, still, etc.",
      "sensors": ["accelerometer"]
    },
    {
      "name": "Behavior-based Authentication",
      "category": "authorized user or not",
      "sensors": ["accelerometer", "orientation", "gyroscope", "magnetic field", "microphone", "camera", "touch screen"]
    },
    {
      "name": "Text Entered",
      "category": "alphabets, digits",
      "sensors": ["accelerometer", "orientation", "gyroscope"]
    },
    {
      "name": "Speaker Identity Recognition",
      "category": "user's identity",
      "sensors": ["accelerometer", "orientation", "gyroscope", "magnetic field", "microphone", "camera"]
    },
    {
      "name": "Speech-to-text Translation",
      "category": "speech to text",
      "sensors": ["gyroscope", "camera"]
    },
    {
      "name": "Location",
      "category": "home, work, public",
      "sensors": ["accelerometer", "magnetic field", "gps"]
    },
    {
      "name": "Device Placement",
      "category": "hand, ear, pocket, bag",
      "sensors": ["accelerometer"]
    },
    {
      "name": "Onscreen Taps",
      "category": "location of apps on screen",
      "sensors": ["accelerometer", "gyroscope"]
    },
    {
      "name": "Stress",
      "category": "stressful or not",
      "sensors": ["microphone"]
    },
    {
      "name": "Emotion",
      "category": "happy, sad, fear, anger",
      "sensors": ["microphone"]
    },
    {
      "name": "Environment Monitor",
      "category": "place virtualization",
      "sensors": ["accelerometer", "orientation", "microphone", "camera"]
    }
  ]
}
)raw";

std::vector<InferenceInfo> parse_registry() {
  const nlohmann::json doc = nlohmann::json::parse(kRegistryJson);
  if (doc.at("schema").get<std::string>() != "inference-registry/1") {
    throw RuntimeError("registry-schema", "embedded registry has wrong schema tag");
  }
  std::vector<InferenceInfo> rows;
  for (const nlohmann::json& row : doc.at("inferences")) {
    InferenceInfo info;
    info.name = row.at("name").get<std::string>();
    info.category = row.at("category").get<std::string>();
    for (const nlohmann::json& s : row.at("sensors")) {
      info.sensors.push_back(s.get<std::string>());
    }
    rows.push_back(std::move(info));
  }
  return rows;
}

}  // namespace

const std::vector<InferenceInfo>& inference_registry() {
  static const std::vector<InferenceInfo> rows = parse_registry();
  return rows;
}

std::vector<InferenceInfo> registry_lookup(const std::string& name) {
  std::vector<InferenceInfo> hits;
  for (const InferenceInfo& info : inference_registry()) {
    if (info.name == name) hits.push_back(info);
  }
  return hits;
}

const std::string& inference_registry_json() {
  static const std::string text = kRegistryJson;
  return text;
}

}  // namespace deeprotect
