#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "deeprotect/autoencoder.hpp"
#include "deeprotect/evaluation.hpp"
#include "deeprotect/inference.hpp"
#include "deeprotect/privacy.hpp"

namespace deeprotect {

// JSON document formats (full field lists in docs/formats.md). All writers
// emit nlohmann ordered_json with fixed key order and shortest round-trip
// number formatting, so identical inputs give byte-identical files.
// +infinity (the no-noise epsilon) is encoded as the string "inf" since JSON
// numbers cannot carry it.
//
// Readers throw ValidationError for malformed or mis-schema'd documents and
// RuntimeError for unreadable paths.

inline constexpr const char* kClassifierSchema = "ridge-classifier/1";
inline constexpr const char* kStackSchema = "autoencoder-stack/1";
inline constexpr const char* kSidecarSchema = "perturbation-sidecar/1";
inline constexpr const char* kLedgerSchema = "budget-ledger/1";
inline constexpr const char* kReportSchema = "eval-report/1";

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

nlohmann::ordered_json classifier_to_json(const RidgeClassifier& clf);
RidgeClassifier classifier_from_json(const nlohmann::json& doc);
void save_classifier(const RidgeClassifier& clf, const std::string& path);
RidgeClassifier load_classifier(const std::string& path);

nlohmann::ordered_json stack_to_json(const AutoencoderStack& stack);
AutoencoderStack stack_from_json(const nlohmann::json& doc);
void save_stack(const AutoencoderStack& stack, const std::string& path);
AutoencoderStack load_stack(const std::string& path);

// The sidecar written next to every perturbed dataset: the PrivacySpec plus
// the mechanism seed and the sensitivity provenance tag ("empirical-local",
// stating that delta_q was estimated from the data itself).
nlohmann::ordered_json sidecar_to_json(const PrivacySpec& spec, std::uint64_t seed);
std::pair<PrivacySpec, std::uint64_t> sidecar_from_json(const nlohmann::json& doc);
void save_sidecar(const PrivacySpec& spec, std::uint64_t seed,
                  const std::string& path);
std::pair<PrivacySpec, std::uint64_t> load_sidecar(const std::string& path);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

// Throws ValidationError unless `doc` carries every EvalReport field with
// the right type and in-range values (fractions in [0,1], informativeness
// in [0,1] per feature).
void validate_report_json(const nlohmann::json& doc);

// One JSON object per line, in sweep order.
void save_reports_jsonl(const std::vector<EvalReport>& reports,
                        const std::string& path);
std::vector<EvalReport> load_reports_jsonl(const std::string& path);

// Flat table for plotting: one row per report, informativeness reduced to
// its mean. Values with %.15g.
void save_reports_csv(const std::vector<EvalReport>& reports,
                      const std::string& path);

nlohmann::ordered_json ledger_to_json(const BudgetLedger& ledger);
BudgetLedger ledger_from_json(const nlohmann::json& doc);
void save_ledger(const BudgetLedger& ledger, const std::string& path);
BudgetLedger load_ledger(const std::string& path);

}  // namespace deeprotect
