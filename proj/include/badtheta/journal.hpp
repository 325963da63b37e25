#pragma once

// Line-delimited JSON persistence for run journals, certificates and score
// reports. Every exact quantity is written as a canonical "p/q" string.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "badtheta/sieve.hpp"
#include "badtheta/verify.hpp"

namespace badtheta {

using Json = nlohmann::ordered_json;

inline constexpr const char* kJournalSchema = "badtheta.journal/1";
inline constexpr const char* kCertificateSchema = "badtheta.certificate/1";
inline constexpr const char* kReportSchema = "badtheta.report/1";

Json theta_to_json(const ThetaForm& theta);
ThetaForm theta_from_json(const nlohmann::json& j);
/// Hex digest of the canonical θ record.
std::string theta_fingerprint(const ThetaForm& theta);

Json config_to_json(const SieveConfig& cfg);
SieveConfig config_from_json(const nlohmann::json& j);

Json rectangle_to_json(const Rectangle& rect);
Rectangle rectangle_from_json(const nlohmann::json& j);

/// Header line (config, θ, sequence fingerprint and base rectangle).
std::string journal_header_line(const RunJournal& journal);
std::string journal_level_line(const LevelRecord& record, std::uint64_t R);
std::string journal_final_line(const RunJournal& journal);

void write_journal(std::ostream& out, const RunJournal& journal);

/// Reads a journal, ignoring a trailing partial line left by an interrupted run.
RunJournal read_journal(std::istream& in);

Json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

Json report_to_json(const ScoreReport& report);

std::string fnv1a_hex(std::string_view text);

}  // namespace badtheta
