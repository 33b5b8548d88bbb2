#pragma once

#include "otsm/block_ascent.hpp"
#include "otsm/bounds.hpp"
#include "otsm/certificate.hpp"
#include "otsm/sdp.hpp"

#include <json.hpp>

namespace otsm {

/// JSON numbers cannot hold inf/nan; those become the strings "inf", "-inf", "nan".
nlohmann::json json_number(double x);

/// objective_per_sweep is truncated to its first and last 50 entries.
nlohmann::json to_json(const SolveTrace& trace);
nlohmann::json to_json(const CertificateReport& report);
nlohmann::json to_json(const PrimalDecomposition& decomposition);
nlohmann::json to_json(const DualCertificate& certificate);
/// Metadata only; U itself goes to an OTSM-MAT file.
nlohmann::json to_json(const GramSolution& solution);
nlohmann::json to_json(const RoundingResult& rounding);
nlohmann::json to_json(const TightnessReport& report);
nlohmann::json to_json(const DiscordanceReport& report);
nlohmann::json to_json(const BoundsReport& report);

}  // namespace otsm
