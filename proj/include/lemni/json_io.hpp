#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "lemni/core.hpp"
#include "lemni/critical.hpp"
#include "lemni/verify.hpp"

namespace lemni {

// Instance files: {"schema_version":"1", "seed":…, "roots":[{re,im,multiplicity}]}.
// Doubles use shortest round-trip formatting, so write->read->write is
// byte-stable and lossless.
nlohmann::ordered_json instance_to_json(const Instance& inst,
                                        std::optional<std::uint64_t> seed = std::nullopt);
Instance instance_from_json(const nlohmann::json& j);
std::string write_instance_text(const Instance& inst,
                                std::optional<std::uint64_t> seed = std::nullopt);
Instance read_instance_file(const std::string& path, std::optional<std::uint64_t>* seed_out = nullptr);

nlohmann::ordered_json ladder_to_json(const CriticalLadder& ladder, const BracketSet& brackets);
nlohmann::ordered_json report_to_json(const VerificationReport& report);
nlohmann::ordered_json batch_to_json(const BatchSummary& batch);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace lemni
