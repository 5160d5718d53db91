#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifrl/types.hpp"

namespace ifrl::dataset {

/// Calls `on_record` for every non-blank line. Parse and validation errors are
/// rethrown as Error(kValidation) prefixed with "<path>:<line>: ".
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, std::size_t line)>& on_record);

/// Writes one compact JSON document per line. Throws Error(kIo) with the path.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// Rejects duplicate instruction ids.
std::vector<Instruction> load_instructions(const std::filesystem::path& path);
void save_instructions(const std::vector<Instruction>& instructions, const std::filesystem::path& path);

std::vector<CurriculumLevel> load_levels(const std::filesystem::path& path);
void save_levels(const std::vector<CurriculumLevel>& levels, const std::filesystem::path& path);

std::vector<Response> load_responses(const std::filesystem::path& path);
void save_responses(const std::vector<Response>& responses, const std::filesystem::path& path);

std::vector<LabeledPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path);

}  // namespace ifrl::dataset
