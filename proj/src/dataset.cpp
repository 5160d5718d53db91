#include "ifrl/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl::dataset {

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, std::size_t)>& on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path.string() + ": cannot open for reading");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kValidation, where + "malformed JSON: " + e.what());
    }
    try {
      on_record(doc, line_no);
    } catch (const Error& e) {
      fail(e.kind(), where + e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kValidation, where + e.what());
    }
  }
  if (in.bad()) fail(ErrorKind::kIo, path.string() + ": read failure");
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) fail(ErrorKind::kIo, path.string() + ": write failure");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) fail(ErrorKind::kIo, path.string() + ": write failure");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path.string() + ": cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, path.string() + ": malformed JSON: " + e.what());
  }
}

namespace {

template <typename T>
std::vector<nlohmann::json> to_records(const std::vector<T>& items) {
  std::vector<nlohmann::json> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}

}  // namespace

std::vector<Instruction> load_instructions(const std::filesystem::path& path) {
  std::vector<Instruction> out;
  std::set<std::string> ids;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    auto ins = instruction_from_json(j);
    if (!ids.insert(ins.id).second) {
      fail(ErrorKind::kValidation, "id: duplicate instruction id '" + ins.id + "'");
    }
    out.push_back(std::move(ins));
  });
  return out;
}

void save_instructions(const std::vector<Instruction>& instructions,
                       const std::filesystem::path& path) {
  write_jsonl(path, to_records(instructions));
}

std::vector<CurriculumLevel> load_levels(const std::filesystem::path& path) {
  std::vector<CurriculumLevel> out;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(level_from_json(j)); });
  return out;
}

void save_levels(const std::vector<CurriculumLevel>& levels, const std::filesystem::path& path) {
  write_jsonl(path, to_records(levels));
}

std::vector<Response> load_responses(const std::filesystem::path& path) {
  std::vector<Response> out;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(response_from_json(j)); });
  return out;
}

void save_responses(const std::vector<Response>& responses, const std::filesystem::path& path) {
  write_jsonl(path, to_records(responses));
}

std::vector<LabeledPair> load_pairs(const std::filesystem::path& path) {
  std::vector<LabeledPair> out;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(pair_from_json(j)); });
  return out;
}

void save_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path) {
  write_jsonl(path, to_records(pairs));
}

}  // namespace ifrl::dataset
