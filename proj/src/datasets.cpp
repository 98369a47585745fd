#include "rcourt/evalkit.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace rcourt {

namespace {

// A JSON array document or one object per line.
std::vector<nlohmann::json> read_records_any(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  auto first = text.find_first_not_of(" \t\r\n");
  std::vector<nlohmann::json> out;
  if (first == std::string::npos) return out;
  if (text[first] == '[') {
    try {
      auto doc = nlohmann::json::parse(text);
      for (auto& item : doc) out.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(path.string() + ": " + e.what());
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string id_of(const nlohmann::json& r, const char* key) {
  const auto& v = r.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

TaskSpec hotpot_item(const nlohmann::json& r) {
  auto id = r.contains("_id") ? id_of(r, "_id") : id_of(r, "id");
  auto answer = r.at("answer").get<std::string>();
  if (trim(answer).empty()) throw DatasetError("record " + id + " has an empty answer");
  return make_task(id, Dataset::HotpotQA, r.at("question").get<std::string>(), {answer});
}

TaskSpec fever_item(const nlohmann::json& r) {
  auto id = id_of(r, "id");
  auto label = to_upper(trim(r.at("label").get<std::string>()));
  if (label != kSupports && label != kRefutes && label != kNotEnoughInfo) {
    throw DatasetError("record " + id + " has label outside the FEVER label set: " + label);
  }
  return make_task(id, Dataset::FEVER, r.at("claim").get<std::string>(), {label});
}

TaskSpec musique_item(const nlohmann::json& r) {
  auto id = id_of(r, "id");
  std::vector<std::string> gold;
  auto answer = r.at("answer").get<std::string>();
  if (!trim(answer).empty()) gold.push_back(answer);
  for (const auto& alias : r.value("answer_aliases", nlohmann::json::array())) {
    auto a = alias.get<std::string>();
    if (!trim(a).empty()) gold.push_back(a);
  }
  if (gold.empty()) throw DatasetError("record " + id + " has no answer");
  std::vector<Paragraph> context;
  for (const auto& p : r.at("paragraphs")) {
    context.push_back({p.at("title").get<std::string>(), p.at("paragraph_text").get<std::string>()});
  }
  if (context.empty()) throw DatasetError("record " + id + " has no paragraphs");
  return make_task(id, Dataset::MuSiQue, r.at("question").get<std::string>(), std::move(gold),
                   std::move(context));
}

}  // namespace

std::vector<TaskSpec> load_dataset(Dataset dataset, const std::filesystem::path& path) {
  std::vector<TaskSpec> out;
  std::size_t index = 0;
  for (const auto& r : read_records_any(path)) {
    ++index;
    try {
      switch (dataset) {
        case Dataset::HotpotQA: out.push_back(hotpot_item(r)); break;
        case Dataset::FEVER: out.push_back(fever_item(r)); break;
        case Dataset::MuSiQue: out.push_back(musique_item(r)); break;
      }
    } catch (const DatasetError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetError(path.string() + ": record " + std::to_string(index) + ": " + e.what());
    }
  }
  std::set<std::string> ids;
  for (const auto& t : out) {
    if (!ids.insert(t.id).second) throw DatasetError(path.string() + ": duplicate id " + t.id);
  }
  return out;
}

}  // namespace rcourt
