#include "respg/config.hpp"

#include <fstream>
#include <istream>

#include "respg/error.hpp"
#include "respg/text.hpp"

namespace respg::config {

Document Document::parse(std::istream& in) {
  Document doc;
  std::string line;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": bad section");
      current = std::string(text::trim(t.substr(1, t.size() - 2)));
      doc.sections_[current];
      continue;
    }
    if (current.empty())
      throw Error(Errc::ConfigInvalid,
                  "line " + std::to_string(line_no) + ": entry outside any section");
    const auto eq = t.find('=');
    auto& sec = doc.sections_[current];
    if (eq == std::string_view::npos) {
      sec.rows.emplace_back(t);
    } else {
      const auto key = text::trim(t.substr(0, eq));
      const auto value = text::trim(t.substr(eq + 1));
      if (key.empty())
        throw Error(Errc::ConfigInvalid, "line " + std::to_string(line_no) + ": empty key");
      sec.values[std::string(key)] = std::string(value);
    }
  }
  return doc;
}

Document Document::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigInvalid, "cannot open config " + path.string());
  return parse(in);
}

const Section* Document::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

std::vector<std::string> Document::section_names() const {
  std::vector<std::string> names;
  for (const auto& [k, v] : sections_) names.push_back(k);
  return names;
}

std::optional<std::string> Document::get(const std::string& section,
                                         const std::string& key) const {
  const auto* sec = this->section(section);
  if (!sec) return std::nullopt;
  const auto it = sec->values.find(key);
  if (it == sec->values.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Document::get_double(const std::string& section,
                                           const std::string& key) const {
  const auto raw = get(section, key);
  if (!raw) return std::nullopt;
  const auto v = text::parse_double(*raw);
  if (!v) throw Error(Errc::ConfigInvalid, "[" + section + "] " + key + " is not a number");
  return v;
}

}  // namespace respg::config
