#pragma once

// Sectioned text config:
//
//   # comment
//   [section]
//   key = value
//   csv,row,lines,without,equals
//
// Key/value lines and bare rows may both appear in a section; bare rows are
// kept in order for table-style sections.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace respg::config {

struct Section {
  std::map<std::string, std::string> values;
  std::vector<std::string> rows;
};

class Document {
 public:
  static Document parse(std::istream& in);
  static Document load(const std::filesystem::path& path);

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
  const Section* section(const std::string& name) const;
  Section& section_mut(const std::string& name) { return sections_[name]; }
  std::vector<std::string> section_names() const;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  // Throws ConfigInvalid when present but not numeric.
  std::optional<double> get_double(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, Section> sections_;
};

}  // namespace respg::config
