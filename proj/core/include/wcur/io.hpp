#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "wcur/problems.hpp"
#include "wcur/residue.hpp"

namespace wcur {

/// CSV `i,j,u,v,c1..ck` over the valid nodes of f, row-major, 17 significant
/// digits, LF line endings.
void write_field_dump(std::ostream& out, const Field& f);
/// Throws ValidationError naming the path when it cannot be written.
void write_field_dump(const std::string& path, const Field& f);

/// `key: value` lines in sorted key order.
class Summary {
 public:
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void set(const std::string& key, int value) { set(key, static_cast<long>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& get(const std::string& key) const { return entries_.at(key); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::map<std::string, std::string> entries_;
};

/// `step,energy,sup_W,det_g_min`.
void write_flow_trace(std::ostream& out, const FlowResult& flow);

/// `radius,flux_1..flux_m`.
void write_residue_csv(std::ostream& out, const ResidueReport& rep);

/// Writes `text` to `path`, or throws ValidationError naming the path.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wcur
