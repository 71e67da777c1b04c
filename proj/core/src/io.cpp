#include "wcur/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "wcur/format.hpp"

namespace wcur {

void write_field_dump(std::ostream& out, const Field& f) {
  const Grid& g = f.grid();
  out << "i,j,u,v";
  for (int q = 0; q < f.components(); ++q) out << ",c" << q + 1;
  out << '\n';
  f.for_each_valid([&](int i, int j) {
    out << i << ',' << j << ',' << format_number(g.u.coord(i)) << ',' << format_number(g.v.coord(j));
    for (int q = 0; q < f.components(); ++q) out << ',' << format_number(f(i, j, q));
    out << '\n';
  });
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void write_field_dump(const std::string& path, const Field& f) {
  std::ostringstream s;
  write_field_dump(s, f);
  write_text_file(path, s.str());
}

void Summary::set(const std::string& key, double value) { entries_[key] = format_number(value); }
void Summary::set(const std::string& key, long value) { entries_[key] = std::to_string(value); }
void Summary::set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }
void Summary::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Summary::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << ": " << v << '\n';
}

std::string Summary::str() const {
  std::ostringstream s;
  write(s);
  return s.str();
}

void write_flow_trace(std::ostream& out, const FlowResult& flow) {
  out << "step,energy,sup_W,det_g_min\n";
  for (const FlowSample& s : flow.trace) {
    out << s.step << ',' << format_number(s.energy) << ',' << format_number(s.sup_W) << ','
        << format_number(s.det_g_min) << '\n';
  }
}

void write_residue_csv(std::ostream& out, const ResidueReport& rep) {
  const int m = rep.flux_by_radius.empty() ? 0 : static_cast<int>(rep.flux_by_radius.front().size());
  out << "radius";
  for (int q = 0; q < m; ++q) out << ",flux_" << q + 1;
  out << '\n';
  for (size_t k = 0; k < rep.radii.size(); ++k) {
    out << format_number(rep.radii[k]);
    for (int q = 0; q < m; ++q) out << ',' << format_number(rep.flux_by_radius[k][q]);
    out << '\n';
  }
}

}  // namespace wcur
