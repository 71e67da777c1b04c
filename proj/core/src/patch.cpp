#include "wcur/patch.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <Eigen/LU>

#include "wcur/format.hpp"
#include "wcur/stencil.hpp"

namespace wcur {

void check_nondegenerate(const ImmersionPatch& p) {
  const Grid& g = p.grid;
  for (const Field* f : {&p.phi, &p.d1[0], &p.d1[1], &p.d2[0], &p.d2[1], &p.d2[2]}) {
    for (double x : f->values()) {
      if (!std::isfinite(x)) throw ValidationError("immersion '" + p.name + "' has non-finite jet values");
    }
  }
  for (int i = 0; i < g.u.n; ++i) {
    for (int j = 0; j < g.v.n; ++j) {
      const Vec a = p.d1[0].vec(i, j);
      const Vec b = p.d1[1].vec(i, j);
      const double det = a.squaredNorm() * b.squaredNorm() - a.dot(b) * a.dot(b);
      if (!(det >= kMinMetricDet)) {
        throw DegenerateImmersion("degenerate metric in '" + p.name + "': det(g) = " + format_number(det, 6) +
                                  " at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

ImmersionPatch patch_from_positions(const Grid& grid, const Field& phi, std::string name) {
  if (phi.components() < 3 || phi.components() > kMaxAmbientDim) {
    throw ValidationError("ambient dimension must lie in [3, 8]");
  }
  ImmersionPatch p;
  p.name = std::move(name);
  p.dim = phi.components();
  p.grid = grid;
  p.phi = phi;
  p.phi.set_margin(0);
  NodalJets j = finite_difference_jets(p.phi);
  p.d1 = std::move(j.d1);
  p.d2 = std::move(j.d2);
  p.source = JetSource::finite_difference;
  p.closure.kind = grid.closed() ? Closure::Kind::periodic : Closure::Kind::open;
  check_nondegenerate(p);
  return p;
}

namespace {

template <class F>
ImmersionPatch map_jets(const ImmersionPatch& p, F&& linear, const Vec& shift) {
  ImmersionPatch q = p;
  auto apply = [&](Field& f, bool with_shift) {
    for (int i = 0; i < p.grid.u.n; ++i)
      for (int j = 0; j < p.grid.v.n; ++j) {
        Vec v = linear(f.vec(i, j));
        if (with_shift) v += shift;
        f.set(i, j, v);
      }
  };
  apply(q.phi, true);
  for (Field& f : q.d1) apply(f, false);
  for (Field& f : q.d2) apply(f, false);
  return q;
}

}  // namespace

ImmersionPatch translate(const ImmersionPatch& p, const Vec& a) {
  if (a.size() != p.dim) throw ValidationError("translation vector has wrong dimension");
  ImmersionPatch q = map_jets(p, [](const Vec& v) { return v; }, a);
  if (q.closure.kind == Closure::Kind::sphere_chart) q.closure.kind = Closure::Kind::open;
  return q;
}

ImmersionPatch rotate(const ImmersionPatch& p, const Eigen::MatrixXd& r) {
  if (r.rows() != p.dim || r.cols() != p.dim) throw ValidationError("rotation matrix has wrong size");
  const Eigen::MatrixXd err = r.transpose() * r - Eigen::MatrixXd::Identity(p.dim, p.dim);
  if (err.cwiseAbs().maxCoeff() > 1e-12 || r.determinant() < 0) {
    throw ValidationError("rotation matrix is not special orthogonal");
  }
  return map_jets(p, [&](const Vec& v) -> Vec { return r * v; }, Vec::Zero(p.dim));
}

ImmersionPatch dilate(const ImmersionPatch& p, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("dilation factor must be positive");
  ImmersionPatch q = map_jets(p, [&](const Vec& v) -> Vec { return lambda * v; }, Vec::Zero(p.dim));
  q.closure.sphere_radius *= lambda;
  return q;
}

ImmersionPatch load_sampled_patch(std::istream& in) {
  std::map<std::string, double> header;
  const char* keys[] = {"m", "nx", "ny", "hx", "hy", "periodic_u", "periodic_v"};
  std::string line;
  long line_no = 0;
  auto is_blank = [](std::string_view s) { return split_ws(s).empty() || split_ws(s)[0].front() == '#'; };

  while (header.size() < 7 && std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tok = split_ws(line);
    const std::string key(tok[0]);
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    auto value = tok.size() == 2 ? parse_number(tok[1]) : std::nullopt;
    if (!known || !value || header.count(key)) {
      throw ValidationError("malformed header at line " + std::to_string(line_no) + ": '" + line + "'");
    }
    header[key] = *value;
  }
  if (header.size() < 7) throw ValidationError("malformed header: missing keys");

  auto as_int = [&](const char* k, int lo, int hi) {
    const double x = header[k];
    if (x != std::floor(x) || x < lo || x > hi) {
      throw ValidationError(std::string("malformed header: ") + k + " out of range");
    }
    return static_cast<int>(x);
  };
  const int m = as_int("m", 3, kMaxAmbientDim);
  const int nx = as_int("nx", 5, 1 << 14);
  const int ny = as_int("ny", 5, 1 << 14);
  const bool pu = as_int("periodic_u", 0, 1) == 1;
  const bool pv = as_int("periodic_v", 0, 1) == 1;
  const double hx = header["hx"];
  const double hy = header["hy"];
  if (!(hx > 0) || !(hy > 0) || !std::isfinite(hx) || !std::isfinite(hy)) {
    throw ValidationError("malformed header: spacings must be positive");
  }

  const Grid grid(Axis{nx, 0.0, (pu ? nx : nx - 1) * hx, pu}, Axis{ny, 0.0, (pv ? ny : ny - 1) * hy, pv});
  Field phi(grid, m);
  std::vector<std::pair<long, std::string>> data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_blank(line)) data.emplace_back(line_no, line);
  }
  if (data.size() != static_cast<size_t>(nx) * ny) {
    throw ValidationError("row count mismatch: header gives " + std::to_string(static_cast<long>(nx) * ny) +
                          " nodes, found " + std::to_string(data.size()) + " rows");
  }
  std::vector<char> seen(data.size(), 0);
  for (const auto& [no, text] : data) {
    const std::string where = "line " + std::to_string(no) + ": ";
    const auto tok = split_ws(text);
    if (static_cast<int>(tok.size()) != m + 2) {
      throw ValidationError(where + "expected " + std::to_string(m + 2) + " fields");
    }
    const auto i = parse_integer(tok[0]);
    const auto j = parse_integer(tok[1]);
    if (!i || !j) throw ValidationError(where + "bad node index");
    if (*i < 0 || *i >= nx || *j < 0 || *j >= ny) throw ValidationError(where + "node index out of range");
    const size_t k = static_cast<size_t>(*i) * ny + *j;
    if (seen[k]) throw ValidationError(where + "duplicate node");
    seen[k] = 1;
    for (int c = 0; c < m; ++c) {
      const auto x = parse_number(tok[2 + c]);
      if (!x) throw ValidationError(where + "not a number");
      if (!std::isfinite(*x)) throw ValidationError(where + "non-finite value");
      phi(static_cast<int>(*i), static_cast<int>(*j), c) = *x;
    }
  }
  return patch_from_positions(grid, phi, "sampled");
}

ImmersionPatch load_sampled_patch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sampled surface '" + path + "'");
  return load_sampled_patch(in);
}

void write_sampled_patch(std::ostream& out, const ImmersionPatch& p) {
  const Grid& g = p.grid;
  out << "m " << p.dim << "\nnx " << g.u.n << "\nny " << g.v.n << "\nhx " << format_number(g.u.h()) << "\nhy "
      << format_number(g.v.h()) << "\nperiodic_u " << int(g.u.periodic) << "\nperiodic_v " << int(g.v.periodic)
      << '\n';
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      out << i << ' ' << j;
      for (int c = 0; c < p.dim; ++c) out << ' ' << format_number(p.phi(i, j, c));
      out << '\n';
    }
}

}  // namespace wcur
