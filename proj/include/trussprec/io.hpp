#pragma once

#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/fretsaw.hpp"
#include "trussprec/stiffness.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

namespace detail {

inline Error parse_error(int line, const std::string& what) {
  return Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path);
  out.precision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace detail

/// Text format: "v x y", "e i j gamma", optional "f i j k"; '#' starts a comment.
/// Faces are inferred when no "f" line is present.
inline Truss read_truss(std::istream& in) {
  std::vector<Vec2> pos;
  std::vector<Element> elements;
  std::vector<Face> faces;
  bool have_faces = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec2 p;
      if (!(ls >> p.x >> p.y)) throw detail::parse_error(lineno, "expected 'v x y'");
      pos.push_back(p);
    } else if (tag == "e") {
      Element e;
      if (!(ls >> e.i >> e.j >> e.gamma)) throw detail::parse_error(lineno, "expected 'e i j gamma'");
      elements.push_back(e);
    } else if (tag == "f") {
      Face f;
      if (!(ls >> f[0] >> f[1] >> f[2])) throw detail::parse_error(lineno, "expected 'f i j k'");
      faces.push_back(f);
      have_faces = true;
    } else {
      throw detail::parse_error(lineno, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) throw detail::parse_error(lineno, "trailing '" + extra + "'");
  }
  if (pos.empty()) throw Error(ErrorCode::kParse, "no vertices");
  if (have_faces) return Truss(std::move(pos), std::move(elements), std::move(faces));
  return Truss(std::move(pos), std::move(elements));
}

inline Truss read_truss_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_truss(in);
}

inline void write_truss(std::ostream& out, const Truss& t) {
  auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# " << t.vertex_count() << " vertices, " << t.element_count() << " elements, " << t.face_count()
      << " faces\n";
  for (const auto& p : t.positions()) out << "v " << p.x << ' ' << p.y << '\n';
  for (const auto& e : t.elements()) out << "e " << e.i << ' ' << e.j << ' ' << e.gamma << '\n';
  for (const auto& f : t.faces()) out << "f " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  out.precision(old);
}

inline void write_truss_file(const std::string& path, const Truss& t) {
  auto out = detail::open_out(path);
  write_truss(out, t);
}

/// Sidecar for an extension: "p ext orig" per vertex, "r ext_face orig_face" per face.
inline void write_extension_map(std::ostream& out, const FretsawExtension& ext) {
  for (int j = 0; j < ext.copy_count(); ++j) out << "p " << j << ' ' << ext.vertex_to_original[j] << '\n';
  for (size_t f = 0; f < ext.face_to_original.size(); ++f) out << "r " << f << ' ' << ext.face_to_original[f] << '\n';
}

struct ExtensionMap {
  std::vector<int> vertex_to_original;
  std::vector<int> face_to_original;
};

inline ExtensionMap read_extension_map(std::istream& in) {
  ExtensionMap m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    int a = 0, b = 0;
    if (!(ls >> tag)) continue;
    if (!(ls >> a >> b) || a < 0) throw detail::parse_error(lineno, "expected '<tag> ext orig'");
    auto& target = tag == "p" ? m.vertex_to_original : m.face_to_original;
    if (tag != "p" && tag != "r") throw detail::parse_error(lineno, "unknown record '" + tag + "'");
    if (a != static_cast<int>(target.size())) throw detail::parse_error(lineno, "records out of order");
    target.push_back(b);
  }
  return m;
}

/// Whitespace separated numbers; '#' starts a comment.
inline Vector read_vector(std::istream& in) {
  std::vector<double> values;
  std::string line, token;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    while (ls >> token) {
      try {
        size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw detail::parse_error(lineno, "bad number '" + token + "'");
      }
    }
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Vector read_vector_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_vector(in);
}

inline void write_vector(std::ostream& out, const Vector& v) {
  auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
  out.precision(old);
}

/// Reads the lower-triangle dump written by write_matrix.
inline SparseSymmetricMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.empty() || header[0] != '%')
    throw Error(ErrorCode::kParse, "missing matrix header");
  std::istringstream hs(header.substr(1));
  int n = 0, dim = 0, nnz = 0;
  if (!(hs >> n >> dim >> nnz) || dim != 2 * n) throw Error(ErrorCode::kParse, "bad matrix header");
  std::vector<SparseSymmetricMatrix::Entry> entries;
  for (int t = 0; t < nnz; ++t) {
    SparseSymmetricMatrix::Entry e{};
    if (!(in >> e.row >> e.col >> e.value)) throw Error(ErrorCode::kParse, "matrix entry " + std::to_string(t));
    entries.push_back(e);
  }
  return SparseSymmetricMatrix(dim, std::move(entries));
}

}  // namespace trussprec
