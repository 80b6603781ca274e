// Copyright 2026 The fqdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/hamiltonian.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/state.hpp"

namespace fqdyn::io {

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFF));
}

inline void put_f64(std::ostream& os, double x) {
  auto v = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFF));
}

inline std::uint64_t get_bytes(std::istream& is, int count) {
  std::uint64_t v = 0;
  for (int b = 0; b < count; ++b) {
    int c = is.get();
    if (c == EOF) throw ValidationError("state snapshot is truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_bytes(is, 8)); }

}  // namespace detail

/// "FQS1", d, points_per_axis, Omega, eta, then complex128 amplitudes, all
/// little endian.
inline void write_state(std::ostream& os, const FirstQuantizedState& s) {
  os.write("FQS1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(s.grid().dim));
  detail::put_u32(os, static_cast<std::uint32_t>(s.grid().points_per_axis));
  detail::put_f64(os, s.grid().cell_volume);
  detail::put_u32(os, static_cast<std::uint32_t>(s.eta()));
  for (const auto& a : s.amplitudes()) {
    detail::put_f64(os, a.real());
    detail::put_f64(os, a.imag());
  }
}

inline void write_state(const std::string& path, const FirstQuantizedState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  write_state(os, s);
}

inline FirstQuantizedState read_state(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "FQS1")
    throw ValidationError("not an FQS1 state snapshot");
  GridSpec g;
  g.dim = static_cast<int>(detail::get_bytes(is, 4));
  g.points_per_axis = static_cast<int>(detail::get_bytes(is, 4));
  g.cell_volume = detail::get_f64(is);
  const int eta = static_cast<int>(detail::get_bytes(is, 4));
  FirstQuantizedState s(g, eta);
  for (auto& a : s.amplitudes()) {
    double re = detail::get_f64(is);
    double im = detail::get_f64(is);
    a = {re, im};
  }
  s.set_antisymmetric(is_antisymmetric(s, 1e-10));
  return s;
}

inline FirstQuantizedState read_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  return read_state(is);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("'" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw ValidationError("'" + text + "' is not a number");
  return v;
}

/// One nucleus per line: "zeta x [y z]"; '#' starts a comment.
inline NuclearConfig parse_nuclei(std::istream& is, int dim) {
  NuclearConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (!ls.eof()) throw ValidationError("nuclei line " + std::to_string(lineno) + " is malformed");
    if (vals.empty()) continue;
    if (static_cast<int>(vals.size()) != 1 + dim)
      throw ValidationError("nuclei line " + std::to_string(lineno) + " needs charge and " +
                            std::to_string(dim) + " coordinates");
    if (vals[0] != std::floor(vals[0]) || vals[0] < 1)
      throw ValidationError("nuclear charge must be a positive integer");
    Vec3 r{0, 0, 0};
    for (int a = 0; a < dim; ++a) r[a] = vals[1 + a];
    cfg.add(static_cast<int>(vals[0]), r);
  }
  return cfg;
}

inline NuclearConfig read_nuclei(const std::string& path, int dim) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open nuclei file '" + path + "'");
  return parse_nuclei(is, dim);
}

/// N rows of 2 eta comma-separated values (re, im per orbital). Blank lines,
/// '#' comments and a non-numeric header row are skipped.
inline CMatrix parse_coeffs(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line, ',');
    std::vector<double> vals;
    try {
      for (auto& c : cells) vals.push_back(parse_double(c));
    } catch (const ValidationError&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ValidationError("coefficient file is empty");
  const std::size_t width = rows[0].size();
  if (width == 0 || width % 2) throw ValidationError("coefficient rows need 2*eta columns");
  CMatrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width / 2));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) throw ValidationError("coefficient rows differ in width");
    for (std::size_t a = 0; a < width / 2; ++a)
      c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = {rows[r][2 * a],
                                                                       rows[r][2 * a + 1]};
  }
  return c;
}

inline CMatrix read_coeffs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open coefficient file '" + path + "'");
  return parse_coeffs(is);
}

inline void write_coeffs(std::ostream& os, const CMatrix& c) {
  for (Eigen::Index a = 0; a < c.cols(); ++a)
    os << (a ? "," : "") << "re" << a << ",im" << a;
  os << "\n";
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    for (Eigen::Index a = 0; a < c.cols(); ++a)
      os << (a ? "," : "") << format_double(c(r, a).real()) << ","
         << format_double(c(r, a).imag());
    os << "\n";
  }
}

}  // namespace fqdyn::io
