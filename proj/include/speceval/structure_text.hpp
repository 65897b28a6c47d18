// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>

#include "speceval/molgraph.hpp"
#include "speceval/sdf.hpp"

namespace speceval {

// Plain-text 3D structure block:
//
//   atoms N
//   i element x y z          (N lines, i = 0..N-1, coordinates in Angstrom)
//   bonds M
//   a b order                (M lines, order 1/2/3/4, 4 = aromatic)
//
// This is the line-oriented coordinate + connectivity form used for 3D
// generation targets. Errors mirror the molfile parser's.
inline MoleculeGraph parse_structure_text(std::string_view text) {
  auto lines = detail::split_lines(text);
  std::size_t li = 0;
  auto next_line = [&]() -> std::string_view {
    while (li < lines.size() && detail::trim_view(lines[li]).empty()) ++li;
    if (li >= lines.size())
      throw Error(errc::truncated_file, "unexpected end of structure block",
                  static_cast<long>(lines.size()));
    return detail::trim_view(lines[li++]);
  };

  auto header = [&](std::string_view keyword) -> int {
    std::string_view ln = next_line();
    std::istringstream ss{std::string(ln)};
    std::string word;
    long long n = -1;
    if (!(ss >> word >> n) || word != keyword || n < 0 || !(ss >> std::ws).eof())
      throw Error(errc::malformed_counts,
                  "expected '" + std::string(keyword) + " N'", static_cast<long>(li));
    return static_cast<int>(n);
  };

  MoleculeGraph mol;
  int natoms = header("atoms");
  for (int i = 0; i < natoms; ++i) {
    std::string_view ln = next_line();
    const long lineno = static_cast<long>(li);
    std::istringstream ss{std::string(ln)};
    long long idx;
    std::string element;
    double x, y, z;
    if (!(ss >> idx >> element >> x >> y >> z) || !(ss >> std::ws).eof())
      throw Error(errc::atom_block, "unreadable atom line", lineno);
    if (idx != i)
      throw Error(errc::atom_block,
                  "atom index " + std::to_string(idx) + " out of order", lineno);
    if (!known_element(element))
      throw Error(errc::atom_block, "unknown element symbol '" + element + "'", lineno);
    mol.atoms.push_back(Atom{std::move(element), 0, false, Vec3{x, y, z}});
  }
  int nbonds = header("bonds");
  for (int i = 0; i < nbonds; ++i) {
    std::string_view ln = next_line();
    const long lineno = static_cast<long>(li);
    std::istringstream ss{std::string(ln)};
    long long a, b;
    std::string order_tok;
    if (!(ss >> a >> b >> order_tok) || !(ss >> std::ws).eof())
      throw Error(errc::atom_block, "unreadable bond line", lineno);
    if (a < 0 || a >= natoms || b < 0 || b >= natoms)
      throw Error(errc::bond_index_out_of_range,
                  "bond references atom " + std::to_string(std::max(a, b)) + " of " +
                      std::to_string(natoms), lineno);
    if (a == b) throw Error(errc::atom_block, "bond joins an atom to itself", lineno);
    BondOrder order;
    if (order_tok == "1") order = BondOrder::Single;
    else if (order_tok == "2") order = BondOrder::Double;
    else if (order_tok == "3") order = BondOrder::Triple;
    else if (order_tok == "4") order = BondOrder::Aromatic;
    else throw Error(errc::unknown_bond_order, "bond order token '" + order_tok + "'", lineno);
    mol.bonds.push_back(Bond{static_cast<std::size_t>(a), static_cast<std::size_t>(b), order});
  }
  while (li < lines.size()) {
    if (!detail::trim_view(lines[li]).empty())
      throw Error(errc::atom_block, "trailing content after bond block",
                  static_cast<long>(li + 1));
    ++li;
  }

  normalize_bonds(mol);
  for (const Bond& b : mol.bonds)
    if (b.order == BondOrder::Aromatic) {
      mol.atoms[b.a].aromatic = true;
      mol.atoms[b.b].aromatic = true;
    }
  if (auto issue = validate_ex(mol)) throw Error(issue->code, issue->message);
  return mol;
}

inline std::string write_structure_text(const MoleculeGraph& mol) {
  std::string out = "atoms " + std::to_string(mol.atoms.size()) + "\n";
  char buf[128];
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const Atom& a = mol.atoms[i];
    const Vec3 p = a.position.value_or(Vec3{});
    auto z = [](double v) { return v == 0.0 ? 0.0 : v; };
    std::snprintf(buf, sizeof buf, "%zu %s %.4f %.4f %.4f\n", i, a.element.c_str(),
                  z(p.x), z(p.y), z(p.z));
    out += buf;
  }
  out += "bonds " + std::to_string(mol.bonds.size()) + "\n";
  for (const Bond& b : mol.bonds) {
    std::snprintf(buf, sizeof buf, "%zu %zu %d\n", b.a, b.b, static_cast<int>(b.order));
    out += buf;
  }
  return out;
}

}  // namespace speceval
