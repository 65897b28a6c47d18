// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "speceval/molgraph.hpp"

namespace speceval {

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::string_view field(std::string_view line, std::size_t pos, std::size_t len) {
  if (pos >= line.size()) return {};
  return trim_view(line.substr(pos, len));
}

inline bool parse_int(std::string_view s, int& out) {
  s = trim_view(s);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim_view(s);
  if (s.empty()) return false;
  // from_chars<double> is still missing on some libstdc++ configurations for
  // general formats; strtod on a null-terminated copy is portable.
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim_view(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace detail

// Parses a single V2000 molfile. Coordinates are taken verbatim from the atom
// block; aromaticity comes only from bond type 4. The old atom-block charge
// codes are honored, with "M  CHG" properties superseding them.
inline MoleculeGraph parse_sdf(std::string_view text) {
  using detail::field;
  auto lines = detail::split_lines(text);
  if (lines.size() < 4) throw Error(errc::truncated_file, "molfile shorter than header", lines.size());

  MoleculeGraph mol;
  auto name = detail::trim_view(lines[0]);
  if (!name.empty()) mol.name = std::string(name);

  const std::string_view counts = lines[3];
  if (counts.find("V3000") != std::string_view::npos)
    throw Error(errc::unsupported_version, "V3000 molfiles are not supported", 4);
  int natoms = 0, nbonds = 0;
  if (!detail::parse_int(field(counts, 0, 3), natoms) ||
      !detail::parse_int(field(counts, 3, 3), nbonds) || natoms < 0 || nbonds < 0)
    throw Error(errc::malformed_counts, "unreadable counts line", 4);
  if (counts.find("V2000") == std::string_view::npos)
    throw Error(errc::unsupported_version, "missing V2000 version tag", 4);

  const std::size_t atom_start = 4;
  const std::size_t bond_start = atom_start + static_cast<std::size_t>(natoms);
  if (lines.size() < bond_start + static_cast<std::size_t>(nbonds))
    throw Error(errc::truncated_file, "fewer lines than the counts line declares", lines.size());

  // Atom-block charge codes: 1..7 map to +3..-3 with 4 = radical (charge 0).
  static constexpr int charge_codes[8] = {0, 3, 2, 1, 0, -1, -2, -3};

  for (int i = 0; i < natoms; ++i) {
    const std::string_view ln = lines[atom_start + i];
    const long lineno = static_cast<long>(atom_start + i + 1);
    Vec3 pos;
    if (!detail::parse_double(field(ln, 0, 10), pos.x) ||
        !detail::parse_double(field(ln, 10, 10), pos.y) ||
        !detail::parse_double(field(ln, 20, 10), pos.z))
      throw Error(errc::atom_block, "unreadable coordinates", lineno);
    std::string symbol(field(ln, 31, 3));
    if (symbol.empty() || !known_element(symbol))
      throw Error(errc::atom_block, "unknown element symbol '" + symbol + "'", lineno);
    Atom atom;
    atom.element = std::move(symbol);
    atom.position = pos;
    int code = 0;
    if (detail::parse_int(field(ln, 36, 3), code) && code >= 1 && code <= 7)
      atom.formal_charge = charge_codes[code];
    mol.atoms.push_back(std::move(atom));
  }

  for (int i = 0; i < nbonds; ++i) {
    const std::string_view ln = lines[bond_start + i];
    const long lineno = static_cast<long>(bond_start + i + 1);
    int a1 = 0, a2 = 0, type = 0;
    if (!detail::parse_int(field(ln, 0, 3), a1) ||
        !detail::parse_int(field(ln, 3, 3), a2) ||
        !detail::parse_int(field(ln, 6, 3), type))
      throw Error(errc::atom_block, "unreadable bond line", lineno);
    if (a1 < 1 || a1 > natoms || a2 < 1 || a2 > natoms)
      throw Error(errc::bond_index_out_of_range,
                  "bond references atom " + std::to_string(std::max(a1, a2)) +
                      " of " + std::to_string(natoms), lineno);
    if (a1 == a2) throw Error(errc::atom_block, "bond joins an atom to itself", lineno);
    BondOrder order;
    switch (type) {
      case 1: order = BondOrder::Single; break;
      case 2: order = BondOrder::Double; break;
      case 3: order = BondOrder::Triple; break;
      case 4: order = BondOrder::Aromatic; break;
      default:
        throw Error(errc::unknown_bond_order, "bond type " + std::to_string(type), lineno);
    }
    mol.bonds.push_back(Bond{static_cast<std::size_t>(a1 - 1),
                             static_cast<std::size_t>(a2 - 1), order});
  }

  // Property block: only M CHG is interpreted; its first occurrence resets
  // every atom-block charge, per the CTfile convention.
  bool m_end = false, chg_seen = false;
  for (std::size_t li = bond_start + static_cast<std::size_t>(nbonds); li < lines.size(); ++li) {
    std::string_view ln = lines[li];
    if (detail::trim_view(ln) == "M  END" || detail::trim_view(ln) == "M END") {
      m_end = true;
      break;
    }
    if (ln.rfind("M  CHG", 0) == 0) {
      if (!chg_seen) {
        for (auto& a : mol.atoms) a.formal_charge = 0;
        chg_seen = true;
      }
      int nentries = 0;
      if (!detail::parse_int(field(ln, 6, 3), nentries))
        throw Error(errc::atom_block, "unreadable M  CHG count", static_cast<long>(li + 1));
      for (int k = 0; k < nentries; ++k) {
        int idx = 0, chg = 0;
        if (!detail::parse_int(field(ln, 9 + 8 * static_cast<std::size_t>(k), 4), idx) ||
            !detail::parse_int(field(ln, 13 + 8 * static_cast<std::size_t>(k), 4), chg) ||
            idx < 1 || idx > natoms)
          throw Error(errc::atom_block, "bad M  CHG entry", static_cast<long>(li + 1));
        mol.atoms[static_cast<std::size_t>(idx - 1)].formal_charge = chg;
      }
    }
  }
  if (!m_end) throw Error(errc::truncated_file, "missing M  END", lines.size());

  normalize_bonds(mol);
  for (std::size_t i = 0; i + 1 < mol.bonds.size(); ++i) {
    if (mol.bonds[i].a == mol.bonds[i + 1].a && mol.bonds[i].b == mol.bonds[i + 1].b)
      throw Error(errc::duplicate_bond,
                  "bond " + std::to_string(mol.bonds[i].a + 1) + "-" +
                      std::to_string(mol.bonds[i].b + 1) + " listed twice");
  }

  // Atoms incident to an aromatic bond are flagged aromatic.
  for (const Bond& b : mol.bonds) {
    if (b.order == BondOrder::Aromatic) {
      mol.atoms[b.a].aromatic = true;
      mol.atoms[b.b].aromatic = true;
    }
  }

  if (auto issue = validate_ex(mol)) {
    long lineno = -1;
    if (issue->code == errc::valence_violation || issue->code == errc::unknown_atom_symbol)
      lineno = static_cast<long>(atom_start + issue->atom_index + 1);
    throw Error(issue->code, issue->message, lineno);
  }
  return mol;
}

// Writes a V2000 molfile with bit-exact field widths (%10.4f coordinates,
// %3d counts). Graphs without positions get all-zero coordinates. Charges go
// out via M  CHG lines.
inline std::string write_sdf(const MoleculeGraph& mol) {
  if (mol.atoms.size() > 999 || mol.bonds.size() > 999)
    throw Error(errc::unsupported_feature,
                "V2000 supports at most 999 atoms and 999 bonds");
  std::string out;
  out.reserve(64 + 70 * mol.atoms.size() + 22 * mol.bonds.size());
  out += mol.name.value_or("");
  out += "\n  speceval\n\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                static_cast<int>(mol.atoms.size()), static_cast<int>(mol.bonds.size()));
  out += buf;
  for (const Atom& a : mol.atoms) {
    const Vec3 p = a.position.value_or(Vec3{});
    auto z = [](double v) { return v == 0.0 ? 0.0 : v; };  // avoid "-0.0000"
    std::snprintf(buf, sizeof buf, "%10.4f%10.4f%10.4f %-3s 0  0  0  0  0  0  0  0  0  0  0  0\n",
                  z(p.x), z(p.y), z(p.z), a.element.c_str());
    out += buf;
  }
  for (const Bond& b : mol.bonds) {
    std::snprintf(buf, sizeof buf, "%3d%3d%3d  0\n", static_cast<int>(b.a + 1),
                  static_cast<int>(b.b + 1), static_cast<int>(b.order));
    out += buf;
  }
  std::vector<std::pair<int, int>> charged;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i)
    if (mol.atoms[i].formal_charge != 0)
      charged.push_back({static_cast<int>(i + 1), mol.atoms[i].formal_charge});
  for (std::size_t k = 0; k < charged.size(); k += 8) {
    std::size_t n = std::min<std::size_t>(8, charged.size() - k);
    std::snprintf(buf, sizeof buf, "M  CHG%3d", static_cast<int>(n));
    out += buf;
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, " %3d %3d", charged[k + j].first, charged[k + j].second);
      out += buf;
    }
    out += '\n';
  }
  out += "M  END\n";
  return out;
}

}  // namespace speceval
