// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "speceval/molgraph.hpp"
#include "speceval/sdf.hpp"
#include "speceval/structure_text.hpp"

namespace speceval {

namespace geometry_detail {

using BondKey = std::tuple<std::string, std::string, int>;  // elements sorted, order

inline BondKey make_key(std::string a, std::string b, BondOrder o) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b), static_cast<int>(o)};
}

}  // namespace geometry_detail

// Clash factor, bond-length tolerance and the reference tables. The defaults
// ship as data files too (data/vdw_radii.csv, data/bond_lengths.csv) so the
// tables can be swapped without rebuilding.
struct GeometryParams {
  double alpha = 0.65;  // clash threshold factor on summed vdW radii
  double beta = 0.20;   // allowed fractional deviation from the reference length
  std::map<std::string, double> vdw_radii;
  std::map<geometry_detail::BondKey, double> bond_lengths;

  // Conventional relaxations, off by default: the literal non-bonded set
  // excludes only bonded pairs.
  bool exclude_13_14 = false;   // also skip pairs 2 or 3 bonds apart
  bool ignore_hydrogens = false;

  void check() const {
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
      throw Error(errc::config_mismatch, "alpha and beta must lie in (0, 1)");
    for (const auto& [sym, r] : vdw_radii)
      if (!(r > 0.0)) throw Error(errc::config_mismatch, "non-positive vdW radius");
    for (const auto& [key, l] : bond_lengths)
      if (!(l > 0.0)) throw Error(errc::config_mismatch, "non-positive bond length");
  }

  static GeometryParams defaults() {
    GeometryParams p;
    // Bondi vdW radii, Angstrom.
    p.vdw_radii = {{"H", 1.20}, {"C", 1.70}, {"N", 1.55}, {"O", 1.52}, {"F", 1.47},
                   {"P", 1.80}, {"S", 1.80}, {"Cl", 1.75}, {"Br", 1.85}, {"I", 1.98}};
    // Typical reference lengths, Angstrom, keyed by (element pair, order).
    using geometry_detail::make_key;
    auto& t = p.bond_lengths;
    t[make_key("C", "C", BondOrder::Single)] = 1.54;
    t[make_key("C", "C", BondOrder::Double)] = 1.34;
    t[make_key("C", "C", BondOrder::Triple)] = 1.20;
    t[make_key("C", "C", BondOrder::Aromatic)] = 1.39;
    t[make_key("C", "O", BondOrder::Single)] = 1.43;
    t[make_key("C", "O", BondOrder::Double)] = 1.21;
    t[make_key("C", "N", BondOrder::Single)] = 1.47;
    t[make_key("C", "N", BondOrder::Double)] = 1.28;
    t[make_key("C", "N", BondOrder::Triple)] = 1.16;
    t[make_key("C", "N", BondOrder::Aromatic)] = 1.34;
    t[make_key("C", "H", BondOrder::Single)] = 1.09;
    t[make_key("O", "H", BondOrder::Single)] = 0.96;
    t[make_key("N", "H", BondOrder::Single)] = 1.01;
    t[make_key("S", "H", BondOrder::Single)] = 1.34;
    t[make_key("C", "S", BondOrder::Single)] = 1.82;
    t[make_key("C", "S", BondOrder::Double)] = 1.60;
    t[make_key("C", "F", BondOrder::Single)] = 1.35;
    t[make_key("C", "Cl", BondOrder::Single)] = 1.77;
    t[make_key("Br", "C", BondOrder::Single)] = 1.94;
    t[make_key("C", "I", BondOrder::Single)] = 2.14;
    t[make_key("N", "N", BondOrder::Single)] = 1.45;
    t[make_key("N", "N", BondOrder::Double)] = 1.25;
    t[make_key("N", "O", BondOrder::Single)] = 1.40;
    t[make_key("N", "O", BondOrder::Double)] = 1.21;
    t[make_key("O", "O", BondOrder::Single)] = 1.48;
    t[make_key("C", "P", BondOrder::Single)] = 1.84;
    t[make_key("O", "P", BondOrder::Single)] = 1.63;
    t[make_key("O", "P", BondOrder::Double)] = 1.50;
    t[make_key("H", "H", BondOrder::Single)] = 0.74;
    return p;
  }
};

// CSV loaders for custom tables: "element,radius" and
// "element_a,element_b,order,length" (order 1/2/3/4), '#' comments allowed.
inline std::map<std::string, double> load_vdw_radii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::input_not_found, "cannot open " + path);
  std::map<std::string, double> table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string sym, radius;
    if (!std::getline(ss, sym, ',') || !std::getline(ss, radius))
      throw Error(errc::config_parse, "expected 'element,radius'", lineno);
    table[sym] = std::stod(radius);
  }
  return table;
}

inline std::map<geometry_detail::BondKey, double> load_bond_lengths(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::input_not_found, "cannot open " + path);
  std::map<geometry_detail::BondKey, double> table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b, order, len;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, order, ',') || !std::getline(ss, len))
      throw Error(errc::config_parse, "expected 'a,b,order,length'", lineno);
    int o = std::stoi(order);
    if (o < 1 || o > 4) throw Error(errc::config_parse, "order must be 1..4", lineno);
    table[geometry_detail::make_key(a, b, static_cast<BondOrder>(o))] = std::stod(len);
  }
  return table;
}

struct ClashPair {
  std::size_t i = 0, j = 0;
  double dist = 0.0;
  double threshold = 0.0;  // alpha * (r_i + r_j)
};

struct BondViolation {
  std::size_t i = 0, j = 0;
  double dist = 0.0;
  double reference = 0.0;  // table length; allowed band is [(1-beta)l, (1+beta)l]
};

struct GeometryReport {
  bool parsed_ok = true;
  std::vector<ClashPair> clashes;
  std::vector<BondViolation> violations;

  std::size_t clash_count() const { return clashes.size(); }
  std::size_t violation_count() const { return violations.size(); }
};

// Non-bonded pairs closer than alpha * (r_i^vdW + r_j^vdW). Bonded pairs are
// excluded; 1-3/1-4 pairs are counted unless exclude_13_14 is set.
inline std::vector<ClashPair> atom_clashes(const MoleculeGraph& mol,
                                           const GeometryParams& params) {
  params.check();
  if (!has_positions(mol))
    throw Error(errc::missing_coordinates, "molecule has no 3D coordinates");
  const std::size_t n = mol.atoms.size();
  std::vector<double> radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = params.vdw_radii.find(mol.atoms[i].element);
    if (it == params.vdw_radii.end())
      throw Error(errc::unknown_element_radius,
                  "no vdW radius for '" + mol.atoms[i].element + "'");
    radius[i] = it->second;
  }
  std::vector<std::vector<bool>> bonded(n, std::vector<bool>(n, false));
  for (const Bond& b : mol.bonds) bonded[b.a][b.b] = bonded[b.b][b.a] = true;
  std::vector<std::vector<int>> topo;
  if (params.exclude_13_14) topo = topological_distances(mol);

  std::vector<ClashPair> clashes;
  for (std::size_t i = 0; i < n; ++i) {
    if (params.ignore_hydrogens && mol.atoms[i].element == "H") continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (params.ignore_hydrogens && mol.atoms[j].element == "H") continue;
      if (bonded[i][j]) continue;
      if (params.exclude_13_14 && topo[i][j] != unreachable_distance && topo[i][j] <= 3)
        continue;
      double d = distance(*mol.atoms[i].position, *mol.atoms[j].position);
      double threshold = params.alpha * (radius[i] + radius[j]);
      if (d < threshold) clashes.push_back({i, j, d, threshold});
    }
  }
  return clashes;
}

// Bonds whose length falls outside [(1-beta) l, (1+beta) l] for the table
// length l of (element_i, element_j, order).
inline std::vector<BondViolation> bond_violations(const MoleculeGraph& mol,
                                                  const GeometryParams& params) {
  params.check();
  if (!has_positions(mol))
    throw Error(errc::missing_coordinates, "molecule has no 3D coordinates");
  std::vector<BondViolation> violations;
  for (const Bond& b : mol.bonds) {
    auto key = geometry_detail::make_key(mol.atoms[b.a].element, mol.atoms[b.b].element, b.order);
    auto it = params.bond_lengths.find(key);
    if (it == params.bond_lengths.end())
      throw Error(errc::unknown_bond_reference,
                  "no reference length for " + mol.atoms[b.a].element + "-" +
                      mol.atoms[b.b].element + " order " +
                      std::to_string(static_cast<int>(b.order)));
    double l = it->second;
    double d = distance(*mol.atoms[b.a].position, *mol.atoms[b.b].position);
    if (d < (1.0 - params.beta) * l || d > (1.0 + params.beta) * l)
      violations.push_back({b.a, b.b, d, l});
  }
  return violations;
}

inline GeometryReport analyze_geometry(const MoleculeGraph& mol, const GeometryParams& params) {
  GeometryReport r;
  r.clashes = atom_clashes(mol, params);
  r.violations = bond_violations(mol, params);
  return r;
}

enum class StructureFormat { Auto, Sdf, Block };

inline MoleculeGraph parse_structure_any(std::string_view text,
                                         StructureFormat format = StructureFormat::Auto) {
  if (format == StructureFormat::Sdf) return parse_sdf(text);
  if (format == StructureFormat::Block) return parse_structure_text(text);
  std::string_view probe = text.substr(0, text.find('\n'));
  if (detail::trim_view(probe).substr(0, 6) == "atoms ") return parse_structure_text(text);
  return parse_sdf(text);
}

struct CorpusGeometry {
  double sdf_valid = 0.0;       // parsable fraction
  double mean_clashes = 0.0;    // over all records; invalid records count 0
  double mean_violations = 0.0;
  double valid_mean_clashes = 0.0;     // over valid records only
  double valid_mean_violations = 0.0;
  std::size_t n_total = 0;
  std::size_t n_valid = 0;
  std::size_t n_diag_failed = 0;  // parsed but not analyzable (missing table entry)
};

// Corpus pass: unparsable records contribute zero clashes/violations but stay
// in the denominator. Records that parse but cannot be analyzed (for example
// a radius missing from a custom table) count as valid with zero contribution
// and are tallied in n_diag_failed.
inline CorpusGeometry corpus_geometry(const std::vector<std::string>& records,
                                      const GeometryParams& params,
                                      StructureFormat format = StructureFormat::Auto) {
  if (records.empty()) throw Error(errc::empty_corpus, "no structure records");
  CorpusGeometry out;
  out.n_total = records.size();
  double clash_sum = 0.0, viol_sum = 0.0;
  for (const std::string& text : records) {
    MoleculeGraph mol;
    try {
      mol = parse_structure_any(text, format);
    } catch (const Error&) {
      continue;  // invalid: contributes 0 to both sums
    }
    ++out.n_valid;
    try {
      GeometryReport r = analyze_geometry(mol, params);
      clash_sum += static_cast<double>(r.clash_count());
      viol_sum += static_cast<double>(r.violation_count());
    } catch (const Error&) {
      ++out.n_diag_failed;
    }
  }
  out.sdf_valid = static_cast<double>(out.n_valid) / static_cast<double>(out.n_total);
  out.mean_clashes = clash_sum / static_cast<double>(out.n_total);
  out.mean_violations = viol_sum / static_cast<double>(out.n_total);
  if (out.n_valid) {
    out.valid_mean_clashes = clash_sum / static_cast<double>(out.n_valid);
    out.valid_mean_violations = viol_sum / static_cast<double>(out.n_valid);
  }
  return out;
}

}  // namespace speceval
