// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speceval/elements.hpp"
#include "speceval/errors.hpp"

namespace speceval {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

enum class BondOrder { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

// Contribution of a bond toward the valence sum; aromatic counts 1.5 and the
// total is floored before the cap check.
inline double bond_order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 0.0;
}

struct Atom {
  std::string element;
  int formal_charge = 0;
  bool aromatic = false;
  std::optional<Vec3> position;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Endpoints are stored normalized (a < b); the bond list is kept sorted and
// duplicate-free so two graphs with equal content compare equal.
struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondOrder order = BondOrder::Single;

  friend bool operator==(const Bond&, const Bond&) = default;
  friend auto operator<=>(const Bond&, const Bond&) = default;
};

struct MoleculeGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::optional<std::string> name;

  friend bool operator==(const MoleculeGraph&, const MoleculeGraph&) = default;
};

inline void normalize_bonds(MoleculeGraph& mol) {
  for (auto& b : mol.bonds) {
    if (b.a > b.b) std::swap(b.a, b.b);
  }
  std::sort(mol.bonds.begin(), mol.bonds.end());
}

inline bool has_positions(const MoleculeGraph& mol) {
  return !mol.atoms.empty() && mol.atoms.front().position.has_value();
}

// Adjacency list: per atom, (neighbor, bond index) pairs in bond-list order.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(
    const MoleculeGraph& mol) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(mol.atoms.size());
  for (std::size_t i = 0; i < mol.bonds.size(); ++i) {
    const Bond& b = mol.bonds[i];
    adj[b.a].push_back({b.b, i});
    adj[b.b].push_back({b.a, i});
  }
  return adj;
}

// Valence sum with aromatic bonds at 1.5, floored.
inline int valence_sum(const MoleculeGraph& mol, std::size_t atom) {
  double sum = 0.0;
  for (const Bond& b : mol.bonds) {
    if (b.a == atom || b.b == atom) sum += bond_order_value(b.order);
  }
  return static_cast<int>(std::floor(sum + 1e-9));
}

struct ValidationIssue {
  errc code;
  std::size_t atom_index;  // meaningful for valence/element issues
  std::string message;
};

// Checks the graph invariants without throwing, so parsers can attach input
// line numbers to the failure. Bond endpoints must already be normalized.
inline std::optional<ValidationIssue> validate_ex(const MoleculeGraph& mol) {
  if (mol.atoms.empty())
    return ValidationIssue{errc::invalid_spectrum, 0, "graph has no atoms"};

  bool any_pos = false, all_pos = true;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const Atom& a = mol.atoms[i];
    if (!known_element(a.element))
      return ValidationIssue{errc::unknown_atom_symbol, i,
                             "unknown element '" + a.element + "'"};
    if (a.formal_charge < -4 || a.formal_charge > 4)
      return ValidationIssue{errc::atom_block, i,
                             "formal charge out of range on atom " + std::to_string(i)};
    if (a.position.has_value()) any_pos = true; else all_pos = false;
  }
  if (any_pos && !all_pos)
    return ValidationIssue{errc::missing_coordinates, 0,
                           "positions present on some atoms but not all"};

  for (std::size_t i = 0; i < mol.bonds.size(); ++i) {
    const Bond& b = mol.bonds[i];
    if (b.a >= mol.atoms.size() || b.b >= mol.atoms.size())
      return ValidationIssue{errc::bond_index_out_of_range, i,
                             "bond endpoint out of range"};
    if (b.a == b.b)
      return ValidationIssue{errc::atom_block, i, "self bond on atom " + std::to_string(b.a)};
    if (i > 0 && mol.bonds[i - 1].a == b.a && mol.bonds[i - 1].b == b.b)
      return ValidationIssue{errc::duplicate_bond, i,
                             "duplicate bond " + std::to_string(b.a) + "-" + std::to_string(b.b)};
  }

  // Valence caps for the common-organic elements; charged atoms are exempt
  // except N(+1) which is allowed four.
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const Atom& a = mol.atoms[i];
    const ElementInfo* info = find_element(a.element);
    int cap = 0;
    if (a.formal_charge == 0) {
      cap = info->max_valence;
    } else if (a.element == "N" && a.formal_charge == 1) {
      cap = 4;
    }
    if (cap == 0) continue;
    int v = valence_sum(mol, i);
    if (v > cap)
      return ValidationIssue{errc::valence_violation, i,
                             "valence " + std::to_string(v) + " exceeds " +
                                 std::to_string(cap) + " on " + a.element + " atom " +
                                 std::to_string(i)};
  }
  return std::nullopt;
}

inline void validate(const MoleculeGraph& mol) {
  if (auto issue = validate_ex(mol)) throw Error(issue->code, issue->message);
}

inline constexpr int unreachable_distance = -1;

// All-pairs shortest path lengths in bond counts (BFS per atom). Disconnected
// pairs get unreachable_distance.
inline std::vector<std::vector<int>> topological_distances(const MoleculeGraph& mol) {
  const std::size_t n = mol.atoms.size();
  auto adj = adjacency(mol);
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, unreachable_distance));
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    auto& row = dist[s];
    row[s] = 0;
    queue.clear();
    queue.push_back(s);
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (auto [v, bi] : adj[u]) {
        if (row[v] == unreachable_distance) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

// Hill-order molecular formula: C then H then the rest alphabetically; when
// no carbon is present, everything alphabetical.
inline std::string molecular_formula(const MoleculeGraph& mol) {
  std::map<std::string, int> counts;
  for (const Atom& a : mol.atoms) counts[a.element]++;
  std::string out;
  auto append = [&](const std::string& sym) {
    auto it = counts.find(sym);
    if (it == counts.end()) return;
    out += sym;
    if (it->second > 1) out += std::to_string(it->second);
    counts.erase(it);
  };
  if (counts.count("C")) {
    append("C");
    append("H");
  }
  for (auto it = counts.begin(); it != counts.end();) {
    out += it->first;
    if (it->second > 1) out += std::to_string(it->second);
    it = counts.erase(it);
  }
  return out;
}

inline std::size_t heavy_atom_count(const MoleculeGraph& mol) {
  std::size_t n = 0;
  for (const Atom& a : mol.atoms)
    if (a.element != "H") ++n;
  return n;
}

}  // namespace speceval
