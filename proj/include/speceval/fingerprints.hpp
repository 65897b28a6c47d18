// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "speceval/molgraph.hpp"
#include "speceval/rng.hpp"

namespace speceval {

enum class FingerprintKind { Path, Torsion, AtomPair };

inline std::string_view fingerprint_kind_name(FingerprintKind k) {
  switch (k) {
    case FingerprintKind::Path: return "path";
    case FingerprintKind::Torsion: return "torsion";
    case FingerprintKind::AtomPair: return "atom_pair";
  }
  return "path";
}

struct FingerprintConfig {
  std::size_t k_bits = 2048;     // power of two
  int l_max = 7;                 // maximum path length in bonds
  std::uint64_t hash_seed = 0;   // folded into the FNV-1a basis
  bool include_hydrogens = false;
  bool include_charge = false;   // fold formal charge into the atom class

  void check() const {
    if (k_bits == 0 || (k_bits & (k_bits - 1)) != 0 || l_max < 1)
      throw Error(errc::config_mismatch, "k_bits must be a power of two and l_max >= 1");
  }
};

struct BitFingerprint {
  std::vector<std::uint64_t> words;
  std::size_t k_bits = 0;
  FingerprintKind kind = FingerprintKind::Path;

  void set(std::size_t bit) { words[bit >> 6] |= (1ull << (bit & 63)); }
  bool test(std::size_t bit) const { return (words[bit >> 6] >> (bit & 63)) & 1; }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : words) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  static BitFingerprint zero(std::size_t k_bits, FingerprintKind kind) {
    return BitFingerprint{std::vector<std::uint64_t>((k_bits + 63) / 64, 0), k_bits, kind};
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(k_bits / 4);
    for (std::size_t nibble = 0; nibble < k_bits / 4; ++nibble) {
      std::uint64_t w = words[nibble / 16];
      out += digits[(w >> ((nibble % 16) * 4)) & 0xf];
    }
    return out;
  }

  static BitFingerprint from_hex(const std::string& hex, FingerprintKind kind) {
    BitFingerprint fp = zero(hex.size() * 4, kind);
    for (std::size_t nibble = 0; nibble < hex.size(); ++nibble) {
      char c = hex[nibble];
      std::uint64_t v =
          c >= '0' && c <= '9' ? static_cast<std::uint64_t>(c - '0')
          : c >= 'a' && c <= 'f' ? static_cast<std::uint64_t>(c - 'a' + 10)
          : c >= 'A' && c <= 'F' ? static_cast<std::uint64_t>(c - 'A' + 10)
                                 : throw Error(errc::config_parse, "bad hex digit");
      fp.words[nibble / 16] |= v << ((nibble % 16) * 4);
    }
    return fp;
  }
};

namespace fp_detail {

// The working graph for fingerprinting: hydrogens dropped unless configured
// in, atom classes precomputed as their byte encodings.
struct FpGraph {
  std::vector<std::string> atom_class;  // e.g. "C,1" (element, aromatic[, charge])
  std::vector<std::vector<std::pair<std::size_t, int>>> adj;  // (neighbor, order)
};

inline FpGraph build(const MoleculeGraph& mol, const FingerprintConfig& cfg) {
  FpGraph g;
  std::vector<std::size_t> remap(mol.atoms.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const Atom& a = mol.atoms[i];
    if (!cfg.include_hydrogens && a.element == "H") continue;
    remap[i] = g.atom_class.size();
    std::string cls = a.element;
    cls += ',';
    cls += a.aromatic ? '1' : '0';
    if (cfg.include_charge) {
      cls += ',';
      cls += std::to_string(a.formal_charge);
    }
    g.atom_class.push_back(std::move(cls));
  }
  g.adj.resize(g.atom_class.size());
  for (const Bond& b : mol.bonds) {
    std::size_t a = remap[b.a], c = remap[b.b];
    if (a == static_cast<std::size_t>(-1) || c == static_cast<std::size_t>(-1)) continue;
    g.adj[a].push_back({c, static_cast<int>(b.order)});
    g.adj[c].push_back({a, static_cast<int>(b.order)});
  }
  return g;
}

// Feature byte encodings. A path feature alternates atom classes and bond
// orders joined with '|'; the direction giving the lexicographically smaller
// string is the canonical one.
inline std::string encode_path(const FpGraph& g, const std::vector<std::size_t>& atoms,
                               const std::vector<int>& orders) {
  auto build_str = [&](bool forward) {
    std::string s;
    const std::size_t n = atoms.size();
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t idx = forward ? k : n - 1 - k;
      if (k) {
        std::size_t bidx = forward ? k - 1 : n - 1 - k;
        s += '|';
        s += static_cast<char>('0' + orders[bidx]);
        s += '|';
      }
      s += g.atom_class[atoms[idx]];
    }
    return s;
  };
  std::string fwd = build_str(true);
  std::string rev = build_str(false);
  return fwd <= rev ? fwd : rev;
}

inline std::string encode_pair(const FpGraph& g, std::size_t i, std::size_t j, int dist) {
  const std::string &a = g.atom_class[i], &b = g.atom_class[j];
  const std::string &lo = a <= b ? a : b, &hi = a <= b ? b : a;
  return lo + "|" + hi + "|" + std::to_string(dist);
}

// Depth-first enumeration of simple paths with 1..max_bonds bonds starting at
// `start`; `visit` receives each path once per direction (deduped by the
// canonical encoding downstream).
template <typename Fn>
inline void enumerate_paths(const FpGraph& g, std::size_t start, int max_bonds,
                            std::vector<std::size_t>& atoms, std::vector<int>& orders,
                            std::vector<bool>& on_path, Fn&& visit) {
  std::size_t u = atoms.back();
  for (auto [v, order] : g.adj[u]) {
    if (on_path[v]) continue;
    atoms.push_back(v);
    orders.push_back(order);
    on_path[v] = true;
    visit(atoms, orders);
    if (static_cast<int>(orders.size()) < max_bonds)
      enumerate_paths(g, start, max_bonds, atoms, orders, on_path, visit);
    on_path[v] = false;
    atoms.pop_back();
    orders.pop_back();
  }
}

template <typename Fn>
inline void for_each_path(const FpGraph& g, int max_bonds, Fn&& visit) {
  std::vector<std::size_t> atoms;
  std::vector<int> orders;
  std::vector<bool> on_path(g.atom_class.size(), false);
  for (std::size_t s = 0; s < g.atom_class.size(); ++s) {
    atoms.assign(1, s);
    orders.clear();
    on_path.assign(g.atom_class.size(), false);
    on_path[s] = true;
    enumerate_paths(g, s, max_bonds, atoms, orders, on_path, visit);
  }
}

inline std::size_t feature_bit(const std::string& feature, const FingerprintConfig& cfg) {
  return static_cast<std::size_t>(fnv1a64(feature.data(), feature.size(), cfg.hash_seed) &
                                  (cfg.k_bits - 1));
}

}  // namespace fp_detail

// Path fingerprint: every simple path of 1..l_max bonds, encoded from the
// ordered atom classes and bond orders, direction-canonicalized, hashed.
inline BitFingerprint path_fp(const MoleculeGraph& mol, const FingerprintConfig& cfg = {}) {
  cfg.check();
  auto g = fp_detail::build(mol, cfg);
  auto fp = BitFingerprint::zero(cfg.k_bits, FingerprintKind::Path);
  fp_detail::for_each_path(g, cfg.l_max, [&](const std::vector<std::size_t>& atoms,
                                             const std::vector<int>& orders) {
    fp.set(fp_detail::feature_bit(fp_detail::encode_path(g, atoms, orders), cfg));
  });
  return fp;
}

// Topological torsion fingerprint: all bonded quadruples (paths of exactly
// three bonds), direction-canonicalized.
inline BitFingerprint torsion_fp(const MoleculeGraph& mol, const FingerprintConfig& cfg = {}) {
  cfg.check();
  auto g = fp_detail::build(mol, cfg);
  auto fp = BitFingerprint::zero(cfg.k_bits, FingerprintKind::Torsion);
  fp_detail::for_each_path(g, 3, [&](const std::vector<std::size_t>& atoms,
                                     const std::vector<int>& orders) {
    if (atoms.size() != 4) return;
    fp.set(fp_detail::feature_bit(fp_detail::encode_path(g, atoms, orders), cfg));
  });
  return fp;
}

// Atom-pair fingerprint: (class_i, class_j, shortest-path distance) for every
// unordered pair, class pair order-normalized; unreachable pairs are skipped.
inline BitFingerprint atom_pair_fp(const MoleculeGraph& mol, const FingerprintConfig& cfg = {}) {
  cfg.check();
  auto g = fp_detail::build(mol, cfg);
  auto fp = BitFingerprint::zero(cfg.k_bits, FingerprintKind::AtomPair);
  const std::size_t n = g.atom_class.size();

  // BFS per atom over the fingerprint graph.
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::vector<std::size_t> queue{s};
    dist[s] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::size_t u = queue[qi];
      for (auto [v, order] : g.adj[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    for (std::size_t j = s + 1; j < n; ++j) {
      if (dist[j] < 0) continue;
      fp.set(fp_detail::feature_bit(fp_detail::encode_pair(g, s, j, dist[j]), cfg));
    }
  }
  return fp;
}

inline BitFingerprint fingerprint(const MoleculeGraph& mol, FingerprintKind kind,
                                  const FingerprintConfig& cfg = {}) {
  switch (kind) {
    case FingerprintKind::Path: return path_fp(mol, cfg);
    case FingerprintKind::Torsion: return torsion_fp(mol, cfg);
    case FingerprintKind::AtomPair: return atom_pair_fp(mol, cfg);
  }
  return path_fp(mol, cfg);
}

// c / (|a| + |b| - c) with c the common set bits; 0 when the union is empty.
inline double tanimoto(const BitFingerprint& a, const BitFingerprint& b) {
  if (a.kind != b.kind) throw Error(errc::kind_mismatch, "fingerprint kinds differ");
  if (a.k_bits != b.k_bits) throw Error(errc::length_mismatch, "fingerprint lengths differ");
  std::size_t common = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w)
    common += static_cast<std::size_t>(std::popcount(a.words[w] & b.words[w]));
  std::size_t pa = a.popcount(), pb = b.popcount();
  std::size_t denom = pa + pb - common;
  if (denom == 0) return 0.0;
  return static_cast<double>(common) / static_cast<double>(denom);
}

}  // namespace speceval
