// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "speceval/fingerprints.hpp"
#include "speceval/geometry.hpp"
#include "speceval/nmr_metrics.hpp"
#include "speceval/seq_metrics.hpp"
#include "speceval/spectra.hpp"
#include "speceval/taskgen.hpp"
#include "speceval/vec_metrics.hpp"

namespace speceval {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// RunConfig: every tunable constant in one place, echoed into every report so
// any number in a report traces back to a configuration.
// ---------------------------------------------------------------------------

struct RunConfig {
  NmrConfig nmr;
  BinningConfig binning_ir = BinningConfig::ir_default();
  BinningConfig binning_raman = BinningConfig::ir_default();
  BinningConfig binning_uv = BinningConfig::uv_default();
  BinningConfig binning_ms = BinningConfig::ms_default();
  GeometryParams geometry = GeometryParams::defaults();
  FingerprintConfig fingerprint;
  TokenScheme tokenizer = TokenScheme::Character;
  std::uint64_t seed = 0;

  const BinningConfig& binning_for(const Spectrum& s) const {
    if (std::holds_alternative<MassSpectrum>(s)) return binning_ms;
    const auto& w = std::get<WaveformSpectrum>(s);
    switch (w.modality) {
      case WaveformModality::IR: return binning_ir;
      case WaveformModality::Raman: return binning_raman;
      case WaveformModality::UV: return binning_uv;
    }
    return binning_ir;
  }
};

namespace config_detail {

inline json binning_to_json(const BinningConfig& b) {
  return json{{"low", b.low}, {"high", b.high}, {"bin_width", b.bin_width},
              {"spread_sigma", b.spread_sigma}};
}

inline BinningConfig binning_from_json(const json& j, BinningConfig base) {
  base.low = j.value("low", base.low);
  base.high = j.value("high", base.high);
  base.bin_width = j.value("bin_width", base.bin_width);
  base.spread_sigma = j.value("spread_sigma", base.spread_sigma);
  return base;
}

}  // namespace config_detail

inline json to_json(const RunConfig& c) {
  json geometry{{"alpha", c.geometry.alpha},
                {"beta", c.geometry.beta},
                {"exclude_13_14", c.geometry.exclude_13_14},
                {"ignore_hydrogens", c.geometry.ignore_hydrogens}};
  json radii = json::object();
  for (const auto& [sym, r] : c.geometry.vdw_radii) radii[sym] = r;
  geometry["vdw_radii"] = radii;
  json lengths = json::array();
  for (const auto& [key, l] : c.geometry.bond_lengths)
    lengths.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), l});
  geometry["bond_lengths"] = lengths;

  return json{
      {"nmr", {{"tau_c", c.nmr.tau_c}, {"tau_h", c.nmr.tau_h}, {"sigma", c.nmr.sigma}}},
      {"binning",
       {{"ir", config_detail::binning_to_json(c.binning_ir)},
        {"raman", config_detail::binning_to_json(c.binning_raman)},
        {"uv", config_detail::binning_to_json(c.binning_uv)},
        {"ms", config_detail::binning_to_json(c.binning_ms)}}},
      {"geometry", geometry},
      {"fingerprint",
       {{"k_bits", c.fingerprint.k_bits},
        {"l_max", c.fingerprint.l_max},
        {"hash_seed", c.fingerprint.hash_seed},
        {"include_hydrogens", c.fingerprint.include_hydrogens},
        {"include_charge", c.fingerprint.include_charge}}},
      {"tokenizer", c.tokenizer == TokenScheme::Character ? "character" : "smiles_atoms"},
      {"seed", c.seed}};
}

inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  try {
    if (j.contains("nmr")) {
      const json& n = j.at("nmr");
      base.nmr.tau_c = n.value("tau_c", base.nmr.tau_c);
      base.nmr.tau_h = n.value("tau_h", base.nmr.tau_h);
      base.nmr.sigma = n.value("sigma", base.nmr.sigma);
    }
    if (j.contains("binning")) {
      const json& b = j.at("binning");
      if (b.contains("ir"))
        base.binning_ir = config_detail::binning_from_json(b.at("ir"), base.binning_ir);
      if (b.contains("raman"))
        base.binning_raman = config_detail::binning_from_json(b.at("raman"), base.binning_raman);
      if (b.contains("uv"))
        base.binning_uv = config_detail::binning_from_json(b.at("uv"), base.binning_uv);
      if (b.contains("ms"))
        base.binning_ms = config_detail::binning_from_json(b.at("ms"), base.binning_ms);
    }
    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      base.geometry.alpha = g.value("alpha", base.geometry.alpha);
      base.geometry.beta = g.value("beta", base.geometry.beta);
      base.geometry.exclude_13_14 = g.value("exclude_13_14", base.geometry.exclude_13_14);
      base.geometry.ignore_hydrogens =
          g.value("ignore_hydrogens", base.geometry.ignore_hydrogens);
      if (g.contains("vdw_radii"))
        for (auto it = g.at("vdw_radii").begin(); it != g.at("vdw_radii").end(); ++it)
          base.geometry.vdw_radii[it.key()] = it.value().get<double>();
      if (g.contains("bond_lengths"))
        for (const auto& row : g.at("bond_lengths"))
          base.geometry.bond_lengths[geometry_detail::make_key(
              row.at(0).get<std::string>(), row.at(1).get<std::string>(),
              static_cast<BondOrder>(row.at(2).get<int>()))] = row.at(3).get<double>();
    }
    if (j.contains("fingerprint")) {
      const json& f = j.at("fingerprint");
      base.fingerprint.k_bits = f.value("k_bits", base.fingerprint.k_bits);
      base.fingerprint.l_max = f.value("l_max", base.fingerprint.l_max);
      base.fingerprint.hash_seed = f.value("hash_seed", base.fingerprint.hash_seed);
      base.fingerprint.include_hydrogens =
          f.value("include_hydrogens", base.fingerprint.include_hydrogens);
      base.fingerprint.include_charge =
          f.value("include_charge", base.fingerprint.include_charge);
    }
    if (j.contains("tokenizer"))
      base.tokenizer = j.at("tokenizer").get<std::string>() == "smiles_atoms"
                           ? TokenScheme::SmilesAtoms
                           : TokenScheme::Character;
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(errc::config_parse, e.what());
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(errc::input_not_found, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(errc::config_parse, e.what());
  }
  return config_from_json(j, base);
}

// Environment overrides: SPECEVAL_<PATH> with "__" between levels, for
// example SPECEVAL_NMR__TAU_C=0.4 or SPECEVAL_BINNING__IR__BIN_WIDTH=4.
inline RunConfig apply_env_overrides(RunConfig base) {
  json j = to_json(base);
  std::function<void(json&, const std::string&)> walk = [&](json& node,
                                                            const std::string& prefix) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      std::string key = it.key();
      for (char& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      std::string name = prefix.empty() ? key : prefix + "__" + key;
      if (it.value().is_object()) {
        walk(it.value(), name);
        continue;
      }
      const char* env = std::getenv(("SPECEVAL_" + name).c_str());
      if (env == nullptr) continue;
      try {
        it.value() = json::parse(env);
      } catch (const json::exception&) {
        it.value() = std::string(env);
      }
    }
  };
  walk(j, "");
  return config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------
// Structured JSON forms of the spectrum and record types, used by the
// serialize/parse subcommands and the taskgen corpus format.
// ---------------------------------------------------------------------------

inline json spectrum_to_json(const Spectrum& s) {
  if (const auto* c = std::get_if<CarbonSpectrum>(&s)) {
    json j{{"type", "13C_NMR"}, {"shifts", c->shifts}};
    j["frequency"] = c->frequency ? json(*c->frequency) : json(nullptr);
    j["solvent"] = c->solvent ? json(*c->solvent) : json(nullptr);
    return j;
  }
  if (const auto* h = std::get_if<ProtonSpectrum>(&s)) {
    json peaks = json::array();
    for (const auto& p : h->peaks)
      peaks.push_back({{"centroid", p.centroid},
                       {"shape", p.shape},
                       {"j_values", p.j_values},
                       {"n_h", p.n_h}});
    json j{{"type", "1H_NMR"}, {"peaks", peaks}};
    j["frequency"] = h->frequency ? json(*h->frequency) : json(nullptr);
    j["solvent"] = h->solvent ? json(*h->solvent) : json(nullptr);
    return j;
  }
  if (const auto* w = std::get_if<WaveformSpectrum>(&s)) {
    json points = json::array();
    for (auto [p, v] : w->points) points.push_back({p, v});
    return json{{"type", std::string(modality_tag(w->modality))},
                {"low", w->axis_low},
                {"high", w->axis_high},
                {"points", points}};
  }
  const auto& m = std::get<MassSpectrum>(s);
  json peaks = json::array();
  for (auto [mz, ab] : m.peaks) peaks.push_back({mz, ab});
  json j{{"type", m.mode == MsMode::Positive ? "ms_positive" : "ms_negative"},
         {"peaks", peaks}};
  j["collision_energy"] = m.collision_energy ? json(*m.collision_energy) : json(nullptr);
  return j;
}

inline Spectrum spectrum_from_json(const json& j) {
  try {
    std::string type = j.at("type").get<std::string>();
    auto opt_double = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<double>();
    };
    auto opt_string = [&](const char* key) -> std::optional<std::string> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<std::string>();
    };
    if (type == "13C_NMR")
      return CarbonSpectrum::make(j.at("shifts").get<std::vector<double>>(),
                                  opt_double("frequency"), opt_string("solvent"));
    if (type == "1H_NMR") {
      std::vector<ProtonPeak> peaks;
      for (const auto& p : j.at("peaks"))
        peaks.push_back(ProtonPeak{p.at("centroid").get<double>(),
                                   p.at("shape").get<std::string>(),
                                   p.value("j_values", std::vector<double>{}),
                                   p.at("n_h").get<int>()});
      return ProtonSpectrum::make(std::move(peaks), opt_double("frequency"),
                                  opt_string("solvent"));
    }
    if (type == "IR" || type == "Raman" || type == "UV") {
      WaveformModality m = type == "IR" ? WaveformModality::IR
                           : type == "Raman" ? WaveformModality::Raman
                                             : WaveformModality::UV;
      std::vector<std::pair<double, double>> points;
      for (const auto& p : j.at("points"))
        points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      return WaveformSpectrum::make(m, j.at("low").get<double>(), j.at("high").get<double>(),
                                    std::move(points));
    }
    if (type == "ms_positive" || type == "ms_negative") {
      std::vector<std::pair<double, double>> peaks;
      for (const auto& p : j.at("peaks"))
        peaks.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      return MassSpectrum::make(type == "ms_positive" ? MsMode::Positive : MsMode::Negative,
                                opt_double("collision_energy"), std::move(peaks));
    }
    throw Error(errc::unknown_tag, "unknown spectrum type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(errc::config_parse, std::string("bad spectrum JSON: ") + e.what());
  }
}

inline MoleculeRecord molecule_record_from_json(const json& j) {
  try {
    MoleculeRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.smiles = j.at("smiles").get<std::string>();
    if (j.contains("iupac") && !j.at("iupac").is_null())
      rec.iupac = j.at("iupac").get<std::string>();
    if (j.contains("structure") && !j.at("structure").is_null())
      rec.graph = parse_structure_text(j.at("structure").get<std::string>());
    if (j.contains("spectra"))
      for (const auto& s : j.at("spectra"))
        rec.spectra.push_back(parse_spectrum(s.get<std::string>()));
    return rec;
  } catch (const json::exception& e) {
    throw Error(errc::config_parse, std::string("bad molecule record: ") + e.what());
  }
}

inline json instruction_to_json(const InstructionRecord& r) {
  return json{{"task", std::string(task_name(r.task))},
              {"format", std::string(format_name(r.format))},
              {"prompt", r.prompt},
              {"answer", r.answer},
              {"source_id", r.source_id},
              {"template_id", r.template_id}};
}

// ---------------------------------------------------------------------------
// Report stream: one JSON object per record, then a trailing object holding
// the aggregate, the exact configuration, warning counters and the record
// count. Everything is deterministic (keys sorted, no timestamps).
// ---------------------------------------------------------------------------

struct EvalReport {
  std::vector<json> per_record;
  json aggregate = json::object();
  json config_echo = json::object();
  std::map<std::string, std::size_t> warnings;

  void warn(const std::string& key, std::size_t n = 1) {
    if (n) warnings[key] += n;
  }

  void write(std::ostream& os) const {
    for (const json& row : per_record) os << row.dump() << "\n";
    json tail{{"aggregate", aggregate}, {"config", config_echo}, {"n", per_record.size()}};
    json w = json::object();
    for (const auto& [k, v] : warnings) w[k] = v;
    tail["warnings"] = w;
    os << tail.dump() << "\n";
  }

  static EvalReport read(std::istream& is) {
    EvalReport rep;
    std::string line;
    json last;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (!last.is_null()) rep.per_record.push_back(std::move(last));
      last = std::move(j);
    }
    if (last.is_null()) throw Error(errc::empty_corpus, "empty report stream");
    if (!last.contains("aggregate"))
      throw Error(errc::config_parse, "report stream has no aggregate line");
    rep.aggregate = last.at("aggregate");
    if (last.contains("config")) rep.config_echo = last.at("config");
    if (last.contains("warnings"))
      for (auto it = last.at("warnings").begin(); it != last.at("warnings").end(); ++it)
        rep.warnings[it.key()] = it.value().get<std::size_t>();
    return rep;
  }
};

// Merging reports: mean-like aggregate fields combine as weighted averages
// by record count; count-like fields are summed.
inline bool is_count_key(const std::string& key) {
  static const std::set<std::string> keys = {"n",       "n_total",     "n_valid",
                                             "n_diag_failed", "mae_excluded", "dropped",
                                             "errors"};
  return keys.count(key) > 0 || key.rfind("count_", 0) == 0;
}

inline EvalReport merge_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(errc::empty_list, "nothing to merge");
  EvalReport out;
  out.config_echo = reports.front().config_echo;
  double total_n = 0.0;
  for (const auto& r : reports) total_n += static_cast<double>(r.per_record.size());

  json merged = json::object();
  for (const auto& r : reports) {
    double w = total_n > 0.0 ? static_cast<double>(r.per_record.size()) / total_n : 0.0;
    for (auto it = r.aggregate.begin(); it != r.aggregate.end(); ++it) {
      const std::string& key = it.key();
      if (!it.value().is_number()) {
        if (!merged.contains(key)) merged[key] = it.value();
        continue;
      }
      double v = it.value().get<double>();
      if (is_count_key(key)) {
        merged[key] = merged.value(key, 0.0) + v;
      } else {
        merged[key] = merged.value(key, 0.0) + w * v;
      }
    }
    for (const json& row : r.per_record) out.per_record.push_back(row);
    for (const auto& [k, v] : r.warnings) out.warnings[k] += v;
  }
  out.aggregate = merged;
  return out;
}

// ---------------------------------------------------------------------------
// Corpus loading.
// ---------------------------------------------------------------------------

enum class CorpusKind { Jsonl, SdfDir, TextDir };

struct CorpusEntry {
  std::string id;
  json payload;                      // parsed object for jsonl, else null
  std::string text;                  // raw file content for directory kinds
  std::optional<std::string> error;  // malformed records carry an error marker
};

// Streaming corpus reader; memory use stays bounded by the largest single
// record. Ids are stable: the JSONL "id" field when present, otherwise the
// line number (file stem for directory corpora). Malformed JSONL lines yield
// error markers instead of aborting the stream.
class CorpusStream {
 public:
  CorpusStream(const std::string& path, CorpusKind kind) : kind_(kind) {
    namespace fs = std::filesystem;
    if (kind == CorpusKind::Jsonl) {
      in_.open(path);
      if (!in_) throw Error(errc::input_not_found, "cannot open " + path);
      return;
    }
    if (!fs::is_directory(path))
      throw Error(errc::input_not_found, path + " is not a directory");
    const std::string ext = kind == CorpusKind::SdfDir ? ".sdf" : ".txt";
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ext)
        files_.push_back(entry.path().string());
    std::sort(files_.begin(), files_.end());
  }

  std::optional<CorpusEntry> next() {
    if (kind_ == CorpusKind::Jsonl) {
      std::string line;
      while (std::getline(in_, line)) {
        ++lineno_;
        if (line.empty()) continue;
        CorpusEntry e;
        e.id = std::to_string(lineno_);
        try {
          e.payload = json::parse(line);
          if (e.payload.contains("id") && e.payload.at("id").is_string())
            e.id = e.payload.at("id").get<std::string>();
        } catch (const json::exception& ex) {
          e.error = ex.what();
        }
        return e;
      }
      return std::nullopt;
    }
    if (file_at_ >= files_.size()) return std::nullopt;
    std::filesystem::path f = files_[file_at_++];
    CorpusEntry e;
    e.id = f.stem().string();
    std::ifstream in(f);
    std::ostringstream ss;
    ss << in.rdbuf();
    e.text = ss.str();
    return e;
  }

 private:
  CorpusKind kind_;
  std::ifstream in_;
  std::size_t lineno_ = 0;
  std::vector<std::string> files_;
  std::size_t file_at_ = 0;
};

// Eager variant.
inline std::vector<CorpusEntry> load_corpus(const std::string& path, CorpusKind kind) {
  CorpusStream stream(path, kind);
  std::vector<CorpusEntry> entries;
  while (auto e = stream.next()) entries.push_back(std::move(*e));
  return entries;
}

}  // namespace speceval
