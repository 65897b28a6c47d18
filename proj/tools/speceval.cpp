// SPDX-License-Identifier: Apache-2.0
//
// speceval: batch evaluation CLI for spectrum text formats, NMR/IR/MS
// fidelity metrics, sequence accuracy, 3D geometry diagnostics, fingerprint
// similarity and instruction-record generation.
//
// Data goes to stdout (or --out) as JSONL: one row per record, then one
// trailing object with the aggregate, the resolved configuration and warning
// counters. Diagnostics go to stderr only.

#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "speceval/report.hpp"

namespace {

using speceval::json;

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  bool strict = false;
  unsigned jobs = 1;
  speceval::RunConfig config;
  std::ofstream out_file;

  std::ostream& out() {
    if (!out_path.empty()) {
      if (!out_file.is_open()) {
        out_file.open(out_path);
        if (!out_file) throw speceval::Error(speceval::errc::input_not_found,
                                             "cannot open output " + out_path);
      }
      return out_file;
    }
    return std::cout;
  }

  void resolve_config() {
    if (!config_path.empty()) config = speceval::load_config(config_path, config);
    config = speceval::apply_env_overrides(std::move(config));
  }
};

struct Pipeline {
  GlobalOpts& opts;
  speceval::EvalReport report;  // aggregate/config/warnings only; rows stream out
  std::size_t n_rows = 0;
  std::size_t n_errors = 0;

  explicit Pipeline(GlobalOpts& g) : opts(g) {}

  int finish() {
    report.warn("errors", n_errors);
    json tail{{"aggregate", report.aggregate},
              {"config", report.config_echo},
              {"n", n_rows}};
    json w = json::object();
    for (const auto& [k, v] : report.warnings) w[k] = v;
    tail["warnings"] = w;
    opts.out() << tail.dump() << "\n";
    return (opts.strict && n_errors > 0) ? 1 : 0;
  }
};

json error_row(const std::string& id, const std::exception& e) {
  return json{{"id", id}, {"error", e.what()}};
}

// Lockstep pairing of two JSONL corpora (line order). Returns the spectrum
// text under `key` from each side.
struct PairedReader {
  speceval::CorpusStream pred;
  speceval::CorpusStream truth;

  PairedReader(const std::string& pred_path, const std::string& truth_path)
      : pred(pred_path, speceval::CorpusKind::Jsonl),
        truth(truth_path, speceval::CorpusKind::Jsonl) {}
};

std::optional<std::string> payload_string(const speceval::CorpusEntry& e, const char* key) {
  if (e.error || !e.payload.is_object() || !e.payload.contains(key) ||
      !e.payload.at(key).is_string())
    return std::nullopt;
  return e.payload.at(key).get<std::string>();
}

// --- score-nmr13c / score-nmr1h ---------------------------------------------

int run_score_nmr(GlobalOpts& opts, const std::string& pred_path,
                  const std::string& truth_path, bool proton) {
  PairedReader io(pred_path, truth_path);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);

  double p_sum = 0, r_sum = 0, f1_sum = 0, mae_sum = 0, jac_sum = 0;
  double nm_sum = 0, np_sum = 0, nt_sum = 0;
  std::size_t mae_n = 0, jac_n = 0, scored = 0, length_mismatch = 0;

  for (;;) {
    auto pe = io.pred.next();
    auto te = io.truth.next();
    if (!pe && !te) break;
    if (!pe || !te) {
      ++length_mismatch;
      break;
    }
    json row;
    std::string id = pe->id;
    try {
      auto ptext = payload_string(*pe, "spectrum");
      auto ttext = payload_string(*te, "spectrum");
      if (!ptext || !ttext)
        throw speceval::Error(speceval::errc::config_parse, "line needs a \"spectrum\" field");
      speceval::MatchScore s =
          proton ? speceval::score_proton_text(*ptext, *ttext, opts.config.nmr)
                 : speceval::score_carbon_text(*ptext, *ttext, opts.config.nmr);
      row = json{{"id", id},
                 {"precision", s.precision},
                 {"recall", s.recall},
                 {"f1", s.f1},
                 {"mae", s.mae ? json(*s.mae) : json(nullptr)},
                 {"n_match", s.n_match},
                 {"n_pred", s.n_pred},
                 {"n_true", s.n_true}};
      if (proton) row["jaccard"] = s.jaccard ? json(*s.jaccard) : json(nullptr);
      ++scored;
      p_sum += s.precision;
      r_sum += s.recall;
      f1_sum += s.f1;
      nm_sum += static_cast<double>(s.n_match);
      np_sum += static_cast<double>(s.n_pred);
      nt_sum += static_cast<double>(s.n_true);
      if (s.mae) { mae_sum += *s.mae; ++mae_n; }
      if (s.jaccard) { jac_sum += *s.jaccard; ++jac_n; }
    } catch (const std::exception& e) {
      row = error_row(id, e);
    }
    opts.out() << row.dump() << "\n";
    if (row.contains("error")) {
      ++pipe.n_errors;
      std::cerr << "speceval: record " << id << ": " << row.at("error").get<std::string>()
                << "\n";
    }
    ++pipe.n_rows;
  }

  if (length_mismatch) pipe.report.warn("length_mismatch", 1);
  json agg = json::object();
  if (scored) {
    double n = static_cast<double>(scored);
    agg = json{{"precision", p_sum / n}, {"recall", r_sum / n},   {"f1", f1_sum / n},
               {"n_match", nm_sum / n},  {"n_pred", np_sum / n},  {"n_true", nt_sum / n},
               {"mae_excluded", scored - mae_n}};
    if (mae_n) agg["mae"] = mae_sum / static_cast<double>(mae_n);
    if (proton && jac_n) agg["jaccard"] = jac_sum / static_cast<double>(jac_n);
  }
  pipe.report.aggregate = agg;
  return pipe.finish();
}

// --- score-ir / score-ms -----------------------------------------------------

int run_score_vec(GlobalOpts& opts, const std::string& pred_path,
                  const std::string& truth_path, bool mass) {
  PairedReader io(pred_path, truth_path);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);

  double cos_sum = 0;
  std::size_t scored = 0, dropped = 0, length_mismatch = 0;
  for (;;) {
    auto pe = io.pred.next();
    auto te = io.truth.next();
    if (!pe && !te) break;
    if (!pe || !te) {
      ++length_mismatch;
      break;
    }
    json row;
    std::string id = pe->id;
    try {
      auto ptext = payload_string(*pe, "spectrum");
      auto ttext = payload_string(*te, "spectrum");
      if (!ptext || !ttext)
        throw speceval::Error(speceval::errc::config_parse, "line needs a \"spectrum\" field");
      speceval::Spectrum ps = speceval::parse_spectrum(*ptext);
      speceval::Spectrum ts = speceval::parse_spectrum(*ttext);
      bool p_mass = std::holds_alternative<speceval::MassSpectrum>(ps);
      bool t_mass = std::holds_alternative<speceval::MassSpectrum>(ts);
      if (p_mass != mass || t_mass != mass)
        throw speceval::Error(speceval::errc::config_mismatch,
                              mass ? "expected mass spectra" : "expected waveform spectra");
      const auto& cfg = opts.config.binning_for(ts);
      speceval::SpectrumVector pv =
          mass ? speceval::vectorize(std::get<speceval::MassSpectrum>(ps), cfg)
               : speceval::vectorize(std::get<speceval::WaveformSpectrum>(ps), cfg);
      speceval::SpectrumVector tv =
          mass ? speceval::vectorize(std::get<speceval::MassSpectrum>(ts), cfg)
               : speceval::vectorize(std::get<speceval::WaveformSpectrum>(ts), cfg);
      dropped += pv.dropped + tv.dropped;
      double cos = speceval::cosine_similarity(pv, tv);
      row = json{{"id", id}, {"cosine", cos}};
      cos_sum += cos;
      ++scored;
    } catch (const std::exception& e) {
      row = error_row(id, e);
    }
    opts.out() << row.dump() << "\n";
    if (row.contains("error")) {
      ++pipe.n_errors;
      std::cerr << "speceval: record " << id << ": " << row.at("error").get<std::string>()
                << "\n";
    }
    ++pipe.n_rows;
  }
  if (length_mismatch) pipe.report.warn("length_mismatch", 1);
  pipe.report.warn("dropped", dropped);
  if (scored)
    pipe.report.aggregate = json{{"cosine", cos_sum / static_cast<double>(scored)}};
  return pipe.finish();
}

// --- score-seq ----------------------------------------------------------------

int run_score_seq(GlobalOpts& opts, const std::string& in_path, bool smiles_canon) {
  speceval::CorpusStream stream(in_path, speceval::CorpusKind::Jsonl);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);
  auto canon = smiles_canon ? speceval::smiles_canonicalizer() : speceval::trim_canonicalizer();

  double acc_sum = 0;
  std::size_t seq_matches = 0, scored = 0;
  while (auto e = stream.next()) {
    json row;
    try {
      auto truth = payload_string(*e, "truth");
      auto pred = payload_string(*e, "pred");
      if (!truth || !pred)
        throw speceval::Error(speceval::errc::config_parse,
                              "line needs \"truth\" and \"pred\" fields");
      speceval::TokenSequence ts, ps;
      try {
        ts = speceval::tokenize(*truth, opts.config.tokenizer);
        ps = speceval::tokenize(*pred, opts.config.tokenizer);
      } catch (const speceval::Error&) {
        ts = speceval::tokenize(*truth, speceval::TokenScheme::Character);
        ps = speceval::tokenize(*pred, speceval::TokenScheme::Character);
      }
      double acc = speceval::token_accuracy(ts, ps);
      auto ct = canon(*truth);
      auto cp = canon(*pred);
      bool match = ct && cp && *ct == *cp;
      row = json{{"id", e->id}, {"token_acc", acc}, {"seq_match", match}};
      acc_sum += acc;
      if (match) ++seq_matches;
      ++scored;
    } catch (const std::exception& ex) {
      row = error_row(e->id, ex);
    }
    opts.out() << row.dump() << "\n";
    if (row.contains("error")) {
      ++pipe.n_errors;
      std::cerr << "speceval: record " << e->id << ": " << row.at("error").get<std::string>()
                << "\n";
    }
    ++pipe.n_rows;
  }
  if (scored)
    pipe.report.aggregate =
        json{{"token_acc", acc_sum / static_cast<double>(scored)},
             {"seq_acc", static_cast<double>(seq_matches) / static_cast<double>(scored)}};
  return pipe.finish();
}

// --- geom ---------------------------------------------------------------------

int run_geom(GlobalOpts& opts, const std::string& in_path, const std::string& format_name) {
  namespace fs = std::filesystem;
  speceval::StructureFormat format = speceval::StructureFormat::Auto;
  if (format_name == "sdf") format = speceval::StructureFormat::Sdf;
  else if (format_name == "block") format = speceval::StructureFormat::Block;

  speceval::CorpusKind kind = speceval::CorpusKind::Jsonl;
  if (fs::is_directory(in_path))
    kind = format == speceval::StructureFormat::Block ? speceval::CorpusKind::TextDir
                                                      : speceval::CorpusKind::SdfDir;
  speceval::CorpusStream stream(in_path, kind);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);

  double clash_sum = 0, viol_sum = 0;
  std::size_t n_total = 0, n_valid = 0, n_diag_failed = 0;
  while (auto e = stream.next()) {
    json row;
    std::string text = e->text;
    if (kind == speceval::CorpusKind::Jsonl) {
      auto s = payload_string(*e, "structure");
      text = s.value_or("");
    }
    ++n_total;
    speceval::MoleculeGraph mol;
    bool parsed = false;
    try {
      mol = speceval::parse_structure_any(text, format);
      parsed = true;
    } catch (const speceval::Error& ex) {
      row = json{{"id", e->id}, {"parsed", false}, {"clashes", 0}, {"violations", 0},
                 {"parse_error", ex.what()}};
    }
    if (parsed) {
      ++n_valid;
      try {
        auto rep = speceval::analyze_geometry(mol, opts.config.geometry);
        clash_sum += static_cast<double>(rep.clash_count());
        viol_sum += static_cast<double>(rep.violation_count());
        row = json{{"id", e->id},
                   {"parsed", true},
                   {"clashes", rep.clash_count()},
                   {"violations", rep.violation_count()}};
      } catch (const speceval::Error& ex) {
        ++n_diag_failed;
        row = json{{"id", e->id}, {"parsed", true}, {"clashes", 0}, {"violations", 0},
                   {"diag_error", ex.what()}};
      }
    }
    opts.out() << row.dump() << "\n";
    ++pipe.n_rows;
  }
  if (n_total == 0) {
    pipe.report.warn("empty_corpus", 1);
  } else {
    json agg{{"sdf_valid", static_cast<double>(n_valid) / static_cast<double>(n_total)},
             {"mean_clashes", clash_sum / static_cast<double>(n_total)},
             {"mean_violations", viol_sum / static_cast<double>(n_total)},
             {"n_total", n_total},
             {"n_valid", n_valid},
             {"n_diag_failed", n_diag_failed}};
    if (n_valid) {
      agg["valid_mean_clashes"] = clash_sum / static_cast<double>(n_valid);
      agg["valid_mean_violations"] = viol_sum / static_cast<double>(n_valid);
    }
    pipe.report.aggregate = agg;
  }
  return pipe.finish();
}

// --- fpsim ----------------------------------------------------------------------

// Per-record fingerprinting is the most expensive step, so fpsim honors
// --jobs: pairs are processed in chunks of parallel tasks and the rows are
// written back in input order.
int run_fpsim(GlobalOpts& opts, const std::string& pred_path, const std::string& truth_path) {
  PairedReader io(pred_path, truth_path);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);

  double path_sum = 0, tor_sum = 0, ap_sum = 0;
  std::size_t scored = 0, length_mismatch = 0;

  auto score_pair = [&cfg = opts.config.fingerprint](const speceval::CorpusEntry& pe,
                                                     const speceval::CorpusEntry& te) -> json {
    try {
      auto ps = payload_string(pe, "smiles");
      auto ts = payload_string(te, "smiles");
      if (!ps || !ts)
        throw speceval::Error(speceval::errc::config_parse, "line needs a \"smiles\" field");
      auto pmol = speceval::parse_smiles(*ps);
      auto tmol = speceval::parse_smiles(*ts);
      double s_path = speceval::tanimoto(speceval::path_fp(pmol, cfg),
                                         speceval::path_fp(tmol, cfg));
      double s_tor = speceval::tanimoto(speceval::torsion_fp(pmol, cfg),
                                        speceval::torsion_fp(tmol, cfg));
      double s_ap = speceval::tanimoto(speceval::atom_pair_fp(pmol, cfg),
                                       speceval::atom_pair_fp(tmol, cfg));
      return json{{"id", pe.id},
                  {"rdk_fp_sim", s_path},
                  {"torsion_sim", s_tor},
                  {"atom_pair_sim", s_ap}};
    } catch (const std::exception& e) {
      return error_row(pe.id, e);
    }
  };

  const std::size_t chunk = opts.jobs > 1 ? 64 * opts.jobs : 1;
  std::vector<std::pair<speceval::CorpusEntry, speceval::CorpusEntry>> batch;
  bool done = false;
  while (!done) {
    batch.clear();
    while (batch.size() < chunk) {
      auto pe = io.pred.next();
      auto te = io.truth.next();
      if (!pe && !te) {
        done = true;
        break;
      }
      if (!pe || !te) {
        ++length_mismatch;
        done = true;
        break;
      }
      batch.push_back({std::move(*pe), std::move(*te)});
    }
    std::vector<json> rows(batch.size());
    if (opts.jobs > 1) {
      std::vector<std::future<json>> futures;
      futures.reserve(batch.size());
      for (const auto& [pe, te] : batch)
        futures.push_back(std::async(std::launch::async,
                                     [&score_pair, &pe, &te] { return score_pair(pe, te); }));
      for (std::size_t i = 0; i < futures.size(); ++i) rows[i] = futures[i].get();
    } else {
      for (std::size_t i = 0; i < batch.size(); ++i)
        rows[i] = score_pair(batch[i].first, batch[i].second);
    }
    for (json& row : rows) {
      if (row.contains("error")) {
        ++pipe.n_errors;
        std::cerr << "speceval: record " << row.value("id", "?") << ": "
                  << row.at("error").get<std::string>() << "\n";
      } else {
        path_sum += row.at("rdk_fp_sim").get<double>();
        tor_sum += row.at("torsion_sim").get<double>();
        ap_sum += row.at("atom_pair_sim").get<double>();
        ++scored;
      }
      opts.out() << row.dump() << "\n";
      ++pipe.n_rows;
    }
  }
  if (length_mismatch) pipe.report.warn("length_mismatch", 1);
  if (scored) {
    double n = static_cast<double>(scored);
    pipe.report.aggregate = json{{"rdk_fp_sim", path_sum / n},
                                 {"torsion_sim", tor_sum / n},
                                 {"atom_pair_sim", ap_sum / n}};
  }
  return pipe.finish();
}

// --- serialize / parse ------------------------------------------------------------

int run_serialize(GlobalOpts& opts, const std::string& in_path) {
  speceval::CorpusStream stream(in_path, speceval::CorpusKind::Jsonl);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);
  std::size_t ok = 0;
  while (auto e = stream.next()) {
    json row;
    try {
      if (e->error) throw speceval::Error(speceval::errc::config_parse, *e->error);
      if (!e->payload.contains("spectrum"))
        throw speceval::Error(speceval::errc::config_parse, "line needs a \"spectrum\" object");
      auto s = speceval::spectrum_from_json(e->payload.at("spectrum"));
      row = json{{"id", e->id}, {"text", speceval::serialize(s)}};
      ++ok;
    } catch (const std::exception& ex) {
      row = error_row(e->id, ex);
    }
    opts.out() << row.dump() << "\n";
    if (row.contains("error")) ++pipe.n_errors;
    ++pipe.n_rows;
  }
  pipe.report.aggregate = json{{"serialized", ok}};
  return pipe.finish();
}

int run_parse(GlobalOpts& opts, const std::string& in_path) {
  speceval::CorpusStream stream(in_path, speceval::CorpusKind::Jsonl);
  Pipeline pipe(opts);
  pipe.report.config_echo = speceval::to_json(opts.config);
  std::size_t ok = 0;
  while (auto e = stream.next()) {
    json row;
    try {
      auto text = payload_string(*e, "spectrum");
      if (!text)
        throw speceval::Error(speceval::errc::config_parse, "line needs a \"spectrum\" field");
      auto s = speceval::parse_spectrum(*text);
      row = json{{"id", e->id}, {"spectrum", speceval::spectrum_to_json(s)}};
      ++ok;
    } catch (const std::exception& ex) {
      row = error_row(e->id, ex);
    }
    opts.out() << row.dump() << "\n";
    if (row.contains("error")) ++pipe.n_errors;
    ++pipe.n_rows;
  }
  pipe.report.aggregate = json{{"parsed", ok}};
  return pipe.finish();
}

// --- taskgen -------------------------------------------------------------------

int run_taskgen(GlobalOpts& opts, const std::string& in_path, const std::string& task_str,
                const std::string& format_str, const std::string& templates_dir,
                const std::string& split_str, bool partition_templates_flag,
                const std::string& out_prefix) {
  auto task = speceval::task_from_name(task_str);
  if (!task) throw speceval::Error(speceval::errc::config_parse, "unknown task " + task_str);
  auto format = speceval::format_from_name(format_str);
  if (!format) throw speceval::Error(speceval::errc::config_parse, "unknown format " + format_str);

  std::vector<speceval::MoleculeRecord> records;
  {
    speceval::CorpusStream stream(in_path, speceval::CorpusKind::Jsonl);
    while (auto e = stream.next()) {
      if (e->error)
        throw speceval::Error(speceval::errc::config_parse,
                              "record " + e->id + ": " + *e->error);
      records.push_back(speceval::molecule_record_from_json(e->payload));
    }
  }

  speceval::TemplatePool pool;
  if (templates_dir.empty()) {
    pool = speceval::default_templates(*task, *format);
  } else {
    std::string file = templates_dir + "/" + std::string(speceval::task_name(*task)) + "." +
                       std::string(speceval::format_name(*format)) + ".txt";
    pool = speceval::load_templates(file, *task, *format);
  }

  auto emit = [&](const std::vector<speceval::MoleculeRecord>& recs,
                  const speceval::TemplatePool& p, std::ostream& os) {
    auto out = speceval::generate(recs, *task, *format, p, opts.config.seed);
    for (const auto& r : out) os << speceval::instruction_to_json(r).dump() << "\n";
    return out.size();
  };

  if (split_str.empty()) {
    std::size_t n = emit(records, pool, opts.out());
    opts.out() << json{{"aggregate", {{"records", n}}},
                       {"config", speceval::to_json(opts.config)},
                       {"n", n},
                       {"warnings", json::object()}}
                      .dump()
               << "\n";
    return 0;
  }

  std::array<double, 3> fractions{};
  if (std::sscanf(split_str.c_str(), "%lf,%lf,%lf", &fractions[0], &fractions[1],
                  &fractions[2]) != 3)
    throw speceval::Error(speceval::errc::bad_fractions, "expected --split a,b,c");
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.id);
  auto split = speceval::split(ids, fractions, opts.config.seed);

  std::array<speceval::TemplatePool, 3> pools{pool, pool, pool};
  if (partition_templates_flag)
    pools = speceval::partition_templates(pool, fractions, opts.config.seed);

  auto pick = [&](const std::vector<std::string>& want) {
    std::vector<speceval::MoleculeRecord> sub;
    for (const auto& r : records)
      for (const auto& id : want)
        if (r.id == id) sub.push_back(r);
    return sub;
  };
  const char* names[3] = {"train", "val", "test"};
  std::vector<std::vector<std::string>> id_sets{split.train, split.val, split.test};
  json manifest{{"seed", opts.config.seed}, {"fractions", fractions}};
  for (int k = 0; k < 3; ++k) {
    std::string path = out_prefix + "_" + names[k] + ".jsonl";
    std::ofstream os(path);
    if (!os) throw speceval::Error(speceval::errc::input_not_found, "cannot open " + path);
    std::size_t n = emit(pick(id_sets[static_cast<std::size_t>(k)]),
                         pools[static_cast<std::size_t>(k)], os);
    manifest[names[k]] = {{"ids", id_sets[static_cast<std::size_t>(k)]}, {"records", n}};
  }
  opts.out() << manifest.dump() << "\n";
  return 0;
}

// --- report merge -----------------------------------------------------------------

int run_report(GlobalOpts& opts, const std::vector<std::string>& merge_paths) {
  std::vector<speceval::EvalReport> reports;
  for (const auto& p : merge_paths) {
    std::ifstream in(p);
    if (!in) throw speceval::Error(speceval::errc::input_not_found, "cannot open " + p);
    reports.push_back(speceval::EvalReport::read(in));
  }
  speceval::EvalReport merged = speceval::merge_reports(reports);
  merged.write(opts.out());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum/structure evaluation toolkit"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "JSON config file");
  app.add_option("--out", opts.out_path, "write the data stream to a file instead of stdout");
  app.add_flag("--strict", opts.strict, "exit 1 when any record fails");
  app.add_option("--jobs", opts.jobs, "worker threads (output order is always input order)");

  std::string pred_path, truth_path, in_path, format_name = "auto";
  std::string task_str, format_str = "free_form", templates_dir, split_str, out_prefix = "taskgen";
  bool smiles_canon = false, partition_flag = false;
  std::vector<std::string> merge_paths;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;

  auto* c13 = app.add_subcommand("score-nmr13c", "13C NMR peak-match metrics");
  c13->add_option("--pred", pred_path, "predictions JSONL")->required();
  c13->add_option("--truth", truth_path, "ground truth JSONL")->required();

  auto* h1 = app.add_subcommand("score-nmr1h", "1H NMR weighted peak-match metrics");
  h1->add_option("--pred", pred_path, "predictions JSONL")->required();
  h1->add_option("--truth", truth_path, "ground truth JSONL")->required();

  auto* ir = app.add_subcommand("score-ir", "waveform cosine similarity");
  ir->add_option("--pred", pred_path, "predictions JSONL")->required();
  ir->add_option("--truth", truth_path, "ground truth JSONL")->required();

  auto* ms = app.add_subcommand("score-ms", "mass-spectrum cosine similarity");
  ms->add_option("--pred", pred_path, "predictions JSONL")->required();
  ms->add_option("--truth", truth_path, "ground truth JSONL")->required();

  auto* seq = app.add_subcommand("score-seq", "token and sequence accuracy");
  seq->add_option("--in", in_path, "JSONL with truth/pred fields")->required();
  seq->add_flag("--smiles-canon", smiles_canon, "canonicalize as SMILES before matching");

  auto* geom = app.add_subcommand("geom", "3D geometry diagnostics");
  geom->add_option("--in", in_path, "SDF directory, structure JSONL or .txt directory")
      ->required();
  geom->add_option("--format", format_name, "auto|sdf|block");

  auto* fpsim = app.add_subcommand("fpsim", "fingerprint Tanimoto similarities");
  fpsim->add_option("--pred", pred_path, "predictions JSONL with smiles field")->required();
  fpsim->add_option("--truth", truth_path, "ground truth JSONL with smiles field")->required();

  auto* ser = app.add_subcommand("serialize", "structured spectra JSON -> tagged text");
  ser->add_option("--in", in_path, "JSONL with spectrum objects")->required();

  auto* par = app.add_subcommand("parse", "tagged text -> structured spectra JSON");
  par->add_option("--in", in_path, "JSONL with spectrum text")->required();

  auto* tg = app.add_subcommand("taskgen", "instruction-record generation");
  tg->add_option("--in", in_path, "molecule records JSONL")->required();
  tg->add_option("--task", task_str, "task family")->required();
  tg->add_option("--format", format_str, "free_form|multiple_choice|true_false");
  tg->add_option("--templates", templates_dir, "template directory (default: built-in pools)");
  tg->add_option("--split", split_str, "train,val,test fractions; writes per-split files");
  tg->add_flag("--partition-templates", partition_flag, "disjoint template pools per split");
  tg->add_option("--out-prefix", out_prefix, "file prefix for split outputs");
  tg->add_option("--seed", seed_flag, "generation seed")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* rep = app.add_subcommand("report", "merge report streams");
  rep->add_option("--merge", merge_paths, "report files to merge")->required()->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    opts.resolve_config();
    if (seed_set) opts.config.seed = seed_flag;

    if (app.got_subcommand(c13)) return run_score_nmr(opts, pred_path, truth_path, false);
    if (app.got_subcommand(h1)) return run_score_nmr(opts, pred_path, truth_path, true);
    if (app.got_subcommand(ir)) return run_score_vec(opts, pred_path, truth_path, false);
    if (app.got_subcommand(ms)) return run_score_vec(opts, pred_path, truth_path, true);
    if (app.got_subcommand(seq)) return run_score_seq(opts, in_path, smiles_canon);
    if (app.got_subcommand(geom)) return run_geom(opts, in_path, format_name);
    if (app.got_subcommand(fpsim)) return run_fpsim(opts, pred_path, truth_path);
    if (app.got_subcommand(ser)) return run_serialize(opts, in_path);
    if (app.got_subcommand(par)) return run_parse(opts, in_path);
    if (app.got_subcommand(tg))
      return run_taskgen(opts, in_path, task_str, format_str, templates_dir, split_str,
                         partition_flag, out_prefix);
    if (app.got_subcommand(rep)) return run_report(opts, merge_paths);
  } catch (const speceval::Error& e) {
    std::cerr << "speceval: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "speceval: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
