// erdos: command-line front end for the erdos library.
//
//   erdos ingest    --input list.mbox --out run/
//   erdos sectors   --input run/messages.jsonl --ws 1000 --criterion k C3
//   erdos pca       --input run/messages.jsonl --ws 1000
//   erdos timestats --input run/messages.jsonl --scales hours weekdays
//   erdos scatter   --input a.jsonl b.jsonl
//   erdos synth     --generator reply_process --seed 7 --out synth/
//
// Every flag may also come from a `key = value` file passed with --config;
// flags on the command line win.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erdos/erdos.hpp"

namespace fs = std::filesystem;
using namespace erdos;

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string format;  // empty: from the file extension
  std::size_t ws = 1000;
  std::size_t step = 0;  // 0: same as ws
  std::size_t eta = 10;
  std::vector<std::string> criteria = {"k"};
  std::vector<std::string> scales = {"seconds", "minutes", "hours", "weekdays", "monthdays", "months"};
  std::string out = ".";
  std::uint64_t seed = 1;
  std::optional<std::size_t> limit;
  std::string weight_rule = "average";
  std::size_t min_pca_vertices = 15;

  // synth
  std::string generator = "reply_process";
  std::optional<std::size_t> messages;
  std::optional<std::size_t> vertices;
  std::optional<double> p;
  std::optional<double> exponent;
};

InputFormat format_for(const RunConfig& cfg, const std::string& path) {
  std::string name = cfg.format;
  if (name.empty()) {
    const auto ext = fs::path(path).extension().string();
    name = ext == ".jsonl" || ext == ".json" ? "jsonl" : ext == ".csv" ? "csv" : "mbox";
  }
  const auto f = parse_input_format(name);
  if (!f) throw ContractError("unknown format '" + name + "' (expected mbox, jsonl or csv)");
  return *f;
}

Corpus load(const RunConfig& cfg, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  Diagnostics diag;
  auto corpus = load_corpus(in, format_for(cfg, path), cfg.limit, diag);
  if (diag.dropped > 0) std::cerr << path << ": skipped " << diag.dropped << " record(s)\n";
  return corpus;
}

Corpus single_input(const RunConfig& cfg) {
  if (cfg.inputs.size() != 1) throw ContractError("this command takes exactly one --input");
  return load(cfg, cfg.inputs.front());
}

WindowSpec windows(const RunConfig& cfg) { return {cfg.ws, cfg.step == 0 ? cfg.ws : cfg.step}; }

SectioningOptions sectioning(const RunConfig& cfg) {
  SectioningOptions opt;
  opt.eta = cfg.eta;
  if (cfg.weight_rule == "literal") opt.weight_rule = WeightRule::literal_printed;
  else if (cfg.weight_rule != "average") throw ContractError("weight rule must be average or literal");
  if (opt.eta < 1) throw ContractError("eta must be >= 1");
  return opt;
}

std::vector<Criterion> criteria(const RunConfig& cfg) {
  std::vector<Criterion> out;
  for (const auto& name : cfg.criteria) {
    const auto c = parse_criterion(name);
    if (!c) throw ContractError("unknown criterion '" + name + "'");
    out.push_back(*c);
  }
  return out;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  const auto path = fs::path(cfg.out) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::string& name) {
  out.close();
  if (!out) throw ParseError("failed writing " + name);
}

// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
  const auto corpus = single_input(cfg);
  auto jsonl = open_out(cfg, "messages.jsonl");
  emit_jsonl(corpus, jsonl);
  close_out(jsonl, "messages.jsonl");

  nlohmann::ordered_json s;
  s["M"] = corpus.size();
  s["N"] = corpus.n_participants;
  s["Gamma"] = corpus.n_threads;
  s["missing"] = corpus.n_missing;
  s["date_first"] = corpus.date_first;
  s["date_last"] = corpus.date_last;
  auto summary = open_out(cfg, "summary.json");
  summary << s.dump(2) << '\n';
  close_out(summary, "summary.json");
}

void cmd_sectors(const RunConfig& cfg) {
  const auto corpus = single_input(cfg);
  const auto crit = criteria(cfg);
  const auto opt = sectioning(cfg);
  const auto snaps = window_snapshots(corpus, windows(cfg));
  const bool extra = std::any_of(crit.begin(), crit.end(),
                                 [](Criterion c) { return c == Criterion::C1 || c == Criterion::C2; });

  auto timeline = open_out(cfg, "sectors.csv");
  auto vertices = open_out(cfg, "vertex_sectors.csv");
  timeline << "window_start,criterion,hub_frac,inter_frac,peri_frac" << (extra ? ",extra_frac" : "")
           << ",degeneracy\n";
  vertices << "window_start,vertex,criterion,sector\n";
  for (const auto& snap : snaps) {
    const auto& g = snap.network;
    std::optional<std::vector<ErdosPartition>> simple;
    for (const auto c : crit) {
      ErdosPartition p;
      SectorFractions f;
      if (g.n_vertices() < 2) {
        p.criterion = c;
        p.vertices = g.vertices();
        p.sectors.assign(g.n_vertices(), kPeriphery);
        p.degeneracy = Degeneracy::too_few_vertices;
        f = fractions_of(p);
        f.periphery = 1.0;
      } else if (is_simple(c)) {
        p = classify_simple(g, c, opt);
        f = fractions_of(p);
      } else {
        if (!simple) simple = classify_all_simple(g, opt);
        p = classify_compound(*simple, c);
        for (const auto& s : *simple)
          if (s.degeneracy != Degeneracy::none) p.degeneracy = s.degeneracy;
        f = fractions_of(p);
      }
      timeline << snap.window_start << ',' << criterion_name(c) << ',' << fmt_double(f.hub) << ','
               << fmt_double(f.intermediary) << ',' << fmt_double(f.periphery);
      if (extra) timeline << ',' << fmt_double(f.extra);
      timeline << ',' << degeneracy_name(p.degeneracy) << '\n';
      for (std::size_t v = 0; v < p.size(); ++v)
        vertices << snap.window_start << ',' << detail::csv_field(p.vertices[v]) << ',' << criterion_name(c)
                 << ',' << sector_text(p.sectors[v]) << '\n';
    }
  }
  close_out(timeline, "sectors.csv");
  close_out(vertices, "vertex_sectors.csv");
}

void cmd_pca(const RunConfig& cfg) {
  const auto corpus = single_input(cfg);
  const auto snaps = window_snapshots(corpus, windows(cfg));
  std::vector<PcaResult> results;
  std::vector<std::size_t> starts;
  std::size_t skipped = 0;
  for (const auto& snap : snaps) {
    if (snap.network.n_vertices() < cfg.min_pca_vertices) {
      ++skipped;
      continue;
    }
    results.push_back(pca(metrics_matrix(snap.network)));
    starts.push_back(snap.window_start);
  }
  if (skipped > 0)
    std::cerr << "pca: skipped " << skipped << " window(s) with fewer than " << cfg.min_pca_vertices
              << " vertices\n";
  if (results.empty()) throw ContractError("pca: every window was skipped");
  const auto agg = aggregate(results);
  for (const auto i : agg.excluded)
    std::cerr << "pca: window at " << starts[i] << " dropped a different set of constant metrics; excluded\n";

  auto out = open_out(cfg, "pca_loadings.csv");
  write_loadings_csv(agg, kMetricNames, out);
  close_out(out, "pca_loadings.csv");

  auto per = open_out(cfg, "pca_windows.csv");
  per << "window_start,pc1,pc2,pc3,included\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& v = results[i].variance_percent;
    per << starts[i];
    for (std::size_t k = 0; k < 3; ++k) per << ',' << (k < v.size() ? fmt_double(v[k]) : "NA");
    per << ',' << (std::find(agg.excluded.begin(), agg.excluded.end(), i) == agg.excluded.end() ? 1 : 0) << '\n';
  }
  close_out(per, "pca_windows.csv");
}

void cmd_timestats(const RunConfig& cfg) {
  const auto corpus = single_input(cfg);
  std::vector<std::int64_t> ts;
  ts.reserve(corpus.size());
  for (const auto& m : corpus.messages) ts.push_back(m.timestamp);

  auto stats = open_out(cfg, "timestats.csv");
  stats << "scale,theta_mu_rescaled,var,std,dispersion,peak_ratio\n";
  for (const auto& name : cfg.scales) {
    const auto scale = parse_timescale(name);
    if (!scale) throw ContractError("unknown scale '" + name + "'");
    const auto h = activity_histogram(ts, *scale);
    auto hist = open_out(cfg, "hist_" + name + ".csv");
    write_histogram_csv(h, hist);
    close_out(hist, "hist_" + name + ".csv");
    if (*scale != Timescale::monthdays) {
      auto grouped = open_out(cfg, "grouped_" + name + ".csv");
      write_grouped_csv(grouped_histogram(h, divisors(static_cast<int>(h.counts.size()))), grouped);
      close_out(grouped, "grouped_" + name + ".csv");
    }
    const std::string peak = h.peak_ratio ? fmt_double(*h.peak_ratio) : "NA";
    try {
      const auto c = circular_stats(ts, *scale);
      stats << name << ',' << fmt_double(c.theta_mu_rescaled) << ',' << fmt_double(c.var) << ','
            << fmt_double(c.std) << ',' << fmt_double(c.dispersion) << ',' << peak << '\n';
    } catch (const MeanUndefinedError& e) {
      stats << name << ",NA," << fmt_double(e.var) << ",NA,NA," << peak << '\n';
    }
  }
  close_out(stats, "timestats.csv");

  const auto conc = activity_concentration(corpus);
  auto c = open_out(cfg, "concentration.csv");
  c << "hub_share,q1,q1_coverage,q3,q3_coverage,last_decile,last_decile_coverage\n"
    << fmt_double(conc.hub_share) << ',' << fmt_double(conc.q1) << ',' << fmt_double(conc.q1_coverage) << ','
    << fmt_double(conc.q3) << ',' << fmt_double(conc.q3_coverage) << ',' << fmt_double(conc.last_decile) << ','
    << fmt_double(conc.last_decile_coverage) << '\n';
  close_out(c, "concentration.csv");
}

void cmd_scatter(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw ContractError("scatter needs at least one --input");
  auto out = open_out(cfg, "scatter.csv");
  out << "list,M,N,Gamma\n";
  for (const auto& path : cfg.inputs) {
    const auto corpus = load(cfg, path);
    out << detail::csv_field(fs::path(path).stem().string()) << ',' << corpus.size() << ','
        << corpus.n_participants << ',' << corpus.n_threads << '\n';
  }
  close_out(out, "scatter.csv");
}

void cmd_synth(const RunConfig& cfg) {
  SyntheticSpec spec;
  const auto g = parse_generator(cfg.generator);
  if (!g) throw ContractError("unknown generator '" + cfg.generator + "'");
  spec.generator = *g;
  spec.seed = cfg.seed;
  if (cfg.messages) spec.n_messages = *cfg.messages;
  if (cfg.vertices) {
    spec.n_vertices = *cfg.vertices;
    spec.population = *cfg.vertices;
  }
  if (cfg.p) spec.p = *cfg.p;
  if (cfg.exponent) {
    spec.exponent = *cfg.exponent;
    spec.reply_exponent = *cfg.exponent;
  }
  const auto corpus = synthesize_corpus(spec);
  auto out = open_out(cfg, "messages.jsonl");
  emit_jsonl(corpus, out);
  close_out(out, "messages.jsonl");
}

void add_shared(CLI::App& app, RunConfig& cfg) {
  app.add_option("--input", cfg.inputs, "Input file(s)");
  app.add_option("--format", cfg.format, "Input format; default from the extension")
      ->check(CLI::IsMember({"mbox", "jsonl", "csv"}));
  app.add_option("--ws", cfg.ws, "Window size in messages")->check(CLI::PositiveNumber);
  app.add_option("--step", cfg.step, "Window step in messages (default: ws)")->check(CLI::PositiveNumber);
  app.add_option("--eta", cfg.eta, "Minimum vertices per bin")->check(CLI::PositiveNumber);
  app.add_option("--criterion", cfg.criteria, "k kin kout s sin sout C1..C6");
  app.add_option("--scales", cfg.scales, "seconds minutes hours weekdays monthdays months");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--seed", cfg.seed, "Generator seed");
  app.add_option("--limit", cfg.limit, "Keep only the first N messages");
  app.add_option("--weight-rule", cfg.weight_rule, "Mean edge weight for strengths: average or literal")
      ->check(CLI::IsMember({"average", "literal"}));
  app.add_option("--min-pca-vertices", cfg.min_pca_vertices, "Skip smaller windows in pca");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Erdos sectors, circular time statistics and metric PCA for message archives"};
  app.set_config("--config", "", "key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  add_shared(app, cfg);

  auto* ingest = app.add_subcommand("ingest", "Canonical JSONL and corpus summary");
  auto* sectors = app.add_subcommand("sectors", "Sector fractions per window");
  auto* pca_cmd = app.add_subcommand("pca", "Aggregated metric loadings over windows");
  auto* timestats = app.add_subcommand("timestats", "Activity histograms and circular statistics");
  auto* scatter = app.add_subcommand("scatter", "Messages, participants and threads per list");
  auto* synth = app.add_subcommand("synth", "Synthetic message stream");
  synth->add_option("--generator", cfg.generator, "erdos_renyi, preferential_attachment or reply_process")
      ->check(CLI::IsMember({"erdos_renyi", "preferential_attachment", "reply_process"}));
  synth->add_option("--messages", cfg.messages, "Messages (reply_process)");
  synth->add_option("--vertices", cfg.vertices, "Vertices, or authors for reply_process");
  synth->add_option("--p", cfg.p, "Edge probability (erdos_renyi)");
  synth->add_option("--exponent", cfg.exponent, "Attachment exponent");

  CLI11_PARSE(app, argc, argv);

  const std::map<CLI::App*, void (*)(const RunConfig&)> commands = {
      {ingest, cmd_ingest}, {sectors, cmd_sectors}, {pca_cmd, cmd_pca},
      {timestats, cmd_timestats}, {scatter, cmd_scatter}, {synth, cmd_synth}};
  try {
    for (const auto& [sub, run] : commands)
      if (sub->parsed()) run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "erdos: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
