#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetero/constrained.hpp"
#include "hetero/eval.hpp"
#include "hetero/generators.hpp"
#include "hetero/graph.hpp"
#include "hetero/io.hpp"
#include "hetero/pipeline.hpp"

namespace hetero::cli {
namespace {

namespace fs = std::filesystem;

class CliError : public std::runtime_error {
 public:
  CliError(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct GraphInput {
  std::string path;
  bool remap_ids = false;
  std::size_t num_nodes = 0;  // 0: infer from the ids
};

struct TrainOptions {
  std::size_t k = 8;
  std::string reg = "auto";
  std::size_t max_iters = 200;
  std::string variant = "full";
};

struct SynthOptions {
  std::string kind = "recruiter";
  RecruiterParams recruiter;
  std::string b_path;
  std::string c_path;
  int t = 1;
};

struct Options {
  std::string out;
  GraphInput graph;
  TrainOptions train;
  SynthOptions synth;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0};
  std::string model_path;
  std::string labels_path;
  std::vector<double> taus{0.5};
  std::size_t top = 10;
  double holdout_frac = kDefaultHoldoutFrac;
  std::vector<std::size_t> k_values;
  std::vector<std::string> variants{"full", "homophily-only", "svd"};
  bool plot = false;
};

// ---- shared helpers ----

RegWeight parse_reg(const std::string& s) {
  if (s == "auto") return RegWeight::automatic();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return RegWeight::fixed(v);
  } catch (const std::exception&) {
    throw CliError("config", "--reg expects 'auto' or a nonnegative number, got '" + s + "'");
  }
}

Variant parse_variant_arg(const std::string& s) {
  try {
    return parse_variant(s);
  } catch (const std::invalid_argument& e) {
    throw CliError("config", e.what());
  }
}

PipelineConfig pipeline_config(const TrainOptions& t, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.k = t.k;
  cfg.fit.reg_weight = parse_reg(t.reg);
  cfg.fit.max_iters = t.max_iters;
  cfg.fit.seed = seed;
  cfg.variant = parse_variant_arg(t.variant);
  if (cfg.variant == Variant::svd) throw CliError("config", "the svd variant is only available in sweep");
  try {
    cfg.fit.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError("config", e.what());
  }
  return cfg;
}

fs::path resolve_out_dir(const std::string& requested, const std::string& command) {
  fs::path dir = requested;
  if (dir.empty()) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm local{};
    localtime_r(&now, &local);
    std::ostringstream name;
    name << command << '-' << std::put_time(&local, "%Y%m%d-%H%M%S");
    dir = fs::path("runs") / name.str();
    for (int suffix = 1; fs::exists(dir); ++suffix) {
      dir = fs::path("runs") / (name.str() + "-" + std::to_string(suffix));
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError("io", "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void echo_config(const fs::path& dir, const CLI::App& sub) {
  std::ofstream out = open_output(dir / "config.toml");
  out << "[" << sub.get_name() << "]\n" << sub.config_to_str(true, false);
}

LoadedGraph read_graph(const GraphInput& in) {
  std::ifstream file = open_input(in.path);
  EdgeListOptions opts;
  opts.remap_ids = in.remap_ids;
  if (in.num_nodes > 0) opts.num_nodes = in.num_nodes;
  try {
    return load_edge_list(file, opts);
  } catch (const ParseError& e) {
    throw CliError("parse", in.path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("parse", in.path + ": " + e.what());
  }
}

// Whitespace-separated rows; '#' starts a comment.
DenseMatrix read_plain_matrix(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw CliError("parse", path + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw CliError("parse", path + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CliError("parse", path + ": no rows");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---- commands ----

int cmd_synth(const Options& o, const CLI::App& sub, std::ostream& out) {
  const fs::path dir = resolve_out_dir(o.out, "synth");
  echo_config(dir, sub);
  if (o.synth.kind == "recruiter") {
    RecruiterGraph rg;
    try {
      rg = generate_recruiter_graph(o.synth.recruiter);
    } catch (const std::invalid_argument& e) {
      throw CliError("config", e.what());
    }
    {
      std::ofstream f = open_output(dir / "graph.edges");
      save_edge_list(f, rg.graph);
    }
    {
      std::ofstream f = open_output(dir / "communities.txt");
      save_communities(f, recruiter_groups(rg, o.synth.recruiter.n_locations));
    }
    {
      std::ofstream f = open_output(dir / "expected.txt");
      save_dense(f, rg.expected, "expected");
    }
    out << "synth recruiter: " << rg.graph.num_nodes() << " nodes, " << rg.graph.num_edges()
        << " edges -> " << dir.string() << '\n';
    return 0;
  }
  if (o.synth.kind == "threshold") {
    if (o.synth.b_path.empty()) throw CliError("config", "threshold synth needs --b");
    const DenseMatrix b = read_plain_matrix(o.synth.b_path);
    const DenseMatrix c = o.synth.c_path.empty() ? DenseMatrix(b.rows(), 0) : read_plain_matrix(o.synth.c_path);
    Graph g;
    try {
      g = generate_threshold_graph(b, c, o.synth.t);
    } catch (const std::invalid_argument& e) {
      throw CliError("config", e.what());
    }
    {
      std::ofstream f = open_output(dir / "graph.edges");
      save_edge_list(f, g);
    }
    CommunityLabels groups;
    for (const DenseMatrix* side : {&b, &c}) {
      for (std::size_t col = 0; col < side->cols(); ++col) {
        std::vector<NodeId> members;
        for (std::size_t i = 0; i < side->rows(); ++i)
          if ((*side)(i, col) != 0.0) members.push_back(i);
        if (!members.empty()) groups.members.push_back(std::move(members));
      }
    }
    if (!groups.members.empty()) {
      std::ofstream f = open_output(dir / "communities.txt");
      save_communities(f, groups);
    }
    {
      std::ofstream f = open_output(dir / "witness_model.txt");
      save_model(f, build_threshold_witness(b, c, o.synth.t));
    }
    out << "synth threshold: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges -> "
        << dir.string() << '\n';
    return 0;
  }
  throw CliError("config", "--kind must be recruiter or threshold, got '" + o.synth.kind + "'");
}

void write_trace(std::ostream& log, const char* stage, const StageTrace& t) {
  for (std::size_t i = 0; i < t.loss_history.size(); ++i) {
    log << stage << ',' << i << ',' << t.loss_history[i] << '\n';
  }
}

void summarize_trace(std::ostream& out, const char* stage, const StageTrace& t) {
  out << stage << ": status=" << to_string(t.status) << " iterations=" << t.iterations
      << " loss_before=" << t.loss_history.front() << " loss_after=" << t.loss_history.back()
      << " non_increasing=" << (non_increasing(t.loss_history) ? "yes" : "no") << '\n';
}

int cmd_fit(const Options& o, const CLI::App& sub, std::ostream& out) {
  const PipelineConfig cfg = pipeline_config(o.train, o.seed);
  const LoadedGraph loaded = read_graph(o.graph);
  const fs::path dir = resolve_out_dir(o.out, "fit");
  echo_config(dir, sub);

  PipelineResult r;
  try {
    r = fit_pipeline(adjacency_dense(loaded.graph), cfg);
  } catch (const StageError& e) {
    throw CliError("fit/" + e.stage(), e.what());
  }

  {
    std::ofstream f = open_output(dir / "lpca.txt");
    save_lpca(f, r.stage1.factors);
  }
  {
    std::ofstream f = open_output(dir / "nonneg_initial.txt");
    save_nonneg(f, r.initial, "nonneg");
  }
  {
    std::ofstream f = open_output(dir / "nonneg_pruned.txt");
    save_nonneg(f, r.pruned, "nonneg-pruned");
  }
  {
    std::ofstream f = open_output(dir / "nonneg_fitted.txt");
    save_nonneg(f, r.stage3.factors, "nonneg-fitted");
  }
  {
    std::ofstream f = open_output(dir / "model.txt");
    save_model(f, r.model);
  }
  if (loaded.id_map) {
    std::ofstream f = open_output(dir / "node_ids.txt");
    for (std::size_t i = 0; i < loaded.id_map->size(); ++i) f << i << ' ' << loaded.id_map->original(i) << '\n';
  }
  {
    std::ofstream log = open_output(dir / "stage_log.csv");
    log << std::setprecision(17) << "stage,iteration,loss\n";
    write_trace(log, "stage1", r.stage1.trace);
    write_trace(log, "stage3", r.stage3.trace);
  }
  std::ostringstream summary;
  summary << std::setprecision(10);
  summary << "nodes=" << loaded.graph.num_nodes() << " edges=" << loaded.graph.num_edges() << '\n';
  summarize_trace(summary, "stage1", r.stage1.trace);
  summary << "stage1: reg_weight=" << r.stage1.factors.reg_weight_used << '\n';
  summary << "stage2: columns B=" << r.initial.b.cols() << " C=" << r.initial.c.cols() << '\n';
  summary << "prune: columns B=" << r.pruned.b.cols() << " C=" << r.pruned.c.cols() << '\n';
  summarize_trace(summary, "stage3", r.stage3.trace);
  summary << "stage3: reg_weight=" << r.stage3.reg_weight_used << '\n';
  std::size_t homo = 0;
  for (double w : r.model.w) homo += w > 0.0;
  summary << "model: k=" << r.model.k() << " homophilous=" << homo << " heterophilous=" << r.model.k() - homo
          << '\n';
  {
    std::ofstream f = open_output(dir / "stage_summary.txt");
    f << summary.str();
  }
  out << summary.str() << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_eval(const Options& o, const CLI::App& sub, std::ostream& out) {
  const LoadedGraph loaded = read_graph(o.graph);
  CommunityModel model;
  {
    std::ifstream f = open_input(o.model_path);
    try {
      model = load_model(f);
    } catch (const std::runtime_error& e) {
      throw CliError("parse", o.model_path + ": " + e.what());
    }
  }
  if (model.num_nodes() != loaded.graph.num_nodes()) {
    throw CliError("input", "model has " + std::to_string(model.num_nodes()) + " nodes but graph has " +
                                std::to_string(loaded.graph.num_nodes()));
  }
  std::optional<CommunityLabels> labels;
  if (!o.labels_path.empty()) {
    std::ifstream f = open_input(o.labels_path);
    try {
      labels = load_communities(f, loaded.id_map ? &*loaded.id_map : nullptr);
      validate_labels(*labels, loaded.graph.num_nodes());
    } catch (const std::exception& e) {
      throw CliError("parse", o.labels_path + ": " + e.what());
    }
  }
  for (double tau : o.taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw CliError("config", "--tau values must lie in (0, 1)");
  }
  const fs::path dir = resolve_out_dir(o.out, "eval");
  echo_config(dir, sub);

  ReconReport recon;
  try {
    recon = recon_report(adjacency_dense(loaded.graph), model);
  } catch (const std::invalid_argument& e) {
    throw CliError("eval", e.what());
  }
  std::vector<MetricsRow> rows;
  auto base_row = [&] {
    MetricsRow row;
    row.variant = o.train.variant;
    row.k = model.k();
    row.seed = "-";
    row.recon = recon;
    return row;
  };
  if (!labels) {
    rows.push_back(base_row());
  } else {
    for (double tau : o.taus) {
      MetricsRow row = base_row();
      row.tau = tau;
      CommunityLabels detected = binarize_memberships(model, tau);
      if (detected.count() == 0) {
        row.f1 = 0.0;
        row.note = "no community reaches tau";
      } else {
        row.f1 = community_f1(detected, *labels);
      }
      rows.push_back(row);
    }
  }
  {
    std::ofstream f = open_output(dir / "metrics.csv");
    write_metrics_header(f);
    for (const MetricsRow& row : rows) write_metrics_row(f, row);
  }
  {
    std::ofstream f = open_output(dir / "community_report.txt");
    write_community_report(f, model, o.taus.front(), o.top);
  }
  write_metrics_header(out);
  for (const MetricsRow& row : rows) write_metrics_row(out, row);
  return 0;
}

int cmd_linkpred(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (!(o.holdout_frac > 0.0 && o.holdout_frac < 1.0)) {
    throw CliError("config", "--holdout-frac must lie in (0, 1)");
  }
  if (o.seeds.empty()) throw CliError("config", "--seeds is empty");
  PipelineConfig cfg = pipeline_config(o.train, 0);
  const LoadedGraph loaded = read_graph(o.graph);
  const fs::path dir = resolve_out_dir(o.out, "linkpred");
  echo_config(dir, sub);

  std::vector<MetricsRow> rows;
  std::vector<LinkPredResult> ok;
  for (std::uint64_t seed : o.seeds) {
    MetricsRow row;
    row.variant = o.train.variant;
    row.k = cfg.k;
    row.seed = std::to_string(seed);
    try {
      cfg.fit.seed = seed;
      const HoldoutSplit split = make_holdout(loaded.graph.num_nodes(), o.holdout_frac, seed);
      const LinkPredRun run = link_prediction_experiment(loaded.graph, split, cfg);
      row.f1 = run.scores.f1;
      row.precision = run.scores.precision;
      row.recall = run.scores.recall;
      row.random_baseline_f1 = run.scores.random_baseline_f1;
      std::ostringstream note;
      note << "held_out_density=" << std::setprecision(6) << run.scores.held_out_density;
      row.note = note.str();
      ok.push_back(run.scores);
    } catch (const std::exception& e) {
      row.note = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  }
  MetricsRow mean;
  mean.variant = o.train.variant;
  mean.k = cfg.k;
  mean.seed = "mean";
  if (!ok.empty()) {
    double f1 = 0, p = 0, r = 0, base = 0;
    for (const LinkPredResult& s : ok) {
      f1 += s.f1;
      p += s.precision;
      r += s.recall;
      base += s.random_baseline_f1;
    }
    const double count = static_cast<double>(ok.size());
    mean.f1 = f1 / count;
    mean.precision = p / count;
    mean.recall = r / count;
    mean.random_baseline_f1 = base / count;
  }
  mean.note = "seeds_ok=" + std::to_string(ok.size()) + "/" + std::to_string(o.seeds.size());
  rows.push_back(mean);
  {
    std::ofstream f = open_output(dir / "metrics.csv");
    write_metrics_header(f);
    for (const MetricsRow& row : rows) write_metrics_row(f, row);
  }
  write_metrics_header(out);
  for (const MetricsRow& row : rows) write_metrics_row(out, row);
  if (ok.empty()) throw CliError("linkpred", "every seed failed; see " + (dir / "metrics.csv").string());
  return 0;
}

// Normalized reconstruction error against k, one line per variant (median
// over seeds).
void write_sweep_svg(std::ostream& svg, const std::vector<MetricsRow>& rows) {
  std::map<std::string, std::map<std::size_t, std::vector<double>>> series;
  for (const MetricsRow& r : rows) {
    if (r.recon) series[r.variant][r.k].push_back(r.recon->frob_normalized);
  }
  double kmin = 1e300, kmax = -1e300, ymax = 0.0;
  for (const auto& [name, points] : series) {
    for (const auto& [k, vals] : points) {
      kmin = std::min(kmin, static_cast<double>(k));
      kmax = std::max(kmax, static_cast<double>(k));
      ymax = std::max(ymax, median(vals));
    }
  }
  if (kmax <= kmin) kmax = kmin + 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  const double w = 640, h = 400, left = 60, right = 160, top = 20, bottom = 50;
  auto px = [&](double k) { return left + (k - kmin) / (kmax - kmin) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - y / (ymax * 1.05) * (h - top - bottom); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  svg << std::setprecision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">k</text>\n";
  svg << "<text x=\"15\" y=\"" << (top + h - bottom) / 2 << "\" transform=\"rotate(-90 15 " << (top + h - bottom) / 2
      << ")\" text-anchor=\"middle\">normalized Frobenius error</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = ymax * 1.05 * i / 4.0;
    svg << "<text x=\"" << left - 5 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << y
        << "</text>\n";
  }
  std::size_t idx = 0;
  for (const auto& [name, points] : series) {
    const char* color = colors[idx % 5];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [k, vals] : points) svg << px(static_cast<double>(k)) << ',' << py(median(vals)) << ' ';
    svg << "\"/>\n";
    for (const auto& [k, vals] : points) {
      svg << "<circle cx=\"" << px(static_cast<double>(k)) << "\" cy=\"" << py(median(vals)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
      svg << "<text x=\"" << px(static_cast<double>(k)) << "\" y=\"" << h - bottom + 15
          << "\" text-anchor=\"middle\" font-size=\"10\">" << k << "</text>\n";
    }
    svg << "<text x=\"" << w - right + 10 << "\" y=\"" << top + 20 + 18 * idx << "\" fill=\"" << color << "\">"
        << name << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
}

int cmd_sweep(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (o.k_values.empty()) throw CliError("config", "--ks is empty");
  SweepOptions sweep;
  sweep.k_values = o.k_values;
  for (const std::string& v : o.variants) sweep.variants.push_back(parse_variant_arg(v));
  sweep.seeds = o.seeds;
  TrainOptions t = o.train;
  t.variant = "full";
  sweep.fit = pipeline_config(t, 0).fit;
  const LoadedGraph loaded = read_graph(o.graph);
  const fs::path dir = resolve_out_dir(o.out, "sweep");
  echo_config(dir, sub);

  std::vector<MetricsRow> rows;
  try {
    rows = reconstruction_sweep(loaded.graph, sweep);
  } catch (const StageError& e) {
    throw CliError("sweep/" + e.stage(), e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("sweep", e.what());
  }
  {
    std::ofstream f = open_output(dir / "sweep.csv");
    write_metrics_header(f);
    for (const MetricsRow& row : rows) write_metrics_row(f, row);
  }
  if (o.plot) {
    std::ofstream f = open_output(dir / "sweep.svg");
    write_sweep_svg(f, rows);
  }
  write_metrics_header(out);
  for (const MetricsRow& row : rows) write_metrics_row(out, row);
  return 0;
}

// ---- option wiring ----

void add_out(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output directory (default: runs/<command>-<timestamp>)");
}

void add_graph_input(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.graph.path, "Edge list, one 'u v' pair per line")->required();
  sub->add_flag("--remap-ids", o.graph.remap_ids, "Compact arbitrary node ids to 0..n-1");
  sub->add_option("--num-nodes", o.graph.num_nodes, "Node count override (0: 1 + max id)");
}

void add_train(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.train.k, "Number of communities")->check(CLI::PositiveNumber);
  sub->add_option("--reg", o.train.reg, "Regularization weight: auto or a number");
  sub->add_option("--max-iters", o.train.max_iters, "L-BFGS iterations per stage");
  sub->add_option("--variant", o.train.variant, "full | homophily-only");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterophilous community factorization of graphs"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  Options o;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic graph");
  synth->add_option("--kind", o.synth.kind, "recruiter | threshold");
  synth->add_option("--n", o.synth.recruiter.n, "Recruiter graph: node count");
  synth->add_option("--locations", o.synth.recruiter.n_locations, "Recruiter graph: location count");
  synth->add_option("--p-hetero", o.synth.recruiter.p_hetero_same_loc,
                    "Recruiter graph: same location, opposite role");
  synth->add_option("--p-homo", o.synth.recruiter.p_homo_same_loc, "Recruiter graph: same location, same role");
  synth->add_option("--p-diff", o.synth.recruiter.p_diff_loc, "Recruiter graph: different locations");
  synth->add_option("--recruiter-frac", o.synth.recruiter.recruiter_frac, "Recruiter graph: recruiter share");
  synth->add_option("--seed", o.synth.recruiter.seed, "Random seed");
  synth->add_option("--b", o.synth.b_path, "Threshold graph: 0/1 matrix B (plain text rows)");
  synth->add_option("--c", o.synth.c_path, "Threshold graph: 0/1 matrix C (plain text rows)");
  synth->add_option("--t", o.synth.t, "Threshold graph: threshold");
  add_out(synth, o);

  CLI::App* fit = app.add_subcommand("fit", "Fit the three-stage community model");
  add_graph_input(fit, o);
  add_train(fit, o);
  fit->add_option("--seed", o.seed, "Random seed");
  add_out(fit, o);

  CLI::App* eval = app.add_subcommand("eval", "Score a fitted model");
  add_graph_input(eval, o);
  eval->add_option("--model", o.model_path, "Model file written by fit")->required();
  eval->add_option("--labels", o.labels_path, "Ground-truth communities, one per line");
  eval->add_option("--tau", o.taus, "Membership thresholds")->expected(1, -1);
  eval->add_option("--top", o.top, "Members listed per community in the report");
  eval->add_option("--variant", o.train.variant, "Label for the variant column");
  add_out(eval, o);

  CLI::App* linkpred = app.add_subcommand("linkpred", "Held-out link prediction");
  add_graph_input(linkpred, o);
  add_train(linkpred, o);
  linkpred->add_option("--seeds", o.seeds, "Seeds; one holdout and fit per seed")->expected(1, -1);
  linkpred->add_option("--holdout-frac", o.holdout_frac, "Fraction of node pairs held out");
  add_out(linkpred, o);

  CLI::App* sweep = app.add_subcommand("sweep", "Reconstruction error against k");
  add_graph_input(sweep, o);
  sweep->add_option("--ks", o.k_values, "Values of k")->required()->expected(1, -1);
  sweep->add_option("--variants", o.variants, "Subset of full, homophily-only, svd")->expected(1, -1);
  sweep->add_option("--seeds", o.seeds, "Seeds for the fitted variants")->expected(1, -1);
  sweep->add_option("--reg", o.train.reg, "Regularization weight: auto or a number");
  sweep->add_option("--max-iters", o.train.max_iters, "L-BFGS iterations per stage");
  sweep->add_flag("--plot", o.plot, "Also write sweep.svg");
  add_out(sweep, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, *synth, out);
    if (fit->parsed()) return cmd_fit(o, *fit, out);
    if (eval->parsed()) return cmd_eval(o, *eval, out);
    if (linkpred->parsed()) return cmd_linkpred(o, *linkpred, out);
    if (sweep->parsed()) return cmd_sweep(o, *sweep, out);
  } catch (const CliError& e) {
    err << "error: " << e.category() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: io: " << msg << '\n';
    return 1;
  }
  return 2;
}

}  // namespace hetero::cli
