#include "elca/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "elca/em.hpp"
#include "elca/hypergraph.hpp"
#include "elca/io.hpp"
#include "elca/model.hpp"
#include "elca/rng.hpp"
#include "elca/selection.hpp"
#include "elca/sizedist.hpp"

namespace elca::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct FitArgs {
  std::string input;
  std::string format = "edges";
  int clusters = 1;
  int extra = 1;
  double tol = 1e-6;
  int max_iter = 2000;
  int restarts = 10;
  std::uint64_t seed = 1;
  bool resp = false;
  int threads = 1;
  std::string out = ".";

  Json flags() const {
    return Json{{"input", input},     {"format", format},     {"clusters", clusters}, {"extra", extra},
                {"tol", tol},         {"max-iter", max_iter}, {"restarts", restarts}, {"seed", seed},
                {"resp", resp},       {"threads", threads},   {"out", out}};
  }
};

struct SelectArgs {
  std::string input;
  std::string format = "edges";
  int ncv = 20;
  double q = 0.7;
  double tol = 1e-6;
  int max_iter = 2000;
  int restarts = 10;
  std::uint64_t seed = 1;
  int max_clusters = 50;
  int max_extra = 50;
  int threads = 1;
  std::string out = ".";

  Json flags() const {
    return Json{{"input", input},         {"format", format},       {"ncv", ncv},         {"q", q},
                {"tol", tol},             {"max-iter", max_iter},   {"restarts", restarts}, {"seed", seed},
                {"max-clusters", max_clusters}, {"max-extra", max_extra}, {"threads", threads}, {"out", out}};
  }
};

struct SimulateArgs {
  std::string params;
  int vertices = 0;
  int clusters = 1;
  int extra = 1;
  int edges = 0;
  std::uint64_t seed = 1;
  std::string out = ".";

  Json flags() const {
    Json f{{"vertices", vertices}, {"clusters", clusters}, {"extra", extra},
           {"edges", edges},       {"seed", seed},         {"out", out}};
    if (!params.empty()) f["params"] = params;
    return f;
  }
};

struct SizedistArgs {
  std::string input;
  std::string format = "edges";
  std::string params;
  std::string lca_params;
  std::string out = ".";

  Json flags() const {
    Json f{{"input", input}, {"format", format}, {"out", out}};
    if (!params.empty()) f["params"] = params;
    if (!lca_params.empty()) f["lca-params"] = lca_params;
    return f;
  }
};

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

// Fixed 17-significant-digit CSV numbers.
std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

void write_manifest(const std::string& out_dir, const std::string& command, const Json& flags, std::uint64_t seed,
                    std::vector<std::string> inputs, double seconds) {
  Json m;
  m["command"] = command;
  m["artifact_version"] = kVersion;
  m["inputs"] = std::move(inputs);
  m["flags"] = flags;
  m["seed"] = seed;
  m["duration_seconds"] = seconds;
  io::write_text_file(path_in(out_dir, "manifest.json"), io::dump(m));
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string quoted_label(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

void cmd_fit(const FitArgs& args) {
  Timer timer;
  if (args.clusters < 1 || args.extra < 1) throw ValidationError("--clusters and --extra must be >= 1");
  if (args.restarts < 1) throw ValidationError("--restarts must be >= 1");
  const IncidenceMatrix m = read_file(parse_format(args.format), args.input);
  const FitOptions opts{args.tol, args.max_iter, 1};
  const FitResult r = fit_restarts(m, args.clusters, args.extra, opts, args.restarts, args.seed, args.threads);

  prepare_out(args.out);
  io::write_text_file(path_in(args.out, "fit.json"), io::dump(io::to_json(r, args.resp)));

  auto trace = csv_stream();
  trace << "iteration,loglik\n";
  for (std::size_t t = 0; t < r.loglik_trace.size(); ++t) trace << t << ',' << r.loglik_trace[t] << '\n';
  io::write_text_file(path_in(args.out, "loglik_trace.csv"), trace.str());

  const auto& edge_labels = m.edge_labels();
  auto assign = csv_stream();
  assign << "edge,label,cluster,extra\n";
  for (Index j = 0; j < m.n_edges(); ++j)
    assign << j + 1 << ',' << quoted_label(edge_labels[static_cast<std::size_t>(j)]) << ','
           << r.z1[static_cast<std::size_t>(j)] + 1 << ',' << r.z2[static_cast<std::size_t>(j)] + 1 << '\n';
  io::write_text_file(path_in(args.out, "assignments.csv"), assign.str());

  const Matrix clusters = r.resp.cluster_marginals();
  const Matrix extras = r.resp.extra_marginals();
  auto probs = csv_stream();
  probs << "edge,label";
  for (Index g = 0; g < clusters.cols(); ++g) probs << ",cluster_" << g + 1;
  for (Index k = 0; k < extras.cols(); ++k) probs << ",extra_" << k + 1;
  probs << '\n';
  for (Index j = 0; j < m.n_edges(); ++j) {
    probs << j + 1 << ',' << quoted_label(edge_labels[static_cast<std::size_t>(j)]);
    for (Index g = 0; g < clusters.cols(); ++g) probs << ',' << clusters(j, g);
    for (Index k = 0; k < extras.cols(); ++k) probs << ',' << extras(j, k);
    probs << '\n';
  }
  io::write_text_file(path_in(args.out, "cluster_probs.csv"), probs.str());

  write_manifest(args.out, "fit", args.flags(), args.seed, {args.input}, timer.seconds());
}

void cmd_select(const SelectArgs& args) {
  Timer timer;
  CvConfig cfg;
  cfg.n_cv = args.ncv;
  cfg.q = args.q;
  cfg.em = FitOptions{args.tol, args.max_iter, 1};
  cfg.n_restarts = args.restarts;
  cfg.seed = args.seed;
  cfg.threads = args.threads;
  cfg.max_clusters = args.max_clusters;
  cfg.max_extra = args.max_extra;
  validate(cfg);

  const IncidenceMatrix m = read_file(parse_format(args.format), args.input);
  const CvSelection sel = greedy_search(m, cfg);

  prepare_out(args.out);
  std::ostringstream table;
  write_cv_table_csv(table, sel);
  io::write_text_file(path_in(args.out, "cv_table.csv"), table.str());
  io::write_text_file(path_in(args.out, "selection.json"), io::dump(io::to_json(sel)));
  write_manifest(args.out, "select", args.flags(), args.seed, {args.input}, timer.seconds());
}

void cmd_simulate(const SimulateArgs& args) {
  Timer timer;
  if (args.edges < 1) throw ValidationError("--edges must be >= 1");
  ElcaParams truth;
  std::vector<std::string> inputs;
  if (!args.params.empty()) {
    truth = io::params_from_json(io::read_json_file(args.params));
    inputs.push_back(args.params);
  } else {
    if (args.vertices < 1 || args.clusters < 1 || args.extra < 1)
      throw ValidationError("without --params, --vertices, --clusters and --extra must be >= 1");
    truth = random_init(args.vertices, args.clusters, args.extra, derive_seed(args.seed, 0));
  }
  const LabeledSample s = sample(truth, args.edges, derive_seed(args.seed, 1));
  truth.vertex_labels = s.matrix.vertex_labels();

  prepare_out(args.out);
  std::ostringstream edges;
  write_hyperedge_list(edges, s.matrix);
  io::write_text_file(path_in(args.out, "hypergraph.txt"), edges.str());
  std::ostringstream dense;
  write_dense_csv(dense, s.matrix);
  io::write_text_file(path_in(args.out, "incidence.csv"), dense.str());

  std::ostringstream labels;
  labels << "edge,cluster,extra\n";
  for (std::size_t j = 0; j < s.z1.size(); ++j) labels << j + 1 << ',' << s.z1[j] + 1 << ',' << s.z2[j] + 1 << '\n';
  io::write_text_file(path_in(args.out, "labels.csv"), labels.str());
  io::write_text_file(path_in(args.out, "params.json"), io::dump(io::to_json(truth)));
  write_manifest(args.out, "simulate", args.flags(), args.seed, inputs, timer.seconds());
}

void cmd_sizedist(const SizedistArgs& args) {
  Timer timer;
  const IncidenceMatrix m = read_file(parse_format(args.format), args.input);
  std::vector<std::string> inputs{args.input};

  std::optional<ElcaParams> elca;
  std::optional<LcaParams> lca;
  if (!args.params.empty()) {
    elca = io::params_from_json(io::read_json_file(args.params));
    inputs.push_back(args.params);
    if (elca->n_vertices() != m.n_vertices()) throw ValidationError("--params vertex count differs from the input");
  }
  if (!args.lca_params.empty()) {
    lca = io::lca_params_from_json(io::read_json_file(args.lca_params));
    inputs.push_back(args.lca_params);
    if (lca->n_vertices() != m.n_vertices()) throw ValidationError("--lca-params vertex count differs from the input");
  }

  const SizeHistogram hist = size_histogram(m);
  const Pmf observed = empirical_size_pmf(m);
  std::optional<Pmf> elca_pmf;
  std::optional<Pmf> lca_pmf;
  if (elca) elca_pmf = size_pmf_elca(*elca);
  if (lca) lca_pmf = size_pmf_lca(*lca);

  auto csv = csv_stream();
  csv << "size,observed_count,observed";
  if (elca_pmf) csv << ",elca";
  if (lca_pmf) csv << ",lca";
  csv << '\n';
  for (Index y = 0; y <= m.n_vertices(); ++y) {
    const auto it = hist.counts.find(y);
    csv << y << ',' << (it == hist.counts.end() ? 0 : it->second) << ',' << observed[y];
    if (elca_pmf) csv << ',' << (*elca_pmf)[y];
    if (lca_pmf) csv << ',' << (*lca_pmf)[y];
    csv << '\n';
  }

  Json report;
  report["n_edges"] = m.n_edges();
  report["observed_mean"] = observed.mean();
  report["observed_variance"] = observed.variance();
  if (elca_pmf) report["tv_elca"] = total_variation(*elca_pmf, observed);
  if (lca_pmf) report["tv_lca"] = total_variation(*lca_pmf, observed);
  if (elca) {
    const LcaParams reference = lca ? *lca : implied_lca(*elca);
    try {
      report["moments"] = io::to_json(moments(reference, *elca));
    } catch (const ConditionError& e) {
      report["moments"] = nullptr;
      report["condition_violated"] = e.what();
    }
  }

  prepare_out(args.out);
  io::write_text_file(path_in(args.out, "sizes.csv"), csv.str());
  io::write_text_file(path_in(args.out, "moments.json"), io::dump(report));
  write_manifest(args.out, "sizedist", args.flags(), 0, inputs, timer.seconds());
}

// Rebuilds a command line from a manifest's flags.
std::vector<std::string> replay_args(const Json& manifest, const std::string& out, int threads) {
  if (!manifest.contains("command") || !manifest.contains("flags"))
    throw ValidationError("manifest lacks 'command' or 'flags'");
  std::vector<std::string> args{manifest["command"].get<std::string>()};
  for (const auto& [key, value] : manifest["flags"].items()) {
    if (key == "out" && !out.empty()) continue;
    if (key == "threads" && threads > 0) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  if (!out.empty()) {
    args.push_back("--out");
    args.push_back(out);
  }
  if (threads > 0 && manifest["flags"].contains("threads")) {
    args.push_back("--threads");
    args.push_back(std::to_string(threads));
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended latent class analysis for random hypergraphs", "elca"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  const auto formats = CLI::IsMember({"edges", "bipartite", "csv"});

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one model by EM");
  fit_cmd->add_option("--input", fit_args.input, "Hypergraph file")->required();
  fit_cmd->add_option("--format", fit_args.format, "edges | bipartite | csv")->check(formats)->capture_default_str();
  fit_cmd->add_option("--clusters", fit_args.clusters, "Number of clusters G")->required();
  fit_cmd->add_option("--extra", fit_args.extra, "Number of additional clusters K")->capture_default_str();
  fit_cmd->add_option("--tol", fit_args.tol, "Stop when the log-likelihood gain is below this")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "EM iteration cap")->capture_default_str();
  fit_cmd->add_option("--restarts", fit_args.restarts, "Random starts; best log-likelihood wins")->capture_default_str();
  fit_cmd->add_option("--seed", fit_args.seed, "Seed of the first restart")->capture_default_str();
  fit_cmd->add_flag("--resp", fit_args.resp, "Include responsibilities in fit.json");
  fit_cmd->add_option("--threads", fit_args.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--out", fit_args.out, "Output directory")->capture_default_str();

  SelectArgs sel_args;
  auto* sel_cmd = app.add_subcommand("select", "Cross-validated greedy search over (G, K)");
  sel_cmd->add_option("--input", sel_args.input, "Hypergraph file")->required();
  sel_cmd->add_option("--format", sel_args.format, "edges | bipartite | csv")->check(formats)->capture_default_str();
  sel_cmd->add_option("--ncv", sel_args.ncv, "Cross-validation replicates")->capture_default_str();
  sel_cmd->add_option("--q", sel_args.q, "Probability a hyperedge is used for training")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sel_cmd->add_option("--tol", sel_args.tol, "EM tolerance")->capture_default_str();
  sel_cmd->add_option("--max-iter", sel_args.max_iter, "EM iteration cap")->capture_default_str();
  sel_cmd->add_option("--restarts", sel_args.restarts, "EM random starts per replicate")->capture_default_str();
  sel_cmd->add_option("--seed", sel_args.seed, "Base seed for splits and fits")->capture_default_str();
  sel_cmd->add_option("--max-clusters", sel_args.max_clusters, "Upper bound on G")->capture_default_str();
  sel_cmd->add_option("--max-extra", sel_args.max_extra, "Upper bound on K")->capture_default_str();
  sel_cmd->add_option("--threads", sel_args.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sel_cmd->add_option("--out", sel_args.out, "Output directory")->capture_default_str();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample a hypergraph from the model");
  auto* params_opt = sim_cmd->add_option("--params", sim_args.params, "Parameter JSON");
  sim_cmd->add_option("--vertices", sim_args.vertices, "N (random parameters)")->excludes(params_opt);
  sim_cmd->add_option("--clusters", sim_args.clusters, "G (random parameters)")->excludes(params_opt);
  sim_cmd->add_option("--extra", sim_args.extra, "K (random parameters)")->excludes(params_opt);
  sim_cmd->add_option("--edges", sim_args.edges, "Number of hyperedges M")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "Seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out, "Output directory")->capture_default_str();

  SizedistArgs size_args;
  auto* size_cmd = app.add_subcommand("sizedist", "Hyperedge-size distributions and moments");
  size_cmd->add_option("--input", size_args.input, "Hypergraph file")->required();
  size_cmd->add_option("--format", size_args.format, "edges | bipartite | csv")->check(formats)->capture_default_str();
  size_cmd->add_option("--params", size_args.params, "Fitted ELCA parameter JSON");
  size_cmd->add_option("--lca-params", size_args.lca_params, "Fitted LCA parameter JSON (K = 1 fit or {pi, p})");
  size_cmd->add_option("--out", size_args.out, "Output directory")->capture_default_str();

  std::string manifest_path;
  std::string replay_out;
  int replay_threads = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json")->required();
  replay_cmd->add_option("--out", replay_out, "Output directory (default: the recorded one)");
  replay_cmd->add_option("--threads", replay_threads, "Override the recorded thread count");

  std::vector<const char*> argv{"elca"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit_cmd) cmd_fit(fit_args);
    if (*sel_cmd) cmd_select(sel_args);
    if (*sim_cmd) cmd_simulate(sim_args);
    if (*size_cmd) cmd_sizedist(size_args);
    if (*replay_cmd) {
      const Json manifest = io::read_json_file(manifest_path);
      if (manifest.value("command", "") == "replay") throw ValidationError("cannot replay a replay manifest");
      return run(replay_args(manifest, replay_out, replay_threads), out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace elca::cli
