#include "sketch_sfa/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sketch_sfa/cli/config.hpp"
#include "sketch_sfa/cli/manifest.hpp"
#include "sketch_sfa/sfa_exact/exact_sfa.hpp"
#include "sketch_sfa/sfa_exact/preprocess.hpp"
#include "sketch_sfa/sfa_qi/model.hpp"
#include "sketch_sfa/sfa_qi/spectra.hpp"
#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"
#include "sketch_sfa/verify/datagen.hpp"
#include "sketch_sfa/verify/parallel.hpp"
#include "sketch_sfa/verify/sublinearity.hpp"
#include "sketch_sfa/verify/suites.hpp"

namespace sketch_sfa::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Rng streams below the command seed. 1 and 2 match the verification
// experiments, so `gen-data --kind blobs` reproduces their raw data.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kPairStream = 2;
constexpr std::uint64_t kBuildStream = 3;
constexpr std::uint64_t kSpectraStream = 4;
constexpr std::uint64_t kQueryStream = 5;
constexpr std::uint64_t kSampleStream = 6;

Config load_config(const std::string& path, const Invocation& invocation) {
  if (invocation.config_text) return Config::parse(*invocation.config_text);
  if (path.empty()) return Config::parse("");
  return Config::load(path);
}

std::string write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw UsageError("failed writing " + path);
  return path;
}

/// Collects what one command read and wrote, then emits its manifest.
class RunRecorder {
 public:
  RunRecorder(std::string command, const std::vector<std::string>& args, std::uint64_t seed, const Config& config)
      : start_(Clock::now()) {
    manifest_.command = std::move(command);
    manifest_.args = args;
    manifest_.seed = seed;
    manifest_.config_text = config.source();
    if (!config.source().empty()) manifest_.config_hash = fnv1a_hex(config.source());
  }

  void input(const std::string& path) { manifest_.inputs.push_back({path, file_hash(path), true}); }
  void output(const std::string& path, bool primary = true) {
    manifest_.outputs.push_back({path, file_hash(path), primary});
  }
  nlohmann::json& ledger() { return manifest_.ledger; }

  void write(const std::string& primary_output, const Invocation& invocation, std::ostream& out) {
    manifest_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    const std::string path = invocation.manifest_path.value_or(manifest_path_for(primary_output));
    write_json_file(path, manifest_);
    out << "manifest: " << path << '\n';
  }

 private:
  RunManifest manifest_;
  Clock::time_point start_;
};

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string kind;
  std::size_t n = 4096;
  std::size_t d = 16;
  std::size_t classes = 3;
  double separation = 8.0;
  std::size_t rank = 5;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

std::vector<std::string> numbered_columns(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

int gen_data(const GenDataArgs& a, const std::vector<std::string>& args, const Invocation& inv, std::ostream& out) {
  const Config config = load_config(a.config, inv);
  RunRecorder rec("gen-data", args, a.seed, config);
  Rng rng = Rng(a.seed).derive(kDataStream);
  DataManifest data;
  data.provenance = {{"generator", a.kind}, {"seed", a.seed}};

  if (a.kind == "blobs") {
    if (a.classes < 2) throw UsageError("--classes must be at least 2");
    if (a.d < 2) throw UsageError("--d must be at least 2");
    if (a.n < 2 * a.classes) throw UsageError("--n must be at least twice --classes");
    const verify::BlobSpec spec{a.n, a.d, a.classes, a.separation};
    Eigen::MatrixXd means;
    const exact::Dataset ds = verify::make_blobs(spec, rng, &means);
    exact::save_dataset(a.out, ds);
    data.rows = ds.rows();
    data.cols = ds.cols();
    data.has_labels = true;
    data.provenance.update(verify::describe(spec));
    data.provenance["label_column"] = "label";
    data.provenance["class_means"] = matrix_to_json(means);
  } else if (a.kind == "wiskott-signal") {
    if (a.n < 4) throw UsageError("--n must be at least 4");
    const exact::Dataset ds = verify::make_wiskott_signal(a.n);
    exact::save_dataset(a.out, ds);
    data.rows = ds.rows();
    data.cols = ds.cols();
    data.provenance["n"] = a.n;
    data.provenance["x1"] = "sin(t) + cos(11 t)^2";
    data.provenance["x2"] = "cos(11 t)";
    data.provenance["slow_source"] = "sin(t)";
  } else {
    if (a.rank < 1 || a.rank > std::min(a.n, a.d)) throw UsageError("--rank must lie in [1, min(n, d)]");
    Eigen::VectorXd sigma(static_cast<Eigen::Index>(a.rank));
    for (Eigen::Index k = 0; k < sigma.size(); ++k) sigma(k) = static_cast<double>(sigma.size() - k);
    const verify::LowRankInstance inst = verify::make_low_rank(a.n, a.d, sigma, a.noise, rng);
    write_csv_file(a.out, inst.a, numbered_columns(a.d));
    data.rows = a.n;
    data.cols = a.d;
    data.provenance["rank"] = a.rank;
    data.provenance["noise"] = a.noise;
    data.provenance["sigma"] = vector_to_json(inst.sigma);
    data.provenance["right_singular_vectors"] = matrix_to_json(inst.v);
  }
  const std::string sidecar = a.out + ".json";
  write_json_file(sidecar, data);
  rec.output(a.out);
  rec.output(sidecar);
  out << "wrote " << a.out << " (" << data.rows << " x " << data.cols << ")\n";
  rec.write(a.out, inv, out);
  return kExitOk;
}

// ------------------------------------------------------------- run exact/qi

struct DataArgs {
  std::string in;
  bool labels = false;
  std::string label_column;
  std::size_t j = 2;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
};

struct Prepared {
  exact::Dataset data;
  exact::DiffMatrix diff;
};

Prepared prepare(const DataArgs& a, const Config& config) {
  std::optional<std::string> label;
  if (!a.label_column.empty()) {
    label = a.label_column;
  } else if (a.labels) {
    label = "label";
  }
  Prepared p;
  p.data = exact::load_dataset(a.in, label);
  if (config.flag("preprocess.normalize", true)) p.data = exact::normalize(p.data);
  const std::string expand = config.text("preprocess.expand", "none");
  if (expand == "quadratic") {
    p.data = exact::normalize(exact::quadratic_expand(p.data, config.count("preprocess.max_expanded_dim", 4096)));
  } else if (expand != "none") {
    throw UsageError("preprocess.expand must be \"none\" or \"quadratic\"");
  }
  Rng pair_rng = Rng(a.seed).derive(kPairStream);
  p.diff = exact::pairwise_differentiate(p.data, config.count("preprocess.max_pairs_per_class", 4096), pair_rng);
  return p;
}

exact::ExactSfaOptions exact_options(const Config& config) {
  exact::ExactSfaOptions o;
  o.rank_tolerance = config.number("exact.rank_tolerance", o.rank_tolerance);
  o.pseudo_inverse = config.flag("exact.pseudo_inverse", o.pseudo_inverse);
  return o;
}

nlohmann::json data_summary(const Prepared& p) {
  return {{"rows", p.data.rows()},
          {"dim", p.data.cols()},
          {"pairs", p.diff.rows()},
          {"mode", exact::to_string(p.data.mode)},
          {"warnings", p.data.warnings}};
}

int run_exact(const DataArgs& a, const std::vector<std::string>& args, const Invocation& inv, std::ostream& out) {
  const Config config = load_config(a.config, inv);
  RunRecorder rec("run exact", args, a.seed, config);
  rec.input(a.in);
  const Prepared p = prepare(a, config);
  const exact::SfaResult r = exact::exact_sfa(p.data.x, p.diff, a.j, exact_options(config));
  write_json_file(a.out, {{"data", data_summary(p)}, {"result", exact::to_json(r)}});
  rec.output(a.out);
  rec.ledger()["x_entry_reads"] = p.data.rows() * p.data.cols();
  out << "deltas:";
  for (Eigen::Index k = 0; k < r.deltas.size(); ++k) out << ' ' << format_double(r.deltas(k));
  out << '\n';
  rec.write(a.out, inv, out);
  return kExitOk;
}

struct QiArgs {
  DataArgs data;
  double eps_target = 0.2;
  std::vector<std::size_t> query;
  std::optional<std::size_t> sample_row;
  std::size_t draws = 10000;
};

void override_params(qi::PipelineParams& p, const Config& c) {
  p.eps1 = c.number("step1.eps", p.eps1);
  p.eta1 = c.number("step1.eta", p.eta1);
  p.delta1 = c.number("step1.delta", p.delta1);
  p.sigma_threshold = c.number("step1.sigma_threshold", p.sigma_threshold);
  p.eps2 = c.number("step2.eps", p.eps2);
  p.delta2 = c.number("step2.delta", p.delta2);
  p.eps3 = c.number("step3.eps", p.eps3);
  p.eps4 = c.number("step4.eps", p.eps4);
  p.delta4 = c.number("step4.delta", p.delta4);
  p.eps5 = c.number("step5.eps", p.eps5);
  p.eta5 = c.number("step5.eta", p.eta5);
  p.delta5 = c.number("step5.delta", p.delta5);
  p.gamma_threshold = c.number("step5.gamma_threshold", p.gamma_threshold);
  p.predicted = qi::predict_errors(p);
}

qi::QiConfig qi_config(const Config& c) {
  qi::QiConfig q;
  q.x_sketch_rows = c.count("step1.sketch_rows", q.x_sketch_rows);
  q.fkv_oversampling = c.number("step1.oversampling", q.fkv_oversampling);
  q.centering_rows = c.count("step1.centering_rows", q.centering_rows);
  q.centering_tolerance = c.number("step1.centering_tolerance", q.centering_tolerance);
  q.max_product_samples = c.count("step2.max_samples", q.max_product_samples);
  q.zdot_sketch_rows = c.count("step5.sketch_rows", q.zdot_sketch_rows);
  q.norm_samples = c.count("step5.norm_samples", q.norm_samples);
  q.matvec.cap_factor = c.number("sampling.cap_factor", q.matvec.cap_factor);
  return q;
}

qi::QueryMode query_mode(const Config& c) {
  const std::string mode = c.text("query.mode", "estimated");
  if (mode == "estimated") return qi::QueryMode::Estimated;
  if (mode == "exact") return qi::QueryMode::Exact;
  throw UsageError("query.mode must be \"estimated\" or \"exact\"");
}

int run_qi(const QiArgs& a, const std::vector<std::string>& args, const Invocation& inv, std::ostream& out) {
  const Config config = load_config(a.data.config, inv);
  RunRecorder rec("run qi", args, a.data.seed, config);
  rec.input(a.data.in);
  const Rng root(a.data.seed);
  const Prepared p = prepare(a.data, config);
  qi::QiInputs inputs = qi::make_qi_inputs(p.data.x, p.diff);

  const std::string source = config.text("spectra.source", "estimated");
  qi::SpectralSummary spectra;
  std::uint64_t spectra_reads = 0;
  if (source == "exact") {
    spectra = qi::summarize(exact::exact_sfa(p.data.x, p.diff, a.data.j, exact_options(config)));
    spectra_reads = p.data.rows() * p.data.cols();
  } else if (source == "estimated") {
    Rng spectra_rng = root.derive(kSpectraStream);
    const LedgerSnapshot before = inputs.x.ledger->snapshot();
    spectra = qi::estimate_spectra(*inputs.x.a, *inputs.xdot.a, spectra_rng, config.count("spectra.rows", 256));
    spectra_reads = (inputs.x.ledger->snapshot() - before).entry_reads;
  } else {
    throw UsageError("spectra.source must be \"estimated\" or \"exact\"");
  }
  spectra.sigma = config.number("spectra.sigma", spectra.sigma);

  qi::PipelineParams params = qi::select_parameters(a.eps_target, spectra, p.data.cols(), a.data.j, a.data.seed);
  override_params(params, config);
  Rng build_rng = root.derive(kBuildStream);
  const qi::QiSfaModel model = qi::build(std::move(inputs), params, build_rng, qi_config(config));

  nlohmann::json doc = model.to_json();
  doc["data"] = data_summary(p);
  write_json_file(a.data.out, doc);
  rec.output(a.data.out);

  std::uint64_t reads = spectra_reads;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : model.steps()) {
    reads += s.x_cost.entry_reads;
    steps.push_back({{"step", s.step}, {"x", s.x_cost}, {"xdot", s.xdot_cost}});
  }
  rec.ledger() = {{"spectra_x_entry_reads", spectra_reads}, {"x_entry_reads", reads}, {"steps", steps}};
  out << "x entry reads: " << reads << " of " << p.data.rows() * p.data.cols() << '\n';
  for (const auto& w : model.warnings()) out << "warning: " << w << '\n';

  if (!a.query.empty()) {
    const std::size_t i = a.query[0];
    const std::size_t j = a.query[1];
    const qi::QueryMode mode = query_mode(config);
    const double eps = config.number("query.eps", 0.1);
    const double delta = config.number("query.delta", 0.1);
    Rng query_rng = root.derive(kQueryStream);
    const double value = model.query_entry(i, j, mode, eps, delta, query_rng);
    const double exact_value = model.output_row(i)(static_cast<Eigen::Index>(j));
    const std::string path = a.data.out + ".query.json";
    write_json_file(path, {{"i", i},
                           {"j", j},
                           {"mode", mode == qi::QueryMode::Exact ? "exact" : "estimated"},
                           {"eps", eps},
                           {"delta", delta},
                           {"value", value},
                           {"exact_value", exact_value},
                           {"scale", "Y / sqrt(n)"}});
    rec.output(path);
    out << "Y_hat(" << i << ", " << j << ") = " << format_double(value) << '\n';
  }

  if (a.sample_row) {
    const std::size_t i = *a.sample_row;
    if (a.draws == 0) throw UsageError("--draws must be positive");
    const Eigen::VectorXd row = model.output_row(i);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(row.size()), 0);
    Rng sample_rng = root.derive(kSampleStream);
    for (std::size_t k = 0; k < a.draws; ++k) ++counts[model.sample_output_row(i, sample_rng)];
    std::ostringstream csv;
    csv << "column,count,frequency,expected\n";
    const double mass = row.squaredNorm();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      csv << c << ',' << counts[c] << ','
          << format_double(static_cast<double>(counts[c]) / static_cast<double>(a.draws)) << ','
          << format_double(row(static_cast<Eigen::Index>(c)) * row(static_cast<Eigen::Index>(c)) / mass) << '\n';
    }
    rec.output(write_text(a.data.out + ".samples.csv", csv.str()));
  }
  rec.write(a.data.out, inv, out);
  return kExitOk;
}

// ------------------------------------------------------------- run verify

struct VerifyArgs {
  std::string suite = "all";
  std::string out;
  std::uint64_t seed = verify::SuiteOptions{}.base_seed;
};

int run_verify(const VerifyArgs& a, const std::vector<std::string>& args, const Invocation& inv, std::ostream& out) {
  const auto& registry = verify::suite_registry();
  const bool known = a.suite == "all" || std::any_of(registry.begin(), registry.end(),
                                                       [&](const verify::Suite& s) { return s.name == a.suite; });
  if (!known) throw UsageError("unknown suite '" + a.suite + "'");
  const Config config = load_config("", inv);
  RunRecorder rec("run verify", args, a.seed, config);
  verify::SuiteOptions options;
  options.base_seed = a.seed;
  const std::vector<verify::TrialReport> reports = verify::run_suite(a.suite, options);

  std::ostringstream jsonl;
  std::ostringstream summary;
  std::ostringstream timing;
  verify::write_jsonl(jsonl, reports);
  verify::write_summary_csv(summary, reports);
  verify::write_timing_csv(timing, reports);
  rec.output(write_text(a.out, jsonl.str()));
  rec.output(write_text(a.out + ".summary.csv", summary.str()));
  rec.output(write_text(a.out + ".timing.csv", timing.str()), false);

  bool failed = false;
  std::uint64_t reads = 0;
  for (const auto& r : reports) {
    out << verify::summary_line(r) << '\n';
    if (!r.pass && r.details.value("required", true)) failed = true;
    reads += r.ledger.entry_reads;
  }
  rec.ledger()["entry_reads"] = reads;
  rec.write(a.out, inv, out);
  return failed ? kExitVerification : kExitOk;
}

// -------------------------------------------------------------- run bench

struct BenchArgs {
  std::vector<std::size_t> grid{4096, 16384, 65536};
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a, const std::vector<std::string>& args, const Invocation& inv, std::ostream& out) {
  const Config config = load_config(a.config, inv);
  RunRecorder rec("run bench", args, a.seed, config);
  std::vector<std::size_t> grid = a.grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw UsageError("--n-grid is empty");

  verify::ExperimentConfig ec;
  ec.blobs.d = config.count("bench.d", ec.blobs.d);
  ec.blobs.classes = config.count("bench.classes", ec.blobs.classes);
  ec.blobs.separation = config.number("bench.separation", ec.blobs.separation);
  ec.j = config.count("bench.j", ec.j);
  ec.eps_target = config.number("bench.eps_target", ec.eps_target);
  ec.max_pairs_per_class = config.count("preprocess.max_pairs_per_class", ec.max_pairs_per_class);
  ec.spectra_rows = config.count("spectra.rows", ec.spectra_rows);
  ec.qi = qi_config(config);

  // Each worker writes its own part file; the parent merges them in grid order.
  const auto part_path = [&](std::size_t k) { return a.out + ".part" + std::to_string(k); };
  verify::parallel_for(grid.size(), [&](std::size_t k) {
    const auto start = Clock::now();
    const verify::ReadPoint pt = verify::measure_read_point(ec, grid[k], a.seed);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    write_json_file(part_path(k), {{"n", pt.n},
                                   {"sampled_reads", pt.sampled_reads},
                                   {"exact_reads", pt.exact_reads},
                                   {"relative_error", pt.relative_error},
                                   {"seconds", seconds}});
  });

  std::vector<verify::ReadPoint> points;
  std::ostringstream csv;
  std::ostringstream timing;
  csv << "n,sampled_x_reads,exact_x_reads,read_fraction,relative_error\n";
  timing << "n,seconds\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const nlohmann::json part = read_json_file(part_path(k));
    std::filesystem::remove(part_path(k));
    verify::ReadPoint pt;
    pt.n = part.at("n").get<std::size_t>();
    pt.sampled_reads = part.at("sampled_reads").get<std::uint64_t>();
    pt.exact_reads = part.at("exact_reads").get<std::uint64_t>();
    pt.relative_error = part.at("relative_error").get<double>();
    points.push_back(pt);
    csv << pt.n << ',' << pt.sampled_reads << ',' << pt.exact_reads << ','
        << format_double(static_cast<double>(pt.sampled_reads) / static_cast<double>(pt.exact_reads)) << ','
        << format_double(pt.relative_error) << '\n';
    timing << pt.n << ',' << format_double(part.at("seconds").get<double>()) << '\n';
  }
  const verify::SublinearityResult summary = verify::summarize_points(points);
  rec.output(write_text(a.out, csv.str()));
  const std::string summary_path = a.out + ".summary.json";
  write_json_file(summary_path, verify::to_json(summary));
  rec.output(summary_path);
  rec.output(write_text(a.out + ".timing.csv", timing.str()), false);
  rec.ledger() = verify::to_json(summary);

  out << csv.str();
  out << "sampled read growth " << format_double(summary.sampled_growth) << " over n ratio "
      << format_double(summary.n_ratio) << '\n';
  rec.write(a.out, inv, out);
  return kExitOk;
}

// ------------------------------------------------------------------ replay

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const RunManifest m = read_json_file(manifest_path).get<RunManifest>();
  if (m.version != kVersion) err << "note: manifest written by version " << m.version << '\n';
  for (const auto& f : m.inputs) {
    if (file_hash(f.path) != f.hash) {
      err << "input changed since the recorded run: " << f.path << '\n';
      return kExitVerification;
    }
  }
  Invocation inv;
  if (!m.config_hash.empty()) inv.config_text = m.config_text;
  inv.manifest_path = manifest_path + ".replay.json";
  const int code = run_cli(m.args, out, err, inv);
  if (code != kExitOk) return code;

  bool diverged = false;
  for (const auto& f : m.outputs) {
    if (!f.primary) continue;
    const bool same = file_hash(f.path) == f.hash;
    out << (same ? "match    " : "MISMATCH ") << f.path << '\n';
    diverged = diverged || !same;
  }
  return diverged ? kExitVerification : kExitOk;
}

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--in", a.in, "input CSV")->required();
  cmd->add_flag("--labels", a.labels, "the CSV has a 'label' column (classification data)");
  cmd->add_option("--label-column", a.label_column, "label column name or zero-based index");
  cmd->add_option("-J,--J", a.j, "number of slow features")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "output JSON")->required();
  cmd->add_option("--config", a.config, "TOML config");
  cmd->add_option("--seed", a.seed, "seed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Invocation& invocation) {
  CLI::App app{"Sampling-based slow feature analysis"};
  app.name("sketch_sfa");
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset and its ground truth");
  gen_cmd->add_option("--kind", gen.kind)->required()->check(CLI::IsMember({"blobs", "wiskott-signal", "low-rank"}));
  gen_cmd->add_option("--n", gen.n, "rows");
  gen_cmd->add_option("--d", gen.d, "columns");
  gen_cmd->add_option("--classes", gen.classes, "blob classes");
  gen_cmd->add_option("--separation", gen.separation, "blob mean separation");
  gen_cmd->add_option("--rank", gen.rank, "low-rank: rank");
  gen_cmd->add_option("--noise", gen.noise, "low-rank: noise standard deviation")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "seed");
  gen_cmd->add_option("--out", gen.out, "output CSV")->required();
  gen_cmd->add_option("--config", gen.config, "TOML config");

  CLI::App* run_cmd = app.add_subcommand("run", "run a pipeline or a verification");
  run_cmd->require_subcommand(1);

  DataArgs exact_args;
  CLI::App* exact_cmd = run_cmd->add_subcommand("exact", "dense SFA");
  add_data_options(exact_cmd, exact_args);

  QiArgs qi_args;
  CLI::App* qi_cmd = run_cmd->add_subcommand("qi", "sampled SFA");
  add_data_options(qi_cmd, qi_args.data);
  qi_cmd->add_option("--eps-target", qi_args.eps_target, "target output error")->check(CLI::PositiveNumber);
  qi_cmd->add_option("--query", qi_args.query, "estimate Y_hat(I, J)")->expected(2);
  qi_cmd->add_option("--sample-row", qi_args.sample_row, "sample columns of Y_hat(I, .)");
  qi_cmd->add_option("--draws", qi_args.draws, "draws for --sample-row");

  VerifyArgs verify_args;
  CLI::App* verify_cmd = run_cmd->add_subcommand("verify", "run verification suites");
  verify_cmd->add_option("--suite", verify_args.suite, "suite name or 'all'");
  verify_cmd->add_option("--out", verify_args.out, "JSONL report")->required();
  verify_cmd->add_option("--seed", verify_args.seed, "base seed");

  BenchArgs bench_args;
  CLI::App* bench_cmd = run_cmd->add_subcommand("bench", "X-entry reads against n");
  bench_cmd->add_option("--n-grid", bench_args.grid, "comma-separated sizes")->delimiter(',');
  bench_cmd->add_option("--out", bench_args.out, "CSV report")->required();
  bench_cmd->add_option("--config", bench_args.config, "TOML config");
  bench_cmd->add_option("--seed", bench_args.seed, "seed");

  std::string manifest;
  CLI::App* replay_cmd = app.add_subcommand("replay", "rerun a manifest and compare outputs");
  replay_cmd->add_option("--manifest", manifest, "manifest JSON")->required();

  std::vector<const char*> argv{"sketch_sfa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return gen_data(gen, args, invocation, out);
    if (exact_cmd->parsed()) return run_exact(exact_args, args, invocation, out);
    if (qi_cmd->parsed()) return run_qi(qi_args, args, invocation, out);
    if (verify_cmd->parsed()) return run_verify(verify_args, args, invocation, out);
    if (bench_cmd->parsed()) return run_bench(bench_args, args, invocation, out);
    return replay(manifest, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error";
    if (!e.step().empty()) err << " in " << e.step();
    err << " (" << to_string(e.kind()) << "): " << e.message() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sketch_sfa::cli
