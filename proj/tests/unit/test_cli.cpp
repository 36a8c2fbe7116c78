#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sketch_sfa/cli/commands.hpp"
#include "sketch_sfa/cli/config.hpp"
#include "sketch_sfa/cli/manifest.hpp"

using namespace sketch_sfa::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

// Fresh directory per test case, removed on exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("sketch_sfa_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

std::string make_blobs(const Scratch& s, const std::string& name = "blobs.csv") {
  const std::string path = s / name;
  REQUIRE(run({"gen-data", "--kind", "blobs", "--n", "1024", "--d", "8", "--seed", "3", "--out", path}).code == kExitOk);
  return path;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST_CASE("config: sections, types and verbatim source") {
  const std::string text = "# experiment\n[step1]\nsketch_rows = 2048\n[spectra]\nsource = \"exact\"\n"
                           "[preprocess]\nnormalize = false\n";
  const Config c = Config::parse(text);
  CHECK(c.count("step1.sketch_rows", 0) == 2048);
  CHECK(c.text("spectra.source", "") == "exact");
  CHECK_FALSE(c.flag("preprocess.normalize", true));
  CHECK(c.number("step2.eps", 0.5) == 0.5);
  CHECK(c.source() == text);
}

TEST_CASE("config: schema violations are usage errors") {
  CHECK_THROWS_AS(Config::parse("[step1]\nno_such_key = 1\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[step1]\nsketch_rows = \"many\"\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[step1]\nsketch_rows = 1\nsketch_rows = 2\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[step1]\nsketch_rows = 1 # inline\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("sketch_rows = 1\n"), UsageError);
  CHECK_THROWS_AS(Config::load("/nonexistent/config.toml"), UsageError);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

// ------------------------------------------------------------------ help

TEST_CASE("--help documents every flag of every command") {
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> cases{
      {{"gen-data"}, {"--kind", "--n", "--d", "--classes", "--separation", "--rank", "--noise", "--seed", "--out", "--config"}},
      {{"run", "exact"}, {"--in", "--labels", "--label-column", "--J", "--out", "--config", "--seed"}},
      {{"run", "qi"},
       {"--in", "--labels", "--J", "--eps-target", "--query", "--sample-row", "--draws", "--out", "--config", "--seed"}},
      {{"run", "verify"}, {"--suite", "--out", "--seed"}},
      {{"run", "bench"}, {"--n-grid", "--out", "--config", "--seed"}},
      {{"replay"}, {"--manifest"}},
  };
  for (const auto& [command, flags] : cases) {
    std::vector<std::string> args = command;
    args.emplace_back("--help");
    const Outcome o = run(args);
    CAPTURE(args);
    REQUIRE(o.code == kExitOk);
    for (const auto& f : flags) {
      CAPTURE(f);
      CHECK(o.out.find(f) != std::string::npos);
    }
  }
}

TEST_CASE("unknown flags and missing required flags are usage errors") {
  CHECK(run({"gen-data", "--kind", "blobs", "--out", "x.csv", "--bogus"}).code == kExitUsage);
  CHECK(run({"run", "exact", "--J", "2"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}

// -------------------------------------------------------------- gen-data

TEST_CASE("gen-data: blobs are deterministic and record their class means") {
  Scratch s("blobs");
  const std::vector<std::string> base{"gen-data", "--kind", "blobs", "--classes", "3", "--n", "3000", "--d", "8", "--seed", "7"};
  auto a = base;
  a.insert(a.end(), {"--out", s / "a.csv"});
  auto b = base;
  b.insert(b.end(), {"--out", s / "b.csv"});
  REQUIRE(run(a).code == kExitOk);
  REQUIRE(run(b).code == kExitOk);
  CHECK(slurp(s / "a.csv") == slurp(s / "b.csv"));
  CHECK(line_count(slurp(s / "a.csv")) == 3001);
  const nlohmann::json meta = read_json(s / "a.csv.json");
  CHECK(meta.at("rows") == 3000);
  CHECK(meta.at("provenance").at("class_means").size() == 3);
  CHECK(meta.at("provenance").at("class_means").at(0).size() == 8);
  CHECK(fs::exists(s / "a.csv.manifest.json"));
}

TEST_CASE("gen-data: low-rank records its true singular values") {
  Scratch s("lowrank");
  REQUIRE(run({"gen-data", "--kind", "low-rank", "--n", "200", "--d", "12", "--rank", "5", "--noise", "1e-3", "--out",
               s / "lr.csv"})
              .code == kExitOk);
  const auto sigma = read_json(s / "lr.csv.json").at("provenance").at("sigma").get<std::vector<double>>();
  CHECK(sigma == std::vector<double>{5, 4, 3, 2, 1});
}

TEST_CASE("gen-data: the toy signal is a two-column time series") {
  Scratch s("wiskott");
  REQUIRE(run({"gen-data", "--kind", "wiskott-signal", "--n", "4000", "--out", s / "w.csv"}).code == kExitOk);
  const std::string text = slurp(s / "w.csv");
  CHECK(line_count(text) == 4001);
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(std::count(header.begin(), header.end(), ',') == 1);
  CHECK_FALSE(read_json(s / "w.csv.json").at("has_labels").get<bool>());
}

TEST_CASE("gen-data: invalid parameters exit 2") {
  Scratch s("invalid");
  CHECK(run({"gen-data", "--kind", "blobs", "--classes", "1", "--out", s / "x.csv"}).code == kExitUsage);
  CHECK(run({"gen-data", "--kind", "low-rank", "--d", "4", "--rank", "5", "--out", s / "x.csv"}).code == kExitUsage);
  CHECK(run({"gen-data", "--kind", "spirals", "--out", s / "x.csv"}).code == kExitUsage);
}

// ------------------------------------------------------------------- run

TEST_CASE("run exact reports ascending deltas") {
  Scratch s("exact");
  const std::string data = make_blobs(s);
  const Outcome o = run({"run", "exact", "--in", data, "--labels", "--J", "2", "--out", s / "exact.json"});
  REQUIRE(o.code == kExitOk);
  const auto deltas = read_json(s / "exact.json").at("result").at("deltas").get<std::vector<double>>();
  REQUIRE(deltas.size() == 2);
  CHECK(deltas[0] > 0.0);
  CHECK(deltas[0] <= deltas[1]);
}

TEST_CASE("run qi writes a frequency CSV for --sample-row") {
  Scratch s("qi");
  const std::string data = make_blobs(s);
  const Outcome o = run({"run", "qi", "--in", data, "--labels", "--J", "2", "--eps-target", "0.2", "--sample-row", "5",
                         "--draws", "100000", "--query", "5", "1", "--out", s / "model.json"});
  REQUIRE(o.code == kExitOk);
  std::istringstream csv(slurp(s / "model.json.samples.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "column,count,frequency,expected");
  double total = 0.0;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream fields(line);
    std::string column;
    std::string count;
    std::getline(fields, column, ',');
    std::getline(fields, count, ',');
    total += std::stod(count);
    ++rows;
  }
  CHECK(rows == 2);
  CHECK(total == 100000.0);
  const nlohmann::json q = read_json(s / "model.json.query.json");
  CHECK(q.at("i") == 5);
  CHECK(q.at("j") == 1);
}

TEST_CASE("run qi: a config schema violation exits 2") {
  Scratch s("schema");
  const std::string data = make_blobs(s);
  write_text(s / "bad.toml", "[step1]\nsketch_rows = -3.5\n");
  CHECK(run({"run", "qi", "--in", data, "--labels", "--config", s / "bad.toml", "--out", s / "m.json"}).code == kExitUsage);
  write_text(s / "bad2.toml", "[nowhere]\nkey = 1\n");
  CHECK(run({"run", "qi", "--in", data, "--labels", "--config", s / "bad2.toml", "--out", s / "m.json"}).code ==
        kExitUsage);
}

TEST_CASE("run qi: a pipeline error exits 1 naming its step") {
  Scratch s("pipeline");
  const std::string data = make_blobs(s);
  write_text(s / "huge.toml", "[spectra]\nsigma = 1000000\n");
  const Outcome o = run({"run", "qi", "--in", data, "--labels", "--config", s / "huge.toml", "--out", s / "m.json"});
  CHECK(o.code == kExitRuntime);
  CHECK(o.err.find("step1") != std::string::npos);
}

TEST_CASE("run verify on a healthy suite exits 0 and writes its reports") {
  Scratch s("verify");
  const Outcome o = run({"run", "verify", "--suite", "davis-kahan", "--out", s / "v.jsonl"});
  CHECK(o.code == kExitOk);
  CHECK(line_count(slurp(s / "v.jsonl")) >= 1);
  CHECK(fs::exists(s / "v.jsonl.summary.csv"));
  CHECK(run({"run", "verify", "--suite", "nope", "--out", s / "w.jsonl"}).code == kExitUsage);
}

// ---------------------------------------------------------------- replay

TEST_CASE("replay reproduces primary artifacts and catches tampering") {
  Scratch s("replay");
  const std::string data = make_blobs(s);
  REQUIRE(run({"run", "qi", "--in", data, "--labels", "--J", "2", "--sample-row", "3", "--draws", "2000", "--out",
               s / "model.json"})
              .code == kExitOk);
  const std::string manifest = s / "model.json.manifest.json";
  const Outcome ok = run({"replay", "--manifest", manifest});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("MISMATCH") == std::string::npos);

  nlohmann::json tampered = read_json(manifest);
  tampered["outputs"][0]["hash"] = "0000000000000000";
  write_text(s / "tampered.json", tampered.dump());
  const Outcome bad = run({"replay", "--manifest", s / "tampered.json"});
  CHECK(bad.code == kExitVerification);
  CHECK(bad.out.find("MISMATCH") != std::string::npos);

  // A changed input cannot reproduce anything.
  write_text(data, slurp(data) + "\n");
  CHECK(run({"replay", "--manifest", manifest}).code == kExitVerification);
}
