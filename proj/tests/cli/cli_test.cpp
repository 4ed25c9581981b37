#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "flagcert_cli/commands.hpp"
#include "flagcert_cli/config.hpp"
#include "flagcert_cli/output.hpp"

using namespace flagcert::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = FLAGCERT_CONFIG_DIR;
const fs::path kScratch = FLAGCERT_SCRATCH_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
  fs::path dir;
};

Run run(const std::string& command, const fs::path& config, const std::string& tag,
        void (*tweak)(CommandOptions&) = nullptr) {
  CommandOptions o;
  o.config_path = config.string();
  o.out_dir = (kScratch / tag).string();
  fs::remove_all(o.out_dir);
  if (tweak != nullptr) tweak(o);
  std::ostringstream out, err;
  const int code = run_command(command, o, out, err);
  return {code, out.str(), err.str(), o.out_dir};
}

}  // namespace

TEST_CASE("exit codes follow the contract") {
  CHECK(run("certify", kConfigs / "schottky.json", "exit_pass").code == kPass);
  CHECK(run("certify", kConfigs / "schottky_repelling.json", "exit_fail").code == kFail);
  CHECK(run("limitset", kConfigs / "schottky_repelling.json", "exit_refuse").code == kFail);
  CHECK(run("certify", kConfigs / "malformed.json", "exit_malformed").code == kUsage);
  CHECK(run("certify", kConfigs / "missing.json", "exit_missing").code == kUsage);
  CHECK(run("probe", kConfigs / "single_loop.json", "exit_section").code == kUsage);
  CHECK(run("frobnicate", kConfigs / "schottky.json", "exit_unknown").code == kUsage);
  CHECK(run("gaps", kConfigs / "gaps_jordan.json", "exit_gaps").code == kPass);
  CHECK(run("gaps", kConfigs / "gaps_rotation.json", "exit_gaps_rot").code == kFail);
  CHECK(run("synthesize", kConfigs / "pgl2z.json", "exit_synth").code == kPass);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const Run a = run("limitset", kConfigs / "schottky.json", "det_a");
  const Run b = run("limitset", kConfigs / "schottky.json", "det_b", [](CommandOptions& o) { o.threads = 3; });
  REQUIRE(a.code == kPass);
  REQUIRE(b.code == kPass);
  CHECK(slurp(a.dir / "limitset.csv") == slurp(b.dir / "limitset.csv"));
  const Run c = run("certify", kConfigs / "schottky.json", "det_c");
  const Run d = run("certify", kConfigs / "schottky.json", "det_d");
  CHECK(slurp(c.dir / "certificate.json") == slurp(d.dir / "certificate.json"));
}

TEST_CASE("CSV files carry a header row and 17 significant digits") {
  const Run r = run("limitset", kConfigs / "schottky.json", "csv");
  std::istringstream lines(slurp(r.dir / "limitset.csv"));
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# flagcert", 0) == 0);
  std::getline(lines, line);
  CHECK(line == "x0,x1,path_code,radius_bound");
  const std::regex number(R"(-?[0-9]\.[0-9]{16}e[-+][0-9]{2,3})");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 4);
    CHECK(std::regex_match(cells[0], number));
    CHECK(std::regex_match(cells[1], number));
    CHECK(std::regex_match(cells[3], number));
    ++rows;
  }
  CHECK(rows == 2000);
  CHECK(csv_number(0.1) == "1.0000000000000001e-01");
}

TEST_CASE("every output embeds the config hash and goes stale when the config changes") {
  const fs::path cfg = kScratch / "stale" / "config.json";
  fs::create_directories(cfg.parent_path());
  const std::string text = slurp(kConfigs / "single_loop.json");
  write_file(cfg, text);
  const Run r = run("certify", cfg, "stale_out");
  REQUIRE(r.code == kPass);
  const std::string hash = config_hash(text);
  CHECK(hash.size() == 16);
  for (const auto& entry : fs::directory_iterator(r.dir)) {
    CHECK(embedded_hash(entry.path()) == hash);
    CHECK_FALSE(is_stale(entry.path(), hash));
  }

  // Reformatting keeps the hash; changing a value does not.
  const auto root = text.find('{');
  CHECK(config_hash("  \n" + text.substr(root)) == hash);
  std::string changed = text;
  const auto at = changed.find("0.01");
  REQUIRE(at != std::string::npos);
  changed.replace(at, 4, "0.02");
  const std::string new_hash = config_hash(changed);
  CHECK(new_hash != hash);
  CHECK(is_stale(r.dir / "certificate.json", new_hash));
  CHECK(is_stale(r.dir / "no_such_file.json", hash));
}

TEST_CASE("seed override is recorded") {
  const Run r = run("limitset", kConfigs / "single_loop.json", "seed", [](CommandOptions& o) { o.seed = 99; });
  REQUIRE(r.code == kPass);
  CHECK(slurp(r.dir / "limitset.csv").find(" seed=99 ") != std::string::npos);
}

TEST_CASE("SVG output declares its projection") {
  const Run r = run("limitset", kConfigs / "schottky.json", "svg", [](CommandOptions& o) { o.svg = true; });
  REQUIRE(r.code == kPass);
  const std::string svg = slurp(r.dir / "limitset.svg");
  CHECK(svg.find("<!-- projection:") != std::string::npos);
  CHECK(svg.find("config_hash=" + config_hash(slurp(kConfigs / "schottky.json"))) != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("skipping certification warns") {
  const Run r = run("limitset", kConfigs / "schottky_repelling.json", "skip",
                    [](CommandOptions& o) { o.skip_certify = true; });
  CHECK(r.code == kPass);
  CHECK(r.err.find("certification skipped") != std::string::npos);
}

TEST_CASE("hilbert reports log 3 for the interval example") {
  const Run r = run("hilbert", kConfigs / "interval_hilbert.json", "hilbert");
  REQUIRE(r.code == kPass);
  const std::string report = slurp(r.dir / "hilbert_report.txt");
  std::smatch m;
  REQUIRE(std::regex_search(report, m, std::regex(R"(distance = (\S+))")));
  CHECK(std::abs(std::stod(m[1]) - std::log(3.0)) < 1e-12);
}

TEST_CASE("config errors name the offending key") {
  const fs::path cfg = kScratch / "bad" / "config.json";
  fs::create_directories(cfg.parent_path());
  std::string text = slurp(kConfigs / "single_loop.json");
  text.replace(text.find("\"seed\""), 6, "\"sede\"");
  write_file(cfg, text);
  const Run r = run("certify", cfg, "bad_out");
  CHECK(r.code == kUsage);
  CHECK(r.err.find("sede") != std::string::npos);
}
