#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#ifndef DPGRAPH_CLI
#error "DPGRAPH_CLI must name the built command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path& root() {
  static const fs::path r = [] {
    fs::path p = fs::temp_directory_path() / "dpgraph_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return r;
}

// Runs the CLI with stdout/stderr captured to <root>/<tag>.log.
int run(const std::string& tag, const std::string& args) {
  const std::string cmd = std::string(DPGRAPH_CLI) + " " + args + " > " + (root() / (tag + ".log")).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string out(const std::string& name) { return "--out " + (root() / name).string(); }
fs::path at(const std::string& name, const std::string& file) { return root() / name / file; }

std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> r;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, line.find('\t') != std::string::npos ? '\t' : ',');) cells.push_back(c);
    r.push_back(cells);
  }
  return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen er is reproducible and embeds its config") {
  REQUIRE(run("er1", "gen er --n 300 --p 0.01 --seed 42 " + out("er1")) == 0);
  REQUIRE(run("er2", "gen er --n 300 --p 0.01 --seed 42 " + out("er2")) == 0);
  REQUIRE(run("er3", "gen er --n 300 --p 0.01 --seed 43 " + out("er3")) == 0);
  const std::string a = slurp(at("er1", "graph.edges"));
  CHECK(a == slurp(at("er2", "graph.edges")));
  CHECK(a != slurp(at("er3", "graph.edges")));
  CHECK(a.find("# config") != std::string::npos);
  CHECK(slurp(root() / "er1.log").find("n=300") != std::string::npos);
}

TEST_CASE("apsp on the four vertex example") {
  fs::create_directories(root() / "tiny");
  {
    std::ofstream f(root() / "tiny" / "g.edges");
    f << "# n=5\n0\t1\t3\n1\t2\t4\n0\t2\t10\n2\t3\t1\n0\t3\t20\n";
  }
  REQUIRE(run("tiny", "apsp --graph " + (root() / "tiny" / "g.edges").string() + " --verify " + out("tiny_out")) == 0);
  auto d = rows(at("tiny_out", "distances.tsv"));
  REQUIRE(d.size() == 5);
  CHECK(d[0][2] == "7");
  CHECK(d[0][3] == "8");
  CHECK(d[1][3] == "5");
  // Vertex 4 is isolated.
  CHECK(d[0][4] == "inf");
  CHECK(d[4][0] == "inf");
  CHECK(slurp(root() / "tiny.log").find("PASS") != std::string::npos);
  auto cfg = nlohmann::json::parse(slurp(at("tiny_out", "config.json")));
  CHECK(cfg.contains("seed"));
  CHECK(cfg["apsp"]["max-tile"].is_number());
}

TEST_CASE("apsp verify on ER(800) and determinism across threads and reruns") {
  REQUIRE(run("er800", "gen er --n 800 --p 0.005 --seed 7 " + out("er800")) == 0);
  const std::string g = at("er800", "graph.edges").string();
  REQUIRE(run("a1", "apsp --graph " + g + " --max-tile 128 --verify --model " + out("a1")) == 0);
  CHECK(slurp(root() / "a1.log").find("PASS") != std::string::npos);
  REQUIRE(run("a2", "apsp --graph " + g + " --max-tile 128 --verify --model " + out("a2")) == 0);
  REQUIRE(run("a3", "--threads 3 apsp --graph " + g + " --max-tile 128 --model " + out("a3")) == 0);
  REQUIRE(run("a4", "--seed 99 apsp --graph " + g + " --max-tile 128 " + out("a4")) == 0);
  for (const char* f : {"distances.bin", "plan.json", "report.json", "report.csv", "config.json"})
    CHECK(slurp(at("a1", f)) == slurp(at("a2", f)));
  CHECK(slurp(at("a1", "distances.bin")) == slurp(at("a3", "distances.bin")));
  CHECK(slurp(at("a1", "report.json")) == slurp(at("a3", "report.json")));
  // A different partitioner seed gives the same distances.
  CHECK(slurp(at("a1", "distances.bin")) == slurp(at("a4", "distances.bin")));
}

TEST_CASE("s2g scores, width invariance and mixed batches") {
  REQUIRE(run("genome", "gen genome --bases 5000 --bubble-rate 0.02 --reads 40 --read-len 100 --sub-rate 0 " +
                            out("genome")) == 0);
  const std::string gfa = at("genome", "genome.gfa").string(), fa = at("genome", "reads.fa").string();
  REQUIRE(run("s1", "s2g --graph " + gfa + " --reads " + fa + " --width 32,64,128 --verify --model " + out("s1")) == 0);
  for (auto& r : rows(at("s1", "scores_w32.tsv"))) CHECK(r[1] == "100");
  CHECK(slurp(at("s1", "scores_w32.tsv")) == slurp(at("s1", "scores_w128.tsv")));
  CHECK(slurp(at("s1", "report_w32.json")) != slurp(at("s1", "report_w128.json")));

  // Append long reads: the plan gains a second AlignBatch stage.
  REQUIRE(run("long", "gen genome --bases 5000 --bubble-rate 0.02 --reads 3 --read-len 1000 --sub-rate 0 " +
                          out("long")) == 0);
  {
    std::ofstream f(root() / "mixed.fa");
    f << slurp(fa) << slurp(at("long", "reads.fa"));
  }
  // Ids repeat across the two files; the runner keeps input order.
  REQUIRE(run("mixed", "s2g --graph " + gfa + " --reads " + (root() / "mixed.fa").string() + " --verify " +
                           out("mixed")) == 0);
  auto plan = nlohmann::json::parse(slurp(at("mixed", "plan.json")));
  std::vector<std::string> mappings;
  for (auto& s : plan["stages"])
    if (s["kind"] == "AlignBatch") mappings.push_back(s["mapping"]);
  CHECK(mappings == std::vector<std::string>{"ShortParallel", "LongPipeline"});

  // The literal self carry drops matches across windows: verification fails.
  CHECK(run("selfcarry", "s2g --graph " + gfa + " --reads " + at("long", "reads.fa").string() +
                             " --carry self --width 32 --verify " + out("selfcarry")) == 1);
  CHECK(slurp(root() / "selfcarry.log").find("read") != std::string::npos);
}

TEST_CASE("sweeps write CSV curves") {
  REQUIRE(run("sram", "sweep sram --caps 32K..512K " + out("sram")) == 0);
  auto s = rows(at("sram", "sweep_sram.csv"));
  REQUIRE(s.size() == 6);  // header plus one row per capacity
  CHECK(s[0][0] == "bytes");
  for (std::size_t i = 2; i < s.size(); ++i) CHECK(std::stod(s[i][2]) <= std::stod(s[i - 1][2]));
  CHECK(slurp(at("sram", "sweep_sram.csv")).find("# columns") != std::string::npos);

  REQUIRE(run("roof", "sweep roofline " + out("roof")) == 0);
  const std::string roof = slurp(at("roof", "sweep_roofline.csv"));
  for (const char* k : {"FwClassic", "FwPartitioned", "S2G"}) CHECK(roof.find(k) != std::string::npos);

  REQUIRE(run("pe", "sweep pe --counts 16,64,192 " + out("pe")) == 0);
  CHECK(rows(at("pe", "sweep_pe.csv")).size() == 4);

  REQUIRE(run("nws", "gen nws --n 20000 --k 4 --p 0.01 " + out("nws")) == 0);
  REQUIRE(run("tile", "sweep tilesize --graph " + at("nws", "graph.edges").string() + " --Ns 256,512,1024,2048 " +
                          out("tile")) == 0);
  auto t = rows(at("tile", "sweep_tilesize.csv"));
  REQUIRE(t.size() == 5);
  CHECK(t[3][0] == "1024");
  CHECK(std::stod(t[3][2]) == 1.0);
  REQUIRE(run("tile2", "sweep tilesize --graph " + at("nws", "graph.edges").string() + " --Ns 256,512,1024,2048 " +
                           out("tile2")) == 0);
  CHECK(slurp(at("tile", "sweep_tilesize.csv")) == slurp(at("tile2", "sweep_tilesize.csv")));
}

TEST_CASE("plan and verify subcommands") {
  {
    std::ofstream f(root() / "w.json");
    f << R"({"kind": "apsp", "graph": ")" << at("nws", "graph.edges").string() << R"(", "max_tile": 256})";
  }
  REQUIRE(run("plan", "plan --descriptor " + (root() / "w.json").string() + " " + out("plan")) == 0);
  auto p = nlohmann::json::parse(slurp(at("plan", "plan.json")));
  CHECK(p["stages"].size() > 2);
  REQUIRE(run("verify", "verify --suite all --cases 3 " + out("verify")) == 0);
  auto v = nlohmann::json::parse(slurp(at("verify", "verify.json")));
  CHECK(v.dump().find("FAIL") == std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("u1", "apsp") == 2);
  CHECK(run("u2", "frobnicate") == 2);
  CHECK(run("u3", "gen er --n 10 --p 1.5") == 2);
  CHECK(run("u4", "s2g --graph /nonexistent --reads /nonexistent") == 2);
  CHECK(run("u5", "sweep nonsense " + out("u5")) == 2);
  CHECK(run("u6", "gen nws --n 10 --k 3 " + out("u6")) == 2);
  CHECK(run("help", "--help") == 0);
}

}  // TEST_SUITE
