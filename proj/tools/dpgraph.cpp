// dpgraph: generators, APSP and S2G drivers, sensitivity sweeps, plan dumps
// and oracle suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dpgraph/apsp.hpp"
#include "dpgraph/cost.hpp"
#include "dpgraph/errors.hpp"
#include "dpgraph/io.hpp"
#include "dpgraph/partition.hpp"
#include "dpgraph/planner.hpp"
#include "dpgraph/s2g.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace dpg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;

// Options in this group do not change any output and stay out of the
// embedded config.
const char* const kRuntimeGroup = "Runtime";

// JSON config files for CLI11: nested objects address subcommands.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    ojson j;
    try {
      j = ojson::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

  static ojson dump(const CLI::App* app, bool default_also) {
    ojson j = ojson::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || opt->get_group() == kRuntimeGroup) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help") continue;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        if (opt->get_type_size() == 0) {
          j[name] = true;
        } else if (res.size() == 1) {
          j[name] = typed(res.front());
        } else {
          ojson a = ojson::array();
          for (const auto& r : res) a.push_back(typed(r));
          j[name] = a;
        }
      } else if (default_also) {
        if (opt->get_type_size() == 0) j[name] = false;
        else j[name] = typed(opt->get_default_str());
      }
    }
    for (const CLI::App* sub : app->get_subcommands())
      if (sub->parsed()) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }

 private:
  // Numbers, booleans and bracketed lists keep their JSON type; anything
  // else stays a string.
  static ojson typed(const std::string& s) {
    if (s.empty()) return s;
    const char c = s.front();
    const bool looks = c == '[' || c == '-' || (c >= '0' && c <= '9') || s == "true" || s == "false";
    if (!looks) return s;
    ojson v = ojson::parse(s, nullptr, false);
    if (!v.is_discarded()) return v;
    if (c == '[' && s.back() == ']') {
      // CLI11 renders vector defaults as [a,b]; unquoted items stay strings.
      ojson a = ojson::array();
      std::istringstream in(s.substr(1, s.size() - 2));
      for (std::string item; std::getline(in, item, ',');) a.push_back(typed(item));
      return a;
    }
    return s;
  }

  static void collect(const ojson& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      auto scalar = [](const ojson& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
  }
};

struct Global {
  std::uint64_t seed = 1;
  std::string out = "out";
  int threads = 0;
};

class VerifyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path out_dir(const Global& g) {
  fs::path p(g.out);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << s;
}

std::string config_json(const CLI::App& root) { return JsonConfig::dump(&root, true).dump(); }

void write_config(const fs::path& dir, const CLI::App& root) {
  write_text(dir / "config.json", JsonConfig::dump(&root, true).dump(2) + "\n");
}

// "32K", "1M", "4096".
std::uint64_t parse_bytes(std::string s) {
  if (s.empty()) throw ArgumentError("empty size");
  std::uint64_t mult = 1;
  const char last = static_cast<char>(std::toupper(static_cast<unsigned char>(s.back())));
  if (last == 'K') mult = 1024;
  if (last == 'M') mult = 1024 * 1024;
  if (mult != 1) s.pop_back();
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw ArgumentError("bad size '" + s + "'");
  return v * mult;
}

// Comma-separated sizes; "a..b" doubles from a up to b.
std::vector<std::uint64_t> parse_byte_list(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : items) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_bytes(item));
      continue;
    }
    const std::uint64_t lo = parse_bytes(item.substr(0, dots)), hi = parse_bytes(item.substr(dots + 2));
    if (lo == 0 || lo > hi) throw ArgumentError("bad range '" + item + "'");
    for (std::uint64_t v = lo; v <= hi; v *= 2) out.push_back(v);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(9);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::uint32_t n = 1000;
  double p = 0.01;
  std::uint32_t k = 10;
  Weight wmin = 1, wmax = 100;
  std::uint32_t cluster_size = 32, clusters_per_group = 8;
  double p_cluster = 0.3, p_group = 0.01, p_global = 1e-4;
  std::size_t bases = 5000;
  double bubble_rate = 0.02;
  std::size_t reads = 0, read_len = 100;
  double sub_rate = 0.01;
};

void emit_graph(const Global& g, const CLI::App& root, const WeightedGraph& graph) {
  const fs::path dir = out_dir(g);
  std::ostringstream s;
  s << "# config " << config_json(root) << "\n";
  io::write_edge_list(s, graph);
  write_text(dir / "graph.edges", s.str());
  std::cout << "n=" << graph.num_vertices() << " edges=" << graph.num_edges() << " seed=" << g.seed << "\n";
}

void run_gen_genome(const Global& g, const CLI::App& root, const GenArgs& a) {
  const SyntheticGenome sg = gen_genome(a.bases, a.bubble_rate, g.seed);
  const fs::path dir = out_dir(g);
  io::write_gfa((dir / "genome.gfa").string(), sg.gfa);
  const std::vector<Read> ref{{"reference", sg.reference}};
  io::write_fasta((dir / "reference.fa").string(), ref);
  const GenomeGraph graph = sg.gfa.expand();
  if (a.reads > 0) {
    const ReadBatch rb = gen_reads(graph, a.reads, a.read_len, a.sub_rate, g.seed + 1);
    io::write_fasta((dir / "reads.fa").string(), rb.reads);
  }
  // Round trip: the written files must load and pass the graph invariants.
  const GenomeGraph back = io::load_genome_graph((dir / "genome.gfa").string());
  if (back.bases() != graph.bases()) throw ConsistencyError("written GFA does not reload to the same graph");
  write_config(dir, root);
  std::cout << "nodes=" << graph.size() << " edges=" << graph.num_edges() << " segments=" << sg.gfa.segments.size()
            << " reads=" << a.reads << " seed=" << g.seed << "\n";
}

// ---------------------------------------------------------------------------
// apsp

struct ApspArgs {
  std::string graph;
  std::uint32_t max_tile = 256;
  bool verify = false;
  bool model = false;
  std::string queries;
};

int run_apsp(const Global& g, const CLI::App& root, const ApspArgs& a) {
  auto graph = std::make_shared<WeightedGraph>(io::read_edge_list(a.graph));
  WorkloadDescriptor w;
  w.kind = WorkloadKind::Apsp;
  w.graph = a.graph;
  w.graph_data = graph;
  w.max_tile = a.max_tile;
  w.seed = g.seed;
  const ExecutionPlan plan = lower(w);
  const ExecutionResult res = execute(plan, {a.model});
  const ApspResult& r = *res.apsp;
  const fs::path dir = out_dir(g);
  write_config(dir, root);
  write_text(dir / "plan.json", plan_to_json(plan) + "\n");

  const std::uint32_t n = graph->num_vertices();
  std::vector<Weight> dense;
  if (n <= 512 || (n <= 16384 && a.queries.empty())) dense = dense_matrix(r);
  if (!dense.empty()) {
    std::ofstream f(dir / (n <= 512 ? "distances.tsv" : "distances.bin"), std::ios::binary);
    if (n <= 512) io::write_matrix_tsv(f, dense, n);
    else io::write_matrix_binary(f, dense, n);
  }
  if (!a.queries.empty()) {
    std::ifstream q(a.queries);
    if (!q) throw ArgumentError("cannot open " + a.queries);
    std::ofstream f(dir / "queries.tsv", std::ios::binary);
    std::uint64_t u, v;
    while (q >> u >> v) {
      const Weight d = r.query(static_cast<VertexId>(u), static_cast<VertexId>(v));
      f << u << '\t' << v << '\t';
      if (d >= kInf) f << "inf";
      else f << d;
      f << '\n';
    }
  }
  if (res.cost) {
    std::ofstream js(dir / "report.json", std::ios::binary), cs(dir / "report.csv", std::ios::binary);
    write_report_json(js, *res.cost);
    write_report_csv(cs, *res.cost);
  }
  std::cout << "n=" << n << " levels=" << r.hierarchy.depth() << " mode=" << (r.mode == ApspMode::FullDense ? "dense" : "lazy")
            << "\n";
  if (a.verify) {
    if (n > kDenseLimit) {
      std::cout << "verify: SKIP (n > " << kDenseLimit << ")\n";
    } else {
      const std::vector<Weight> oracle = dense_apsp(*graph);
      if (dense.empty()) dense = dense_matrix(r);
      for (std::size_t i = 0; i < oracle.size(); ++i)
        if (oracle[i] != dense[i]) {
          std::ostringstream m;
          m << "first mismatch at (" << i / n << ", " << i % n << "): got " << dense[i] << ", expected " << oracle[i];
          throw VerifyFailure(m.str());
        }
      std::cout << "verify: PASS\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// s2g

struct S2gArgs {
  std::string graph, reads;
  std::string mode = "auto";
  std::string carry = "pred";
  std::vector<std::uint32_t> widths{kDefaultWindow};
  bool verify = false;
  bool model = false;
};

int run_s2g(const Global& g, const CLI::App& root, const S2gArgs& a) {
  auto genome = std::make_shared<GenomeGraph>(io::load_genome_graph(a.graph));
  auto reads = std::make_shared<ReadBatch>();
  reads->reads = io::read_fasta(a.reads);
  const fs::path dir = out_dir(g);
  write_config(dir, root);
  std::vector<std::size_t> reference_scores;
  for (std::size_t wi = 0; wi < a.widths.size(); ++wi) {
    const std::uint32_t width = a.widths[wi];
    WorkloadDescriptor w;
    w.kind = WorkloadKind::S2g;
    w.graph = a.graph;
    w.reads = a.reads;
    w.genome_data = genome;
    w.reads_data = reads;
    w.width = width;
    w.carry = a.carry == "self" ? CarryMode::SelfCarry : CarryMode::PredCarry;
    w.seed = g.seed;
    w.mapping = a.mode == "short" ? MappingChoice::Short : a.mode == "long" ? MappingChoice::Long : MappingChoice::Auto;
    const ExecutionPlan plan = lower(w);
    const ExecutionResult res = execute(plan, {a.model});
    const std::string suffix = a.widths.size() > 1 ? "_w" + std::to_string(width) : "";
    write_text(dir / ("plan" + suffix + ".json"), plan_to_json(plan) + "\n");
    std::ofstream f(dir / ("scores" + suffix + ".tsv"), std::ios::binary);
    f << "# read_id\tscore\tend_node\n";
    for (std::size_t i = 0; i < res.read_ids.size(); ++i) {
      const AlignResult& ar = res.alignments[i];
      f << res.read_ids[i] << '\t' << ar.score_max << '\t';
      if (ar.end_nodes.empty()) f << '-';
      else f << ar.end_nodes.front();
      f << '\n';
    }
    if (res.cost) {
      std::ofstream js(dir / ("report" + suffix + ".json"), std::ios::binary);
      std::ofstream cs(dir / ("report" + suffix + ".csv"), std::ios::binary);
      write_report_json(js, *res.cost);
      write_report_csv(cs, *res.cost);
      std::cout << "W=" << width << " throughput=" << fmt(throughput(*res.cost, res.read_ids.size())) << " reads/s\n";
    }
    std::vector<std::size_t> scores;
    for (const auto& ar : res.alignments) scores.push_back(ar.score_max);
    if (wi == 0) reference_scores = scores;
    else if (scores != reference_scores)
      throw VerifyFailure("scores differ between W=" + std::to_string(a.widths[0]) + " and W=" + std::to_string(width));
    if (a.verify) {
      for (std::size_t i = 0; i < res.read_ids.size(); ++i) {
        const Read& rd = reads->reads[i];
        const AlignResult ref = align_reference(*genome, rd.seq);
        if (ref.score_max != res.alignments[i].score_max || ref.end_nodes != res.alignments[i].end_nodes)
          throw VerifyFailure("read " + rd.id + ": score " + std::to_string(res.alignments[i].score_max) +
                              ", oracle " + std::to_string(ref.score_max));
      }
      std::cout << "verify W=" << width << ": PASS\n";
    }
  }
  std::cout << "reads=" << reads->reads.size() << " nodes=" << genome->size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string kind;
  std::string graph;
  std::uint32_t n = 200000, k = 10;
  double p = 0.01;
  std::vector<std::uint32_t> tiles{256, 512, 1024, 2048};
  std::vector<std::uint32_t> counts{16, 32, 64, 96, 128, 192};
  std::vector<std::string> caps{"32K..512K"};
};

int run_sweep(const Global& g, const CLI::App& root, const SweepArgs& a) {
  std::ostringstream csv;
  csv << "# config " << config_json(root) << "\n";
  if (a.kind == "tilesize") {
    const WeightedGraph graph = a.graph.empty() ? gen_nws(a.n, a.k, a.p, g.seed) : io::read_edge_list(a.graph);
    const auto pts = sweep_tile_size(graph, a.tiles, PcmParams{}, g.seed);
    csv << "# columns: tile size, modeled latency (s), latency / latency(N=1024), energy (J), energy / "
           "energy(N=1024), hierarchy depth, components, boundary vertices over all levels\n";
    csv << "N,latency_s,norm_latency,energy_j,norm_energy,depth,components,boundary\n";
    for (const auto& t : pts)
      csv << t.tile << ',' << fmt(t.latency) << ',' << fmt(t.norm_latency) << ',' << fmt(t.energy) << ','
          << fmt(t.norm_energy) << ',' << t.depth << ',' << t.components << ',' << t.boundary << '\n';
  } else if (a.kind == "pe") {
    const auto pts = sweep_pe_density(mixed_workload(g.seed), a.counts, HbmParams{});
    csv << "# columns: PEs per channel, throughput (reads/s), HBM bandwidth utilization\n";
    csv << "pes,throughput,bandwidth_utilization\n";
    for (const auto& p : pts) csv << p.pes << ',' << fmt(p.throughput) << ',' << fmt(p.bandwidth_utilization) << '\n';
  } else if (a.kind == "sram") {
    const auto pts = sweep_sram(long_read_workload(g.seed), parse_byte_list(a.caps), HbmParams{});
    csv << "# columns: shared SRAM bytes, regular HBM bytes per read, irregular HBM bytes per read, throughput "
           "(reads/s)\n";
    csv << "bytes,regular_per_read,irregular_per_read,throughput\n";
    for (const auto& p : pts)
      csv << p.bytes << ',' << fmt(p.regular) << ',' << fmt(p.irregular) << ',' << fmt(p.throughput) << '\n';
  } else if (a.kind == "roofline") {
    struct Row {
      Kernel k;
      std::uint32_t n;
      const char* paper;
    };
    const Row rows[] = {{Kernel::FwClassic, 1024, "0.16"}, {Kernel::FwPartitioned, 1024, "510"}, {Kernel::S2G, 128, "0.052"}};
    csv << "# columns: kernel, size parameter, counting convention, ops, bytes, ops per byte, published value, "
           "byte accounting\n";
    csv << "kernel,n,counting,ops,bytes,intensity,paper_reference,convention\n";
    for (const Row& r : rows)
      for (Counting c : {Counting::LoadOnly, Counting::LoadStore}) {
        const Intensity i = arithmetic_intensity(r.k, r.n, c);
        csv << to_string(r.k) << ',' << r.n << ',' << (c == Counting::LoadOnly ? "load_only" : "load_store") << ','
            << fmt(i.ops) << ',' << fmt(i.bytes) << ',' << fmt(i.value) << ',' << r.paper << ",\"" << i.convention
            << "\"\n";
      }
  } else {
    throw ArgumentError("unknown sweep kind '" + a.kind + "'");
  }
  const fs::path dir = out_dir(g);
  write_text(dir / ("sweep_" + a.kind + ".csv"), csv.str());
  std::cout << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: randomized oracle suites against the reference kernels

struct VerifyArgs {
  std::string suite = "all";
  std::size_t cases = 20;
};

WeightedGraph random_graph(std::mt19937_64& rng, VertexId n) {
  const std::uint64_t seed = rng();
  switch (rng() % 3) {
    case 0: return gen_er(n, std::uniform_real_distribution<double>(0.002, 0.05)(rng) + 2.0 / n, seed);
    case 1: return gen_nws(n, 4, 0.05, seed);
    default: {
      ClusteredParams cp;
      cp.n = n;
      cp.cluster_size = 16;
      cp.clusters_per_group = 4;
      cp.p_cluster = 0.3;
      cp.p_group = 0.02;
      cp.p_global = 0.002;
      return gen_clustered(cp, seed);
    }
  }
}

bool verify_apsp(std::mt19937_64& rng, std::size_t cases, std::ostream& log) {
  for (std::size_t i = 0; i < cases; ++i) {
    const auto n = static_cast<VertexId>(10 + rng() % 300);
    const WeightedGraph g = random_graph(rng, n);
    const std::uint32_t tile = 16u << (rng() % 3);
    ApspOptions o;
    o.seed = rng();
    if (dense_matrix(recursive_apsp(g, tile, o)) != dense_apsp(g)) {
      log << "apsp case " << i << " (n=" << n << ", tile=" << tile << ") mismatches dense FW\n";
      return false;
    }
  }
  return true;
}

bool verify_boundary(std::mt19937_64& rng, std::size_t cases, std::ostream& log) {
  for (std::size_t i = 0; i < cases; ++i) {
    const auto n = static_cast<VertexId>(20 + rng() % 200);
    const WeightedGraph g = random_graph(rng, n);
    const Partition p = kway_partition(g, 2 + rng() % 6, rng());
    const BoundarySet bs = find_boundary(g, p);
    std::vector<DistanceBlock> intra;
    for (const auto& comp : p.components()) {
      DistanceBlock b = DistanceBlock::induced(g, comp);
      floyd_warshall(b);
      intra.push_back(std::move(b));
    }
    const BoundaryGraph bg = build_boundary_graph(g, p, bs, intra);
    const std::vector<Weight> whole = dense_apsp(g);
    const std::vector<Weight> top = dense_apsp(bg.graph);
    const std::size_t m = bg.vertices.size();
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (top[a * m + b] != whole[std::size_t{bg.vertices[a]} * n + bg.vertices[b]]) {
          log << "boundary case " << i << " (n=" << n << ") differs at (" << bg.vertices[a] << ", " << bg.vertices[b]
              << ")\n";
          return false;
        }
  }
  return true;
}

bool verify_s2g(std::mt19937_64& rng, std::size_t cases, std::ostream& log) {
  static const std::uint32_t widths[] = {8, 32, 64, 128, 256};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t bases = 20 + rng() % 400;
    const GenomeGraph g = gen_genome(bases, 0.05, rng()).gfa.expand();
    const std::size_t len = 1 + rng() % std::min<std::size_t>(g.longest_path(), 400);
    const ReadBatch rb = gen_reads(g, 1, len, 0.05, rng());
    const std::string& q = rb.reads.front().seq;
    const AlignResult ref = align_reference(g, q);
    for (std::uint32_t w : widths) {
      AlignOptions o;
      o.width = w;
      const AlignResult got = align_windowed(g, q, o);
      if (got.score_max != ref.score_max || got.end_nodes != ref.end_nodes) {
        log << "s2g case " << i << " (|V|=" << g.size() << ", |q|=" << q.size() << ", W=" << w
            << ") mismatches the reference\n";
        return false;
      }
    }
  }
  return true;
}

int run_verify(const Global& g, const CLI::App& root, const VerifyArgs& a) {
  std::mt19937_64 rng(g.seed);
  ojson report;
  report["config"] = JsonConfig::dump(&root, true);
  bool ok = true;
  auto suite = [&](const char* name, auto fn) {
    if (a.suite != "all" && a.suite != name) return;
    std::ostringstream log;
    const bool pass = fn(rng, a.cases, log);
    ok = ok && pass;
    report["suites"][name] = {{"cases", a.cases}, {"pass", pass}, {"detail", log.str()}};
    std::cout << name << ": " << (pass ? "PASS" : "FAIL") << " (" << a.cases << " cases)\n" << log.str();
  };
  if (a.suite != "all" && a.suite != "apsp" && a.suite != "boundary" && a.suite != "s2g")
    throw ArgumentError("unknown suite '" + a.suite + "'");
  suite("apsp", verify_apsp);
  suite("boundary", verify_boundary);
  suite("s2g", verify_s2g);
  write_text(out_dir(g) / "verify.json", report.dump(2) + "\n");
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive APSP and windowed sequence-to-graph alignment with accelerator cost models"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option defaults; nested objects address subcommands")
      ->group(kRuntimeGroup);
  app.fallthrough();
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str()->group(kRuntimeGroup);
  app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber)
      ->group(kRuntimeGroup);

  // gen
  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate graphs, genomes and reads");
  gen->require_subcommand(1);
  auto* er = gen->add_subcommand("er", "Directed Erdos-Renyi graph");
  er->add_option("--n", ga.n, "Vertices")->capture_default_str()->check(CLI::PositiveNumber);
  er->add_option("--p", ga.p, "Arc probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* nws = gen->add_subcommand("nws", "Newman-Watts-Strogatz graph");
  nws->add_option("--n", ga.n, "Vertices")->capture_default_str()->check(CLI::PositiveNumber);
  nws->add_option("--k", ga.k, "Lattice degree (even)")->capture_default_str();
  nws->add_option("--p", ga.p, "Shortcut probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* cl = gen->add_subcommand("clustered", "Two-level clustered digraph");
  cl->add_option("--n", ga.n, "Vertices")->capture_default_str()->check(CLI::PositiveNumber);
  cl->add_option("--cluster-size", ga.cluster_size)->capture_default_str()->check(CLI::PositiveNumber);
  cl->add_option("--clusters-per-group", ga.clusters_per_group)->capture_default_str()->check(CLI::PositiveNumber);
  cl->add_option("--p-cluster", ga.p_cluster)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cl->add_option("--p-group", ga.p_group)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cl->add_option("--p-global", ga.p_global)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  for (auto* sub : {er, nws, cl}) {
    sub->add_option("--wmin", ga.wmin, "Smallest arc weight")->capture_default_str();
    sub->add_option("--wmax", ga.wmax, "Largest arc weight")->capture_default_str();
  }
  auto* genome = gen->add_subcommand("genome", "Genome graph (GFA), reference and reads (FASTA)");
  genome->add_option("--bases", ga.bases, "Reference length")->capture_default_str()->check(CLI::PositiveNumber);
  genome->add_option("--bubble-rate", ga.bubble_rate, "Bubbles per reference base")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  genome->add_option("--reads", ga.reads, "Reads to sample")->capture_default_str();
  genome->add_option("--read-len", ga.read_len, "Read length")->capture_default_str()->check(CLI::PositiveNumber);
  genome->add_option("--sub-rate", ga.sub_rate, "Per-base substitution rate")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  // apsp
  ApspArgs aa;
  auto* apsp = app.add_subcommand("apsp", "All-pairs shortest paths by recursive partitioning");
  apsp->add_option("--graph", aa.graph, "Edge list")->required()->check(CLI::ExistingFile);
  apsp->add_option("--max-tile", aa.max_tile, "Largest block closed in one tile")
      ->capture_default_str()
      ->check(CLI::Range(2u, 1u << 16));
  apsp->add_flag("--verify", aa.verify, "Compare against dense Floyd-Warshall");
  apsp->add_flag("--model", aa.model, "Attach the matrix-tile cost report");
  apsp->add_option("--queries", aa.queries, "File of 'u v' pairs to answer")->check(CLI::ExistingFile);

  // s2g
  S2gArgs sa;
  auto* s2g = app.add_subcommand("s2g", "Sequence-to-graph alignment");
  s2g->add_option("--graph", sa.graph, "GFA graph")->required()->check(CLI::ExistingFile);
  s2g->add_option("--reads", sa.reads, "FASTA reads")->required()->check(CLI::ExistingFile);
  s2g->add_option("--mode", sa.mode, "Read mapping")->capture_default_str()->check(CLI::IsMember({"auto", "short", "long"}));
  s2g->add_option("--width", sa.widths, "Window width(s); several widths must give identical scores")
      ->capture_default_str()
      ->delimiter(',')
      ->check(CLI::Range(1u, kMaxWindow));
  s2g->add_option("--carry", sa.carry, "Carry-in: pred (exact) or self (literal per-node carry)")
      ->capture_default_str()
      ->check(CLI::IsMember({"pred", "self"}));
  s2g->add_flag("--verify", sa.verify, "Compare against the reference DP");
  s2g->add_flag("--model", sa.model, "Attach the traversal-tile cost report");

  // sweep
  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Sensitivity curves as CSV");
  sweep->add_option("kind", wa.kind, "tilesize | pe | sram | roofline")
      ->required()
      ->check(CLI::IsMember({"tilesize", "pe", "sram", "roofline"}));
  sweep->add_option("--graph", wa.graph, "Edge list for tilesize (default: NWS stand-in)")->check(CLI::ExistingFile);
  sweep->add_option("--n", wa.n, "Stand-in vertices")->capture_default_str();
  sweep->add_option("--k", wa.k, "Stand-in lattice degree")->capture_default_str();
  sweep->add_option("--p", wa.p, "Stand-in shortcut probability")->capture_default_str();
  sweep->add_option("--Ns", wa.tiles, "Tile sizes")->capture_default_str()->delimiter(',');
  sweep->add_option("--counts", wa.counts, "PEs per channel")->capture_default_str()->delimiter(',');
  sweep->add_option("--caps", wa.caps, "SRAM capacities, e.g. 32K..512K")->capture_default_str()->delimiter(',');

  // plan
  std::string descriptor;
  auto* plan = app.add_subcommand("plan", "Lower a workload descriptor and dump the execution plan");
  plan->add_option("--descriptor", descriptor, "Descriptor JSON")->required()->check(CLI::ExistingFile);

  // verify
  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Randomized oracle suites");
  verify->add_option("--suite", va.suite, "apsp | boundary | s2g | all")->capture_default_str();
  verify->add_option("--cases", va.cases, "Cases per suite")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    const WeightRange wr{ga.wmin, ga.wmax};
    if (*er) emit_graph(g, app, gen_er(ga.n, ga.p, g.seed, wr));
    else if (*nws) emit_graph(g, app, gen_nws(ga.n, ga.k, ga.p, g.seed, wr));
    else if (*cl) {
      ClusteredParams cp{ga.n, ga.cluster_size, ga.clusters_per_group, ga.p_cluster, ga.p_group, ga.p_global};
      emit_graph(g, app, gen_clustered(cp, g.seed, wr));
    } else if (*genome) run_gen_genome(g, app, ga);
    else if (*apsp) return run_apsp(g, app, aa);
    else if (*s2g) return run_s2g(g, app, sa);
    else if (*sweep) return run_sweep(g, app, wa);
    else if (*plan) {
      const WorkloadDescriptor w = load_descriptor(descriptor);
      const std::string text = plan_to_json(lower(w)) + "\n";
      write_text(out_dir(g) / "plan.json", text);
      std::cout << text;
    } else if (*verify) return run_verify(g, app, va);
    return kExitOk;
  } catch (const VerifyFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
