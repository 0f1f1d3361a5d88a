#include "dpgraph/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dpgraph/errors.hpp"

namespace dpg::io {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tok;
  for (std::string t; ss >> t;) tok.push_back(t);
  return tok;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw ParseError("line " + std::to_string(line_no) + ": expected a non-negative integer, got '" +
                     s + "'");
  return std::stoull(s);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError("truncated matrix file");
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

}  // namespace

WeightedGraph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::uint64_t n = 0;
  bool n_fixed = false;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto tok = split_ws(line.substr(1));
      if (!tok.empty() && tok[0].rfind("n=", 0) == 0) {
        n = parse_uint(tok[0].substr(2), line_no);
        n_fixed = true;
      }
      continue;
    }
    auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields");
    const auto src = parse_uint(tok[0], line_no);
    const auto dst = parse_uint(tok[1], line_no);
    const auto w = parse_uint(tok[2], line_no);
    if (w > kMaxEdgeWeight) throw DomainError("line " + std::to_string(line_no) + ": weight too large");
    edges.push_back({static_cast<VertexId>(src), static_cast<VertexId>(dst), static_cast<Weight>(w)});
    if (!n_fixed) n = std::max<std::uint64_t>(n, std::max(src, dst) + 1);
  }
  return WeightedGraph(static_cast<VertexId>(n), std::move(edges), true);
}

WeightedGraph read_edge_list(const std::string& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << "# n=" << g.num_vertices() << "\n";
  for (const Edge& e : g.edges()) out << e.src << '\t' << e.dst << '\t' << e.w << '\n';
}

void write_edge_list(const std::string& path, const WeightedGraph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
}

GfaGraph read_gfa(std::istream& in) {
  GfaGraph g;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tok[0] == "S") {
      if (tok.size() != 3) throw ParseError(where + "S record needs <id> <sequence>");
      std::string seq = tok[2];
      for (char& c : seq) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      for (char c : seq)
        if (c != 'A' && c != 'C' && c != 'G' && c != 'T' && c != 'N')
          throw AlphabetError(where + "character '" + std::string(1, c) + "' in segment " + tok[1]);
      g.segments.push_back({tok[1], std::move(seq)});
    } else if (tok[0] == "L") {
      if (tok.size() < 5) throw ParseError(where + "L record needs <from> + <to> +");
      if (tok[2] != "+" || tok[4] != "+")
        throw ParseError(where + "only forward (+) orientations are supported");
      g.links.emplace_back(tok[1], tok[3]);
    } else {
      throw ParseError(where + "unsupported record type '" + tok[0] + "'");
    }
  }
  return g;
}

GfaGraph read_gfa(const std::string& path) {
  auto in = open_in(path);
  return read_gfa(in);
}

void write_gfa(std::ostream& out, const GfaGraph& g) {
  for (const auto& s : g.segments) out << "S\t" << s.id << '\t' << s.seq << '\n';
  for (const auto& [f, t] : g.links) out << "L\t" << f << "\t+\t" << t << "\t+\n";
}

void write_gfa(const std::string& path, const GfaGraph& g) {
  auto out = open_out(path);
  write_gfa(out, g);
}

GenomeGraph load_genome_graph(const std::string& path) { return read_gfa(path).expand(); }

std::vector<Read> read_fasta(std::istream& in) {
  std::vector<Read> reads;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      auto tok = split_ws(line.substr(1));
      if (tok.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty FASTA header");
      reads.push_back({tok[0], {}});
      continue;
    }
    if (reads.empty()) throw ParseError("line " + std::to_string(line_no) + ": sequence before header");
    for (char c : line)
      reads.back().seq.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return reads;
}

std::vector<Read> read_fasta(const std::string& path) {
  auto in = open_in(path);
  return read_fasta(in);
}

void write_fasta(std::ostream& out, std::span<const Read> reads, std::size_t line_width) {
  for (const Read& r : reads) {
    out << '>' << r.id << '\n';
    for (std::size_t i = 0; i < r.seq.size(); i += line_width)
      out << r.seq.substr(i, line_width) << '\n';
  }
}

void write_fasta(const std::string& path, std::span<const Read> reads) {
  auto out = open_out(path);
  write_fasta(out, reads);
}

void write_partition(std::ostream& out, std::span<const std::uint32_t> assignment) {
  for (std::size_t v = 0; v < assignment.size(); ++v) out << v << '\t' << assignment[v] << '\n';
}

std::vector<std::uint32_t> read_partition(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty() || line[0] == '#') continue;
    auto tok = split_ws(line);
    if (tok.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields");
    rows.emplace_back(parse_uint(tok[0], line_no), parse_uint(tok[1], line_no));
  }
  std::vector<std::uint32_t> assignment(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [v, c] : rows) {
    if (v >= rows.size() || seen[v]) throw ParseError("partition file must list each vertex once");
    seen[v] = true;
    assignment[v] = static_cast<std::uint32_t>(c);
  }
  return assignment;
}

void write_matrix_binary(std::ostream& out, std::span<const Weight> data, std::uint32_t n) {
  if (data.size() != std::size_t{n} * n) throw ArgumentError("matrix size does not match n");
  out.write(kMatrixMagic, 4);
  put_u32(out, n);
  for (Weight w : data) put_u32(out, w);
}

std::vector<Weight> read_matrix_binary(std::istream& in, std::uint32_t& n) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMatrixMagic))
    throw ParseError("bad matrix magic");
  n = get_u32(in);
  std::vector<Weight> data(std::size_t{n} * n);
  for (Weight& w : data) w = get_u32(in);
  return data;
}

void write_matrix_tsv(std::ostream& out, std::span<const Weight> data, std::uint32_t n) {
  if (n > kMaxTsvMatrix) throw ArgumentError("TSV export is limited to n <= 512");
  if (data.size() != std::size_t{n} * n) throw ArgumentError("matrix size does not match n");
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j) out << '\t';
      const Weight w = data[std::size_t{i} * n + j];
      if (w >= kInf)
        out << "inf";
      else
        out << w;
    }
    out << '\n';
  }
}

}  // namespace dpg::io
