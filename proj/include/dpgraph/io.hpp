#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dpgraph/graph.hpp"

namespace dpg::io {

// Edge list: `src<TAB>dst<TAB>weight` per line, '#' comments, 0-based ids.
// A `# n=<count>` comment fixes the vertex count (otherwise max id + 1).
WeightedGraph read_edge_list(std::istream& in);
WeightedGraph read_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const WeightedGraph& g);
void write_edge_list(const std::string& path, const WeightedGraph& g);

// GFA subset: `S <id> <sequence>` and `L <from> + <to> +` only.
GfaGraph read_gfa(std::istream& in);
GfaGraph read_gfa(const std::string& path);
void write_gfa(std::ostream& out, const GfaGraph& g);
void write_gfa(const std::string& path, const GfaGraph& g);

/// Reads the GFA subset and expands it to a per-base genome graph.
GenomeGraph load_genome_graph(const std::string& path);

// FASTA: `>id` header followed by one or more sequence lines.
std::vector<Read> read_fasta(std::istream& in);
std::vector<Read> read_fasta(const std::string& path);
void write_fasta(std::ostream& out, std::span<const Read> reads, std::size_t line_width = 80);
void write_fasta(const std::string& path, std::span<const Read> reads);

// Partition dump: `vertex<TAB>component`.
void write_partition(std::ostream& out, std::span<const std::uint32_t> assignment);
std::vector<std::uint32_t> read_partition(std::istream& in);

// Dense distance matrix export.
inline constexpr char kMatrixMagic[4] = {'D', 'P', 'G', 'M'};
/// Binary: 4-byte magic, u32 n, then n*n u32 row-major, all little-endian.
void write_matrix_binary(std::ostream& out, std::span<const Weight> data, std::uint32_t n);
std::vector<Weight> read_matrix_binary(std::istream& in, std::uint32_t& n);
/// TSV with "inf" for unreachable entries. Only for n <= 512.
inline constexpr std::uint32_t kMaxTsvMatrix = 512;
void write_matrix_tsv(std::ostream& out, std::span<const Weight> data, std::uint32_t n);

}  // namespace dpg::io
