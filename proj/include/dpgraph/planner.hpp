#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpgraph/apsp.hpp"
#include "dpgraph/cost.hpp"
#include "dpgraph/graph.hpp"
#include "dpgraph/s2g.hpp"

namespace dpg {

enum class WorkloadKind { Apsp, S2g };

/// Requested read mapping; `Auto` routes each length class via select_mapping.
enum class MappingChoice { Auto, Short, Long };

struct WorkloadDescriptor {
  WorkloadKind kind = WorkloadKind::Apsp;
  std::string graph;  // edge list (Apsp) or GFA (S2g)
  std::string reads;  // FASTA (S2g)
  std::uint32_t max_tile = 256;
  std::uint64_t seed = 0;
  MappingChoice mapping = MappingChoice::Auto;
  std::uint32_t width = kDefaultWindow;
  /// PredCarry is exact; SelfCarry reproduces the literal per-node carry.
  CarryMode carry = CarryMode::PredCarry;
  std::size_t length_threshold = kShortReadThreshold;
  PcmParams pcm{};
  HbmParams hbm{};

  // Inputs given in memory take precedence over the paths above.
  std::shared_ptr<const WeightedGraph> graph_data;
  std::shared_ptr<const GenomeGraph> genome_data;
  std::shared_ptr<const ReadBatch> reads_data;
};

/// Parses the descriptor JSON. Relative paths are resolved against
/// `base_dir`. Unknown keys, kinds or device fields raise DescriptorError.
WorkloadDescriptor parse_descriptor(const std::string& json_text, const std::string& base_dir = ".");
WorkloadDescriptor load_descriptor(const std::string& path);
std::string descriptor_to_json(const WorkloadDescriptor& w);

enum class StageKind { PartitionBuild, FwClose, BoundaryFw, Inject, Merge, MaskBuild, AlignBatch };
enum class TileKind { Matrix, Traversal, Host };

const char* to_string(StageKind k) noexcept;
const char* to_string(TileKind t) noexcept;

struct Stage {
  int id = 0;
  StageKind kind = StageKind::PartitionBuild;
  TileKind tile = TileKind::Host;
  std::int32_t level = -1;  // -1 when not level-scoped
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<MappingMode> mapping;
};

/// Inputs loaded while lowering, shared with execute.
struct PlanInputs {
  WeightedGraph graph;
  GenomeGraph genome;
  std::vector<ReadBatch> batches;  // one per AlignBatch stage, in stage order
  std::vector<std::size_t> read_order;  // original position of each read, batches concatenated
};

struct ExecutionPlan {
  WorkloadDescriptor workload;
  std::vector<Stage> stages;
  std::shared_ptr<const PlanInputs> inputs;

  std::size_t count(StageKind k) const;
};

MappingMode select_mapping(std::size_t read_len, std::size_t threshold = kShortReadThreshold);

/// Apsp: one PartitionBuild per level, FwClose per component, then per
/// non-terminal level a BoundaryFw, an Inject and one Merge per ordered pair
/// of components with non-empty boundaries (base level only when the dense
/// matrix is materialized). S2g: MaskBuild, then one AlignBatch per length
/// class present.
ExecutionPlan lower(const WorkloadDescriptor& w);

/// Throws ConsistencyError unless every input is produced by the descriptor
/// or an earlier stage and every stage sits on a tile that may run it.
void validate_plan(const ExecutionPlan& plan);

std::string plan_to_json(const ExecutionPlan& plan);

struct ExecuteOptions {
  bool cost_model = false;
};

struct ExecutionResult {
  std::optional<ApspResult> apsp;
  // S2g: one entry per read in input order.
  std::vector<std::string> read_ids;
  std::vector<AlignResult> alignments;
  std::vector<BatchResult> batches;
  std::optional<CostReport> cost;
};

/// Runs the plan on the engines. Failures surface as StageError naming the
/// stage that was running.
ExecutionResult execute(const ExecutionPlan& plan, const ExecuteOptions& opts = {});

}  // namespace dpg
