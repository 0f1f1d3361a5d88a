#pragma once

#include <stdexcept>
#include <string>

namespace dpg {

/// Base of every error thrown by the library. `kind()` names the failure class
/// so callers (the CLI in particular) can map errors to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define DPG_DEFINE_ERROR(Name, Label)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(Label, what) {}      \
  };

DPG_DEFINE_ERROR(ArgumentError, "argument error")
DPG_DEFINE_ERROR(IndexError, "index error")
DPG_DEFINE_ERROR(DomainError, "domain error")
DPG_DEFINE_ERROR(DuplicateEdgeError, "duplicate edge")
DPG_DEFINE_ERROR(AcyclicityError, "acyclicity error")
DPG_DEFINE_ERROR(AlphabetError, "alphabet error")
DPG_DEFINE_ERROR(LengthError, "length error")
DPG_DEFINE_ERROR(ParseError, "parse error")
DPG_DEFINE_ERROR(ConsistencyError, "consistency error")
DPG_DEFINE_ERROR(RecursionError, "recursion error")
DPG_DEFINE_ERROR(WidthError, "width error")
DPG_DEFINE_ERROR(StateError, "state error")
DPG_DEFINE_ERROR(CapacityError, "capacity error")
DPG_DEFINE_ERROR(ValidationError, "validation error")
DPG_DEFINE_ERROR(DescriptorError, "descriptor error")
DPG_DEFINE_ERROR(EmptyPathError, "empty path")

#undef DPG_DEFINE_ERROR

/// Raised by the plan executor; carries the id of the failing stage.
class StageError : public Error {
 public:
  StageError(int stage_id, const std::string& cause)
      : Error("stage error", "stage " + std::to_string(stage_id) + ": " + cause),
        stage_id_(stage_id) {}
  int stage_id() const noexcept { return stage_id_; }

 private:
  int stage_id_;
};

}  // namespace dpg
