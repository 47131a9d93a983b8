#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gecrb/corpus.hpp"

namespace gecrb {

enum class EditKind { Keep, Substitute, Delete, Insert };

// Token-level edit operation. src_index addresses the first sequence; for
// Insert it is the index before which the payload is inserted. Keep and
// Delete carry no payload.
struct EditOp {
  EditKind kind = EditKind::Keep;
  std::size_t src_index = 0;
  std::string payload;

  bool operator==(const EditOp&) const = default;
};

// Ordered edit script between two token sequences. Ops are sorted by
// src_index; every source index carries exactly one of Keep/Substitute/
// Delete; Inserts keep their relative order.
struct EditSequence {
  std::vector<EditOp> ops;
  std::size_t src_len = 0;
  std::size_t dst_len = 0;

  std::size_t cost() const;  // number of non-Keep ops

  bool operator==(const EditSequence&) const = default;
};

// Minimal Levenshtein edit script (unit costs) transforming a into b.
// Backtrace ties resolve Keep > Substitute > Delete > Insert so scripts are
// stable across platforms.
EditSequence align(const TokenSeq& a, const TokenSeq& b);

// Applies the script to `a`; throws ContractError on length mismatch.
TokenSeq apply(const EditSequence& edits, const TokenSeq& a);

// Destination index of the token aligned to source index i, or nullopt for a
// deleted token. Simulates the ops in order tracking the output cursor.
std::optional<std::size_t> map_position(const EditSequence& edits, std::size_t src_index);

// Plain DP edit cost without backtrace.
std::size_t edit_cost(const TokenSeq& a, const TokenSeq& b);

// Token-level Levenshtein cost divided by max(|a|, |b|); 0 for two empties.
double normalized_edit_distance(const TokenSeq& a, const TokenSeq& b);

enum class OpTier { Missing, Replacement, Unnecessary };

// Insert -> Missing, Substitute -> Replacement, Delete -> Unnecessary.
// Keep is a contract error.
OpTier classify_op_tier(const EditOp& op);

// A maximal contiguous run of non-Keep ops, expressed as a span edit:
// source tokens [start, end) become `replacement`. start == end encodes a
// pure insertion.
struct SpanEdit {
  std::size_t start = 0;
  std::size_t end = 0;
  TokenSeq replacement;

  bool operator==(const SpanEdit&) const = default;
};

std::vector<SpanEdit> extract_edit_spans(const EditSequence& edits);

// Span-level tier: insertion -> Missing, deletion -> Unnecessary, anything
// else -> Replacement.
OpTier classify_span_tier(const SpanEdit& edit);

std::string to_string(OpTier tier);

}  // namespace gecrb
