#include "gecrb/align.hpp"

#include <algorithm>

#include "gecrb/errors.hpp"

namespace gecrb {

std::size_t EditSequence::cost() const {
  std::size_t c = 0;
  for (const EditOp& op : ops) {
    if (op.kind != EditKind::Keep) ++c;
  }
  return c;
}

EditSequence align(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // dp[i][j] = cost of aligning a[0..i) to b[0..j), flattened.
  std::vector<std::size_t> dp((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return dp[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  // Backtrace with tie preference Keep > Substitute > Delete > Insert.
  EditSequence seq;
  seq.src_len = n;
  seq.dst_len = m;
  std::size_t i = n;
  std::size_t j = m;
  std::vector<EditOp> rev;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      rev.push_back({EditKind::Keep, i - 1, {}});
      --i;
      --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1 && a[i - 1] != b[j - 1]) {
      rev.push_back({EditKind::Substitute, i - 1, b[j - 1]});
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      rev.push_back({EditKind::Delete, i - 1, {}});
      --i;
    } else {
      rev.push_back({EditKind::Insert, i, b[j - 1]});
      --j;
    }
  }
  seq.ops.assign(rev.rbegin(), rev.rend());
  return seq;
}

TokenSeq apply(const EditSequence& edits, const TokenSeq& a) {
  if (edits.src_len != a.size()) {
    throw ContractError("apply: edit sequence built for length " +
                        std::to_string(edits.src_len) + ", got " +
                        std::to_string(a.size()));
  }
  TokenSeq out;
  out.reserve(edits.dst_len);
  for (const EditOp& op : edits.ops) {
    switch (op.kind) {
      case EditKind::Keep: out.push_back(a[op.src_index]); break;
      case EditKind::Substitute: out.push_back(op.payload); break;
      case EditKind::Insert: out.push_back(op.payload); break;
      case EditKind::Delete: break;
    }
  }
  return out;
}

std::optional<std::size_t> map_position(const EditSequence& edits, std::size_t src_index) {
  if (src_index >= edits.src_len) {
    throw ContractError("map_position: index " + std::to_string(src_index) +
                        " out of range for length " + std::to_string(edits.src_len));
  }
  std::size_t out = 0;
  for (const EditOp& op : edits.ops) {
    switch (op.kind) {
      case EditKind::Insert:
        ++out;
        break;
      case EditKind::Keep:
      case EditKind::Substitute:
        if (op.src_index == src_index) return out;
        ++out;
        break;
      case EditKind::Delete:
        if (op.src_index == src_index) return std::nullopt;
        break;
    }
  }
  throw ContractError("map_position: malformed edit sequence");
}

std::size_t edit_cost(const TokenSeq& a, const TokenSeq& b) {
  // Single-row DP.
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t old = row[j];
      row[j] = std::min({diag + (a[i - 1] == b[j - 1] ? 0 : 1), row[j] + 1, row[j - 1] + 1});
      diag = old;
    }
  }
  return row[m];
}

double normalized_edit_distance(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(edit_cost(a, b)) / static_cast<double>(longest);
}

OpTier classify_op_tier(const EditOp& op) {
  switch (op.kind) {
    case EditKind::Insert: return OpTier::Missing;
    case EditKind::Substitute: return OpTier::Replacement;
    case EditKind::Delete: return OpTier::Unnecessary;
    case EditKind::Keep: break;
  }
  throw ContractError("classify_op_tier: Keep has no tier");
}

std::vector<SpanEdit> extract_edit_spans(const EditSequence& edits) {
  std::vector<SpanEdit> spans;
  bool open = false;
  SpanEdit current;
  auto close = [&]() {
    if (open) {
      spans.push_back(current);
      open = false;
    }
  };
  for (const EditOp& op : edits.ops) {
    if (op.kind == EditKind::Keep) {
      close();
      continue;
    }
    const std::size_t lo = op.src_index;
    const std::size_t hi = op.kind == EditKind::Insert ? op.src_index : op.src_index + 1;
    if (!open) {
      open = true;
      current = SpanEdit{lo, hi, {}};
    } else {
      current.end = std::max(current.end, hi);
    }
    if (op.kind == EditKind::Substitute || op.kind == EditKind::Insert) {
      current.replacement.push_back(op.payload);
    }
  }
  close();
  return spans;
}

OpTier classify_span_tier(const SpanEdit& edit) {
  if (edit.start == edit.end) return OpTier::Missing;
  if (edit.replacement.empty()) return OpTier::Unnecessary;
  return OpTier::Replacement;
}

std::string to_string(OpTier tier) {
  switch (tier) {
    case OpTier::Missing: return "missing";
    case OpTier::Replacement: return "replacement";
    case OpTier::Unnecessary: return "unnecessary";
  }
  throw ContractError("bad OpTier");
}

}  // namespace gecrb
