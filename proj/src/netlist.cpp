// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace nvtwin {

std::string_view netlist_error_name(NetlistErrorKind kind) noexcept {
  switch (kind) {
    case NetlistErrorKind::Syntax: return "SyntaxError";
    case NetlistErrorKind::UnknownOpcode: return "UnknownOpcode";
    case NetlistErrorKind::UnresolvedReference: return "UnresolvedReference";
    case NetlistErrorKind::DuplicateId: return "DuplicateId";
    case NetlistErrorKind::DuplicateSource: return "DuplicateSource";
    case NetlistErrorKind::WeightOutOfRange: return "WeightOutOfRange";
    case NetlistErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case NetlistErrorKind::FanInExceeded: return "FanInExceeded";
    case NetlistErrorKind::IdOutOfRange: return "IdOutOfRange";
  }
  return "Unknown";
}

NetlistError::NetlistError(NetlistErrorKind kind, SourceLocation where, const std::string& message)
    : Error("line " + std::to_string(where.line) + ", column " + std::to_string(where.column) +
            ": " + std::string(netlist_error_name(kind)) + ": " + message),
      kind_(kind),
      where_(where) {}

namespace {

struct Token {
  std::string_view text;
  SourceLocation where;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), {line_no, start + 1}});
  }
  return out;
}

template <typename T>
std::optional<T> to_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_label(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

[[noreturn]] void fail(NetlistErrorKind kind, SourceLocation where, const std::string& msg) {
  throw NetlistError(kind, where, msg);
}

struct NodeDecl {
  std::optional<std::uint16_t> explicit_id;
  std::string name;
  Opcode opcode;
  std::int16_t param{0};
  bool output{false};
  SourceLocation where;
};

struct SourceRef {
  Token ref;
  Weight weight;
};

struct InDecl {
  Token target;
  std::vector<SourceRef> sources;
};

std::uint16_t parse_id(const Token& t) {
  const auto v = to_int<std::uint64_t>(t.text);
  if (!v) fail(NetlistErrorKind::Syntax, t.where, "expected a node id, got '" + std::string(t.text) + "'");
  if (*v >= kAddressSpace) {
    fail(NetlistErrorKind::IdOutOfRange, t.where,
         "node id " + std::string(t.text) + " exceeds the 16-bit address space");
  }
  return static_cast<std::uint16_t>(*v);
}

void check_reference(const Token& t) {
  if (!is_digits(t.text) && !is_label(t.text)) {
    fail(NetlistErrorKind::Syntax, t.where, "expected a node id or label, got '" + std::string(t.text) + "'");
  }
}

NodeDecl parse_node_line(const std::vector<Token>& toks) {
  if (toks.size() < 3) fail(NetlistErrorKind::Syntax, toks[0].where, "expected: node <id|auto> <OPCODE> ...");
  NodeDecl d;
  d.where = toks[1].where;
  if (toks[1].text != "auto") d.explicit_id = parse_id(toks[1]);

  const auto op = parse_opcode(toks[2].text);
  if (!op) fail(NetlistErrorKind::UnknownOpcode, toks[2].where, "unknown opcode '" + std::string(toks[2].text) + "'");
  d.opcode = *op;

  bool seen_param = false;
  bool seen_name = false;
  for (std::size_t i = 3; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.text == "output") {
      if (d.output) fail(NetlistErrorKind::Syntax, t.where, "'output' given twice");
      d.output = true;
    } else if (t.text.starts_with("param=")) {
      if (seen_param) fail(NetlistErrorKind::Syntax, t.where, "'param' given twice");
      seen_param = true;
      const auto v = to_int<std::int64_t>(t.text.substr(6));
      if (!v) fail(NetlistErrorKind::Syntax, t.where, "param must be an integer");
      if (*v < -32768 || *v > 32767) {
        fail(NetlistErrorKind::ParamOutOfRange, t.where, "param " + std::to_string(*v) + " outside [-32768, 32767]");
      }
      d.param = static_cast<std::int16_t>(*v);
    } else if (t.text.starts_with("name=")) {
      if (seen_name) fail(NetlistErrorKind::Syntax, t.where, "'name' given twice");
      seen_name = true;
      d.name = std::string(t.text.substr(5));
      if (!is_label(d.name)) fail(NetlistErrorKind::Syntax, t.where, "invalid label '" + d.name + "'");
    } else {
      fail(NetlistErrorKind::Syntax, t.where, "unexpected token '" + std::string(t.text) + "'");
    }
  }
  return d;
}

InDecl parse_in_line(const std::vector<Token>& toks) {
  if (toks.size() < 3 || toks[2].text != "<-") {
    const auto where = toks.size() > 2 ? toks[2].where : toks.back().where;
    fail(NetlistErrorKind::Syntax, where, "expected: in <target> <- <src>:<weight> ...");
  }
  InDecl d{toks[1], {}};
  check_reference(d.target);
  for (std::size_t i = 3; i < toks.size(); ++i) {
    const auto& t = toks[i];
    const auto colon = t.text.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == t.text.size()) {
      fail(NetlistErrorKind::Syntax, t.where, "expected <src>:<weight>, got '" + std::string(t.text) + "'");
    }
    Token ref{t.text.substr(0, colon), t.where};
    check_reference(ref);
    const auto w = to_int<std::int64_t>(t.text.substr(colon + 1));
    const SourceLocation wloc{t.where.line, t.where.column + colon + 1};
    if (!w) fail(NetlistErrorKind::Syntax, wloc, "weight must be an integer");
    if (*w < -128 || *w > 127) {
      fail(NetlistErrorKind::WeightOutOfRange, wloc, "weight " + std::to_string(*w) + " outside [-128, 127]");
    }
    d.sources.push_back({ref, static_cast<Weight>(*w)});
  }
  if (d.sources.empty()) fail(NetlistErrorKind::Syntax, toks[2].where, "'in' line lists no sources");
  return d;
}

}  // namespace

NetlistDoc parse_netlist(std::string_view text) {
  std::vector<NodeDecl> nodes;
  std::vector<InDecl> ins;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    const auto toks = tokenize(line, line_no);
    if (!toks.empty()) {
      if (toks[0].text == "node") {
        nodes.push_back(parse_node_line(toks));
      } else if (toks[0].text == "in") {
        ins.push_back(parse_in_line(toks));
      } else {
        fail(NetlistErrorKind::Syntax, toks[0].where, "unknown directive '" + std::string(toks[0].text) + "'");
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }

  // Explicit ids and labels first, then auto ids fill the lowest gaps.
  std::set<std::uint16_t> used;
  std::map<std::string, std::size_t, std::less<>> by_name;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& d = nodes[i];
    if (d.explicit_id && !used.insert(*d.explicit_id).second) {
      fail(NetlistErrorKind::DuplicateId, d.where, "node id " + std::to_string(*d.explicit_id) + " declared twice");
    }
    if (!d.name.empty() && !by_name.emplace(d.name, i).second) {
      fail(NetlistErrorKind::DuplicateId, d.where, "label '" + d.name + "' declared twice");
    }
  }

  NetlistDoc doc;
  doc.nodes.reserve(nodes.size());
  std::size_t next_free = 0;
  for (const auto& d : nodes) {
    std::uint16_t id;
    if (d.explicit_id) {
      id = *d.explicit_id;
    } else {
      while (next_free < kAddressSpace && used.count(static_cast<std::uint16_t>(next_free))) ++next_free;
      if (next_free >= kAddressSpace) fail(NetlistErrorKind::IdOutOfRange, d.where, "no free node id for 'auto'");
      id = static_cast<std::uint16_t>(next_free++);
    }
    doc.nodes.push_back({NodeId(id), d.opcode, d.param, d.output, d.name, d.where, {}});
  }

  std::map<std::uint16_t, std::size_t> by_id;
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) by_id.emplace(doc.nodes[i].id.value, i);

  auto resolve = [&](const Token& t) -> std::size_t {
    if (is_digits(t.text)) {
      const auto id = parse_id(t);
      auto it = by_id.find(id);
      if (it == by_id.end()) fail(NetlistErrorKind::UnresolvedReference, t.where, "node " + std::string(t.text) + " is not declared");
      return it->second;
    }
    auto it = by_name.find(t.text);
    if (it == by_name.end()) fail(NetlistErrorKind::UnresolvedReference, t.where, "label '" + std::string(t.text) + "' is not declared");
    return it->second;
  };

  std::vector<std::set<std::uint16_t>> seen(doc.nodes.size());
  for (const auto& in : ins) {
    const std::size_t target = resolve(in.target);
    auto& node = doc.nodes[target];
    for (const auto& src : in.sources) {
      // A numeric source may name an unprogrammed slot, which always reads 0.
      const NodeId source = is_digits(src.ref.text) ? NodeId(parse_id(src.ref)) : doc.nodes[resolve(src.ref)].id;
      if (!seen[target].insert(source.value).second) {
        fail(NetlistErrorKind::DuplicateSource, src.ref.where,
             "node " + std::to_string(source.index()) + " already feeds node " + std::to_string(node.id.index()));
      }
      if (node.inputs.size() == kMaxFanIn) {
        fail(NetlistErrorKind::FanInExceeded, src.ref.where,
             "node " + std::to_string(node.id.index()) + " would have more than 256 inputs");
      }
      node.inputs.push_back({source, src.weight});
    }
  }

  std::sort(doc.nodes.begin(), doc.nodes.end(),
            [](const NetlistNode& a, const NetlistNode& b) { return a.id < b.id; });
  return doc;
}

std::vector<NodeProgram> to_programs(const NetlistDoc& doc) {
  std::vector<NodeProgram> out;
  out.reserve(doc.nodes.size());
  for (const auto& n : doc.nodes) {
    out.push_back({n.id, n.opcode, n.param, AddressTable(n.inputs), n.is_output});
  }
  return out;
}

NetlistDoc from_programs(std::span<const NodeProgram> programs) {
  NetlistDoc doc;
  for (const auto& p : programs) {
    NetlistNode n{p.id, p.opcode, p.param, p.is_output, {}, {}, {}};
    n.inputs.assign(p.table.entries().begin(), p.table.entries().end());
    doc.nodes.push_back(std::move(n));
  }
  std::sort(doc.nodes.begin(), doc.nodes.end(),
            [](const NetlistNode& a, const NetlistNode& b) { return a.id < b.id; });
  return doc;
}

std::string emit_netlist(const NetlistDoc& doc) {
  std::ostringstream os;
  for (const auto& n : doc.nodes) {
    os << "node " << n.id.index() << ' ' << opcode_name(n.opcode);
    if (n.param != 0 || n.opcode == Opcode::Thresh || n.opcode == Opcode::Const) os << " param=" << n.param;
    if (n.is_output) os << " output";
    os << '\n';
    if (!n.inputs.empty()) {
      auto inputs = n.inputs;
      std::stable_sort(inputs.begin(), inputs.end(),
                       [](const ConnectionEntry& a, const ConnectionEntry& b) { return a.source < b.source; });
      os << "in " << n.id.index() << " <-";
      for (const auto& e : inputs) os << ' ' << e.source.index() << ':' << static_cast<int>(e.weight);
      os << '\n';
    }
  }
  return os.str();
}

std::string emit_netlist(std::span<const NodeProgram> programs) {
  return emit_netlist(from_programs(programs));
}

}  // namespace nvtwin
