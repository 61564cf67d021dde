#include "qcad/netlist.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace qcad {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
/* '/' appears in flattened module-local names, e.g. "add0/c1". */
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/';
}

struct Line {
  int number = 0;
  std::string_view body;  /* without comment/newline */
  int indent = 0;         /* column of first non-space char, 1-based */
};

/* Splits into logical lines, dropping comments and blank lines. */
std::vector<Line> logical_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::size_t first = raw.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      std::size_t last = raw.find_last_not_of(" \t\r");
      out.push_back(Line{number, raw.substr(first, last - first + 1),
                         static_cast<int>(first) + 1});
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

struct Tok {
  std::string_view word;
  int col;
};

/* Splits a statement into a mnemonic and comma-separated name list. */
class StmtScanner {
 public:
  StmtScanner(const Line& line) : line_(line), pos_(0) {}

  Tok next_word() {
    skip_space();
    if (done()) fail("unexpected end of line");
    if (!name_start(cur()))
      fail(std::string("unexpected character '") + cur() + "'");
    std::size_t start = pos_;
    while (!done() && name_char(cur())) ++pos_;
    return Tok{line_.body.substr(start, pos_ - start), col_of(start)};
  }

  /* Parses "a,b,c" or "(a, b, c)". */
  std::vector<Tok> name_list(bool parenthesized) {
    std::vector<Tok> out;
    skip_space();
    if (parenthesized) {
      if (done() || cur() != '(') fail("expected '('");
      ++pos_;
      skip_space();
      if (!done() && cur() == ')') {
        ++pos_;
        return out;
      }
    }
    for (;;) {
      out.push_back(next_word());
      skip_space();
      if (!done() && cur() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    if (parenthesized) {
      skip_space();
      if (done() || cur() != ')') fail("expected ')'");
      ++pos_;
    }
    return out;
  }

  bool consume(char c) {
    skip_space();
    if (!done() && cur() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_end() {
    skip_space();
    if (!done()) fail(std::string("trailing text '") +
                      std::string(line_.body.substr(pos_)) + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_.number, col_of(pos_), msg);
  }

  int col_of(std::size_t pos) const {
    return line_.indent + static_cast<int>(pos);
  }

 private:
  bool done() const { return pos_ >= line_.body.size(); }
  char cur() const { return line_.body[pos_]; }
  void skip_space() {
    while (!done() && (cur() == ' ' || cur() == '\t')) ++pos_;
  }
  const Line& line_;
  std::size_t pos_;
};

std::optional<QubitKind> decl_keyword(std::string_view word) {
  if (word == "qubit") return QubitKind::Data;
  if (word == "ancilla") return QubitKind::ZeroAncilla;
  if (word == "tancilla") return QubitKind::TAncilla;
  return std::nullopt;
}

class Parser {
 public:
  Circuit run(std::string_view text) {
    lines_ = logical_lines(text);
    std::size_t i = 0;
    while (i < lines_.size()) {
      const Line& line = lines_[i];
      StmtScanner scan(line);
      Tok head = scan.next_word();
      if (auto kind = decl_keyword(head.word)) {
        Tok name = scan.next_word();
        scan.expect_end();
        declare(line, name, *kind);
        ++i;
        continue;
      }
      if (head.word == "module") {
        i = parse_module(i);
        continue;
      }
      if (head.word == "inst") {
        parse_inst(line, scan);
        ++i;
        continue;
      }
      parse_gate(line, scan, head);
      ++i;
    }
    return std::move(circuit_);
  }

 private:
  void declare(const Line& line, const Tok& name, QubitKind kind) {
    const std::string key(name.word);
    if (qubit_ids_.count(key))
      throw ParseError(line.number, name.col,
                       "duplicate qubit declaration '" + key + "'");
    qubit_ids_[key] = circuit_.add_qubit(key, kind);
  }

  QubitId lookup(const Line& line, const Tok& name) const {
    auto it = qubit_ids_.find(std::string(name.word));
    if (it == qubit_ids_.end())
      throw ParseError(line.number, name.col,
                       "undeclared qubit '" + std::string(name.word) + "'");
    return it->second;
  }

  void parse_gate(const Line& line, StmtScanner& scan, const Tok& head) {
    bool inverse = false;
    auto kind = gate_from_name(head.word, inverse);
    if (!kind)
      throw ParseError(line.number, head.col,
                       "unknown gate kind '" + std::string(head.word) + "'");
    auto names = scan.name_list(false);
    scan.expect_end();
    if (static_cast<int>(names.size()) != gate_arity(*kind))
      throw ParseError(line.number, head.col,
                       std::string(gate_name(*kind)) + " expects " +
                           std::to_string(gate_arity(*kind)) +
                           " operand(s), got " + std::to_string(names.size()));
    std::vector<QubitId> ops;
    ops.reserve(names.size());
    for (const auto& n : names) ops.push_back(lookup(line, n));
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = i + 1; j < ops.size(); ++j)
        if (ops[i] == ops[j])
          throw ParseError(line.number, names[j].col,
                           "repeated operand '" + std::string(names[j].word) +
                               "'");
    circuit_.add_gate(*kind, ops, inverse);
  }

  void parse_inst(const Line& line, StmtScanner& scan) {
    Tok mod = scan.next_word();
    auto names = scan.name_list(true);
    scan.expect_end();
    if (!circuit_.find_module(std::string(mod.word)))
      throw ParseError(line.number, mod.col,
                       "unknown module '" + std::string(mod.word) + "'");
    Instance inst;
    inst.module = std::string(mod.word);
    for (const auto& n : names) inst.args.push_back(lookup(line, n));
    /* switch to explicit item order the first time an inst shows up */
    if (circuit_.items.empty())
      for (const auto& g : circuit_.gates)
        circuit_.items.push_back(TopItem{false, g.id, -1});
    circuit_.instances.push_back(std::move(inst));
    circuit_.items.push_back(
        TopItem{true, -1, static_cast<int>(circuit_.instances.size() - 1)});
  }

  std::size_t parse_module(std::size_t index) {
    const Line& header = lines_[index];
    StmtScanner scan(header);
    scan.next_word();  /* "module" */
    Tok name = scan.next_word();
    auto ports = scan.name_list(true);
    if (!scan.consume('{'))
      scan.fail("expected '{' after module ports");
    scan.expect_end();
    if (circuit_.find_module(std::string(name.word)))
      throw ParseError(header.number, name.col,
                       "duplicate module '" + std::string(name.word) + "'");

    ModuleDef def;
    def.name = std::string(name.word);
    std::unordered_set<std::string> names;
    for (const auto& p : ports) {
      auto [it, fresh] = names.insert(std::string(p.word));
      if (!fresh)
        throw ParseError(header.number, p.col,
                         "duplicate port '" + std::string(p.word) + "'");
      def.ports.push_back(*it);
    }

    std::size_t i = index + 1;
    for (; i < lines_.size(); ++i) {
      const Line& line = lines_[i];
      if (line.body == "}") {
        circuit_.modules.push_back(std::move(def));
        return i + 1;
      }
      StmtScanner body(line);
      Tok head = body.next_word();
      if (auto kind = decl_keyword(head.word)) {
        Tok local = body.next_word();
        body.expect_end();
        auto [it, fresh] = names.insert(std::string(local.word));
        if (!fresh)
          throw ParseError(line.number, local.col,
                           "duplicate qubit declaration '" +
                               std::string(local.word) + "'");
        def.locals.push_back(*it);
        def.local_kinds.push_back(*kind);
        continue;
      }
      ModuleStmt stmt;
      std::vector<Tok> args;
      if (head.word == "module")
        throw ParseError(line.number, head.col, "nested module definition");
      if (head.word == "inst") {
        Tok callee = body.next_word();
        args = body.name_list(true);
        body.expect_end();
        stmt.is_inst = true;
        stmt.callee = std::string(callee.word);
        if (!circuit_.find_module(stmt.callee) && stmt.callee != def.name)
          throw ParseError(line.number, callee.col,
                           "unknown module '" + stmt.callee + "'");
      } else {
        bool inverse = false;
        auto kind = gate_from_name(head.word, inverse);
        if (!kind)
          throw ParseError(line.number, head.col,
                           "unknown gate kind '" + std::string(head.word) +
                               "'");
        args = body.name_list(false);
        body.expect_end();
        if (static_cast<int>(args.size()) != gate_arity(*kind))
          throw ParseError(line.number, head.col,
                           std::string(gate_name(*kind)) + " expects " +
                               std::to_string(gate_arity(*kind)) +
                               " operand(s), got " +
                               std::to_string(args.size()));
        stmt.kind = *kind;
        stmt.inverse = inverse;
      }
      for (const auto& a : args) {
        if (!names.count(std::string(a.word)))
          throw ParseError(line.number, a.col,
                           "undeclared qubit '" + std::string(a.word) + "'");
        stmt.args.push_back(std::string(a.word));
      }
      def.body.push_back(std::move(stmt));
    }
    throw ParseError(header.number, header.indent, "unterminated module '" +
                                                       def.name + "'");
  }

  std::vector<Line> lines_;
  Circuit circuit_;
  std::unordered_map<std::string, QubitId> qubit_ids_;
};

std::string_view kind_keyword(QubitKind kind) {
  switch (kind) {
    case QubitKind::Data: return "qubit";
    case QubitKind::ZeroAncilla: return "ancilla";
    case QubitKind::TAncilla: return "tancilla";
  }
  return "qubit";
}

void emit_gate_stmt(std::ostringstream& os, GateKind kind, bool inverse,
                    const std::vector<std::string>& names) {
  os << (kind == GateKind::T && inverse ? std::string_view("tdag")
                                        : gate_name(kind));
  for (std::size_t i = 0; i < names.size(); ++i)
    os << (i == 0 ? " " : ",") << names[i];
  os << '\n';
}

}  // namespace

Circuit parse_netlist(std::string_view text) {
  Parser parser;
  Circuit c = parser.run(text);
  /* items are only kept for genuinely hierarchical programs */
  if (c.instances.empty()) c.items.clear();
  c.validate();
  return c;
}

std::string emit_netlist(const Circuit& c) {
  std::ostringstream os;
  os << "# qcad netlist\n";
  for (const auto& q : c.qubits)
    os << kind_keyword(q.kind) << ' ' << q.name << '\n';
  for (const auto& m : c.modules) {
    os << "module " << m.name << " (";
    for (std::size_t i = 0; i < m.ports.size(); ++i)
      os << (i ? ", " : "") << m.ports[i];
    os << ") {\n";
    for (std::size_t i = 0; i < m.locals.size(); ++i)
      os << "  " << kind_keyword(m.local_kinds[i]) << ' ' << m.locals[i]
         << '\n';
    for (const auto& stmt : m.body) {
      os << "  ";
      if (stmt.is_inst) {
        os << "inst " << stmt.callee << " (";
        for (std::size_t i = 0; i < stmt.args.size(); ++i)
          os << (i ? ", " : "") << stmt.args[i];
        os << ")\n";
      } else {
        std::ostringstream line;
        emit_gate_stmt(line, stmt.kind, stmt.inverse, stmt.args);
        os << line.str();
      }
    }
    os << "}\n";
  }
  auto gate_line = [&](const Gate& g) {
    std::vector<std::string> names;
    for (QubitId q : g.qubits()) names.push_back(c.qubits[q].name);
    emit_gate_stmt(os, g.kind, g.inverse, names);
  };
  if (c.items.empty()) {
    for (const auto& g : c.gates) gate_line(g);
  } else {
    for (const auto& item : c.items) {
      if (!item.is_inst) {
        gate_line(c.gates[item.gate]);
        continue;
      }
      const Instance& inst = c.instances[item.inst];
      os << "inst " << inst.module << " (";
      for (std::size_t i = 0; i < inst.args.size(); ++i)
        os << (i ? ", " : "") << c.qubits[inst.args[i]].name;
      os << ")\n";
    }
  }
  return os.str();
}

}  // namespace qcad
