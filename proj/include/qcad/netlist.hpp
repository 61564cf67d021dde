#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qcad/circuit.hpp"

namespace qcad {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + message),
        line(line),
        column(column) {}
  int line;
  int column;
};

/*
 * Line-oriented netlist text.  One statement per line:
 *
 *   qubit <name>            data qubit declaration
 *   ancilla <name>          |0> ancilla declaration
 *   tancilla <name>         T-state ancilla declaration
 *   <gate> <q>[,<q>[,<q>]]  gate application (x z h s t tdag cnot toffoli
 *                           prepz measure correct)
 *   module <name> (<ports>) {
 *     ...                   gate/inst statements, local declarations
 *   }
 *   inst <module> (<args>)
 *   # comment               whole-line or trailing
 *
 * Throws ParseError with 1-based line/column on malformed input.
 */
Circuit parse_netlist(std::string_view text);

/* Inverse of parse_netlist; parse(emit(c)) is structurally equal to c. */
std::string emit_netlist(const Circuit& c);

}  // namespace qcad
