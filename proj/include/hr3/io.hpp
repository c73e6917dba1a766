#pragma once

#include <stdexcept>
#include <string>

#include "hr3/three_graph.hpp"

namespace hr3 {

/// Parse error with the offending 1-based line number.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
};

// "3G v1": first line `3graph <n>`, then one edge per line `i j k`, i<j<k,
// 0-based, LF-terminated. An optional trailing `part <p> <v...>` line per
// declared part carries 3-partite structure.
std::string write_3g(const ThreeGraph& h);
ThreeGraph parse_3g(const std::string& text);

// "bip": first line `bip <m> <n>`, then `i j` lines.
std::string write_bip(const BipartiteGraph& g);
BipartiteGraph parse_bip(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace hr3
