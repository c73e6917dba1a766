#include "hr3/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hr3 {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<long long> parse_ints(const std::string& s, int line) {
  std::vector<long long> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    try {
      size_t pos = 0;
      long long v = std::stoll(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (...) {
      throw ParseError(line, "expected integer, got '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

std::string write_3g(const ThreeGraph& h) {
  std::ostringstream os;
  os << "3graph " << h.n() << "\n";
  std::vector<Triple> es = h.edges();
  std::sort(es.begin(), es.end());
  for (const Triple& e : es) os << e[0] << " " << e[1] << " " << e[2] << "\n";
  if (h.partition()) {
    for (size_t p = 0; p < h.partition()->size(); ++p) {
      std::vector<int> vs = (*h.partition())[p];
      std::sort(vs.begin(), vs.end());
      os << "part " << p;
      for (int v : vs) os << " " << v;
      os << "\n";
    }
  }
  return os.str();
}

ThreeGraph parse_3g(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  {
    std::istringstream is(lines[0]);
    std::string tag;
    is >> tag;
    if (tag != "3graph") throw ParseError(1, "expected '3graph <n>' header");
  }
  std::vector<long long> head = parse_ints(lines[0].substr(6), 1);
  if (head.size() != 1 || head[0] < 0) throw ParseError(1, "expected '3graph <n>' header");
  ThreeGraph h{int(head[0])};
  std::vector<std::vector<int>> parts;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    int ln = int(i) + 1;
    if (lines[i].rfind("part ", 0) == 0) {
      std::vector<long long> vs = parse_ints(lines[i].substr(5), ln);
      if (vs.empty()) throw ParseError(ln, "empty part line");
      size_t p = size_t(vs[0]);
      if (parts.size() <= p) parts.resize(p + 1);
      for (size_t j = 1; j < vs.size(); ++j) parts[p].push_back(int(vs[j]));
      continue;
    }
    std::vector<long long> vs = parse_ints(lines[i], ln);
    if (vs.size() != 3) throw ParseError(ln, "expected three indices");
    if (!(vs[0] < vs[1] && vs[1] < vs[2])) throw ParseError(ln, "edge not strictly increasing");
    if (vs[0] < 0 || vs[2] >= h.n()) throw ParseError(ln, "vertex index out of range");
    try {
      h.add_edge(int(vs[0]), int(vs[1]), int(vs[2]));
    } catch (const std::exception& e) {
      throw ParseError(ln, e.what());
    }
  }
  if (!parts.empty()) {
    if (parts.size() != 3) throw ParseError(int(lines.size()), "expected exactly three parts");
    try {
      h.set_partition(parts);
    } catch (const std::exception& e) {
      throw ParseError(int(lines.size()), e.what());
    }
  }
  return h;
}

std::string write_bip(const BipartiteGraph& g) {
  std::ostringstream os;
  os << "bip " << g.left_size() << " " << g.right_size() << "\n";
  for (auto [u, v] : g.edges_sorted()) os << u << " " << v << "\n";
  return os.str();
}

BipartiteGraph parse_bip(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  {
    std::istringstream is(lines[0]);
    std::string tag;
    is >> tag;
    if (tag != "bip") throw ParseError(1, "expected 'bip <m> <n>' header");
  }
  std::vector<long long> head = parse_ints(lines[0].substr(3), 1);
  if (head.size() != 2 || head[0] < 0 || head[1] < 0)
    throw ParseError(1, "expected 'bip <m> <n>' header");
  BipartiteGraph g{int(head[0]), int(head[1])};
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    int ln = int(i) + 1;
    std::vector<long long> vs = parse_ints(lines[i], ln);
    if (vs.size() != 2) throw ParseError(ln, "expected two indices");
    if (vs[0] < 0 || vs[0] >= g.left_size() || vs[1] < 0 || vs[1] >= g.right_size())
      throw ParseError(ln, "vertex index out of range");
    g.add_edge(int(vs[0]), int(vs[1]));
  }
  return g;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

}  // namespace hr3
