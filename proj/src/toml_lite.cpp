#include "certctl/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace certctl::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("toml parse error at line " + std::to_string(line) + ": " + msg);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

json parse_scalar(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char n = s[i + 1];
        if (n == '"' || n == '\\') {
          out.push_back(n);
          ++i;
          continue;
        }
      }
      out.push_back(s[i]);
    }
    return json(out);
  }
  if (s == "true") return json(true);
  if (s == "false") return json(false);
  const bool looks_float = s.find_first_of(".eE") != std::string::npos &&
                           s.find_first_not_of("+-0123456789.eE") == std::string::npos;
  try {
    size_t used = 0;
    if (!looks_float) {
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return json(v);
    }
    const double d = std::stod(s, &used);
    if (used == s.size()) return json(d);
  } catch (const std::exception&) {
  }
  fail(line, "cannot parse value: " + s);
}

json parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    json arr = json::array();
    std::string body = s.substr(1, s.size() - 2);
    std::string item;
    bool in_string = false;
    for (size_t i = 0; i < body.size(); ++i) {
      const char c = body[i];
      if (c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!trim(item).empty()) arr.push_back(parse_scalar(item, line));
        item.clear();
      } else {
        item.push_back(c);
      }
    }
    if (!trim(item).empty()) arr.push_back(parse_scalar(item, line));
    return arr;
  }
  return parse_scalar(s, line);
}

std::vector<std::string> split_path(const std::string& s, int line) {
  std::vector<std::string> parts;
  std::string part;
  std::stringstream ss(s);
  while (std::getline(ss, part, '.')) {
    part = trim(part);
    if (part.empty()) fail(line, "empty table path segment");
    parts.push_back(part);
  }
  return parts;
}

}  // namespace

json parse_toml(const std::string& text) {
  json root = json::object();
  json* current = &root;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;

    if (s.size() >= 4 && s.substr(0, 2) == "[[") {
      if (s.substr(s.size() - 2) != "]]") fail(lineno, "malformed table array header");
      const auto path = split_path(s.substr(2, s.size() - 4), lineno);
      json* node = &root;
      for (size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
      json& arr = (*node)[path.back()];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) fail(lineno, "not a table array: " + path.back());
      arr.push_back(json::object());
      current = &arr.back();
      continue;
    }
    if (s.front() == '[') {
      if (s.back() != ']') fail(lineno, "malformed table header");
      const auto path = split_path(s.substr(1, s.size() - 2), lineno);
      json* node = &root;
      for (const auto& p : path) {
        if (node->contains(p) && !(*node)[p].is_object())
          fail(lineno, "table conflicts with existing key: " + p);
        node = &(*node)[p];
        if (node->is_null()) *node = json::object();
      }
      current = node;
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(lineno, "empty key");
    if (key.find('.') != std::string::npos) fail(lineno, "dotted keys are not supported");

    std::string value = s.substr(eq + 1);
    int balance = bracket_balance(value);
    while (balance > 0 && std::getline(in, line)) {
      ++lineno;
      const std::string more = strip_comment(line);
      value += " " + more;
      balance = bracket_balance(value);
    }
    if (balance != 0) fail(lineno, "unbalanced brackets in value");
    (*current)[key] = parse_value(value, lineno);
  }
  return root;
}

json parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace certctl::cli
