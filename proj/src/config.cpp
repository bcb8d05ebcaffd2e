#include "cck/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cck {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

Config::Value parse_scalar(const std::string& tok, int line_no) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    return tok.substr(1, tok.size() - 2);
  }
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (...) {
  }
  throw std::runtime_error("config parse error at line " + std::to_string(line_no) +
                           ": bad value '" + tok + "'");
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("config parse error at line " + std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config parse error at line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') {
        throw std::runtime_error("config parse error at line " + std::to_string(line_no) +
                                 ": unterminated array");
      }
      std::vector<double> nums;
      std::vector<std::string> strs;
      std::string body = val.substr(1, val.size() - 2);
      std::istringstream items(body);
      std::string item;
      bool is_str = false;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        Value v = parse_scalar(item, line_no);
        if (std::holds_alternative<std::string>(v)) {
          is_str = true;
          strs.push_back(std::get<std::string>(v));
        } else if (std::holds_alternative<double>(v)) {
          nums.push_back(std::get<double>(v));
        } else {
          throw std::runtime_error("config arrays hold numbers or strings only");
        }
      }
      if (is_str) {
        cfg.values_[key] = strs;
      } else {
        cfg.values_[key] = nums;
      }
    } else {
      cfg.values_[key] = parse_scalar(val, line_no);
    }
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

double Config::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
  return std::get<double>(it->second);
}

double Config::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<double>(it->second);
}

long Config::integer(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::lround(std::get<double>(it->second));
}

bool Config::boolean(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<bool>(it->second);
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<std::string>(it->second);
}

std::vector<double> Config::numbers(const std::string& key,
                                    const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<std::vector<double>>(it->second);
}

std::string Config::canonical() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [key, value] : values_) {
    out << key << "=";
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::vector<double>>) {
            for (double d : v) out << d << ",";
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            for (const auto& s : v) out << s << ",";
          } else {
            out << v;
          }
        },
        value);
    out << "\n";
  }
  return out.str();
}

std::uint64_t Config::hash() const {
  const std::string s = canonical();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cck
