#include "lacuna/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "lacuna/errors.hpp"

namespace lacuna {
namespace {

void dump_number(const json& v, std::string& out) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    out += v.dump();
    return;
  }
  double x = v.get<double>();
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

bool is_flat(const json& v) {
  if (v.is_object()) return false;
  if (!v.is_array()) return true;
  for (const auto& x : v) {
    if (x.is_object()) return false;
    if (x.is_array())
      for (const auto& y : x)
        if (y.is_structured()) return false;
  }
  return true;
}

void dump_rec(const json& v, bool pretty, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ',';
      first = false;
      newline(depth + 1);
      out += json(it.key()).dump();
      out += pretty ? ": " : ":";
      dump_rec(it.value(), pretty, depth + 1, out);
    }
    newline(depth);
    out += '}';
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    bool inline_items = !pretty || is_flat(v);
    out += '[';
    bool first = true;
    for (const auto& x : v) {
      if (!first) out += inline_items && pretty ? ", " : ",";
      first = false;
      if (!inline_items) newline(depth + 1);
      dump_rec(x, inline_items ? false : pretty, depth + 1, out);
    }
    if (!inline_items) newline(depth);
    out += ']';
  } else if (v.is_number()) {
    dump_number(v, out);
  } else {
    out += v.dump();
  }
}

}  // namespace

std::string dump_json(const json& value, bool pretty) {
  std::string out;
  dump_rec(value, pretty, 0, out);
  if (pretty) out += '\n';
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::InvalidInput, "sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string content_hash(const json& value) {
  return "sha256:" + sha256_hex(dump_json(value, false));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidInput, "malformed JSON in " + path.string(), {{"parser", e.what()}});
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
}

}  // namespace lacuna
