#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bodies.hpp"
#include "support.hpp"

namespace lpgeom {

using Json = nlohmann::json;

namespace detail {

inline std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Byte offset of every value in a (syntactically valid) JSON text, keyed by
// JSON pointer.
class JsonPositions {
 public:
  explicit JsonPositions(const std::string& text) : s_(text) {
    skip();
    value("");
  }
  std::size_t at(const std::string& pointer) const {
    auto it = pos_.find(pointer);
    return it == pos_.end() ? 0 : it->second;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  std::string string() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }
  void value(const std::string& path) {
    skip();
    pos_[path] = i_;
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip();
      if (s_[i_] == '}') {
        ++i_;
        return;
      }
      for (;;) {
        skip();
        const std::string key = string();
        skip();
        ++i_;  // colon
        value(path + "/" + key);
        skip();
        if (s_[i_++] == '}') return;
      }
    } else if (c == '[') {
      ++i_;
      skip();
      if (s_[i_] == ']') {
        ++i_;
        return;
      }
      for (int k = 0;; ++k) {
        value(path + "/" + std::to_string(k));
        skip();
        if (s_[i_++] == ']') return;
      }
    } else if (c == '"') {
      string();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[i_])))
        ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  std::map<std::string, std::size_t> pos_;
};

class SpecReader {
 public:
  SpecReader(const std::string& text, const JsonPositions& pos) : text_(text), pos_(pos) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    const auto [l, c] = line_column(text_, pos_.at(path));
    throw ParseError(msg + (path.empty() ? "" : " (at " + path + ")"), l, c);
  }

  const Json& field(const Json& j, const std::string& path, const char* key) const {
    if (!j.contains(key)) fail(path, std::string("missing field \"") + key + "\"");
    return j.at(key);
  }

  int integer(const Json& j, const std::string& path) const {
    if (!j.is_number_integer() || j.get<long>() < 1) fail(path, "expected a positive integer");
    return j.get<int>();
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  Vector vector(const Json& j, const std::string& path) const {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    Vector v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = number(j[i], path + "/" + std::to_string(i));
    return v;
  }

  // Rows of the JSON array become columns when transpose is set.
  Matrix matrix(const Json& j, const std::string& path, bool transpose) const {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of arrays");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
      rows.push_back(vector(j[i], path + "/" + std::to_string(i)));
      if (rows.back().size() != rows.front().size()) fail(path + "/" + std::to_string(i), "rows differ in length");
    }
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<int>(i)) = rows[i].transpose();
    return transpose ? Matrix(m.transpose()) : m;
  }

  ConvexBody body(const Json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "expected an object");
    const Json& t = field(j, path, "type");
    if (!t.is_string()) fail(path + "/type", "type must be a string");
    const std::string type = t.get<std::string>();
    try {
      if (type == "cube") {
        const int n = integer(field(j, path, "n"), path + "/n");
        const double a = j.contains("a") ? number(j["a"], path + "/a") : 1.0;
        return ConvexBody::cube(n, a);
      }
      if (type == "cross_polytope" || type == "diamond") return ConvexBody::cross_polytope(integer(field(j, path, "n"), path + "/n"));
      if (type == "ball") return ConvexBody::ball(integer(field(j, path, "n"), path + "/n"));
      if (type == "simplex") return ConvexBody::simplex(integer(field(j, path, "n"), path + "/n"));
      if (type == "vpolytope") return ConvexBody::vpolytope(matrix(field(j, path, "vertices"), path + "/vertices", true));
      if (type == "product")
        return ConvexBody::product(body(field(j, path, "left"), path + "/left"), body(field(j, path, "right"), path + "/right"));
      if (type == "affine")
        return ConvexBody::affine(matrix(field(j, path, "A"), path + "/A", false), vector(field(j, path, "b"), path + "/b"),
                                  body(field(j, path, "inner"), path + "/inner"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(path, e.what());
    }
    if (type == "measure") fail(path + "/type", "a measure is not a convex body here");
    fail(path + "/type", "unknown body type \"" + type + "\"");
  }

  DiscreteMeasure measure(const Json& j, const std::string& path) const {
    try {
      return DiscreteMeasure(matrix(field(j, path, "atoms"), path + "/atoms", true), vector(field(j, path, "weights"), path + "/weights"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }

 private:
  const std::string& text_;
  const JsonPositions& pos_;
};

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [l, c] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    // drop the library's own "[json.exception...] parse error at line x, column y: " prefix
    if (auto k = msg.find(": ", msg.find("column")); k != std::string::npos) msg = msg.substr(k + 2);
    throw ParseError(msg, l, c);
  }
}

}  // namespace detail

// A body or a discrete measure read from a spec document.
using BodyOrMeasure = std::variant<ConvexBody, DiscreteMeasure>;

inline BodyOrMeasure parse_spec(const std::string& text) {
  const Json j = detail::parse_json_text(text);
  const detail::JsonPositions pos(text);
  const detail::SpecReader rd(text, pos);
  if (j.is_object() && j.contains("type") && j["type"] == "measure") return rd.measure(j, "");
  return rd.body(j, "");
}

inline ConvexBody parse_body(const std::string& text) {
  BodyOrMeasure b = parse_spec(text);
  if (auto* K = std::get_if<ConvexBody>(&b)) return *K;
  throw ParseError("expected a convex body, found a measure", 1, 1);
}

inline Json to_json(const ConvexBody& K) {
  Json j;
  switch (K.kind()) {
    case BodyKind::Cube:
      return {{"type", "cube"}, {"n", K.dim()}, {"a", K.half_width()}};
    case BodyKind::CrossPolytope:
      return {{"type", "cross_polytope"}, {"n", K.dim()}};
    case BodyKind::Ball2:
      return {{"type", "ball"}, {"n", K.dim()}};
    case BodyKind::Simplex:
      return {{"type", "simplex"}, {"n", K.dim()}};
    case BodyKind::Product:
      return {{"type", "product"}, {"left", to_json(K.left())}, {"right", to_json(K.right())}};
    case BodyKind::AffineImage: {
      Json A = Json::array();
      for (int i = 0; i < K.dim(); ++i) {
        Json row = Json::array();
        for (int c = 0; c < K.dim(); ++c) row.push_back(K.matrix()(i, c));
        A.push_back(row);
      }
      Json b = Json::array();
      for (int i = 0; i < K.dim(); ++i) b.push_back(K.shift()[i]);
      return {{"type", "affine"}, {"A", A}, {"b", b}, {"inner", to_json(K.inner())}};
    }
    case BodyKind::VPolytope: {
      Json v = Json::array();
      const Matrix& V = K.hull().vertices;
      for (int c = 0; c < V.cols(); ++c) {
        Json p = Json::array();
        for (int i = 0; i < V.rows(); ++i) p.push_back(V(i, c));
        v.push_back(p);
      }
      return {{"type", "vpolytope"}, {"vertices", v}};
    }
  }
  return j;
}

inline Json to_json(const DiscreteMeasure& mu) {
  Json atoms = Json::array(), w = Json::array();
  for (int c = 0; c < mu.atoms().cols(); ++c) {
    Json p = Json::array();
    for (int i = 0; i < mu.dim(); ++i) p.push_back(mu.atoms()(i, c));
    atoms.push_back(p);
    w.push_back(mu.weights()[c]);
  }
  return {{"type", "measure"}, {"atoms", atoms}, {"weights", w}};
}

// Named bodies such as cube3, diamond2, ball2, simplex3, simplexmeasure2;
// otherwise inline JSON (leading '{') or a path to a JSON file.
inline BodyOrMeasure resolve_spec(const std::string& arg) {
  static const std::regex named("(cube|diamond|cross|ball|simplex|simplexmeasure)([0-9]+)");
  std::smatch m;
  if (std::regex_match(arg, m, named)) {
    const int n = std::stoi(m[2]);
    const std::string k = m[1];
    if (k == "cube") return ConvexBody::cube(n);
    if (k == "diamond" || k == "cross") return ConvexBody::cross_polytope(n);
    if (k == "ball") return ConvexBody::ball(n);
    if (k == "simplex") return ConvexBody::simplex(n);
    return DiscreteMeasure::simplex_vertices(n);
  }
  if (!arg.empty() && arg.front() == '{') return parse_spec(arg);
  std::ifstream in(arg);
  if (!in) throw InvalidArgument("cannot open body spec \"" + arg + "\"");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

// Comma-separated items, each a number, "0", "inf", or a range a:b:count of
// count evenly spaced values from a to b.
inline std::vector<PExponent> parse_p_list(const std::string& text) {
  std::vector<PExponent> out;
  auto one = [](const std::string& tok) {
    if (tok == "inf" || tok == "infinity") return PExponent::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad exponent \"" + tok + "\"");
    }
    if (used != tok.size()) throw InvalidArgument("bad exponent \"" + tok + "\"");
    if (v == 0.0) return PExponent::zero();
    if (v < 0.0) throw InvalidArgument("exponents must be nonnegative");
    if (std::isinf(v)) return PExponent::infinity();
    return PExponent::finite(v);
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) throw InvalidArgument("empty item in exponent list");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(one(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InvalidArgument("range must read a:b:count");
    const PExponent a = one(item.substr(0, c1)), b = one(item.substr(c1 + 1, c2 - c1 - 1));
    if (!a.is_finite() || !b.is_finite()) throw InvalidArgument("range ends must be finite and positive");
    int count = 0;
    try {
      count = std::stoi(item.substr(c2 + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("bad range count in \"" + item + "\"");
    }
    if (count < 2) throw InvalidArgument("range count must be at least 2");
    for (int i = 0; i < count; ++i)
      out.push_back(PExponent::finite(a.value() + (b.value() - a.value()) * i / (count - 1)));
  }
  if (out.empty()) throw InvalidArgument("empty exponent list");
  return out;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV with a fixed header; doubles always carry 17 significant digits.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;

  CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), width_(header.size()) {
    write(header);
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw InvalidArgument("CSV row width differs from header");
    std::vector<std::string> s;
    for (const auto& c : cells) {
      if (auto* d = std::get_if<double>(&c))
        s.push_back(format_double(*d));
      else if (auto* l = std::get_if<long>(&c))
        s.push_back(std::to_string(*l));
      else
        s.push_back(std::get<std::string>(c));
    }
    write(s);
  }

 private:
  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out_ << '"';
        for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
        out_ << '"';
      } else {
        out_ << c;
      }
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t width_;
};

}  // namespace lpgeom
