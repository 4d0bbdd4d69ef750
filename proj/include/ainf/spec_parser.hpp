#pragma once

// Group-spec grammar:
//   spec  := atom | atom "x" spec
//   atom  := "cyclic(" p "^" n ")" | "torus(" p "," n "," r ")" | "semidirect(" spec "," weyl ")"
//   weyl  := "Z" k ":" matrix | "inversion"
//   top   := spec | "colimit(" spec ")"      depths inside colimit are "inf" or "∞"
// Whitespace is ignored.

#include <ainf/formality_lab.hpp>
#include <ainf/group_models.hpp>

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainf {

class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(const std::string& msg, std::size_t position)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " + msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct ParsedSpec {
  bool colimit = false;
  std::uint32_t p = 0;
  std::vector<unsigned> depths;  // 0 inside a colimit
  std::optional<WeylPart> weyl;
  std::string canonical;

  std::size_t rank() const { return depths.size(); }

  GroupSpec group() const {
    if (colimit) throw GroupSpecError("colimit(...) is a symbolic model, not a finite group");
    GroupSpec s;
    s.p = p;
    s.depths = depths;
    s.weyl = weyl;
    s.validate();
    return s;
  }

  ColimitModel colimit_model(int truncation) const {
    if (!colimit) throw GroupSpecError("expected a colimit(...) spec");
    return ColimitModel::from_spec(p, rank(), weyl, truncation);
  }

  bool operator==(const ParsedSpec& o) const {
    auto same_weyl = [&] {
      if (weyl.has_value() != o.weyl.has_value()) return false;
      return !weyl || (weyl->matrices == o.weyl->matrices && weyl->table == o.weyl->table);
    };
    return colimit == o.colimit && p == o.p && depths == o.depths && same_weyl() && canonical == o.canonical;
  }
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string text) : src_(std::move(text)) {
    // Strip whitespace while remembering original positions; map "∞" to a single marker.
    for (std::size_t i = 0; i < src_.size();) {
      if (src_.compare(i, 3, "\xE2\x88\x9E") == 0) {
        s_.push_back('@');
        pos_.push_back(i);
        i += 3;
      } else {
        if (!std::isspace(static_cast<unsigned char>(src_[i]))) {
          s_.push_back(src_[i]);
          pos_.push_back(i);
        }
        ++i;
      }
    }
    pos_.push_back(src_.size());
  }

  ParsedSpec parse() {
    ParsedSpec out;
    if (accept("colimit(")) {
      out.colimit = true;
      auto body = spec(true);
      expect(")");
      finish(out, body);
      out.canonical = "colimit(" + body.text + ")";
    } else {
      auto body = spec(false);
      finish(out, body);
      out.canonical = body.text;
    }
    if (i_ != s_.size()) fail("unexpected trailing input '" + s_.substr(i_) + "'");
    return out;
  }

 private:
  struct Node {
    std::uint32_t p = 0;
    std::vector<unsigned> depths;
    std::optional<WeylPart> weyl;
    std::string text;
    std::size_t start = 0;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw SpecParseError(msg, pos_[std::min(i_, s_.size())]); }

  bool accept(const std::string& tok) {
    if (s_.compare(i_, tok.size(), tok) == 0) {
      i_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }

  std::int64_t integer(bool allow_sign = false) {
    std::size_t start = i_;
    bool neg = false;
    if (allow_sign && i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) neg = s_[i_++] == '-';
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      i_ = start;
      fail("expected an integer");
    }
    std::int64_t v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_++] - '0');
      if (v > (std::int64_t{1} << 40)) {
        i_ = start;
        fail("integer too large");
      }
    }
    return neg ? -v : v;
  }

  // Depth: a positive integer, or infinite inside colimit(...).
  unsigned depth(bool colimit) {
    auto start = i_;
    if (accept("inf") || accept("@")) {
      if (!colimit) {
        i_ = start;
        fail("infinite depth is only allowed inside colimit(...)");
      }
      return 0;
    }
    if (colimit) fail("depths inside colimit(...) must be inf");
    auto n = integer();
    if (n < 1 || n > 30) {
      i_ = start;
      fail("depth must be between 1 and 30");
    }
    return static_cast<unsigned>(n);
  }

  std::uint32_t prime() {
    auto start = i_;
    auto p = integer();
    if (!PrimeField::is_prime(static_cast<std::uint64_t>(p))) {
      i_ = start;
      fail(std::to_string(p) + " is not prime");
    }
    if (p > 65521) {
      i_ = start;
      fail("prime too large");
    }
    return static_cast<std::uint32_t>(p);
  }

  static std::string depth_text(unsigned n) { return n == 0 ? "inf" : std::to_string(n); }

  Node atom(bool colimit) {
    Node n;
    n.start = i_;
    if (accept("cyclic(")) {
      n.p = prime();
      expect("^");
      n.depths = {depth(colimit)};
      expect(")");
      n.text = "cyclic(" + std::to_string(n.p) + "^" + depth_text(n.depths[0]) + ")";
    } else if (accept("torus(")) {
      n.p = prime();
      expect(",");
      auto d = depth(colimit);
      expect(",");
      auto rs = i_;
      auto r = integer();
      if (r < 1 || r > 8) {
        i_ = rs;
        fail("torus rank must be between 1 and 8");
      }
      expect(")");
      n.depths.assign(static_cast<std::size_t>(r), d);
      n.text = r == 1 ? "cyclic(" + std::to_string(n.p) + "^" + depth_text(d) + ")"
                      : "torus(" + std::to_string(n.p) + "," + depth_text(d) + "," + std::to_string(r) + ")";
    } else if (accept("semidirect(")) {
      auto inner = spec(colimit);
      if (inner.weyl) {
        i_ = inner.start;
        fail("nested semidirect products are not supported");
      }
      expect(",");
      n.p = inner.p;
      n.depths = inner.depths;
      std::string wtext;
      n.weyl = weyl(n.p, n.depths, wtext);
      expect(")");
      n.text = "semidirect(" + inner.text + "," + wtext + ")";
    } else {
      fail("expected cyclic(, torus( or semidirect(");
    }
    return n;
  }

  WeylPart weyl(std::uint32_t p, const std::vector<unsigned>& depths, std::string& text) {
    const auto r = depths.size();
    if (accept("inversion")) {
      text = "inversion";
      return WeylPart::inversion(r);
    }
    if (!accept("Z")) fail("expected 'inversion' or 'Z<k>:<matrix>'");
    auto ks = i_;
    auto k = integer();
    if (k < 1 || k > 64) {
      i_ = ks;
      fail("Weyl group order must be between 1 and 64");
    }
    expect(":");
    auto ms = i_;
    IntMatrix m;
    expect("[");
    do {
      expect("[");
      std::vector<std::int64_t> row;
      do row.push_back(integer(true));
      while (accept(","));
      expect("]");
      m.push_back(std::move(row));
    } while (accept(","));
    expect("]");
    if (m.size() != r) {
      i_ = ms;
      fail("action matrix must be " + std::to_string(r) + "x" + std::to_string(r));
    }
    for (const auto& row : m)
      if (row.size() != r) {
        i_ = ms;
        fail("action matrix must be " + std::to_string(r) + "x" + std::to_string(r));
      }
    text = "Z" + std::to_string(k) + ":" + detail::matrix_text(m);
    unsigned top = 1;
    for (auto d : depths) top = std::max(top, d);
    std::int64_t modulus = 1;
    for (unsigned j = 0; j < top && modulus <= (std::int64_t{1} << 40) / p; ++j) modulus *= p;
    return WeylPart::cyclic(static_cast<std::size_t>(k), m, text, modulus);
  }

  Node spec(bool colimit) {
    auto n = atom(colimit);
    while (accept("x")) {
      auto start = i_;
      auto rhs = atom(colimit);
      if (rhs.p != n.p) {
        i_ = start;
        fail("all factors must use the same prime");
      }
      if (n.weyl || rhs.weyl) {
        auto lw = n.weyl ? *n.weyl : WeylPart::cyclic(1, detail::identity_matrix(n.depths.size()), "1");
        auto rw = rhs.weyl ? *rhs.weyl : WeylPart::cyclic(1, detail::identity_matrix(rhs.depths.size()), "1");
        n.weyl = WeylPart::product(lw, n.depths.size(), rw, rhs.depths.size());
      }
      n.depths.insert(n.depths.end(), rhs.depths.begin(), rhs.depths.end());
      n.text += "x" + rhs.text;
    }
    return n;
  }

  void finish(ParsedSpec& out, const Node& body) const {
    out.p = body.p;
    out.depths = body.depths;
    out.weyl = body.weyl;
    if (out.colimit) {
      ColimitModel::from_spec(out.p, out.rank(), out.weyl, 0);
    } else {
      out.group();  // semantic validation
    }
  }

  std::string src_;
  std::string s_;
  std::vector<std::size_t> pos_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses and validates a spec. Syntax errors throw SpecParseError (with the
/// offset into `text`); semantic errors throw GroupSpecError.
inline ParsedSpec parse_spec(const std::string& text) { return detail::SpecParser(text).parse(); }

inline std::string canonical_print(const ParsedSpec& s) { return s.canonical; }

}  // namespace ainf
