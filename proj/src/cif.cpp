#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "perinv/error.hpp"
#include "perinv/io.hpp"

namespace perinv {
namespace {

constexpr double kDegree = 3.14159265358979323846 / 180.0;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string at_line(int line) { return line > 0 ? " (line " + std::to_string(line) + ")" : ""; }

// ---------------------------------------------------------------- tokenizer

struct Token {
  enum Kind { Tag, Loop, Data, Value } kind;
  std::string text;
  int line;
  bool quoted = false;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == ';') {
      // Multi-line text field, closed by a line starting with ';'.
      const int start = number;
      std::string field = line.substr(1);
      bool closed = false;
      while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == ';') {
          closed = true;
          break;
        }
        field += "\n" + line;
      }
      if (!closed) throw Error(ErrorCode::MalformedLoop, "unterminated text field" + at_line(start));
      out.push_back({Token::Value, field, start, true});
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '#') break;
      if (c == '\'' || c == '"') {
        // A quote closes only when followed by whitespace or the line end.
        std::size_t j = i + 1;
        while (j < line.size() && !(line[j] == c && (j + 1 == line.size() || std::isspace(static_cast<unsigned char>(line[j + 1])))))
          ++j;
        if (j >= line.size()) throw Error(ErrorCode::MalformedLoop, "unterminated quoted value" + at_line(number));
        out.push_back({Token::Value, line.substr(i + 1, j - i - 1), number, true});
        i = j + 1;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      std::string word = line.substr(i, j - i);
      const std::string low = lower(word);
      if (word[0] == '_')
        out.push_back({Token::Tag, low, number});
      else if (low == "loop_")
        out.push_back({Token::Loop, word, number});
      else if (low.rfind("data_", 0) == 0)
        out.push_back({Token::Data, word.substr(5), number});
      else
        out.push_back({Token::Value, word, number});
      i = j;
    }
  }
  return out;
}

// "1.234(5)" -> 1.234; "?" and "." are missing.
std::optional<double> cif_number(const Token& t) {
  if (t.quoted) return std::nullopt;
  std::string s = t.text;
  if (s == "?" || s == ".") return std::nullopt;
  if (const auto p = s.find('('); p != std::string::npos) s = s.substr(0, p);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

double require_number(const Token& t, const std::string& tag) {
  const auto v = cif_number(t);
  if (!v) throw Error(ErrorCode::MalformedLoop, "non-numeric value '" + t.text + "' for " + tag + at_line(t.line));
  return *v;
}

std::string element_from_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    out += out.empty() ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                       : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (out.size() == 2) break;
  }
  return out;
}

struct Loop {
  std::vector<std::string> tags;
  std::vector<Token> values;
  int line = 0;
};

void read_site_loop(const Loop& loop, CifDocument& doc) {
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < loop.tags.size(); ++i) col[loop.tags[i]] = i;
  const char* axes[3] = {"_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z"};
  for (const char* a : axes)
    if (!col.count(a)) throw Error(ErrorCode::MalformedLoop, std::string("atom site loop lacks ") + a + at_line(loop.line));
  const std::size_t width = loop.tags.size();
  for (std::size_t r = 0; r < loop.values.size() / width; ++r) {
    const Token* row = &loop.values[r * width];
    CifSite site;
    site.line = row[0].line;
    for (int a = 0; a < 3; ++a) site.frac[a] = require_number(row[col[axes[a]]], axes[a]);
    if (col.count("_atom_site_label")) site.label = row[col["_atom_site_label"]].text;
    if (col.count("_atom_site_type_symbol")) site.element = element_from_label(row[col["_atom_site_type_symbol"]].text);
    if (site.element.empty()) site.element = element_from_label(site.label);
    if (site.label.empty()) site.label = site.element;
    if (col.count("_atom_site_occupancy")) {
      if (const auto occ = cif_number(row[col["_atom_site_occupancy"]])) site.occupancy = *occ;
    }
    doc.sites.push_back(std::move(site));
  }
}

void read_symop_loop(const Loop& loop, std::size_t column, CifDocument& doc) {
  const std::size_t width = loop.tags.size();
  for (std::size_t r = 0; r < loop.values.size() / width; ++r) {
    const Token& t = loop.values[r * width + column];
    doc.symops.push_back(t.text);
    doc.symop_lines.push_back(t.line);
  }
}

void finish_loop(const Loop& loop, CifDocument& doc) {
  if (loop.tags.empty()) throw Error(ErrorCode::MalformedLoop, "loop_ without tags" + at_line(loop.line));
  if (loop.values.size() % loop.tags.size() != 0)
    throw Error(ErrorCode::MalformedLoop, "loop value count " + std::to_string(loop.values.size()) +
                                              " is not a multiple of " + std::to_string(loop.tags.size()) +
                                              at_line(loop.line));
  for (std::size_t i = 0; i < loop.tags.size(); ++i) {
    const std::string& tag = loop.tags[i];
    if (tag == "_symmetry_equiv_pos_as_xyz" || tag == "_space_group_symop_operation_xyz") {
      read_symop_loop(loop, i, doc);
      return;
    }
  }
  if (std::any_of(loop.tags.begin(), loop.tags.end(),
                  [](const std::string& t) { return t.rfind("_atom_site_fract_", 0) == 0; }))
    read_site_loop(loop, doc);
}

// ---------------------------------------------------------------- symop terms

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / (g ? g : 1), den / (g ? g : 1)};
}

Rational add(Rational a, Rational b) { return make_rational(a.num * b.den + b.num * a.den, a.den * b.den); }

// Decimal or fraction literal as an exact rational with an allowed denominator.
std::optional<Rational> parse_offset_unchecked(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (a.empty() || b.empty() || !std::all_of(a.begin(), a.end(), ::isdigit) || !std::all_of(b.begin(), b.end(), ::isdigit))
      return std::nullopt;
    const std::int64_t den = std::stoll(b);
    if (den == 0) return std::nullopt;
    const Rational r = make_rational(std::stoll(a), den);
    if (r.den != 1 && r.den != 2 && r.den != 3 && r.den != 4 && r.den != 6) return std::nullopt;
    return r;
  }
  if (!std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }) ||
      std::count(s.begin(), s.end(), '.') > 1 || s == ".")
    return std::nullopt;
  const double v = std::stod(s);
  for (std::int64_t den : {1, 2, 3, 4, 6}) {
    const double scaled = v * static_cast<double>(den);
    if (std::abs(scaled - std::round(scaled)) < 1e-3 * static_cast<double>(den))
      return make_rational(static_cast<std::int64_t>(std::llround(scaled)), den);
  }
  return std::nullopt;
}

std::optional<Rational> parse_offset(const std::string& s) {
  try {
    const auto r = parse_offset_unchecked(s);
    if (r && std::abs(r->num) > 1000000) return std::nullopt;
    return r;
  } catch (const std::exception&) {  // out-of-range literals
    return std::nullopt;
  }
}

}  // namespace

std::array<double, 3> SymOp::apply(const std::array<double, 3>& frac) const {
  std::array<double, 3> out{};
  for (int r = 0; r < 3; ++r) {
    double v = translation[r].value();
    for (int c = 0; c < 3; ++c) v += rotation[r][c] * frac[c];
    out[r] = v;
  }
  return out;
}

std::string SymOp::to_string() const {
  std::string out;
  const char* names = "xyz";
  for (int r = 0; r < 3; ++r) {
    if (r) out += ',';
    std::string part;
    for (int c = 0; c < 3; ++c) {
      if (rotation[r][c] == 0) continue;
      part += rotation[r][c] < 0 ? "-" : (part.empty() ? "" : "+");
      part += names[c];
    }
    const Rational& t = translation[r];
    if (t.num != 0) {
      part += t.num < 0 ? "-" : (part.empty() ? "" : "+");
      part += std::to_string(t.num < 0 ? -t.num : t.num);
      if (t.den != 1) part += "/" + std::to_string(t.den);
    }
    out += part.empty() ? "0" : part;
  }
  return out;
}

SymOp parse_symop(const std::string& text, int line) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::UnparsableSymOp, "'" + text + "': " + why + at_line(line));
  };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '\'' && c != '"') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) throw fail("expected three comma-separated components");

  SymOp op;
  for (int r = 0; r < 3; ++r) {
    const std::string& p = parts[r];
    if (p.empty()) throw fail("empty component " + std::to_string(r + 1));
    std::size_t i = 0;
    bool any = false;
    while (i < p.size()) {
      int sign = 1;
      if (p[i] == '+' || p[i] == '-') {
        sign = p[i] == '-' ? -1 : 1;
        ++i;
      } else if (any) {
        throw fail("missing operator before '" + p.substr(i) + "'");
      }
      if (i >= p.size()) throw fail("dangling sign");
      if (p[i] == 'x' || p[i] == 'y' || p[i] == 'z') {
        const int c = p[i] - 'x';
        op.rotation[r][c] += sign;
        if (std::abs(op.rotation[r][c]) > 1) throw fail("coefficient outside {-1, 0, 1}");
        ++i;
      } else {
        std::size_t j = i;
        while (j < p.size() && (std::isdigit(static_cast<unsigned char>(p[j])) || p[j] == '.' || p[j] == '/')) ++j;
        const auto value = parse_offset(p.substr(i, j - i));
        if (!value) throw fail("bad translation '" + p.substr(i, j - i) + "'");
        Rational term = *value;
        term.num *= sign;
        i = j;
        if (i < p.size() && p[i] == '*') throw fail("scaled axis terms are not supported");
        if (i < p.size() && (p[i] == 'x' || p[i] == 'y' || p[i] == 'z'))
          throw fail("scaled axis terms are not supported");
        op.translation[r] = add(op.translation[r], term);
      }
      any = true;
    }
  }
  for (int r = 0; r < 3; ++r) {
    const Rational& t = op.translation[r];
    if (t.den != 1 && t.den != 2 && t.den != 3 && t.den != 4 && t.den != 6)
      throw fail("translation denominator outside {1, 2, 3, 4, 6}");
  }
  return op;
}

std::vector<CifDocument> parse_cif_documents(const std::string& text) {
  const std::vector<Token> tokens = tokenize(text);
  std::vector<CifDocument> docs;
  std::optional<Loop> loop;
  bool loop_values = false;
  std::map<std::string, double> cell;

  auto close_block = [&] {
    if (docs.empty()) return;
    if (loop) finish_loop(*loop, docs.back());
    loop.reset();
    CifDocument& doc = docs.back();
    const char* names[6] = {"_cell_length_a", "_cell_length_b", "_cell_length_c",
                            "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma"};
    for (int i = 0; i < 6; ++i) {
      const auto it = cell.find(names[i]);
      if (it == cell.end())
        throw Error(ErrorCode::MissingCellParameter, std::string(names[i]) + " missing in block '" + doc.block + "'" + at_line(doc.line));
      (i < 3 ? doc.lengths[i] : doc.angles[i - 3]) = it->second;
    }
    cell.clear();
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == Token::Data) {
      close_block();
      docs.push_back({});
      docs.back().block = t.text;
      docs.back().line = t.line;
      continue;
    }
    if (docs.empty()) throw Error(ErrorCode::MalformedLoop, "content before the first data_ block" + at_line(t.line));
    CifDocument& doc = docs.back();
    if (t.kind == Token::Loop) {
      if (loop) finish_loop(*loop, doc);
      loop = Loop{{}, {}, t.line};
      loop_values = false;
      continue;
    }
    if (t.kind == Token::Tag) {
      if (loop && !loop_values) {
        loop->tags.push_back(t.text);
        continue;
      }
      if (loop) {
        finish_loop(*loop, doc);
        loop.reset();
      }
      if (i + 1 >= tokens.size() || tokens[i + 1].kind != Token::Value)
        throw Error(ErrorCode::MalformedLoop, "tag " + t.text + " has no value" + at_line(t.line));
      const Token& v = tokens[++i];
      if (t.text.rfind("_cell_length_", 0) == 0 || t.text.rfind("_cell_angle_", 0) == 0) {
        if (const auto num = cif_number(v)) cell[t.text] = *num;
      } else if (t.text == "_symmetry_equiv_pos_as_xyz" || t.text == "_space_group_symop_operation_xyz") {
        doc.symops.push_back(v.text);
        doc.symop_lines.push_back(v.line);
      }
      continue;
    }
    // Value token.
    if (!loop) throw Error(ErrorCode::MalformedLoop, "unexpected value '" + t.text + "'" + at_line(t.line));
    loop_values = true;
    loop->values.push_back(t);
  }
  close_block();
  if (docs.empty()) throw Error(ErrorCode::MalformedLoop, "no data_ block found");
  return docs;
}

Matrix cell_matrix(const std::array<double, 3>& lengths, const std::array<double, 3>& angles) {
  for (double l : lengths)
    if (!(l > 0.0)) throw Error(ErrorCode::MissingCellParameter, "cell lengths must be positive");
  for (double a : angles)
    if (!(a > 0.0 && a < 180.0)) throw Error(ErrorCode::MissingCellParameter, "cell angles must lie in (0, 180)");
  const double ca = std::cos(angles[0] * kDegree), cb = std::cos(angles[1] * kDegree);
  const double cg = std::cos(angles[2] * kDegree), sg = std::sin(angles[2] * kDegree);
  const double cy = (ca - cb * cg) / sg;
  const double cz2 = 1.0 - cb * cb - cy * cy;
  if (!(cz2 > 0.0)) throw Error(ErrorCode::MissingCellParameter, "cell angles do not describe a cell of positive volume");
  Matrix m(3, 3);
  m << lengths[0], 0.0, 0.0,
       lengths[1] * cg, lengths[1] * sg, 0.0,
       lengths[2] * cb, lengths[2] * cy, lengths[2] * std::sqrt(cz2);
  return m;
}

std::array<double, 6> cell_parameters(const Matrix& basis) {
  if (basis.rows() != 3 || basis.cols() != 3) throw Error(ErrorCode::DimensionMismatch, "cell parameters need a 3 x 3 basis");
  auto angle = [&](int i, int j) {
    const double c = basis.row(i).dot(basis.row(j)) / (basis.row(i).norm() * basis.row(j).norm());
    return std::acos(std::clamp(c, -1.0, 1.0)) / kDegree;
  };
  return {basis.row(0).norm(), basis.row(1).norm(), basis.row(2).norm(), angle(1, 2), angle(0, 2), angle(0, 1)};
}

PeriodicSet expand_cif(const CifDocument& doc, const CifOptions& options) {
  if (doc.sites.empty())
    throw Error(ErrorCode::MalformedLoop, "block '" + doc.block + "' has no atom sites" + at_line(doc.line));
  std::vector<SymOp> ops;
  for (std::size_t i = 0; i < doc.symops.size(); ++i)
    ops.push_back(parse_symop(doc.symops[i], i < doc.symop_lines.size() ? doc.symop_lines[i] : 0));
  if (ops.empty()) ops.push_back(parse_symop("x,y,z"));

  auto wrap = [](double v) {
    v -= std::floor(v);
    return v >= 1.0 ? 0.0 : v;
  };
  std::vector<std::array<double, 3>> motif;
  std::vector<std::string> species;
  for (const CifSite& site : doc.sites) {
    if (site.occupancy < 1.0 - options.occupancy_slack)
      throw Error(ErrorCode::PartialOccupancy, "site " + site.label + " has occupancy " + std::to_string(site.occupancy) + at_line(site.line));
    for (const SymOp& op : ops) {
      std::array<double, 3> p = op.apply(site.frac);
      for (double& v : p) v = wrap(v);
      const bool seen = std::any_of(motif.begin(), motif.end(), [&](const std::array<double, 3>& q) {
        for (int a = 0; a < 3; ++a) {
          const double d = std::abs(p[a] - q[a]);
          if (std::min(d, 1.0 - d) > options.site_tolerance) return false;
        }
        return true;
      });
      if (seen) continue;
      motif.push_back(p);
      species.push_back(site.element);
    }
  }
  Matrix frac(static_cast<Eigen::Index>(motif.size()), 3);
  for (std::size_t i = 0; i < motif.size(); ++i)
    for (int a = 0; a < 3; ++a) frac(static_cast<Eigen::Index>(i), a) = motif[i][a];
  return PeriodicSet(3, 3, cell_matrix(doc.lengths, doc.angles), frac, std::move(species), doc.block);
}

std::vector<PeriodicSet> parse_cif(const std::string& text, const CifOptions& options) {
  std::vector<PeriodicSet> out;
  for (const CifDocument& doc : parse_cif_documents(text)) out.push_back(expand_cif(doc, options));
  return out;
}

std::vector<PeriodicSet> load_structures(const std::string& path, const CifOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string ext = lower(path.size() >= 5 ? path.substr(path.size() - 5) : path);
  if (ext == ".json") return read_native(buffer.str());
  if (ext.size() >= 4 && ext.substr(ext.size() - 4) == ".cif") return parse_cif(buffer.str(), options);
  throw Error(ErrorCode::InvalidArgument, "unknown file type: " + path);
}

}  // namespace perinv
