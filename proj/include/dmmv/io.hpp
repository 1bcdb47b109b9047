// Instance and solution text files, and LP-format export of the MILP model.
//
// Instance file, whitespace separated, one record per line:
//   m n v
//   level_1 .. level_v                (ascending)
//   b_1 .. b_m
//   a_11 .. a_1n                      (m rows of A)
//   ...
//   init x_1 .. x_n                   (optional warm start)
// Numbers are written in shortest round-trip form, so write/read is exact.

#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dmmv/core.hpp"

namespace dmmv::io {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
    if (p >= line.size()) break;
    const std::size_t start = p;
    while (p < line.size() && line[p] != ' ' && line[p] != '\t' && line[p] != '\r') ++p;
    out.push_back(Token{line.substr(start, p - start), start + 1});
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) lines_.push_back(line);
    while (!lines_.empty() && split(lines_.back()).empty()) lines_.pop_back();
  }

  bool done() const { return next_ >= lines_.size(); }
  std::size_t line_number() const { return next_; }  // 1-based number of the last line taken

  std::vector<Token> take(const char* what) {
    if (done()) throw ParseError(lines_.size() + 1, 1, std::string("unexpected end of file, expected ") + what);
    current_ = lines_[next_++];
    return split(current_);
  }

  std::vector<Token> peek() const { return done() ? std::vector<Token>{} : split(lines_[next_]); }

 private:
  std::vector<std::string> lines_;
  std::string current_;
  std::size_t next_ = 0;
};

inline double to_double(const Token& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (!tok.text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, tok.column, "expected a number, found '" + std::string(tok.text) + "'");
  return v;
}

inline std::size_t to_count(const Token& tok, std::size_t line) {
  std::size_t v = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, tok.column, "expected a non-negative integer, found '" + std::string(tok.text) + "'");
  return v;
}

inline std::vector<double> numbers(const std::vector<Token>& toks, std::size_t first, std::size_t expect,
                                   std::size_t line, const char* what) {
  if (toks.size() - first != expect) {
    const std::size_t col = toks.size() > first + expect ? toks[first + expect].column
                                                          : (toks.empty() ? 1 : toks.back().column);
    throw ParseError(line, col,
                     std::string(what) + ": expected " + std::to_string(expect) + " values, found " +
                         std::to_string(toks.size() - first));
  }
  std::vector<double> out(expect);
  for (std::size_t q = 0; q < expect; ++q) out[q] = to_double(toks[first + q], line);
  return out;
}

}  // namespace detail

inline void write_numbers(std::ostream& out, std::span<const double> values) {
  for (std::size_t q = 0; q < values.size(); ++q) {
    if (q) out << ' ';
    out << format_double(values[q]);
  }
  out << '\n';
}

inline void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.m() << ' ' << inst.n() << ' ' << inst.values().size() << '\n';
  write_numbers(out, inst.values().levels());
  write_numbers(out, inst.b());
  for (std::size_t k = 0; k < inst.m(); ++k) write_numbers(out, inst.A().row(k));
  if (inst.continuous_init()) {
    out << "init ";
    write_numbers(out, *inst.continuous_init());
  }
}

inline std::string to_string(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

inline Instance read_instance(std::istream& in) {
  detail::LineReader reader(in);
  auto head = reader.take("header 'm n v'");
  std::size_t line = reader.line_number();
  if (head.size() != 3)
    throw ParseError(line, head.size() > 3 ? head[3].column : 1, "header must be 'm n v'");
  const std::size_t m = detail::to_count(head[0], line);
  const std::size_t n = detail::to_count(head[1], line);
  const std::size_t v = detail::to_count(head[2], line);
  if (m == 0) throw ParseError(line, head[0].column, "m must be positive");
  if (n == 0) throw ParseError(line, head[1].column, "n must be positive");
  if (v == 0) throw ParseError(line, head[2].column, "v must be positive");

  auto toks = reader.take("value levels");
  line = reader.line_number();
  auto levels = detail::numbers(toks, 0, v, line, "levels");
  for (std::size_t q = 1; q < levels.size(); ++q)
    if (!(levels[q - 1] < levels[q])) throw ParseError(line, toks[q].column, "levels must be strictly increasing");

  toks = reader.take("target b");
  auto b = detail::numbers(toks, 0, m, reader.line_number(), "b");

  std::vector<double> data;
  data.reserve(m * n);
  for (std::size_t k = 0; k < m; ++k) {
    toks = reader.take("matrix row");
    auto row = detail::numbers(toks, 0, n, reader.line_number(), "matrix row");
    data.insert(data.end(), row.begin(), row.end());
  }

  std::optional<std::vector<double>> init;
  if (!reader.done()) {
    toks = reader.take("init or end of file");
    line = reader.line_number();
    if (toks.empty() || toks[0].text != "init")
      throw ParseError(line, toks.empty() ? 1 : toks[0].column, "expected 'init' or end of file");
    init = detail::numbers(toks, 1, n, line, "init");
  }
  if (!reader.done()) throw ParseError(reader.line_number() + 1, 1, "trailing content after instance");
  try {
    return Instance(Matrix(m, n, std::move(data)), std::move(b), ValueSet(std::move(levels)), std::move(init));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(1, 1, e.what());
  }
}

inline Instance instance_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

// Solution file: 'n' on the first line, then the n values of x.
inline void write_solution(std::ostream& out, const Instance& inst, const Solution& sol) {
  out << sol.idx.size() << '\n';
  write_numbers(out, assignment_values(inst, sol));
}

inline std::vector<double> read_solution_values(std::istream& in) {
  detail::LineReader reader(in);
  auto head = reader.take("solution length");
  if (head.size() != 1) throw ParseError(1, head.empty() ? 1 : head.back().column, "expected the solution length");
  const std::size_t n = detail::to_count(head[0], 1);
  auto toks = reader.take("solution values");
  return detail::numbers(toks, 0, n, reader.line_number(), "solution values");
}

// Maps solution values back to level indices; values must be exact levels.
inline std::vector<std::size_t> levels_of(const Instance& inst, const std::vector<double>& x) {
  if (x.size() != inst.n()) throw DimensionError("solution length", inst.n(), x.size());
  std::vector<std::size_t> idx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    idx[j] = inst.values().nearest(x[j]);
    if (inst.values()[idx[j]] != x[j])
      throw Error("solution value " + format_double(x[j]) + " is not a level");
  }
  return idx;
}

// LP-format MILP:  min t  s.t.  -t <= (A x - b)_k <= t,  t >= 0, with each
// x_j = sum_v level_v z_jv, sum_v z_jv = 1, z binary substituted into the rows.
// Yields 2m + n constraints.
inline void export_lp(std::ostream& out, const Instance& inst) {
  const std::size_t v = inst.values().size();
  auto z = [](std::size_t j, std::size_t q) { return "z_" + std::to_string(j) + "_" + std::to_string(q); };
  auto term = [&](std::ostream& os, double coef, const std::string& var, bool& first) {
    if (coef == 0.0) return;
    if (first) {
      os << (coef < 0 ? "- " : "") << format_double(std::abs(coef)) << ' ' << var;
    } else {
      os << (coef < 0 ? " - " : " + ") << format_double(std::abs(coef)) << ' ' << var;
    }
    first = false;
  };
  auto expression = [&](std::ostream& os, std::size_t k) {
    bool first = true;
    for (std::size_t j = 0; j < inst.n(); ++j)
      for (std::size_t q = 0; q < v; ++q) term(os, inst.a(k, j) * inst.values()[q], z(j, q), first);
    return first;
  };

  out << "\\ DMMV model: m=" << inst.m() << " n=" << inst.n() << " levels=" << v << '\n';
  out << "Minimize\n obj: t\nSubject To\n";
  for (std::size_t k = 0; k < inst.m(); ++k) {
    const double bk = inst.b()[k];
    out << " up_" << k << ": ";
    const bool empty_up = expression(out, k);
    out << (empty_up ? "- t" : " - t") << " <= " << format_double(bk) << '\n';
    out << " lo_" << k << ": ";
    const bool empty_lo = expression(out, k);
    out << (empty_lo ? "t" : " + t") << " >= " << format_double(bk) << '\n';
  }
  for (std::size_t j = 0; j < inst.n(); ++j) {
    out << " sel_" << j << ": ";
    for (std::size_t q = 0; q < v; ++q) out << (q ? " + " : "") << z(j, q);
    out << " = 1\n";
  }
  out << "Bounds\n t >= 0\nBinaries\n";
  for (std::size_t j = 0; j < inst.n(); ++j) {
    out << ' ';
    for (std::size_t q = 0; q < v; ++q) out << (q ? " " : "") << z(j, q);
    out << '\n';
  }
  out << "End\n";
}

}  // namespace dmmv::io
