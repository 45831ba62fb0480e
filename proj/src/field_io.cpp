#include "pdirac/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "pdirac/errors.hpp"
#include "pdirac/fft.hpp"

namespace pdirac {
namespace {

constexpr const char* kMagic = "pdirac-field";
constexpr int kVersion = 1;

// Next line that is neither blank nor a comment.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
  throw FormatError("field file line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

PeriodicScalarField field_from_records(const std::vector<CoefficientRecord>& records,
                                       const FourierGrid& grid) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.mode_count());
  for (const auto& r : records) {
    Mode n{r.n1, r.n2};
    if (!grid.contains(n))
      throw GridMismatch("coefficient record (" + std::to_string(r.n1) + "," +
                         std::to_string(r.n2) + ") outside window of radius " +
                         std::to_string(grid.radius()));
    c[grid.index(n)] += cplx(r.re, r.im);
  }
  return PeriodicScalarField(grid, std::move(c));
}

PeriodicScalarField field_from_sample_table(const std::vector<cplx>& table, int s,
                                            const FourierGrid& grid) {
  if (s < 2 * grid.radius() + 1)
    throw GridMismatch("sample table resolution " + std::to_string(s) +
                       " cannot represent modes up to " + std::to_string(grid.radius()));
  if (table.size() != std::size_t(s) * s)
    throw GridMismatch("sample table size does not match its resolution");
  std::vector<cplx> buf = table;
  fft::transform_2d(buf.data(), s, s, -1);
  Eigen::VectorXcd c(grid.mode_count());
  for (int i = 0; i < grid.mode_count(); ++i) {
    const Mode& n = grid.modes()[i];
    int a = ((n.n1 % s) + s) % s, b = ((n.n2 % s) + s) % s;
    c[i] = buf[std::size_t(a) * s + b] / double(s * s);
  }
  return PeriodicScalarField(grid, std::move(c));
}

PeriodicScalarField read_field(std::istream& in, const FourierGrid& grid) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) fail(lineno, "empty document");
  {
    std::istringstream hs(line);
    std::string magic, ver;
    hs >> magic >> ver;
    if (magic != kMagic) fail(lineno, "expected header '" + std::string(kMagic) + " v1'");
    if (ver != "v" + std::to_string(kVersion)) fail(lineno, "unsupported version '" + ver + "'");
  }
  if (!next_line(in, line, lineno)) fail(lineno, "missing 'format' line");
  std::istringstream fs(line);
  std::string key, kind;
  fs >> key >> kind;
  if (key != "format") fail(lineno, "expected 'format coefficients|samples'");

  if (kind == "coefficients") {
    std::vector<CoefficientRecord> recs;
    while (next_line(in, line, lineno)) {
      std::istringstream rs(line);
      CoefficientRecord r;
      if (!(rs >> r.n1 >> r.n2 >> r.re)) fail(lineno, "expected 'N1 N2 re [im]'");
      if (!(rs >> r.im)) r.im = 0.0;
      std::string extra;
      if (rs >> extra) fail(lineno, "trailing token '" + extra + "'");
      recs.push_back(r);
    }
    return field_from_records(recs, grid);
  }
  if (kind == "samples") {
    std::string values = "real";
    int s = 0;
    while (fs >> key) {
      if (key == "resolution") {
        if (!(fs >> s) || s <= 0) fail(lineno, "bad resolution");
      } else if (key == "complex") {
        values = "complex";
      } else if (key == "real") {
        values = "real";
      } else {
        fail(lineno, "unknown sample option '" + key + "'");
      }
    }
    if (s == 0) fail(lineno, "samples format needs 'resolution S'");
    std::vector<cplx> table;
    table.reserve(std::size_t(s) * s);
    for (int row = 0; row < s; ++row) {
      if (!next_line(in, line, lineno)) fail(lineno, "expected " + std::to_string(s) + " rows");
      std::istringstream rs(line);
      for (int col = 0; col < s; ++col) {
        double re = 0.0, im = 0.0;
        if (!(rs >> re)) fail(lineno, "row has fewer than " + std::to_string(s) + " values");
        if (values == "complex" && !(rs >> im)) fail(lineno, "missing imaginary part");
        table.emplace_back(re, im);
      }
      std::string extra;
      if (rs >> extra) fail(lineno, "row has extra values");
    }
    if (next_line(in, line, lineno)) fail(lineno, "unexpected content after sample table");
    return field_from_sample_table(table, s, grid);
  }
  fail(lineno, "unknown format '" + kind + "'");
}

PeriodicScalarField load_field(const std::string& path, const FourierGrid& grid) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open field file '" + path + "'");
  return read_field(in, grid);
}

void write_field(std::ostream& out, const PeriodicScalarField& field) {
  out << kMagic << " v" << kVersion << "\n";
  out << "format coefficients\n";
  out << "# radius " << field.grid().radius() << "\n";
  out << std::setprecision(17);
  const auto& g = field.grid();
  for (int i = 0; i < g.mode_count(); ++i) {
    cplx c = field.coeffs()[i];
    if (c == cplx(0.0)) continue;
    out << g.modes()[i].n1 << ' ' << g.modes()[i].n2 << ' ' << c.real() << ' ' << c.imag() << "\n";
  }
}

}  // namespace pdirac
