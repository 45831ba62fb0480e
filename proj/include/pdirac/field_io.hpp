#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdirac/periodic_field.hpp"

namespace pdirac {

/// One Fourier coefficient phi_N = re + i im.
struct CoefficientRecord {
  int n1 = 0;
  int n2 = 0;
  double re = 0.0;
  double im = 0.0;
};

/// Field from sparse coefficient records. Repeated modes accumulate.
/// Throws GridMismatch if a record lies outside the window.
PeriodicScalarField field_from_records(const std::vector<CoefficientRecord>& records,
                                       const FourierGrid& grid);

/// Field from an s x s row-major sample table taken at x = (i/s, j/s).
/// The table may use its own resolution as long as s >= 2M + 1.
PeriodicScalarField field_from_sample_table(const std::vector<cplx>& table, int s,
                                            const FourierGrid& grid);

/// Reads the text field format (see docs/field_format.md). Throws FormatError.
PeriodicScalarField read_field(std::istream& in, const FourierGrid& grid);
PeriodicScalarField load_field(const std::string& path, const FourierGrid& grid);

/// Writes the coefficient-record form of the format, skipping exact zeros.
void write_field(std::ostream& out, const PeriodicScalarField& field);

}  // namespace pdirac
