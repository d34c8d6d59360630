#ifndef VAXNET_MPS_HPP
#define VAXNET_MPS_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "vaxnet/mip_model.hpp"

namespace vaxnet::mip {

/// Malformed MPS input. `line()` is 1-based, 0 when not tied to a line.
class MpsParseError : public std::runtime_error {
 public:
  MpsParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// A section outside the supported subset (RANGES, SOS, quadratic terms, ...).
class UnsupportedSection : public MpsParseError {
 public:
  UnsupportedSection(int line, std::string section);
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

/// Writes NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA in the fixed-format column
/// layout. Names longer than the classic 8 characters are kept and the
/// fields stay whitespace separated, so names must be non-empty and free of
/// whitespace (std::invalid_argument otherwise). Binaries are written as BV
/// bounds; every column carries an objective entry so column order survives
/// a round trip.
void write_mps(const MipModel& model, std::ostream& out);
void export_mps(const MipModel& model, const std::filesystem::path& path);

/// Reads the subset written by write_mps, plus MARKER INTORG/INTEND blocks
/// (integer columns must end up with bounds [0, 1]). Throws MpsParseError or
/// UnsupportedSection.
MipModel read_mps(std::istream& in);
MipModel import_mps(const std::filesystem::path& path);

}  // namespace vaxnet::mip

#endif  // VAXNET_MPS_HPP
