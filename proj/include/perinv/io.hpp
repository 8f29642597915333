#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "perinv/geometry.hpp"

namespace perinv {

// ---------------------------------------------------------------- CIF subset

struct CifSite {
  std::string label;
  std::string element;
  std::array<double, 3> frac{};
  double occupancy = 1.0;
  int line = 0;
};

/// One data block of a CIF file, restricted to the tags the library reads:
/// _cell_length_*, _cell_angle_*, the _atom_site_ loop and the symmetry
/// operator loop (_symmetry_equiv_pos_as_xyz or _space_group_symop_operation_xyz).
struct CifDocument {
  std::string block;
  std::array<double, 3> lengths{};  // a, b, c
  std::array<double, 3> angles{};   // alpha, beta, gamma in degrees
  std::vector<CifSite> sites;
  std::vector<std::string> symops;
  std::vector<int> symop_lines;
  int line = 0;  // of the data_ header
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Affine map on fractional coordinates: x -> rotation x + translation.
struct SymOp {
  std::array<std::array<int, 3>, 3> rotation{};
  std::array<Rational, 3> translation{};

  std::array<double, 3> apply(const std::array<double, 3>& frac) const;
  std::string to_string() const;
};

/// Parses "x,y,z"-style operators. Terms may carry rational ("1/2") or decimal
/// offsets on either side; decimals must be multiples of 1/d, d in {1,2,3,4,6}.
/// `line` is only used in error messages.
SymOp parse_symop(const std::string& text, int line = 0);

struct CifOptions {
  /// Symmetry images closer than this (fractional, per axis, modulo 1) to an
  /// existing site are merged.
  double site_tolerance = 1e-4;
  /// Occupancies below 1 - occupancy_slack are rejected as disorder.
  double occupancy_slack = 1e-4;
};

/// Reads every data block of a CIF text. Errors carry line numbers.
std::vector<CifDocument> parse_cif_documents(const std::string& text);

/// Cell matrix (rows a, b, c) with a along x and b in the xy plane.
Matrix cell_matrix(const std::array<double, 3>& lengths, const std::array<double, 3>& angles);

/// (a, b, c, alpha, beta, gamma) of a 3 x 3 basis.
std::array<double, 6> cell_parameters(const Matrix& basis);

/// Symmetry-expanded periodic set of a block; the block name becomes the id.
PeriodicSet expand_cif(const CifDocument& doc, const CifOptions& options = {});

std::vector<PeriodicSet> parse_cif(const std::string& text, const CifOptions& options = {});

// ---------------------------------------------------------------- native JSON
//
// {"id": str, "dim": int, "rank": int, "basis": [[...] x rank],
//  "motif_frac": [[...] x m], "species": [str x m]}
// Either a single object or an array of them.

std::vector<PeriodicSet> read_native(const std::string& json_text);
std::string write_native(const PeriodicSet& set);
std::string write_native(const std::vector<PeriodicSet>& sets);

/// Loads a .cif or .json file (by extension).
std::vector<PeriodicSet> load_structures(const std::string& path, const CifOptions& options = {});

}  // namespace perinv
