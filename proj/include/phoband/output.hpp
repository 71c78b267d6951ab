#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "phoband/bands.hpp"

namespace phoband {

/// One row per (k sample, band); a sample without eigenvalues gets band_index -1 and empty values.
/// Numbers use the shortest representation that reads back to the same double.
void write_bands_csv(const BandDiagram& diagram, std::ostream& out);

/// Records only; metadata is not part of the CSV. Throws ParseError.
std::vector<BandRecord> read_bands_csv(std::istream& in);

void write_bands_json(const BandDiagram& diagram, std::ostream& out);

/// Extra curves drawn dashed under the bands, in (path_param, omega / 2 pi) coordinates.
using SvgOverlay = std::vector<std::vector<std::pair<double, double>>>;

/// Real parts of omega / 2 pi against path_param, one polyline per band index.
void write_bands_svg(const BandDiagram& diagram, std::ostream& out, const SvgOverlay& overlay = {});

void write_converge_csv(const ConvergenceReport& report, std::ostream& out);

}  // namespace phoband
