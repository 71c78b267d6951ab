#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phoband/types.hpp"

namespace phoband {

enum class Material : std::uint8_t { Background = 0, Inclusion = 1 };

/// How much of each triangle's mass goes to the inclusion block M_b.
enum class InclusionMass : std::uint8_t {
  Tagged,        ///< 1 for Inclusion-tagged triangles, 0 otherwise (staircase disc).
  AreaFraction,  ///< exact |T cap disc| / |T|.
};

/// Triangulation of the unit cell [0,1]^2 with a centred disc inclusion.
struct UnitCellMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
  std::vector<Material> material_tag;
  /// Inclusion share of each triangle's mass, in [0, 1].
  std::vector<double> inclusion_weight;
  double h = 0.0;  ///< longest edge
  double disc_radius = 0.0;
  InclusionMass mass_rule = InclusionMass::AreaFraction;

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_triangles() const { return triangles.size(); }
  double area(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;
};

/// Vertex to periodic degree of freedom.
struct PeriodicDofMap {
  std::vector<int> dof_of_vertex;
  int n_dofs = 0;
};

inline constexpr double kPairingTolerance = 1e-12;

/// n x n grid of squares, each split along its anti-diagonal ((i+1,j)-(i,j+1)).
UnitCellMesh generate_structured(int n, double r, InclusionMass rule = InclusionMass::AreaFraction);

/// Splits every triangle into four through its edge midpoints.
UnitCellMesh refine_uniform(const UnitCellMesh& mesh);

PeriodicDofMap build_periodic_dof_map(const UnitCellMesh& mesh);

/// Reads node/element files (1-based, whitespace separated). When the element file
/// carries a region attribute, tags and inclusion weights come from it; otherwise
/// the centroid rule and `rule` are applied with radius `r`.
UnitCellMesh import_mesh(std::istream& nodes, std::istream& elements, double r,
                         InclusionMass rule = InclusionMass::AreaFraction);
UnitCellMesh import_mesh_files(const std::string& node_file, const std::string& ele_file, double r,
                               InclusionMass rule = InclusionMass::AreaFraction);

/// Writes the node/element format read by import_mesh; region attributes are the material tags.
void export_mesh(const UnitCellMesh& mesh, std::ostream& nodes, std::ostream& elements, bool with_attributes = true);

/// Throws InvalidGeometry on non-positive triangles, vertices outside the cell,
/// non-conforming edges or a total area different from 1.
void validate_mesh(const UnitCellMesh& mesh);

/// Recomputes material tags (centroid rule) and inclusion weights from disc_radius.
void classify_materials(UnitCellMesh& mesh);

double inclusion_tagged_area(const UnitCellMesh& mesh);
double total_area(const UnitCellMesh& mesh);

}  // namespace phoband
