#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "gplmk/mesh.hpp"

namespace gplmk::shapes {

// Regular icosahedron with vertices on the sphere of the given radius.
TriMesh icosahedron(double radius = 1.0);
// Loop-style midpoint subdivision of the icosahedron projected to the sphere:
// 12, 42, 162, 642, 2562 vertices for 0..4 subdivisions.
TriMesh icosphere(int subdivisions, double radius = 1.0);

// Flat grid in the z = 0 plane, (nx + 1) x (ny + 1) vertices, normal +z.
TriMesh planar_grid(int nx, int ny, double width = 1.0, double height = 1.0);
// Two rows of n vertices along the x axis.
TriMesh strip(int n, double length = 1.0, double width = 0.1);
// Open tube around the z axis.
TriMesh cylinder(double radius, double height, int around, int along);

// Flat disk of concentric rings (ring k holds 6k vertices), 1 + 3R(R+1)
// vertices for R rings, normal +z.
TriMesh disk(int rings, double radius = 1.0);
// Upper hemisphere built from the concentric disk; outward normals.
TriMesh hemisphere(int rings, double radius = 1.0);

// Replaces each vertex p by f(p), keeping the connectivity.
TriMesh displaced(const TriMesh& mesh, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f);

struct Bump {
  Eigen::Vector3d center;
  double amplitude = 0.0;
  double width = 0.1;
};

// Sphere with radial Gaussian bumps r = radius * (1 + sum a exp(-|p-c|^2 / 2w^2)).
TriMesh bumpy_sphere(int subdivisions, const std::vector<Bump>& bumps, double radius = 1.0);

// Disk-type height field z = dome * (1 - r^2) + sum of Gaussian bumps over
// the unit disk; a crude tooth crown when the bumps play the part of cusps.
TriMesh crown(int rings, double dome, const std::vector<Bump>& cusps);

// Four cusps of distinct heights; the default crown used by fixtures.
std::vector<Bump> molar_cusps();

}  // namespace gplmk::shapes
