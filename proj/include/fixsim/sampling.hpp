#pragma once

#include "fixsim/geometry.hpp"
#include "fixsim/random.hpp"

namespace fixsim {

// Uniform draw from the closed ball of given radius (mm) around center.
// Rejection from the bounding cube; radius 0 returns the center exactly.
Point3 sample_in_sphere(Rng& rng, const Point3& center, double radius_mm);

// Uniform draw from the spherical cap of directions within `colatitude_rad`
// of `dir` (inverse-CDF on cos theta, uniform azimuth). Colatitude 0 returns
// dir exactly; colatitude pi is the whole sphere.
UnitVec3 sample_solid_angle(Rng& rng, const UnitVec3& dir, double colatitude_rad);

}  // namespace fixsim
