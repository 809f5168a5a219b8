#pragma once

#include <pcvx/domain.hpp>

namespace pcvx {

/// Result of projecting a point onto the boundary {rho = 0}.
struct ProjectionResult {
    CVec foot;          ///< boundary point reached
    double distance;    ///< |foot - start|
    int iterations;
    bool converged;     ///< |rho(foot)| <= 1e-12 * scale and the foot-point condition held
};

/// Nearest-point projection onto the boundary.  Alternates a Newton step onto
/// the level set along the gradient with a tangential slide toward the start
/// point; falls back to bisection along the outward normal ray when Newton
/// stalls.  Works from either side of the boundary.
ProjectionResult project_to_boundary(const DomainModel& domain, const CVec& z,
                                     int max_iterations = 80);

/// Euclidean distance from an interior point to the boundary.  Uses the
/// domain's closed form when available, otherwise the projection above.
/// Throws ArgumentError when z lies outside the closure.
double distance_to_boundary(const DomainModel& domain, const CVec& z);

/// Signed distance: negative inside the domain, positive outside.
double signed_distance(const DomainModel& domain, const CVec& z);

/// Outward unit normal at (the boundary projection of) p, as the complex
/// vector conj(grad rho)/|grad rho| whose real direction is the outward
/// normal of the boundary hypersurface.
CVec outward_normal(const DomainModel& domain, const CVec& p);

}  // namespace pcvx
