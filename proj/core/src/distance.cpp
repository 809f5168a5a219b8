#include <pcvx/distance.hpp>

#include <cmath>

namespace pcvx {

namespace {

/// Real gradient of rho as a complex vector: the direction conj(grad)
/// maximizes the real directional derivative, with |grad_R| = 2 |grad|.
CVec real_gradient_direction(const DerivativeBundle& d) { return d.grad.conjugate(); }

}  // namespace

ProjectionResult project_to_boundary(const DomainModel& domain, const CVec& z, int max_iterations) {
    domain.check_dimension(z, "project_to_boundary");
    const double scale = std::max(1.0, domain.circumradius());

    CVec w = z;
    bool newton_ok = true;
    int it = 0;

    // Stage 1: Newton onto the level set along the gradient direction.
    for (; it < max_iterations; ++it) {
        const DerivativeBundle d = domain.derivatives(w);
        const double g2 = 4.0 * d.grad.squaredNorm();  // |grad_R rho|^2
        if (g2 < 1e-20) {
            newton_ok = false;
            break;
        }
        if (std::abs(d.value) <= 1e-13 * scale) break;
        w -= (2.0 * d.value / g2) * real_gradient_direction(d);
        if (!w.allFinite()) {
            newton_ok = false;
            break;
        }
    }

    if (!newton_ok || std::abs(domain.rho(w)) > 1e-12 * scale) {
        // Fallback: bisection along the ray through the gradient direction at z.
        const DerivativeBundle d0 = domain.derivatives(z);
        CVec dir = real_gradient_direction(d0);
        if (dir.norm() < 1e-14) {
            ProjectionResult fail{z, 0.0, it, false};
            return fail;
        }
        dir /= dir.norm();
        const double r0 = domain.rho(z);
        double t_lo = 0.0, t_hi = (r0 < 0.0 ? 1.0 : -1.0) * 1e-3 * scale;
        int expand = 0;
        while (expand++ < 60) {
            if (domain.rho(z + t_hi * dir) * r0 < 0.0) break;
            t_hi *= 2.0;
            if (std::abs(t_hi) > 8.0 * scale) break;
        }
        if (domain.rho(z + t_hi * dir) * r0 >= 0.0) {
            ProjectionResult fail{z, 0.0, it, false};
            return fail;
        }
        for (int b = 0; b < 200; ++b) {
            const double mid = 0.5 * (t_lo + t_hi);
            if (domain.rho(z + mid * dir) * r0 < 0.0)
                t_hi = mid;
            else
                t_lo = mid;
            if (std::abs(t_hi - t_lo) < 1e-15 * scale) break;
        }
        w = z + 0.5 * (t_lo + t_hi) * dir;
    }

    // Stage 2: slide tangentially toward z to reach the nearest foot point,
    // re-projecting after each slide.  Converges linearly; cheap per step.
    for (int s = 0; s < max_iterations; ++s) {
        const DerivativeBundle d = domain.derivatives(w);
        CVec nrm = real_gradient_direction(d);
        const double nn = nrm.norm();
        if (nn < 1e-14) break;
        nrm /= nn;
        const CVec to_z = z - w;
        // Only the real part of the Hermitian pairing is normal in the real
        // geometry; i*nrm is tangent to the hypersurface.
        const Complex along = hermitian_dot(to_z, nrm);
        CVec tangential = to_z - along.real() * nrm;
        if (tangential.norm() < 1e-13 * scale) break;
        w += 0.7 * tangential;
        for (int k = 0; k < 6; ++k) {
            const DerivativeBundle dd = domain.derivatives(w);
            const double g2 = 4.0 * dd.grad.squaredNorm();
            if (g2 < 1e-20 || std::abs(dd.value) <= 1e-13 * scale) break;
            w -= (2.0 * dd.value / g2) * real_gradient_direction(dd);
        }
        ++it;
    }

    ProjectionResult out;
    out.foot = w;
    out.distance = (w - z).norm();
    out.iterations = it;
    out.converged = std::abs(domain.rho(w)) <= 1e-12 * scale && w.allFinite();
    return out;
}

double distance_to_boundary(const DomainModel& domain, const CVec& z) {
    domain.check_dimension(z, "distance_to_boundary");
    if (domain.rho(z) > 0.0)
        throw ArgumentError("distance_to_boundary: point lies outside the domain");
    if (domain.has_distance_oracle()) return domain.distance_oracle(z);
    ProjectionResult proj = project_to_boundary(domain, z);
    if (!proj.converged)
        throw NumericalError("distance_to_boundary: boundary projection did not converge");
    return proj.distance;
}

double signed_distance(const DomainModel& domain, const CVec& z) {
    const double r = domain.rho(z);
    if (r <= 0.0 && domain.has_distance_oracle()) return -domain.distance_oracle(z);
    ProjectionResult proj = project_to_boundary(domain, z);
    if (!proj.converged)
        throw NumericalError("signed_distance: boundary projection did not converge");
    return r < 0.0 ? -proj.distance : proj.distance;
}

CVec outward_normal(const DomainModel& domain, const CVec& p) {
    CVec q = p;
    if (std::abs(domain.rho(q)) > 1e-10) {
        ProjectionResult proj = project_to_boundary(domain, p);
        if (!proj.converged)
            throw ArgumentError("outward_normal: could not reach the boundary");
        q = proj.foot;
    }
    const DerivativeBundle d = domain.derivatives(q);
    const double g = d.grad.norm();
    if (g < 1e-12) throw ArgumentError("outward_normal: gradient vanishes");
    return d.grad.conjugate() / g;
}

}  // namespace pcvx
