#include <pcvx/quadrature.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

namespace pcvx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kNodeBudget = std::size_t(1) << 21;

/// Equispaced angular rule with `count` nodes: exact for e^{i k theta} with
/// |k| < count.
void angular_rule(int count, RVec& theta, double& weight) {
    theta.resize(count);
    for (int j = 0; j < count; ++j) theta[j] = 2.0 * kPi * j / count;
    weight = 2.0 * kPi / count;
}

struct Radial {
    RVec t;
    RVec w;
};

/// GL rule on (0, 1).
Radial unit_gl(int count) {
    Radial r;
    gauss_legendre(count, 0.0, 1.0, r.t, r.w);
    return r;
}

void check_budget(std::size_t count, const char* plan) {
    if (count > kNodeBudget) {
        std::ostringstream os;
        os << "domain_quadrature: " << plan << " would need " << count
           << " nodes (budget " << kNodeBudget << "); lower the degree";
        throw ArgumentError(os.str());
    }
}

/// Exact rule for the unit ball in C^n, n <= 3, built from radial and
/// simplex Gauss-Legendre factors and equispaced angles.  The simplex
/// variables are the squared moduli directions: |z_j|^2 = r^2 sigma_j with
/// sigma on the unit simplex, under which every monomial integrand is a
/// polynomial, so Gauss-Legendre applies exactly.
QuadratureRule ball_rule(int n, int degree) {
    const int m = degree + 4;       // radial/simplex GL counts
    const int ka = 2 * degree + 2;  // angular counts

    QuadratureRule rule;
    rule.exactness = degree;
    rule.exact = true;

    RVec theta;
    double wth = 0.0;
    angular_rule(ka, theta, wth);
    const Radial rad = unit_gl(m);

    if (n == 1) {
        check_budget(std::size_t(m) * ka, "disc rule");
        rule.plan = "polar: GL(" + std::to_string(m) + ") x theta(" + std::to_string(ka) + ")";
        for (int i = 0; i < m; ++i) {
            const double r = rad.t[i];
            for (int a = 0; a < ka; ++a) {
                QuadratureNode node;
                node.z = CVec(1);
                node.z[0] = std::polar(r, theta[a]);
                node.weight = rad.w[i] * r * wth;
                rule.nodes.push_back(std::move(node));
            }
        }
        return rule;
    }

    if (n == 2) {
        check_budget(std::size_t(m) * m * ka * ka, "ball C^2 rule");
        rule.plan = "spherical: GL(" + std::to_string(m) + ")^2 x theta(" + std::to_string(ka) + ")^2";
        for (int i = 0; i < m; ++i) {
            const double r = rad.t[i];
            for (int j = 0; j < m; ++j) {
                const double t = rad.t[j];  // t = |z_2|^2 / r^2
                const double s1 = std::sqrt(1.0 - t);
                const double s2 = std::sqrt(t);
                const double w = rad.w[i] * rad.w[j] * r * r * r * 0.5 * wth * wth;
                for (int a = 0; a < ka; ++a) {
                    for (int b = 0; b < ka; ++b) {
                        QuadratureNode node;
                        node.z = CVec(2);
                        node.z[0] = std::polar(r * s1, theta[a]);
                        node.z[1] = std::polar(r * s2, theta[b]);
                        node.weight = w;
                        rule.nodes.push_back(std::move(node));
                    }
                }
            }
        }
        return rule;
    }

    if (n == 3) {
        check_budget(std::size_t(m) * m * m * std::size_t(ka) * ka * ka, "ball C^3 rule");
        rule.plan = "spherical: GL(" + std::to_string(m) + ")^3 x theta(" + std::to_string(ka) + ")^3";
        // Stick-breaking simplex map: sigma_1 = 1-t1, sigma_2 = t1(1-t2),
        // sigma_3 = t1 t2, with Jacobian t1.
        for (int i = 0; i < m; ++i) {
            const double r = rad.t[i];
            const double r5 = r * r * r * r * r;
            for (int j = 0; j < m; ++j) {
                const double t1 = rad.t[j];
                for (int k = 0; k < m; ++k) {
                    const double t2 = rad.t[k];
                    const double s1 = std::sqrt(1.0 - t1);
                    const double s2 = std::sqrt(t1 * (1.0 - t2));
                    const double s3 = std::sqrt(t1 * t2);
                    const double w = rad.w[i] * rad.w[j] * rad.w[k] * r5 * t1 * 0.25 *
                                     wth * wth * wth;
                    for (int a = 0; a < ka; ++a) {
                        for (int b = 0; b < ka; ++b) {
                            for (int c = 0; c < ka; ++c) {
                                QuadratureNode node;
                                node.z = CVec(3);
                                node.z[0] = std::polar(r * s1, theta[a]);
                                node.z[1] = std::polar(r * s2, theta[b]);
                                node.z[2] = std::polar(r * s3, theta[c]);
                                node.weight = w;
                                rule.nodes.push_back(std::move(node));
                            }
                        }
                    }
                }
            }
        }
        return rule;
    }

    throw ArgumentError("domain_quadrature: spherical rules support dimension <= 3");
}

/// Polydisc rules are tensor products of per-coordinate polar disc rules.
QuadratureRule polydisc_rule(int n, int degree) {
    const QuadratureRule disc = ball_rule(1, degree);
    double total = 1.0;
    for (int j = 0; j < n; ++j) total *= static_cast<double>(disc.nodes.size());
    if (total > static_cast<double>(kNodeBudget))
        throw ArgumentError("domain_quadrature: polydisc tensor rule exceeds the node budget; lower the degree or dimension");

    QuadratureRule rule;
    rule.exactness = degree;
    rule.exact = true;
    rule.plan = "polydisc tensor of [" + disc.plan + "]";

    std::vector<std::size_t> idx(n, 0);
    const std::size_t per = disc.nodes.size();
    while (true) {
        QuadratureNode node;
        node.z = CVec(n);
        node.weight = 1.0;
        for (int j = 0; j < n; ++j) {
            node.z[j] = disc.nodes[idx[j]].z[0];
            node.weight *= disc.nodes[idx[j]].weight;
        }
        rule.nodes.push_back(std::move(node));
        int j = 0;
        for (; j < n; ++j) {
            if (++idx[j] < per) break;
            idx[j] = 0;
        }
        if (j == n) break;
    }
    return rule;
}

}  // namespace

double QuadratureRule::volume() const {
    double v = 0.0;
    for (const auto& node : nodes) v += node.weight;
    return v;
}

void gauss_legendre(int count, double a, double b, RVec& nodes, RVec& weights) {
    if (count < 1) throw ArgumentError("gauss_legendre: need at least one node");
    if (!(b > a)) throw ArgumentError("gauss_legendre: empty interval");

    // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre
    // three-term recurrence.  Nodes are the eigenvalues; the weight of node k
    // is 2 * (first eigenvector component)^2.
    RMat jacobi = RMat::Zero(count, count);
    for (int k = 1; k < count; ++k) {
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(jacobi);
    if (es.info() != Eigen::Success)
        throw NumericalError("gauss_legendre: Jacobi eigendecomposition failed");

    nodes.resize(count);
    weights.resize(count);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int k = 0; k < count; ++k) {
        nodes[k] = mid + half * es.eigenvalues()[k];
        const double v0 = es.eigenvectors()(0, k);
        weights[k] = 2.0 * v0 * v0 * half;
    }
}

QuadratureRule masked_box_quadrature(const DomainModel& domain, int per_axis) {
    const int n = domain.dimension();
    const int axes = 2 * n;
    double total = 1.0;
    for (int a = 0; a < axes; ++a) total *= per_axis;
    if (total > static_cast<double>(kNodeBudget))
        throw ArgumentError("masked_box_quadrature: node count exceeds the budget; lower per_axis or the dimension");

    std::vector<RVec> t(axes), w(axes);
    for (int a = 0; a < axes; ++a) {
        const double r = domain.coord_radius()[a / 2];
        gauss_legendre(per_axis, -r, r, t[a], w[a]);
    }

    QuadratureRule rule;
    rule.exact = false;
    rule.exactness = 0;
    rule.plan = "masked box GL(" + std::to_string(per_axis) + ")^" + std::to_string(axes);

    std::vector<int> idx(axes, 0);
    while (true) {
        CVec z(n);
        double weight = 1.0;
        for (int j = 0; j < n; ++j) {
            z[j] = Complex(t[2 * j][idx[2 * j]], t[2 * j + 1][idx[2 * j + 1]]);
            weight *= w[2 * j][idx[2 * j]] * w[2 * j + 1][idx[2 * j + 1]];
        }
        if (domain.rho(z) < 0.0) rule.nodes.push_back({std::move(z), weight});
        int a = 0;
        for (; a < axes; ++a) {
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
        }
        if (a == axes) break;
    }
    if (rule.nodes.empty())
        throw NumericalError("masked_box_quadrature: no nodes landed inside the domain");
    return rule;
}

QuadratureRule domain_quadrature(const DomainModel& domain, int degree) {
    if (degree < 0) throw ArgumentError("domain_quadrature: degree must be >= 0");
    const int n = domain.dimension();
    const std::string& name = domain.name();

    if (name == "ball") return ball_rule(n, degree);
    if (name == "polydisc") return polydisc_rule(n, degree);
    if (name == "ellipsoid") {
        // Image of the ball rule under z_j -> z_j / sqrt(a_j); the volume
        // element picks up prod 1/a_j.
        const std::vector<double>& a = domain.params();
        QuadratureRule rule = ball_rule(n, degree);
        double jac = 1.0;
        for (double c : a) jac /= c;
        for (auto& node : rule.nodes) {
            for (int j = 0; j < n; ++j) node.z[j] /= std::sqrt(a[j]);
            node.weight *= jac;
        }
        rule.plan = "ellipsoid-scaled " + rule.plan;
        return rule;
    }

    // Generic fallback: masked tensor grid, degree-adapted node count with at
    // least four nodes per polynomial degree per real axis.
    const int per_axis = std::max(4 * std::max(degree, 1), 24);
    return masked_box_quadrature(domain, per_axis);
}

}  // namespace pcvx
