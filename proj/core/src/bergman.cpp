#include <pcvx/bergman.hpp>

#include <pcvx/distance.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pcvx {

namespace {

constexpr double kPi = std::numbers::pi;

/// All multi-indices in `n` variables with |alpha| == total.
void shell_indices(int n, int total, std::vector<int>& prefix,
                   const std::function<void(const std::vector<int>&)>& visit) {
    if (static_cast<int>(prefix.size()) == n - 1) {
        prefix.push_back(total);
        visit(prefix);
        prefix.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        prefix.push_back(k);
        shell_indices(n, total - k, prefix, visit);
        prefix.pop_back();
    }
}

std::vector<std::vector<int>> all_indices_up_to(int n, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    for (int d = 0; d <= degree; ++d)
        shell_indices(n, d, prefix, [&](const std::vector<int>& a) { out.push_back(a); });
    return out;
}

/// ln(k!) table.
std::vector<double> log_factorials(int up_to) {
    std::vector<double> lg(up_to + 1);
    for (int k = 0; k <= up_to; ++k) lg[k] = std::lgamma(k + 1.0);
    return lg;
}

/// Monomial vector and first-derivative matrix of the basis at a point.
struct MonomialEval {
    CVec values;  // m_a(z)
    CMat deriv;   // deriv(j, a) = d m_a / d z_j
};

MonomialEval eval_monomials(const std::vector<std::vector<int>>& alphas, const CVec& z,
                            bool with_derivatives) {
    const int n = static_cast<int>(z.size());
    const int m = static_cast<int>(alphas.size());
    int degree = 0;
    for (const auto& a : alphas) {
        int total = 0;
        for (int k : a) total += k;
        degree = std::max(degree, total);
    }
    // Power tables z_j^k.
    std::vector<std::vector<Complex>> pow(n, std::vector<Complex>(degree + 1));
    for (int j = 0; j < n; ++j) {
        pow[j][0] = 1.0;
        for (int k = 1; k <= degree; ++k) pow[j][k] = pow[j][k - 1] * z[j];
    }

    MonomialEval out;
    out.values.resize(m);
    if (with_derivatives) out.deriv = CMat::Zero(n, m);
    for (int a = 0; a < m; ++a) {
        Complex v(1.0, 0.0);
        for (int j = 0; j < n; ++j) v *= pow[j][alphas[a][j]];
        out.values[a] = v;
        if (!with_derivatives) continue;
        for (int j = 0; j < n; ++j) {
            const int k = alphas[a][j];
            if (k == 0) continue;
            Complex d(static_cast<double>(k), 0.0);
            for (int i = 0; i < n; ++i) d *= pow[i][i == j ? alphas[a][i] - 1 : alphas[a][i]];
            out.deriv(j, a) = d;
        }
    }
    return out;
}

}  // namespace

KernelMethod kernel_method_from_string(const std::string& s) {
    if (s == "oracle") return KernelMethod::Oracle;
    if (s == "series") return KernelMethod::Series;
    if (s == "gram") return KernelMethod::Gram;
    throw ArgumentError("unknown kernel method '" + s + "' (oracle|series|gram)");
}

std::string to_string(KernelMethod m) {
    switch (m) {
        case KernelMethod::Oracle: return "oracle";
        case KernelMethod::Series: return "series";
        case KernelMethod::Gram: return "gram";
    }
    return "?";
}

KernelEvaluator::KernelEvaluator(const DomainModel& domain, BergmanOptions options)
    : domain_(domain), opt_(options) {
    if (opt_.degree < 0) throw ArgumentError("KernelEvaluator: degree must be >= 0");
    if (opt_.degree_cap < 4) throw ArgumentError("KernelEvaluator: degree cap too small");

    const int n = domain_.dimension();
    const std::string& name = domain_.name();

    if (opt_.method == KernelMethod::Oracle) {
        if (!domain_.has_kernel_oracle())
            throw ArgumentError("domain '" + name +
                                "' has no closed-form kernel; use the series or gram method");
        plan_ = "closed form";
        return;
    }

    if (opt_.method == KernelMethod::Series) {
        // Monomial L2 norms on the complete Reinhardt catalog geometries,
        // as log values for overflow-free term assembly.
        auto lg = std::make_shared<std::vector<double>>(log_factorials(opt_.degree_cap + n + 4));
        if (name == "ball") {
            log_norm_ = [n, lg](const std::vector<int>& a) {
                int total = 0;
                double s = n * std::log(kPi);
                for (int k : a) {
                    s += (*lg)[k];
                    total += k;
                }
                return s - (*lg)[n + total];
            };
        } else if (name == "polydisc") {
            log_norm_ = [](const std::vector<int>& a) {
                double s = 0.0;
                for (int k : a) s += std::log(kPi) - std::log(k + 1.0);
                return s;
            };
        } else if (name == "ellipsoid") {
            std::vector<double> coeff = domain_.params();
            log_norm_ = [n, lg, coeff](const std::vector<int>& a) {
                int total = 0;
                double s = n * std::log(kPi);
                for (int j = 0; j < n; ++j) {
                    s += (*lg)[a[j]] - (a[j] + 1) * std::log(coeff[j]);
                    total += a[j];
                }
                return s - (*lg)[n + total];
            };
        } else if (name == "product_disc_ball") {
            log_norm_ = [lg](const std::vector<int>& a) {
                return std::log(kPi) - std::log(a[0] + 1.0) + 2.0 * std::log(kPi) +
                       (*lg)[a[1]] + (*lg)[a[2]] - (*lg)[2 + a[1] + a[2]];
            };
        } else {
            throw ArgumentError("series kernel needs a complete Reinhardt catalog domain, got '" +
                                name + "'");
        }
        plan_ = "monomial series, shell-adaptive, cap " + std::to_string(opt_.degree_cap);
        return;
    }

    // Gram path.  Product geometries factor into independent blocks.
    std::vector<std::pair<DomainModel, std::vector<int>>> factors;
    if (name == "polydisc" && n > 1) {
        for (int j = 0; j < n; ++j) factors.emplace_back(catalog_domain("ball", 1), std::vector<int>{j});
    } else if (name == "product_disc_ball") {
        factors.emplace_back(catalog_domain("ball", 1), std::vector<int>{0});
        factors.emplace_back(catalog_domain("ball", 2), std::vector<int>{1, 2});
    } else {
        std::vector<int> coords(n);
        for (int j = 0; j < n; ++j) coords[j] = j;
        factors.emplace_back(domain_, coords);
    }

    std::ostringstream plan;
    plan << "gram degree " << opt_.degree;
    for (auto& [sub, coords] : factors) {
        GramBlock block;
        block.coords = coords;
        block.alphas = all_indices_up_to(static_cast<int>(coords.size()), opt_.degree);
        const int m = static_cast<int>(block.alphas.size());

        QuadratureRule rule = domain_quadrature(sub, opt_.degree);
        block.plan = rule.plan;

        CMat gram = CMat::Zero(m, m);
        const std::size_t chunk_rows = 4096;
        CMat chunk(chunk_rows, m);
        std::size_t filled = 0;
        for (const auto& node : rule.nodes) {
            MonomialEval me = eval_monomials(block.alphas, node.z, false);
            const double sw = std::sqrt(node.weight);
            for (int a = 0; a < m; ++a) chunk(filled, a) = sw * std::conj(me.values[a]);
            if (++filled == chunk_rows) {
                gram.noalias() += chunk.adjoint() * chunk;
                filled = 0;
            }
        }
        if (filled > 0) gram.noalias() += chunk.topRows(filled).adjoint() * chunk.topRows(filled);

        // Ridge regularization and conditioning report.
        const double ridge = 1e-14 * gram.trace().real();
        gram += ridge * CMat::Identity(m, m);

        Eigen::SelfAdjointEigenSolver<CMat> es(gram);
        if (es.info() != Eigen::Success)
            throw NumericalError("gram eigendecomposition failed");
        const double lo = es.eigenvalues()(0);
        const double hi = es.eigenvalues()(m - 1);
        if (!(lo > 0.0))
            throw NumericalError("gram matrix not positive definite after regularization");
        block.condition = hi / lo;
        if (block.condition > 1e12) {
            std::ostringstream os;
            os << "gram condition " << block.condition
               << " exceeds 1e12; lower the basis degree";
            throw NumericalError(os.str());
        }

        Eigen::LLT<CMat> llt(gram);
        if (llt.info() != Eigen::Success)
            throw NumericalError("gram Cholesky factorization failed");
        block.chol = llt.matrixL();
        condition_ = std::max(condition_, block.condition);
        plan << " | block(" << coords.size() << "d, " << rule.plan << ", "
             << rule.nodes.size() << " nodes)";
        blocks_.push_back(std::move(block));
    }
    trust_floor_ = 1.0 / std::max(opt_.degree, 1);
    plan_ = plan.str();
}

double KernelEvaluator::gram_block_kernel(const GramBlock& block, const CVec& z,
                                          CVec* grad_accum, CMat* hess_accum) const {
    const int nb = static_cast<int>(block.coords.size());
    CVec sub(nb);
    for (int j = 0; j < nb; ++j) sub[j] = z[block.coords[j]];

    const bool want_d = grad_accum != nullptr || hess_accum != nullptr;
    MonomialEval me = eval_monomials(block.alphas, sub, want_d);

    const auto L = block.chol.triangularView<Eigen::Lower>();
    const CVec v = L.solve(me.values);
    const double K = v.squaredNorm();
    if (!(K > 0.0)) throw NumericalError("gram kernel evaluated to a nonpositive value");

    if (want_d) {
        CMat u(static_cast<int>(v.size()), nb);
        for (int j = 0; j < nb; ++j) u.col(j) = L.solve(CVec(me.deriv.row(j).transpose()));
        // d_j dbar_k log K = (u_k^H u_j)/K - (v^H u_j)(u_k^H v)/K^2
        for (int j = 0; j < nb; ++j) {
            const Complex dj = (v.adjoint() * u.col(j))(0, 0);
            if (grad_accum) (*grad_accum)[block.coords[j]] = dj / K;
            if (hess_accum) {
                for (int k = 0; k < nb; ++k) {
                    const Complex num = (u.col(k).adjoint() * u.col(j))(0, 0);
                    const Complex dk = (v.adjoint() * u.col(k))(0, 0);
                    (*hess_accum)(block.coords[j], block.coords[k]) =
                        num / K - dj * std::conj(dk) / (K * K);
                }
            }
        }
    }
    return K;
}

KernelSample KernelEvaluator::series_sample(const CVec& z, CVec* S1, CMat* S2) const {
    const int n = domain_.dimension();
    std::vector<double> lnr(n), theta(n);
    for (int j = 0; j < n; ++j) {
        const double r = std::abs(z[j]);
        lnr[j] = r > 0.0 ? std::log(r) : -std::numeric_limits<double>::infinity();
        theta[j] = r > 0.0 ? std::arg(z[j]) : 0.0;
    }

    double S0 = 0.0;
    if (S1) *S1 = CVec::Zero(n);
    if (S2) *S2 = CMat::Zero(n, n);

    // term = factor * exp(sum c_j ln|z_j| - lognorm) * exp(i sum p_j theta_j).
    // A zero modulus exponent contributes nothing even at |z_j| = 0; a
    // positive exponent at |z_j| = 0 kills the term.
    auto term = [&](double lognorm, const std::vector<int>& c, double factor, double phase,
                    double& mass) -> Complex {
        double expo = -lognorm + std::log(factor);
        for (int j = 0; j < n; ++j) {
            if (c[j] == 0) continue;
            if (std::isinf(lnr[j])) return Complex(0.0, 0.0);
            expo += c[j] * lnr[j];
        }
        const double mag = std::exp(expo);
        mass += mag;
        return std::polar(mag, phase);
    };

    double prev_mass = -1.0;
    double total_mass = 0.0;
    double tail = std::numeric_limits<double>::infinity();
    int streak = 0;
    bool converged = false;
    int degree_used = 0;
    std::vector<int> prefix;
    std::vector<int> c(n);

    for (int d = 0; d <= opt_.degree_cap; ++d) {
        double mass = 0.0;
        shell_indices(n, d, prefix, [&](const std::vector<int>& a) {
            const double lognorm = log_norm_(a);
            for (int j = 0; j < n; ++j) c[j] = 2 * a[j];
            S0 += term(lognorm, c, 1.0, 0.0, mass).real();
            if (S1) {
                for (int j = 0; j < n; ++j) {
                    if (a[j] == 0) continue;
                    c[j] = 2 * a[j] - 1;
                    (*S1)[j] += term(lognorm, c, a[j], -theta[j], mass);
                    c[j] = 2 * a[j];
                }
            }
            if (S2) {
                for (int j = 0; j < n; ++j) {
                    if (a[j] == 0) continue;
                    c[j] = 2 * a[j] - 2;
                    (*S2)(j, j) += term(lognorm, c, double(a[j]) * a[j], 0.0, mass).real();
                    c[j] = 2 * a[j];
                    for (int k = j + 1; k < n; ++k) {
                        if (a[k] == 0) continue;
                        c[j] = 2 * a[j] - 1;
                        c[k] = 2 * a[k] - 1;
                        const Complex t =
                            term(lognorm, c, double(a[j]) * a[k], theta[k] - theta[j], mass);
                        (*S2)(j, k) += t;
                        (*S2)(k, j) += std::conj(t);
                        c[j] = 2 * a[j];
                        c[k] = 2 * a[k];
                    }
                }
            }
        });

        total_mass += mass;
        degree_used = d;
        if (d >= 1) {
            if (mass == 0.0 && prev_mass == 0.0) {
                tail = 0.0;
                converged = true;
                break;
            }
            if (prev_mass > 0.0 && mass < prev_mass) {
                const double q = mass / prev_mass;
                const double t = mass * q / (1.0 - q);
                if (t <= opt_.tail_tol * total_mass) {
                    tail = t;
                    if (++streak >= 2) {
                        converged = true;
                        break;
                    }
                } else {
                    streak = 0;
                }
            } else {
                streak = 0;
            }
        }
        prev_mass = mass;
    }

    if (!converged)
        throw NumericalError(
            "series truncation did not reach the tail target within the degree cap; "
            "the point may be too close to the boundary for the series path");
    if (!(tail <= 1e-6 * total_mass))
        throw NumericalError("series tail estimate exceeds 1e-6 of the accumulated value");

    KernelSample sample;
    sample.value = S0;
    sample.tail = tail;
    sample.degree = degree_used;
    sample.condition = 1.0;
    sample.method = "series";
    return sample;
}

KernelSample KernelEvaluator::kernel_sample(const CVec& z) const {
    domain_.check_dimension(z, "kernel");
    if (!(domain_.rho(z) < 0.0))
        throw ArgumentError("kernel: the point must lie inside the domain");

    KernelSample sample;
    switch (opt_.method) {
        case KernelMethod::Oracle:
            sample.value = domain_.kernel_oracle(z);
            sample.method = "oracle";
            return sample;
        case KernelMethod::Series:
            return series_sample(z, nullptr, nullptr);
        case KernelMethod::Gram: {
            double K = 1.0;
            for (const auto& block : blocks_) K *= gram_block_kernel(block, z, nullptr, nullptr);
            sample.value = K;
            sample.degree = opt_.degree;
            sample.condition = condition_;
            sample.method = "gram";
            return sample;
        }
    }
    throw ArgumentError("kernel: unknown method");
}

double KernelEvaluator::kernel(const CVec& z) const { return kernel_sample(z).value; }

CMat KernelEvaluator::log_hessian(const CVec& z) const {
    domain_.check_dimension(z, "log_hessian");
    if (!(domain_.rho(z) < 0.0))
        throw ArgumentError("log_hessian: the point must lie inside the domain");
    const int n = domain_.dimension();

    if (opt_.method == KernelMethod::Series) {
        CVec S1;
        CMat S2;
        KernelSample s = series_sample(z, &S1, &S2);
        const double K = s.value;
        CMat B = S2 / K - (S1 * S1.adjoint()) / (K * K);
        return 0.5 * (B + B.adjoint());
    }

    if (opt_.method == KernelMethod::Gram) {
        CMat B = CMat::Zero(n, n);
        for (const auto& block : blocks_) gram_block_kernel(block, z, nullptr, &B);
        return 0.5 * (B + B.adjoint());
    }

    // Oracle: polarize the closed-form metric.
    if (!domain_.has_metric_oracle())
        throw ArgumentError("domain '" + domain_.name() +
                            "' has no closed-form metric; use the series or gram method");
    auto q = [&](const CVec& X) {
        const double f = domain_.metric_oracle(z, X);
        return f * f;
    };
    CMat B(n, n);
    for (int j = 0; j < n; ++j) {
        CVec ej = CVec::Zero(n);
        ej[j] = 1.0;
        B(j, j) = q(ej);
        for (int k = j + 1; k < n; ++k) {
            CVec ek = CVec::Zero(n);
            ek[k] = 1.0;
            const double re = 0.25 * (q(ej + ek) - q(ej - ek));
            const double im = 0.25 * (q(ej + Complex(0, 1) * ek) - q(ej - Complex(0, 1) * ek));
            B(j, k) = Complex(re, im);
            B(k, j) = Complex(re, -im);
        }
    }
    return B;
}

double KernelEvaluator::metric(const CVec& z, const CVec& X) const {
    domain_.check_dimension(X, "metric direction");
    if (X.norm() == 0.0) throw ArgumentError("metric: direction must be nonzero");
    if (opt_.method == KernelMethod::Oracle && domain_.has_metric_oracle())
        return domain_.metric_oracle(z, X);
    const CMat B = log_hessian(z);
    const double form = ((X.transpose() * B * X.conjugate())(0, 0)).real();
    if (!(form > 0.0))
        throw NumericalError("metric: log-kernel Hessian numerically indefinite at this point");
    return std::sqrt(form);
}

nlohmann::json KernelEvaluator::descriptor() const {
    return {{"method", to_string(opt_.method)},
            {"degree", opt_.degree},
            {"degree_cap", opt_.degree_cap},
            {"tail_tol", opt_.tail_tol},
            {"plan", plan_},
            {"condition", condition_},
            {"trust_floor", trust_floor_}};
}

namespace {

/// Planar disc cut by a rotated halfplane window, as a callback domain for
/// the masked quadrature path.
DomainModel planar_cut_disc(Complex axis, double offset) {
    const double t = 0.5 * (offset + 1.0);
    CVec anchor(1);
    anchor[0] = axis * t;
    RVec radius = RVec::Ones(1);
    auto rho = [axis, offset](const CVec& w) {
        const double in_disc = std::norm(w[0]) - 1.0;
        const double behind = offset - (w[0] * std::conj(axis)).real();
        return std::max(in_disc, behind);
    };
    return domain_from_function(1, rho, radius, anchor);
}

}  // namespace

LocalizationReport kernel_localization_ratio(const DomainModel& domain,
                                             const HalfspaceWindow& window, const CVec& p,
                                             const std::vector<double>& deltas, int degree) {
    domain.check_dimension(p, "kernel_localization_ratio");
    domain.check_dimension(window.direction, "kernel_localization_ratio window");
    if (window.direction.norm() == 0.0)
        throw ArgumentError("kernel_localization_ratio: window direction must be nonzero");
    const int n = domain.dimension();
    const CVec unit = window.direction / window.direction.norm();
    const CVec nu = outward_normal(domain, p);

    LocalizationReport report;

    // Window containing the whole closure: the cut equals the domain and the
    // ratio is exactly 1 by construction.
    if (window.offset <= -domain.circumradius() * (1.0 + 1e-12)) {
        report.note = "window contains the domain; identical evaluators";
        for (double d : deltas) {
            report.deltas.push_back(d);
            report.ratios.push_back(1.0);
        }
        report.min_ratio = report.max_ratio = 1.0;
        return report;
    }

    BergmanOptions full_opt;
    full_opt.method = KernelMethod::Gram;

    // Product shortcut: an axis-aligned window on the polydisc cuts exactly
    // one disc factor, and the other factors cancel in the ratio.
    int axis = -1;
    if (domain.name() == "polydisc") {
        for (int j = 0; j < n; ++j) {
            if (std::abs(std::abs(unit[j]) - 1.0) < 1e-12) {
                bool others_zero = true;
                for (int k = 0; k < n; ++k)
                    if (k != j && std::abs(unit[k]) > 1e-12) others_zero = false;
                if (others_zero) axis = j;
                break;
            }
        }
    }

    std::function<double(const CVec&)> cut_kernel, full_kernel;
    std::function<bool(const CVec&)> in_cut;
    double floor = 0.0;

    if (axis >= 0) {
        full_opt.degree = degree;
        auto disc = std::make_shared<KernelEvaluator>(catalog_domain("ball", 1), full_opt);
        auto cut = std::make_shared<KernelEvaluator>(planar_cut_disc(unit[axis], window.offset),
                                                     full_opt);
        full_kernel = [disc, axis](const CVec& z) {
            CVec w(1);
            w[0] = z[axis];
            return disc->kernel(w);
        };
        cut_kernel = [cut, axis](const CVec& z) {
            CVec w(1);
            w[0] = z[axis];
            return cut->kernel(w);
        };
        in_cut = [unit, axis, off = window.offset](const CVec& z) {
            return (z[axis] * std::conj(unit[axis])).real() > off && std::abs(z[axis]) < 1.0;
        };
        floor = 1.0 / degree;
        report.note = "polydisc axis window: ratio reduced to the cut disc factor";
    } else {
        if (n > 2)
            throw ArgumentError(
                "kernel_localization_ratio: direct window cuts are limited to n <= 2");
        const int eff = n == 2 ? std::min(degree, 8) : degree;
        full_opt.degree = eff;
        auto full = std::make_shared<KernelEvaluator>(domain, full_opt);

        DomainModel base = domain;
        CVec u = unit;
        const double off = window.offset;
        auto rho_cut = [base, u, off](const CVec& z) {
            return std::max(base.rho(z), off - hermitian_dot(z, u).real());
        };
        CVec anchor = p - std::min(0.45, 0.45 * domain.circumradius()) * nu;
        DomainModel cut_domain =
            domain_from_function(n, rho_cut, domain.coord_radius(), anchor);
        auto cut = std::make_shared<KernelEvaluator>(cut_domain, full_opt);

        full_kernel = [full](const CVec& z) { return full->kernel(z); };
        cut_kernel = [cut](const CVec& z) { return cut->kernel(z); };
        in_cut = [rho_cut](const CVec& z) { return rho_cut(z) < 0.0; };
        floor = 1.0 / eff;
        std::ostringstream os;
        os << "direct masked cut at degree " << eff;
        report.note = os.str();
    }

    for (double d : deltas) {
        const CVec z = p - d * nu;
        if (d < floor || !in_cut(z)) {
            ++report.truncated;
            continue;
        }
        report.deltas.push_back(d);
        report.ratios.push_back(cut_kernel(z) / full_kernel(z));
    }
    if (report.ratios.empty()) {
        report.note += "; all probes below the resolution floor";
        return report;
    }
    report.min_ratio = *std::min_element(report.ratios.begin(), report.ratios.end());
    report.max_ratio = *std::max_element(report.ratios.begin(), report.ratios.end());
    return report;
}

}  // namespace pcvx
