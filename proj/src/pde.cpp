#include "mflab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace mflab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 32-node Gauss-Legendre rule on [-1,1], nodes by Newton iteration on the
// Legendre recurrence; computed once.
struct GaussLegendre {
    Vec nodes, weights;
    GaussLegendre() {
        const int n = 32;
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1);
                double dx = p1 / pp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1 - x * x) * pp * pp);
        }
    }
};

const GaussLegendre& gl32() {
    static GaussLegendre g;
    return g;
}

double wrap_half(double u) { return u - std::round(u); }

}  // namespace

double Mollifier::deriv(std::size_t order, double x) const {
    if (std::fabs(x) > 1.0) return 0.0;
    // differentiate the ascending coefficient array `order` times
    Vec c = poly;
    for (std::size_t o = 0; o < order; ++o) {
        if (c.size() <= 1) return 0.0;
        for (std::size_t k = 1; k < c.size(); ++k) c[k - 1] = c[k] * static_cast<double>(k);
        c.pop_back();
    }
    double v = 0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

double Mollifier::deriv_scaled(std::size_t order, double x, double eps) const {
    return deriv(order, x / eps) / std::pow(eps, static_cast<double>(order + 1));
}

Mollifier polynomial_mollifier(std::size_t q) {
    if (q < 1) throw std::invalid_argument("polynomial_mollifier: q must be >= 1");
    Mollifier m;
    m.q = q;
    m.c_q = std::tgamma(static_cast<double>(q) + 1.5) /
            (std::sqrt(kPi) * std::tgamma(static_cast<double>(q) + 1.0));
    // (1 - x^2)^q = sum_k binom(q,k) (-1)^k x^{2k}
    m.poly.assign(2 * q + 1, 0.0);
    double binom = 1;
    for (std::size_t k = 0; k <= q; ++k) {
        m.poly[2 * k] = m.c_q * binom * ((k % 2) ? -1.0 : 1.0);
        binom = binom * static_cast<double>(q - k) / static_cast<double>(k + 1);
    }
    return m;
}

SigmaEps::SigmaEps(const PdeSpec& spec, const Mollifier& m, double eps)
    : spec_(spec), m_(m), eps_(eps) {
    if (!(eps > 0)) throw std::invalid_argument("sigma_eps: eps must be positive");
    double cap = spec.domain == PdeDomain::torus ? 0.25 : 0.5;
    if (eps > cap)
        throw std::invalid_argument(
            "sigma_eps: mollifier support 2*eps is wider than the domain allows "
            "(eps cap " + std::to_string(cap) + ")");
    if (m.q < spec.p + 1)
        throw std::invalid_argument("sigma_eps: mollifier exponent must exceed the PDE order");
}

double SigmaEps::eval(double x, double xp, double t, double xi) const {
    double xp_eff = xp;
    if (spec_.domain == PdeDomain::torus) xp_eff = x - wrap_half(x - xp);
    double lo = std::max(x - eps_, xp_eff - eps_);
    double hi = std::min(x + eps_, xp_eff + eps_);
    if (spec_.domain == PdeDomain::interval) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
    }
    if (hi <= lo) return 0.0;
    const auto& g = gl32();
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double total = 0;
    for (std::size_t l = 0; l <= spec_.p; ++l) {
        if (l >= spec_.coeffs.size() || !spec_.coeffs[l]) continue;
        double s = 0;
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            double z = mid + half * g.nodes[k];
            s += g.weights[k] * m_.deriv_scaled(0, x - z, eps_) *
                 spec_.coeffs[l]->eval(t, z, xi) * m_.deriv_scaled(l, z - xp_eff, eps_);
        }
        total += s * half;
    }
    return total;
}

MollifiedKernel mollified_kernel(const PdeSpec& spec, const Mollifier& m, double eps) {
    MollifiedKernel mk;
    mk.spec = spec;
    mk.mollifier = m;
    mk.eps = eps;
    mk.variant = "sigma";
    auto sig = std::make_shared<SigmaEps>(spec, m, eps);
    mk.kernel.state_dim = 1;
    mk.kernel.name = "sigma_eps";
    mk.kernel.metric = spec.domain == PdeDomain::torus ? OmegaMetric::torus
                                                       : OmegaMetric::interval;
    mk.kernel.eval_fn = [sig](double t, double x, double xp, const double* xi,
                              const double* xip, double* out) {
        out[0] = sig->eval(x, xp, t, xi[0]) * xip[0];
    };
    return mk;
}

namespace {

// central difference stencils on a periodic grid; orders 1 and 2 are
// 4th-order accurate, 3 and 4 are 2nd-order
Vec grid_derivative(const Vec& f, std::size_t order, double h) {
    const std::size_t n = f.size();
    auto at = [&](std::ptrdiff_t i) {
        return f[static_cast<std::size_t>(((i % static_cast<std::ptrdiff_t>(n)) + n) % n)];
    };
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i);
        double v = 0;
        switch (order) {
            case 0: v = f[i]; break;
            case 1:
                v = (at(j - 2) - 8 * at(j - 1) + 8 * at(j + 1) - at(j + 2)) / (12 * h);
                break;
            case 2:
                v = (-at(j - 2) + 16 * at(j - 1) - 30 * f[i] + 16 * at(j + 1) - at(j + 2)) /
                    (12 * h * h);
                break;
            case 3:
                v = (-at(j - 2) + 2 * at(j - 1) - 2 * at(j + 1) + at(j + 2)) / (2 * h * h * h);
                break;
            case 4:
                v = (at(j - 2) - 4 * at(j - 1) + 6 * f[i] - 4 * at(j + 1) + at(j + 2)) /
                    (h * h * h * h);
                break;
            default:
                throw std::invalid_argument("grid_derivative: order > 4");
        }
        out[i] = v;
    }
    return out;
}

Vec mollify_grid(const Vec& f, const Mollifier& m, double eps) {
    const std::size_t n = f.size();
    const double h = 1.0 / static_cast<double>(n);
    const auto band = static_cast<std::ptrdiff_t>(std::ceil(eps / h)) + 1;
    // precompute the stencil of eta_eps on grid offsets
    Vec stencil(2 * band + 1);
    for (std::ptrdiff_t k = -band; k <= band; ++k)
        stencil[static_cast<std::size_t>(k + band)] =
            m.deriv_scaled(0, static_cast<double>(k) * h, eps) * h;
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::ptrdiff_t k = -band; k <= band; ++k) {
            std::size_t j = static_cast<std::size_t>(
                ((static_cast<std::ptrdiff_t>(i) - k) % static_cast<std::ptrdiff_t>(n) + n) % n);
            s += stencil[static_cast<std::size_t>(k + band)] * f[j];
        }
        out[i] = s;
    }
    return out;
}

}  // namespace

Vec apply_A_eps(const PdeSpec& spec, const Mollifier& m, double eps, const Vec& f) {
    const std::size_t n = f.size();
    if (n == 0) throw std::invalid_argument("apply_A_eps: empty grid");
    if (static_cast<double>(n) * eps < 16.0)
        throw std::invalid_argument("apply_A_eps: grid must resolve eps with >= 16 nodes");
    const double h = 1.0 / static_cast<double>(n);
    Vec g = mollify_grid(f, m, eps);
    Vec ag(n, 0.0);
    for (std::size_t l = 0; l <= spec.p; ++l) {
        if (l >= spec.coeffs.size() || !spec.coeffs[l]) continue;
        Vec dl = grid_derivative(g, l, h);
        for (std::size_t i = 0; i < n; ++i) {
            double x = static_cast<double>(i) * h;
            ag[i] += spec.coeffs[l]->eval(0.0, x, g[i]) * dl[i];
        }
    }
    return mollify_grid(ag, m, eps);
}

namespace {

struct PrecomputedSigma {
    // per derivative order: either a circulant row (x-independent inner
    // coefficient) or a full banded matrix
    struct Term {
        std::size_t order;
        ExprPtr outer;        // xi/t-dependent factor, null means 1
        bool circulant;
        Vec row;              // circulant case: value at index difference
        std::vector<Vec> mat; // general case
    };
    std::vector<Term> terms;
    std::size_t N;
};

PrecomputedSigma precompute_sigma(const PdeSpec& spec, const Mollifier& m, double eps,
                                  const TaggedPartition& part, unsigned threads) {
    SigmaEps checker(spec, m, eps);  // validates eps/domain/mollifier
    (void)checker;
    const auto& g = gl32();
    const std::size_t N = part.N;
    const bool torus = spec.domain == PdeDomain::torus;
    PrecomputedSigma pc;
    pc.N = N;
    for (std::size_t l = 0; l <= spec.p; ++l) {
        if (l >= spec.coeffs.size() || !spec.coeffs[l]) continue;
        const ExprPtr& c = spec.coeffs[l];
        bool x_dep = c->uses(Expr::Kind::var_x);
        bool state_dep = c->uses(Expr::Kind::var_xi) || c->uses(Expr::Kind::var_t);
        if (x_dep && state_dep)
            throw std::invalid_argument(
                "particle_pde_solve: coefficients may depend on x or on (t,y) but not both");
        PrecomputedSigma::Term term;
        term.order = l;
        // the pure convolution integral K_l(x, x') with the inner coefficient
        // a_l(z) baked in when it is x-dependent
        auto kl = [&](double x, double xp) {
            double xp_eff = torus ? x - wrap_half(x - xp) : xp;
            double lo = std::max(x - eps, xp_eff - eps);
            double hi = std::min(x + eps, xp_eff + eps);
            if (!torus) {
                lo = std::max(lo, 0.0);
                hi = std::min(hi, 1.0);
            }
            if (hi <= lo) return 0.0;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            double s = 0;
            for (std::size_t k = 0; k < g.nodes.size(); ++k) {
                double z = mid + half * g.nodes[k];
                double inner = x_dep ? c->eval(0.0, z, 0.0) : 1.0;
                s += g.weights[k] * m.deriv_scaled(0, x - z, eps) * inner *
                     m.deriv_scaled(l, z - xp_eff, eps);
            }
            return s * half;
        };
        if (state_dep || !x_dep) term.outer = c;
        if (x_dep) term.outer = nullptr;
        term.circulant = torus && !x_dep;
        if (term.circulant) {
            term.row.resize(N);
            for (std::size_t d = 0; d < N; ++d)
                term.row[d] = kl(part.tags[0], part.tags[d]);
        } else {
            term.mat.assign(N, Vec(N, 0.0));
            parallel_for(
                N,
                [&](std::size_t i) {
                    for (std::size_t j = 0; j < N; ++j)
                        term.mat[i][j] = kl(part.tags[i], part.tags[j]);
                },
                threads);
        }
        pc.terms.push_back(std::move(term));
    }
    return pc;
}

// xi_i' = (1/N) sum_l outer_l(t, x_i, xi_i) * sum_j K_l[i][j] xi_j
void sigma_rhs(const PrecomputedSigma& pc, const TaggedPartition& part, double t,
               const Vec& xi, Vec& out, unsigned threads) {
    const std::size_t N = pc.N;
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& term : pc.terms) {
        parallel_for(
            N,
            [&](std::size_t i) {
                double s = 0;
                if (term.circulant) {
                    for (std::size_t j = 0; j < N; ++j)
                        s += term.row[(j + N - i) % N] * xi[j];
                } else {
                    for (std::size_t j = 0; j < N; ++j) s += term.mat[i][j] * xi[j];
                }
                double outer =
                    term.outer ? term.outer->eval(t, part.tags[i], xi[i]) : 1.0;
                out[i] += outer * s / static_cast<double>(N);
            },
            threads);
    }
}

}  // namespace

PartitionField particle_pde_solve(const PdeSpec& spec, const Mollifier& m, double eps,
                                  std::size_t N, const std::function<double(double)>& y0,
                                  double t_end, const PdeSolveOptions& opts) {
    if (N == 0) throw std::invalid_argument("particle_pde_solve: N must be >= 1");
    TaggedPartition part = uniform_partition(
        N, TagRule::midpoint,
        spec.domain == PdeDomain::torus ? OmegaMetric::torus : OmegaMetric::interval);
    PrecomputedSigma pc = precompute_sigma(spec, m, eps, part, opts.threads);

    Vec xi(N);
    for (std::size_t i = 0; i < N; ++i) xi[i] = y0(part.tags[i]);
    Vec k1(N), k2(N), k3(N), k4(N), tmp(N);
    double t = 0;
    while (t < t_end - 1e-15) {
        double h = std::min(opts.dt, t_end - t);
        sigma_rhs(pc, part, t, xi, k1, opts.threads);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = xi[i] + 0.5 * h * k1[i];
        sigma_rhs(pc, part, t + 0.5 * h, tmp, k2, opts.threads);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = xi[i] + 0.5 * h * k2[i];
        sigma_rhs(pc, part, t + 0.5 * h, tmp, k3, opts.threads);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = xi[i] + h * k3[i];
        sigma_rhs(pc, part, t + h, tmp, k4, opts.threads);
        for (std::size_t i = 0; i < N; ++i) {
            xi[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!(std::fabs(xi[i]) < opts.blowup_threshold))
                throw std::runtime_error(
                    "particle_pde_solve: state exceeded blow-up threshold");
        }
        t += h;
    }
    std::vector<Vec> vals(N, Vec(1));
    for (std::size_t i = 0; i < N; ++i) vals[i][0] = xi[i];
    return field_from_states(part, vals);
}

namespace {

using Cplx = std::complex<double>;

void fft(std::vector<Cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n & (n - 1)) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * kPi / static_cast<double>(len) * (inverse ? 1 : -1);
        Cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Cplx w(1);
            for (std::size_t k = 0; k < len / 2; ++k) {
                Cplx u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

// cyclic tridiagonal solve (Sherman-Morrison around the Thomas algorithm)
Vec solve_cyclic_tridiag(const Vec& sub, const Vec& diag, const Vec& sup, const Vec& rhs) {
    const std::size_t n = diag.size();
    auto thomas = [&](const Vec& d, const Vec& r) {
        Vec cp(n), dp(n), x(n);
        cp[0] = sup[0] / d[0];
        dp[0] = r[0] / d[0];
        for (std::size_t i = 1; i < n; ++i) {
            double w = d[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / w;
            dp[i] = (r[i] - sub[i] * dp[i - 1]) / w;
        }
        x[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
        return x;
    };
    double alpha = sub[0], beta = sup[n - 1];
    double gamma = -diag[0];
    Vec d = diag;
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    Vec u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;
    Vec y = thomas(d, rhs);
    Vec z = thomas(d, u);
    double fact = (y[0] + alpha * y[n - 1] / gamma) /
                  (1.0 + z[0] + alpha * z[n - 1] / gamma);
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - fact * z[i];
    return x;
}

}  // namespace

Vec reference_pde_solve(const PdeSpec& spec, const std::function<double(double)>& y0,
                        double t_end, std::size_t grid_n) {
    if (!spec.is_linear())
        throw std::invalid_argument(
            "reference_pde_solve: quasilinear specs have no built-in reference; "
            "compare against analytic solutions instead");
    const std::size_t n = grid_n;
    const double h = 1.0 / static_cast<double>(n);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = y0(static_cast<double>(i) * h);
    if (t_end <= 0) return y;

    if (spec.is_constant_coefficient()) {
        // exact Fourier multiplier exp(t sum_l a_l (2 pi i k)^l)
        std::vector<Cplx> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = y[i];
        fft(a, false);
        for (std::size_t k = 0; k < n; ++k) {
            double freq = k <= n / 2 ? static_cast<double>(k)
                                     : static_cast<double>(k) - static_cast<double>(n);
            Cplx ik(0.0, 2 * kPi * freq);
            Cplx mult = 0, pw = 1;
            for (std::size_t l = 0; l <= spec.p; ++l) {
                mult += spec.coeff_eval(l, 0, 0, 0) * pw;
                pw *= ik;
            }
            a[k] *= std::exp(t_end * mult);
        }
        fft(a, true);
        for (std::size_t i = 0; i < n; ++i) y[i] = a[i].real();
        return y;
    }

    if (spec.p <= 1) {
        // method of lines, 4th-order central differences, rk4 with a CFL step
        double amax = 1e-12;
        for (std::size_t i = 0; i < n; ++i)
            amax = std::max(amax, std::fabs(spec.coeff_eval(1, 0, static_cast<double>(i) * h, 0)));
        double dt = std::min(0.2 * h / amax, 1e-2);
        auto rhs = [&](double t, const Vec& f) {
            Vec d1 = grid_derivative(f, 1, h);
            Vec out(n);
            for (std::size_t i = 0; i < n; ++i) {
                double x = static_cast<double>(i) * h;
                out[i] = spec.coeff_eval(0, t, x, 0) * f[i] + spec.coeff_eval(1, t, x, 0) * d1[i];
            }
            return out;
        };
        double t = 0;
        while (t < t_end - 1e-15) {
            double s = std::min(dt, t_end - t);
            Vec k1 = rhs(t, y), tmp(n);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * s * k1[i];
            Vec k2 = rhs(t + 0.5 * s, tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * s * k2[i];
            Vec k3 = rhs(t + 0.5 * s, tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * k3[i];
            Vec k4 = rhs(t + s, tmp);
            for (std::size_t i = 0; i < n; ++i)
                y[i] += s / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            t += s;
        }
        return y;
    }

    if (spec.p == 2) {
        // Crank-Nicolson with 2nd-order central differences, periodic solve
        double dt = std::min(1e-4, t_end);
        std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt));
        dt = t_end / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            double tm = (static_cast<double>(s) + 0.5) * dt;
            Vec sub(n), diag(n), sup(n), rhs(n);
            Vec lsub(n), ldiag(n), lsup(n);
            for (std::size_t i = 0; i < n; ++i) {
                double x = static_cast<double>(i) * h;
                double a0 = spec.coeff_eval(0, tm, x, 0);
                double a1 = spec.coeff_eval(1, tm, x, 0);
                double a2 = spec.coeff_eval(2, tm, x, 0);
                lsub[i] = a2 / (h * h) - a1 / (2 * h);
                ldiag[i] = a0 - 2 * a2 / (h * h);
                lsup[i] = a2 / (h * h) + a1 / (2 * h);
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
                rhs[i] = y[i] + 0.5 * dt * (lsub[i] * y[im] + ldiag[i] * y[i] + lsup[i] * y[ip]);
                sub[i] = -0.5 * dt * lsub[i];
                diag[i] = 1.0 - 0.5 * dt * ldiag[i];
                sup[i] = -0.5 * dt * lsup[i];
            }
            y = solve_cyclic_tridiag(sub, diag, sup, rhs);
        }
        return y;
    }

    throw std::invalid_argument(
        "reference_pde_solve: variable coefficients are supported up to order 2");
}

ScheduleValue scaling_schedule(std::size_t N, double C, std::size_t p) {
    if (N < 3) throw std::invalid_argument("scaling_schedule: N must be >= 3");
    if (!(C > 0)) throw std::invalid_argument("scaling_schedule: C must be positive");
    ScheduleValue s;
    s.eps = std::pow(C / std::log(static_cast<double>(N)),
                     1.0 / static_cast<double>(p + 2));
    if (s.eps > 0.25) {
        s.eps = 0.25;
        s.clamped = true;
    }
    return s;
}

MollifiedKernel gaussian_pde_kernel(const PdeSpec& spec, double eps) {
    if (spec.domain != PdeDomain::interval)
        throw std::invalid_argument(
            "gaussian_pde_kernel: requires the interval domain with vanishing "
            "higher-order coefficients");
    if (!(eps > 0)) throw std::invalid_argument("gaussian_pde_kernel: eps must be positive");
    MollifiedKernel mk;
    mk.spec = spec;
    mk.eps = eps;
    mk.variant = "gaussian";
    PdeSpec s = spec;
    mk.kernel.state_dim = 1;
    mk.kernel.name = "gaussian_graph_kernel";
    mk.kernel.metric = OmegaMetric::interval;
    mk.kernel.eval_fn = [s, eps](double t, double x, double xp, const double* xi,
                                 const double* xip, double* out) {
        double u = x - xp;
        double v = u / std::sqrt(2.0 * eps);
        double gauss = std::exp(-u * u / (2.0 * eps)) / std::sqrt(kPi * eps);
        // (d/dx')^l of the Gaussian: (2 eps)^{-l/2} H_l(v) times the Gaussian
        double h0 = 1.0, h1 = 2.0 * v;
        double total = 0;
        for (std::size_t l = 0; l <= s.p; ++l) {
            double hermite = l == 0 ? 1.0 : (l == 1 ? h1 : 0.0);
            if (l >= 2) {
                double hp = h0, hc = h1;
                for (std::size_t k = 2; k <= l; ++k) {
                    double hn = 2.0 * v * hc - 2.0 * static_cast<double>(k - 1) * hp;
                    hp = hc;
                    hc = hn;
                }
                hermite = hc;
            }
            double dl = std::pow(2.0 * eps, -0.5 * static_cast<double>(l)) * hermite * gauss;
            total += s.coeff_eval(l, t, x, xi[0]) * dl;
        }
        out[0] = total * xip[0];
    };
    return mk;
}

}  // namespace mflab
