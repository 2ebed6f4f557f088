#ifndef MFLAB_PDE_HPP
#define MFLAB_PDE_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "mflab/kernels.hpp"
#include "mflab/partition.hpp"

namespace mflab {

// Expression tree for PDE coefficients a_l(t, x, xi).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { number, var_t, var_x, var_xi, add, sub, mul, div, neg, sin, cos, exp };
    Kind kind = Kind::number;
    double value = 0.0;
    ExprPtr a, b;

    double eval(double t, double x, double xi) const;
    bool uses(Kind k) const;
};

std::string serialize_expr(const ExprPtr& e);  // stable s-expression form

enum class PdeDomain { torus, interval };

// d/dt y = sum_l a_l(t, x, y) * dx^l y, 1-D state.
struct PdeSpec {
    std::size_t p = 0;                 // max derivative order
    std::vector<ExprPtr> coeffs;       // a_0..a_p, null means zero
    PdeDomain domain = PdeDomain::torus;

    bool is_linear() const;            // no coefficient mentions xi
    bool is_constant_coefficient() const;
    double coeff_eval(std::size_t l, double t, double x, double xi) const;
    std::string serialize() const;
};

struct PdeParseError : std::runtime_error {
    std::size_t position;
    PdeParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error("position " + std::to_string(pos) + ": " + msg),
          position(pos) {}
};

// Grammar: "dt y =" term ("+" term)*, term = [coeff "*"] target,
// target = "y" | "dx y" | "dx^INT y".  Inside a coefficient the identifier y
// denotes the state xi; a bare leading y in a term is always the
// zeroth-derivative target, so state-dependent coefficients are written
// parenthesized, e.g. "(y)*dx^0 y".
PdeSpec parse_pde(const std::string& text, PdeDomain domain = PdeDomain::torus);

// eta_q(x) = c_q (1-x^2)^q on [-1,1] with c_q = Gamma(q+3/2)/(sqrt(pi) Gamma(q+1)).
struct Mollifier {
    std::size_t q = 0;
    double c_q = 0.0;
    Vec poly;  // coefficients of c_q (1-x^2)^q in ascending powers

    double eval(double x) const { return deriv(0, x); }
    double deriv(std::size_t order, double x) const;
    // scaled family eta_eps(x) = eta(x/eps)/eps
    double deriv_scaled(std::size_t order, double x, double eps) const;
};

Mollifier polynomial_mollifier(std::size_t q);

// sigma_eps(x,x') = sum_l integral eta_eps(x-z) a_l(t,z,xi) (D^l eta_eps)(z-x') dz,
// 32-node Gauss-Legendre on the support intersection; on the torus both
// factors wrap, which requires eps <= 1/4.
class SigmaEps {
  public:
    SigmaEps(const PdeSpec& spec, const Mollifier& m, double eps);
    double eval(double x, double xp, double t = 0.0, double xi = 0.0) const;
    double eps() const { return eps_; }

  private:
    PdeSpec spec_;
    Mollifier m_;
    double eps_;
};

struct MollifiedKernel {
    PdeSpec spec;
    Mollifier mollifier;
    double eps = 0.0;
    std::size_t quad_nodes = 32;
    std::string variant;  // "sigma" or "gaussian"
    InteractionKernel kernel;
};

MollifiedKernel mollified_kernel(const PdeSpec& spec, const Mollifier& m, double eps);

// A_eps f = eta_eps * (A (eta_eps * f)) on a uniform torus grid of f.size()
// nodes; requires at least 16 nodes per eps.
Vec apply_A_eps(const PdeSpec& spec, const Mollifier& m, double eps, const Vec& f);

struct PdeSolveOptions {
    double dt = 1e-3;
    unsigned threads = 1;
    double blowup_threshold = 1e12;
};

// rk4 solve of xi_i' = (1/N) sum_j sigma_eps(x_i, x_j; t, xi_i) xi_j on the
// midpoint tags, with the z-integrals precomputed per derivative order.
PartitionField particle_pde_solve(const PdeSpec& spec, const Mollifier& m, double eps,
                                  std::size_t N, const std::function<double(double)>& y0,
                                  double t_end, const PdeSolveOptions& opts = {});

// Reference solution on a uniform torus grid: exact Fourier multiplier for
// constant coefficients, method-of-lines / Crank-Nicolson for linear variable
// coefficients (orders <= 2).  Quasilinear specs are rejected.
Vec reference_pde_solve(const PdeSpec& spec, const std::function<double(double)>& y0,
                        double t_end, std::size_t grid_n = 4096);

struct ScheduleValue {
    double eps = 0.0;
    bool clamped = false;
};

// eps_N = (C / ln N)^(1/(p+2)), clamped into (0, 1/4].
ScheduleValue scaling_schedule(std::size_t N, double C, std::size_t p);

// G_eps = sum_l a_l(t,x,xi) xi' (d/dx')^l [exp(-(x-x')^2/2eps)/sqrt(pi eps)],
// derivatives in closed Hermite form; interval domain only.
MollifiedKernel gaussian_pde_kernel(const PdeSpec& spec, double eps);

}  // namespace mflab

#endif
