#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/forms.hpp"
#include "hcontact/path.hpp"

#include <functional>
#include <vector>

namespace hcontact {

struct QuadOptions {
    /// Absolute error target for the whole integral.
    double tol = 1e-10;
    int max_panels = 1 << 14;
};

struct QuadResult {
    cplx value;
    double error = 0.0;
    int panels = 0;
};

/// Adaptive composite 15-point Gauss-Legendre quadrature on [a, b]. Panels are
/// bisected while |S(panel) - S(halves)| exceeds the panel's share of the
/// tolerance; accepted panels are summed left to right. Raises
/// QuadratureNotConverged when the panel budget runs out.
QuadResult integrate(const std::function<cplx(double)>& f, double a, double b, const QuadOptions& opts = {});

/// Nodes and weights of the 15-point rule on [-1, 1].
const std::vector<double>& gauss_legendre_nodes();
const std::vector<double>& gauss_legendre_weights();

/// Integral of a 1-form along a path: sum over segments of the integral of
/// a_{g(t)}(g'(t)) over t in [0, 1]. The empty path integrates to 0.
QuadResult path_integral(const DiffForm& a, const Path& path, const QuadOptions& opts = {});

struct PrimitiveOptions {
    QuadOptions quad;
    /// Allowed max |d a| at the closedness checkpoints.
    double closed_tol = 1e-9;
    /// Extra points where closedness is checked besides the segment itself.
    std::vector<CVec> samples;
};

/// h(p) = integral of the closed 1-form a along the segment center -> p.
/// Closedness is checked at the samples and at nine points of the segment;
/// raises NotClosed with the largest |d a| coefficient otherwise.
cplx primitive(const DiffForm& a, const CVec& center, const CVec& p, const PrimitiveOptions& opts = {});

/// Largest |coefficient| of d a over the given points.
double closedness_residual(const DiffForm& a, const std::vector<CVec>& points);

/// f'(z0) for f holomorphic on a neighbourhood of the closed disc |z - z0| <= rho,
/// by the trapezoidal rule on the Cauchy integral with m nodes.
cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z0, double rho, int m = 32);
/// Componentwise version for vector valued f.
CVec cauchy_derivative(const std::function<CVec(cplx)>& f, cplx z0, double rho, int m = 32);

} // namespace hcontact
