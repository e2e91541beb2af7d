#include "hcontact/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hcontact {

namespace {

constexpr int gl_points = 15;

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Roots of P_15 by Newton iteration from Chebyshev-like initial guesses.
Rule make_rule()
{
    Rule r;
    r.x.resize(gl_points);
    r.w.resize(gl_points);
    const int n = gl_points;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule& rule()
{
    static const Rule r = make_rule();
    return r;
}

struct Panel {
    cplx sum;
    double abs_sum;
};

Panel gl_panel(const std::function<cplx(double)>& f, double a, double b)
{
    const auto& r = rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    cplx s = 0.0;
    double s_abs = 0.0;
    for (int i = 0; i < gl_points; ++i) {
        const cplx v = f(mid + half * r.x[static_cast<std::size_t>(i)]);
        s += r.w[static_cast<std::size_t>(i)] * v;
        s_abs += r.w[static_cast<std::size_t>(i)] * std::abs(v);
    }
    return {half * s, std::abs(half) * s_abs};
}

class Adaptive {
public:
    Adaptive(const std::function<cplx(double)>& f, double total_length, const QuadOptions& opts)
        : f_(f), length_(total_length), opts_(opts)
    {
    }

    void run(double a, double b, const Panel& whole)
    {
        const double m = 0.5 * (a + b);
        const auto left = gl_panel(f_, a, m);
        const auto right = gl_panel(f_, m, b);
        const cplx refined = left.sum + right.sum;
        const double err = std::abs(refined - whole.sum);
        const double share = opts_.tol * std::abs(b - a) / length_;
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (left.abs_sum + right.abs_sum);
        if (err <= share || err <= floor || m == a || m == b) {
            total_ += refined;
            error_ += err;
            ++panels_;
            return;
        }
        if (panels_ + pending_ + 2 > opts_.max_panels)
            throw Error(ErrorKind::QuadratureNotConverged,
                        "panel budget of " + std::to_string(opts_.max_panels) + " exhausted near t = " +
                            std::to_string(m),
                        err);
        ++pending_;
        run(a, m, left);
        run(m, b, right);
        --pending_;
    }

    QuadResult result() const { return {total_, error_, panels_}; }

private:
    const std::function<cplx(double)>& f_;
    double length_;
    QuadOptions opts_;
    cplx total_ = 0.0;
    double error_ = 0.0;
    int panels_ = 0;
    int pending_ = 0;
};

} // namespace

const std::vector<double>& gauss_legendre_nodes() { return rule().x; }
const std::vector<double>& gauss_legendre_weights() { return rule().w; }

QuadResult integrate(const std::function<cplx(double)>& f, double a, double b, const QuadOptions& opts)
{
    if (a == b)
        return {};
    if (!(opts.tol > 0.0) || opts.max_panels < 1)
        throw Error(ErrorKind::InvalidArgument, "quadrature needs a positive tolerance and panel budget");
    Adaptive q(f, std::abs(b - a), opts);
    q.run(a, b, gl_panel(f, a, b));
    return q.result();
}

QuadResult path_integral(const DiffForm& a, const Path& path, const QuadOptions& opts)
{
    if (a.degree() != 1)
        throw Error(ErrorKind::DimensionMismatch, "path integrals need a 1-form");
    QuadResult total;
    if (path.empty())
        return total;
    if (path.dim() != a.dim())
        throw Error(ErrorKind::DimensionMismatch, "path and form dimensions differ");
    QuadOptions per = opts;
    per.tol = opts.tol / static_cast<double>(path.size());
    for (std::size_t s = 0; s < path.size(); ++s) {
        const auto& seg = path.segment(s);
        std::vector<std::pair<int, Expr>> coeff;
        std::vector<Expr> vel;
        for (const auto& [m, e] : a.terms()) {
            const int i = __builtin_ctzll(m);
            coeff.emplace_back(i, e);
            vel.push_back(seg.partial(i, 0));
        }
        auto integrand = [&](double t) {
            const CVec at{t};
            const CVec x = seg.eval(at);
            cplx v = 0.0;
            for (std::size_t j = 0; j < coeff.size(); ++j)
                v += coeff[j].second.eval(x) * vel[j].eval(at);
            return v;
        };
        const auto r = integrate(integrand, 0.0, 1.0, per);
        total.value += r.value;
        total.error += r.error;
        total.panels += r.panels;
    }
    return total;
}

double closedness_residual(const DiffForm& a, const std::vector<CVec>& points)
{
    const auto da = exterior_derivative(a);
    double worst = 0.0;
    for (const auto& p : points)
        worst = std::max(worst, da.eval(p).max_abs());
    return worst;
}

cplx primitive(const DiffForm& a, const CVec& center, const CVec& p, const PrimitiveOptions& opts)
{
    if (a.degree() != 1)
        throw Error(ErrorKind::DimensionMismatch, "primitives need a 1-form");
    std::vector<CVec> checkpoints = opts.samples;
    for (int k = 0; k <= 8; ++k)
        checkpoints.push_back(center + (k / 8.0) * (p - center));
    const double residual = closedness_residual(a, checkpoints);
    if (residual > opts.closed_tol)
        throw Error(ErrorKind::NotClosed, "1-form is not closed", residual);
    if (p == center)
        return 0.0;
    return path_integral(a, Path::segment(center, p), opts.quad).value;
}

cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z0, double rho, int m)
{
    cplx s = 0.0;
    for (int k = 0; k < m; ++k) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
        s += f(z0 + rho * e) * std::conj(e);
    }
    return s / (static_cast<double>(m) * rho);
}

CVec cauchy_derivative(const std::function<CVec(cplx)>& f, cplx z0, double rho, int m)
{
    std::vector<cplx> s;
    for (int k = 0; k < m; ++k) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
        const CVec v = f(z0 + rho * e);
        if (s.empty())
            s.assign(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            s[i] += v[i] * std::conj(e);
    }
    for (auto& x : s)
        x /= static_cast<double>(m) * rho;
    return CVec(std::move(s));
}

} // namespace hcontact
