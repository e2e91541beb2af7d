#include "hcontact/contact.hpp"
#include "hcontact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcontact {

namespace {

FormValue power(const FormValue& a, int n)
{
    FormValue r = FormValue::scalar(a.dim(), 1.0);
    for (int i = 0; i < n; ++i)
        r = wedge(r, a);
    return r;
}

CVec unit(int n, int i)
{
    CVec e(static_cast<std::size_t>(n));
    return e.with(static_cast<std::size_t>(i), 1.0);
}

} // namespace

ContactData make_contact(DiffForm xi, Domain domain)
{
    if (xi.degree() != 1 || xi.dim() % 2 == 0 || xi.dim() < 3)
        throw Error(ErrorKind::DimensionMismatch, "contact form must be a 1-form on an odd dimension >= 3");
    if (domain.dim() != xi.dim())
        throw Error(ErrorKind::DimensionMismatch, "contact form and domain dimensions differ");
    const int N = (xi.dim() - 1) / 2;
    return ContactData{std::move(xi), N, std::move(domain)};
}

SymplecticData make_symplectic(DiffForm omega, Domain domain)
{
    if (omega.degree() != 2 || omega.dim() % 2 != 0)
        throw Error(ErrorKind::DimensionMismatch, "symplectic form must be a 2-form on an even dimension");
    if (domain.dim() != omega.dim())
        throw Error(ErrorKind::DimensionMismatch, "symplectic form and domain dimensions differ");
    const int N = omega.dim() / 2;
    return SymplecticData{std::move(omega), N, std::move(domain)};
}

ContactData standard_contact(int N)
{
    if (N < 1)
        throw Error(ErrorKind::InvalidArgument, "standard_contact needs N >= 1");
    const int n = 2 * N + 1;
    DiffForm xi = DiffForm::basis(n, {n - 1});
    for (int j = 0; j < N; ++j)
        xi = xi - DiffForm::basis(n, {N + j}, Expr::var(j));
    return make_contact(std::move(xi), Domain::box(CVec(static_cast<std::size_t>(n)),
                                                   std::vector<double>(static_cast<std::size_t>(n), 1.0)));
}

cplx contact_volume(const ContactData& c, const CVec& p)
{
    const DiffForm dxi = exterior_derivative(c.xi);
    return wedge(c.xi.eval(p), power(dxi.eval(p), c.N)).top();
}

cplx symplectic_volume(const SymplecticData& s, const CVec& p) { return power(s.omega.eval(p), s.N).top(); }

ContactReport contact_check(const ContactData& c, std::span<const CVec> samples, double tol)
{
    const DiffForm dxi = exterior_derivative(c.xi);
    ContactReport r;
    r.min_volume = std::numeric_limits<double>::infinity();
    for (const auto& p : samples) {
        try {
            const double v = std::abs(wedge(c.xi.eval(p), power(dxi.eval(p), c.N)).top());
            if (v < r.min_volume) {
                r.min_volume = v;
                r.worst_point = p;
            }
        } catch (const Error& e) {
            r.failures.push_back({p, e.what()});
        }
    }
    if (samples.empty())
        r.min_volume = 0.0;
    r.pass = !samples.empty() && r.failures.empty() && r.min_volume > tol;
    return r;
}

SymplecticReport symplectic_check(const SymplecticData& s, std::span<const CVec> samples, double tol)
{
    const DiffForm domega = exterior_derivative(s.omega);
    SymplecticReport r;
    r.min_top = std::numeric_limits<double>::infinity();
    for (const auto& p : samples) {
        try {
            r.max_dclosed = std::max(r.max_dclosed, domega.eval(p).max_abs());
            const double v = std::abs(power(s.omega.eval(p), s.N).top());
            if (v < r.min_top) {
                r.min_top = v;
                r.worst_point = p;
            }
        } catch (const Error& e) {
            r.failures.push_back({p, e.what()});
        }
    }
    if (samples.empty())
        r.min_top = 0.0;
    r.pass = !samples.empty() && r.failures.empty() && r.max_dclosed < tol && r.min_top > tol;
    return r;
}

ReebResult reeb_solve(const ContactData& c, const CVec& p)
{
    const int n = c.xi.dim();
    const FormValue xi = c.xi.eval(p);
    const FormValue dxi = exterior_derivative(c.xi).eval(p);
    std::vector<CVec> basis;
    for (int i = 0; i < n; ++i)
        basis.push_back(unit(n, i));

    // rows 0..n-1: (i_v d xi)(e_i) = sum_j v_j d xi(e_j, e_i); row n: xi(v) = 1
    CMatrix a(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const CVec pair[2] = {basis[static_cast<std::size_t>(j)], basis[static_cast<std::size_t>(i)]};
            a(i, j) = dxi.apply(pair);
        }
        const CVec one[1] = {basis[static_cast<std::size_t>(i)]};
        a(i, n) = xi.apply(one);
        a(n, i) = a(i, n);
    }
    CVec rhs(static_cast<std::size_t>(n + 1));
    rhs = rhs.with(static_cast<std::size_t>(n), 1.0);
    const CVec sol = solve(a, rhs);

    ReebResult r{sol.head(static_cast<std::size_t>(n))};
    const CVec v1[1] = {r.v};
    r.normalization = std::abs(xi.apply(v1) - 1.0);
    r.horizontal = interior(r.v, dxi).max_abs();
    return r;
}

double legendrian_residual(const DiffForm& xi, const HoloMap& phi, std::span<const cplx> params)
{
    if (phi.arity() != 1 || phi.dim() != xi.dim())
        throw Error(ErrorKind::DimensionMismatch, "legendrian_residual needs a curve of one variable in the form's space");
    double worst = 0.0;
    for (const cplx s : params) {
        const CVec at{s};
        std::vector<cplx> d(static_cast<std::size_t>(phi.dim()));
        for (int r = 0; r < phi.dim(); ++r)
            d[static_cast<std::size_t>(r)] = phi.partial(r, 0).eval(at);
        const CVec v[1] = {CVec(std::move(d))};
        worst = std::max(worst, std::abs(xi.eval(phi.eval(at)).apply(v)));
    }
    return worst;
}

CVec flow(const HoloMap& field, const CVec& p, cplx s, int steps)
{
    if (field.arity() != field.dim() || static_cast<std::size_t>(field.dim()) != p.size())
        throw Error(ErrorKind::DimensionMismatch, "vector field and point dimensions differ");
    const cplx h = s / static_cast<double>(steps);
    CVec x = p;
    for (int i = 0; i < steps; ++i) {
        const CVec k1 = field.eval(x);
        const CVec k2 = field.eval(x + (0.5 * h) * k1);
        const CVec k3 = field.eval(x + (0.5 * h) * k2);
        const CVec k4 = field.eval(x + h * k3);
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

CVec bracket_surrogate(const HoloMap& x, const HoloMap& y, const CVec& p, double s)
{
    CVec q = flow(x, p, s);
    q = flow(y, q, s);
    q = flow(x, q, -s);
    q = flow(y, q, -s);
    return (1.0 / (s * s)) * (q - p);
}

std::vector<HoloMap> standard_horizontal_fields(int N)
{
    const int n = 2 * N + 1;
    std::vector<HoloMap> fields;
    for (int j = 0; j < N; ++j) {
        std::vector<Expr> c(static_cast<std::size_t>(n));
        c[static_cast<std::size_t>(j)] = 1.0;
        fields.emplace_back(n, std::move(c));
    }
    for (int j = 0; j < N; ++j) {
        std::vector<Expr> c(static_cast<std::size_t>(n));
        c[static_cast<std::size_t>(N + j)] = 1.0;
        c[static_cast<std::size_t>(n - 1)] = Expr::var(j);
        fields.emplace_back(n, std::move(c));
    }
    return fields;
}

} // namespace hcontact
