#include "hcontact/model_maps.hpp"

#include <cmath>

namespace hcontact {

HoloMap cayley(int n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "Cayley map dimension must be positive");
    const Expr z = Expr::var(0);
    std::vector<Expr> comps{(1.0 + z) / (1.0 - z)};
    for (int i = 1; i < n; ++i)
        comps.push_back(Expr::var(i) / (1.0 - z));
    return HoloMap(n, std::move(comps));
}

HoloMap cayley_inverse(int n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "Cayley map dimension must be positive");
    const Expr z = Expr::var(0);
    std::vector<Expr> comps{(z - 1.0) / (z + 1.0)};
    for (int i = 1; i < n; ++i)
        comps.push_back(2.0 * Expr::var(i) / (z + 1.0));
    return HoloMap(n, std::move(comps));
}

HoloMap siegel_parabolic(cplx s) { return siegel_affine(1.0, s, 0.0); }

HoloMap siegel_affine(cplx a, cplx s, double c)
{
    if (a == 0.0)
        throw Error(ErrorKind::InvalidArgument, "Siegel automorphism needs a != 0");
    const Expr z = Expr::var(0);
    const Expr w = Expr::var(1);
    return HoloMap(2, {Expr(std::norm(a)) * z + Expr(2.0 * std::conj(s) * a) * w + Expr(cplx(std::norm(s), c)),
                       Expr(a) * w + Expr(s)});
}

HoloMap ball_automorphism_fixing_one(cplx a, cplx s, double c)
{
    return cayley_inverse(2).compose(siegel_affine(a, s, c).compose(cayley(2)));
}

HoloMap linear_map(const CMatrix& u)
{
    std::vector<Expr> comps;
    for (int r = 0; r < u.rows(); ++r) {
        Expr e;
        for (int c = 0; c < u.cols(); ++c)
            e = e + Expr(u(r, c)) * Expr::var(c);
        comps.push_back(e);
    }
    return HoloMap(u.cols(), std::move(comps));
}

CMatrix unitary2(double a, double b, double c)
{
    CMatrix u(2, 2);
    const auto phase = [](double x) { return cplx(std::cos(x), std::sin(x)); };
    u(0, 0) = std::cos(b) * phase(a);
    u(0, 1) = -std::sin(b) * phase(-c);
    u(1, 0) = std::sin(b) * phase(c);
    u(1, 1) = std::cos(b) * phase(-a);
    return u;
}

} // namespace hcontact
