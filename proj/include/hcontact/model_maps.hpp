#pragma once

#include "hcontact/holomap.hpp"
#include "hcontact/linalg.hpp"

namespace hcontact {

/// Ball(n) -> Siegel(n): ((1 + z_1)/(1 - z_1), z_i/(1 - z_1)).
HoloMap cayley(int n = 2);
/// Siegel(n) -> Ball(n): ((Z_1 - 1)/(Z_1 + 1), 2 Z_i/(Z_1 + 1)).
HoloMap cayley_inverse(int n = 2);

/// Parabolic Siegel automorphism (z + 2 conj(s) w + |s|^2, w + s).
HoloMap siegel_parabolic(cplx s);
/// Siegel automorphism (|a|^2 z + 2 conj(s) a w + i c + |s|^2, a w + s), a != 0,
/// c real. Scales dz ^ dw by |a|^2 a.
HoloMap siegel_affine(cplx a, cplx s, double c);
/// The Siegel automorphism above conjugated to Ball(2) by the Cayley map; it
/// fixes the boundary point (1, 0).
HoloMap ball_automorphism_fixing_one(cplx a, cplx s, double c);
/// Linear map p -> U p.
HoloMap linear_map(const CMatrix& u);
/// Unitary 2x2 matrix [[e^{i a} cos b, -e^{-i c} sin b], [e^{i c} sin b, e^{-i a} cos b]].
CMatrix unitary2(double a, double b, double c);

} // namespace hcontact
