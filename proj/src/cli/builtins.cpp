#include "hcontact/runner.hpp"

namespace hcontact {

namespace {

struct Builtin {
    const char* name;
    const char* description;
    const char* text;
};

const Builtin builtins[] = {
    {"standard_box", "standard structure dy - z dw: contact, Reeb, brackets, disc lifts and box estimates", R"toml(
name = "standard_box"
description = "standard structure dy - z dw over the bidisc"
variables = ["z", "w"]
domain = { kind = "polydisc", radii = [1.0, 1.0] }

[forms]
omega = { "d[z]^d[w]" = "1" }
nu = { "d[w]" = "z" }
xi = { text = { "d[y]" = "1", "d[w]" = "-z" }, space = "total" }

[maps]
legendrian_curve = { vars = ["zeta"], components = ["zeta/2", "zeta/2", "zeta^2/8"] }
diagonal = { vars = ["zeta"], components = ["zeta/2", "zeta/2"] }

[lifts.standard]
omega = "omega"
nu = "nu"

[samples]
count = 64
seed = 7
tolerance = 1e-10

[[check]]
id = "symplectic_base"
op = "symplectic_check"
params = { form = "omega" }

[[check]]
id = "contact_form"
op = "contact_check"
params = { form = "xi" }

[[check]]
id = "reeb_is_vertical"
op = "reeb"
params = { lift = "standard" }

[[check]]
id = "lift_structure"
op = "validate_lift"
params = { lift = "standard" }

[[check]]
id = "explicit_legendrian_curve"
op = "legendrian_residual"
params = { form = "xi", map = "legendrian_curve" }

[[check]]
id = "diagonal_disc_lift"
op = "lift_disc"
params = { lift = "standard", map = "diagonal", oracle = "zeta^2/8", tol = 1e-11 }
expect = { values = { fiber = ["1/32"] } }

[[check]]
id = "horizontal_bracket"
op = "bracket"
params = { point = ["0.1", "0.2", "0.3"] }
expect = { transverse = true, values = { xi_of_bracket = ["1"] } }

[[check]]
id = "local_connect_sequence"
op = "local_connect"
params = { r = 1.0, start = ["0.2", "0.2", "0.04"], halvings = 6, tol = 1e-12 }
expect = { decreasing = true }

[[check]]
id = "box_upper_bound"
op = "kappa_upper_box"
params = { r = 1.0, point = ["0.1", "0.1", "0.01"], direction = ["1", "0", "0"] }

[[check]]
id = "chain_of_one_disc"
op = "chain_length"
params = { t = [0.5] }
expect = { value = "log(3)/2", tol = 1e-15 }
)toml"},
    {"ball_extremal", "Cayley pullback, parabolic and (1,0)-fixing automorphisms of the ball, and a rotation that is not scale symplectic", R"toml(
name = "ball_extremal"
description = "the ball with the pulled-back form 2/(1-z)^3 dz^dw"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }

[domains.siegel]
kind = "siegel"
dim = 2

[forms]
omega_tilde = { "d[z]^d[w]" = "2/(1-z)^3" }
nu_tilde = { "d[w]" = "1/(1-z)^2" }
siegel_form = { "d[z]^d[w]" = "1" }

[maps]
cayley = { vars = ["z", "w"], components = ["(1+z)/(1-z)", "w/(1-z)"] }
cayley_inverse = { vars = ["z", "w"], components = ["(z-1)/(z+1)", "2*w/(z+1)"] }
parabolic_1 = { vars = ["z", "w"], components = ["z + 2*w + 1", "w + 1"] }
parabolic_i = { vars = ["z", "w"], components = ["z - 2*i*w + 1", "w + i"] }
siegel_affine = { vars = ["z", "w"], components = ["0.64*z + 0.8*i*w + 0.3*i + 0.25", "0.8*i*w + 0.5"] }
fixing_one = { compose = ["cayley_inverse", "siegel_affine", "cayley"] }
rotation = { vars = ["z", "w"], components = ["w", "-z"] }

[lifts.ball]
omega = "omega_tilde"
nu = "nu_tilde"

[samples]
count = 64
seed = 11
tolerance = 1e-10

[[check]]
id = "cayley_pullback"
op = "pullback_equals"
params = { map = "cayley", target = "siegel_form", expected = "omega_tilde", samples = 200 }

[[check]]
id = "pulled_form_symplectic"
op = "symplectic_check"
params = { form = "omega_tilde" }

[[check]]
id = "parabolic_s_1"
op = "scale_factor"
params = { map = "parabolic_1", source = "siegel_form", domain = "siegel", tol = 1e-12 }
expect = { value = "1", tol = 1e-12 }

[[check]]
id = "parabolic_s_i"
op = "scale_factor"
params = { map = "parabolic_i", source = "siegel_form", domain = "siegel", tol = 1e-12 }
expect = { value = "1", tol = 1e-12 }

[[check]]
id = "fixing_one_automorphism"
op = "scale_factor"
params = { map = "fixing_one", source = "omega_tilde", tol = 1e-8 }
expect = { value = "0.512*i", tol = 1e-8 }

[[check]]
id = "rotation_not_scale_symplectic"
op = "scale_factor"
params = { map = "rotation", source = "omega_tilde", tol = 1e-8 }
expect_error = "NotScaleSymplectic"
expect = { above = { error_residual = 1e-3 } }

[[check]]
id = "ball_lift"
op = "validate_lift"
params = { lift = "ball" }

[[check]]
id = "ball_lift_metric"
op = "kappa_V"
params = { lift = "ball", random = 10 }

[[check]]
id = "siegel_distance"
op = "model_dist"
params = { domain = "siegel", from = ["1", "0"], to = ["2", "0.5"] }
)toml"},
    {"punctured_family", "the twisted lifts dy - (z - c/w) dw over disc x punctured disc, c in {0, 1, i}", R"toml(
name = "punctured_family"
description = "theta classes, equivalences, monodromy, fitness and an automorphism obstruction"
variables = ["z", "w"]
domain = { kind = "product", factors = [{ kind = "disc" }, { kind = "punctured_disc" }] }

[forms]
omega = { "d[z]^d[w]" = "1" }
nu = { "d[w]" = "z" }
twist_1 = { "d[w]" = "-1/w" }
twist_i = { "d[w]" = "-i/w" }

[maps]
F = { vars = ["z", "w"], components = ["z*w^2", "-1/w"] }

[lifts.alpha_0]
omega = "omega"
nu = "nu"

[lifts.alpha_1]
omega = "omega"
nu = "nu"
twist = "twist_1"

[lifts.alpha_i]
omega = "omega"
nu = "nu"
twist = "twist_i"

[loops.w_circle]
kind = "circle"
coordinate = "w"
radius = 0.5

[samples]
count = 64
seed = 3
tolerance = 1e-9

[[check]]
id = "alpha_0_lift"
op = "validate_lift"
params = { lift = "alpha_0", samples = 200, tol = 1e-10 }

[[check]]
id = "alpha_1_lift"
op = "validate_lift"
params = { lift = "alpha_1", samples = 200, tol = 1e-10 }

[[check]]
id = "alpha_i_lift"
op = "validate_lift"
params = { lift = "alpha_i", samples = 200, tol = 1e-10 }

[[check]]
id = "theta_0_1"
op = "theta_class"
params = { lift1 = "alpha_0", lift2 = "alpha_1", loops = ["w_circle"] }
expect = { value = ["2*pi*i"] }

[[check]]
id = "theta_1_i"
op = "theta_class"
params = { lift1 = "alpha_1", lift2 = "alpha_i", loops = ["w_circle"] }
expect = { value = ["2*pi*i*(i - 1)"] }

[[check]]
id = "alpha_1_self_equivalent"
op = "are_equivalent"
params = { lift1 = "alpha_1", lift2 = "alpha_1", loops = ["w_circle"] }
expect = { equivalent = true }

[[check]]
id = "alpha_0_alpha_1_inequivalent"
op = "are_equivalent"
params = { lift1 = "alpha_0", lift2 = "alpha_1", loops = ["w_circle"] }
expect = { equivalent = false }

[[check]]
id = "monodromy_alpha_1"
op = "monodromy"
params = { lift = "alpha_1", potential = "nu", loop = "w_circle" }
expect = { value = "-2*pi*i" }

[[check]]
id = "alpha_0_fit"
op = "is_fit"
params = { lift = "alpha_0", potential = "nu", loops = ["w_circle"] }
expect = { fit = true }

[[check]]
id = "alpha_1_not_fit"
op = "is_fit"
params = { lift = "alpha_1", potential = "nu", loops = ["w_circle"] }
expect = { fit = false }

[[check]]
id = "F_lifts_on_alpha_0"
op = "lift_automorphism"
params = { lift = "alpha_0", map = "F", loops = ["w_circle"], tol = 1e-8 }
expect = { liftable = true, values = { lambda = ["1"] }, tol = 1e-8 }

[[check]]
id = "F_obstructed_on_alpha_1"
op = "lift_automorphism"
params = { lift = "alpha_1", map = "F", loops = ["w_circle"], tol = 1e-8 }
expect = { liftable = false, values = { lambda = ["1"], periods = ["4*pi*i"] }, tol = 1e-8 }
)toml"},
    {"lift_metric_equality", "kappa_V against the base metric, distance sandwiches and fiber distances over the ball", R"toml(
name = "lift_metric_equality"
description = "the lift dy - z dw over the unit ball"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }

[forms]
omega = { "d[z]^d[w]" = "1" }
nu = { "d[w]" = "z" }

[maps]
diagonal = { vars = ["zeta"], components = ["zeta/2", "zeta/2"] }

[lifts.ball]
omega = "omega"
nu = "nu"

[samples]
count = 64
seed = 5
tolerance = 1e-10

[[check]]
id = "kappa_equals_base_metric"
op = "kappa_V"
params = { lift = "ball", random = 50 }

[[check]]
id = "kappa_single_point"
op = "kappa_V"
params = { lift = "ball", point = ["0.3", "0.1i", "0.2"], direction = ["1", "0", "0"] }

[[check]]
id = "distance_sandwich"
op = "dist_bounds"
params = { lift = "ball", pairs = 25, tol = 1e-6 }

[[check]]
id = "distance_to_fiber"
op = "dist_to_fiber"
params = { lift = "ball", random = 10, tol = 1e-8 }

[[check]]
id = "lifted_geodesic"
op = "lift_chain"
params = { lift = "ball", from = ["0.1", "0.2"], to = ["-0.3", "0.4i"], y0 = "0.1" }

[[check]]
id = "diagonal_disc"
op = "lift_disc"
params = { lift = "ball", map = "diagonal", oracle = "zeta^2/8", tol = 1e-11 }
)toml"},
    {"pullback_demo", "lifts pulled back through the Cayley map, Cech atlases and injected faults", R"toml(
name = "pullback_demo"
description = "pullbacks of lifts, Cech cocycles and expected failures"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }

[domains.siegel]
kind = "siegel"
dim = 2

[forms]
omega = { "d[z]^d[w]" = "1" }
nu = { "d[w]" = "z" }

[maps]
cayley = { vars = ["z", "w"], components = ["(1+z)/(1-z)", "w/(1-z)"] }
flatten = { vars = ["z", "w"], components = ["z + 1.5", "0"] }

[lifts.siegel_lift]
base = "siegel"
omega = "omega"
nu = "nu"

[lifts.wrong_potential]
omega = "omega"
nu = "d[w] : 2*z"

[lifts.open_twist]
omega = "omega"
nu = "nu"
twist = "d[w] : z"

[atlases.sectors]
kind = "punctured_sectors"
c = "1"

[atlases.broken]
kind = "punctured_sectors"
c = "1"
defect = "1"

[samples]
count = 64
seed = 13
tolerance = 1e-9

[[check]]
id = "siegel_lift"
op = "validate_lift"
params = { lift = "siegel_lift" }

[[check]]
id = "cayley_pullback_lift"
op = "pullback_lift"
params = { map = "cayley", lift = "siegel_lift" }

[[check]]
id = "degenerate_pullback"
op = "pullback_lift"
params = { map = "flatten", lift = "siegel_lift" }
expect_error = "DegeneratePullback"

[[check]]
id = "potential_mismatch"
op = "make_lift"
params = { lift = "wrong_potential" }
expect_error = "PotentialMismatch"

[[check]]
id = "twist_not_closed"
op = "make_lift"
params = { lift = "open_twist" }
expect_error = "TwistNotClosed"

[[check]]
id = "sector_atlas"
op = "validate_atlas"
params = { atlas = "sectors" }

[[check]]
id = "broken_cocycle"
op = "validate_atlas"
params = { atlas = "broken" }
expect_fail = true
)toml"},
};

} // namespace

std::vector<BuiltinInfo> list_builtins()
{
    std::vector<BuiltinInfo> out;
    for (const auto& b : builtins)
        out.push_back({b.name, b.description});
    return out;
}

std::string builtin_text(const std::string& name)
{
    for (const auto& b : builtins)
        if (name == b.name)
            return b.text;
    throw Error(ErrorKind::UnknownName, "unknown builtin scenario '" + name + "'");
}

Scenario builtin_scenario(const std::string& name) { return parse_scenario(builtin_text(name), name); }

} // namespace hcontact
