#include "hcontact/forms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace hcontact {

std::vector<int> indices_of(Mask m)
{
    std::vector<int> r;
    for (int i = 0; m; ++i, m >>= 1u)
        if (m & 1u)
            r.push_back(i);
    return r;
}

int mask_of(std::span<const int> idx, Mask& out)
{
    out = 0;
    int inversions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (idx[a] < 0 || idx[a] >= 64)
            throw Error(ErrorKind::InvalidArgument, "form index out of range");
        const Mask bit = Mask{1} << idx[a];
        if (out & bit)
            return 0;
        out |= bit;
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            if (idx[b] < idx[a])
                ++inversions;
    }
    return inversions % 2 ? -1 : 1;
}

namespace {

void check_dims(int n, int k)
{
    if (n < 0 || n > 64 || k < 0 || k > n)
        throw Error(ErrorKind::DimensionMismatch,
                    "form degree " + std::to_string(k) + " on dimension " + std::to_string(n));
}

void check_index_range(Mask m, int n)
{
    if (n < 64 && (m >> n))
        throw Error(ErrorKind::DimensionMismatch, "form index beyond dimension " + std::to_string(n));
}

// Sign of dx_I ^ dx_J relative to dx_{I u J}; 0 when I and J meet.
int shuffle_sign(Mask a, Mask b)
{
    if (a & b)
        return 0;
    int inversions = 0;
    for (Mask rest = b; rest; rest &= rest - 1) {
        const int j = __builtin_ctzll(rest);
        inversions += degree_of(j + 1 < 64 ? a >> (j + 1) : 0);
    }
    return inversions % 2 ? -1 : 1;
}

// Order-independent sum: contributions are grouped by (|re|, |im|); within a
// group partial sums are exact multiples, and groups are added in key order.
// The result is therefore exactly negated when every contribution is.
cplx canonical_sum(std::vector<cplx>& xs)
{
    std::sort(xs.begin(), xs.end(), [](cplx a, cplx b) {
        const double ar = std::abs(a.real()), br = std::abs(b.real());
        if (ar != br)
            return ar < br;
        return std::abs(a.imag()) < std::abs(b.imag());
    });
    cplx total = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        cplx group = 0.0;
        std::size_t j = i;
        while (j < xs.size() && std::abs(xs[j].real()) == std::abs(xs[i].real()) &&
               std::abs(xs[j].imag()) == std::abs(xs[i].imag()))
            group += xs[j++];
        total += group;
        i = j;
    }
    return total;
}

std::string var_name(int i, std::span<const std::string> names)
{
    return static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)] : "x" + std::to_string(i);
}

std::string differential_text(Mask m, std::span<const std::string> names)
{
    std::string s;
    for (int i : indices_of(m)) {
        if (!s.empty())
            s += "^";
        s += "d[" + var_name(i, names) + "]";
    }
    return s;
}

// All masks with k bits below n, in increasing numeric order.
std::vector<Mask> subsets(int n, int k)
{
    std::vector<Mask> r;
    if (k == 0) {
        r.push_back(0);
        return r;
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        Mask m = 0;
        for (int i : idx)
            m |= Mask{1} << i;
        r.push_back(m);
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos)
            --pos;
        if (pos < 0)
            break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < k; ++q)
            idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
    }
    std::sort(r.begin(), r.end());
    return r;
}

template <class T, class Mul, class Add>
T leibniz_det(const std::vector<std::vector<T>>& m, Mul mul, Add add, T zero, T one)
{
    const std::size_t k = m.size();
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    T total = zero;
    do {
        int inv = 0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (perm[b] < perm[a])
                    ++inv;
        T term = one;
        for (std::size_t r = 0; r < k; ++r)
            term = mul(term, m[r][static_cast<std::size_t>(perm[r])]);
        total = add(total, term, inv % 2 != 0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// FormValue

FormValue::FormValue(int n, int k) : n_(n), k_(k) { check_dims(n, k); }

FormValue FormValue::scalar(int n, cplx c)
{
    FormValue f(n, 0);
    f.add(0, c);
    return f;
}

FormValue FormValue::basis(int n, std::vector<int> idx, cplx c)
{
    FormValue f(n, static_cast<int>(idx.size()));
    Mask m = 0;
    const int s = mask_of(idx, m);
    check_index_range(m, n);
    if (s != 0)
        f.add(m, static_cast<double>(s) * c);
    return f;
}

cplx FormValue::coeff(Mask m) const
{
    auto it = c_.find(m);
    return it == c_.end() ? cplx{} : it->second;
}

cplx FormValue::coeff(std::vector<int> idx) const
{
    Mask m = 0;
    const int s = mask_of(idx, m);
    return s == 0 ? cplx{} : static_cast<double>(s) * coeff(m);
}

cplx FormValue::top() const
{
    if (k_ != n_)
        throw Error(ErrorKind::DimensionMismatch, "top coefficient requested from a form of degree below the dimension");
    return coeff(n_ == 64 ? ~Mask{0} : (Mask{1} << n_) - 1);
}

double FormValue::max_abs() const noexcept
{
    double m = 0.0;
    for (const auto& [mask, c] : c_)
        m = std::max(m, std::abs(c));
    return m;
}

void FormValue::add(Mask m, cplx c)
{
    if (degree_of(m) != k_)
        throw Error(ErrorKind::DimensionMismatch, "term degree differs from form degree");
    check_index_range(m, n_);
    if (c == 0.0)
        return;
    auto [it, fresh] = c_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0.0)
            c_.erase(it);
    }
}

cplx FormValue::apply(std::span<const CVec> vectors) const
{
    if (static_cast<int>(vectors.size()) != k_)
        throw Error(ErrorKind::DimensionMismatch, "form of degree " + std::to_string(k_) + " applied to " +
                                                      std::to_string(vectors.size()) + " vectors");
    for (const auto& v : vectors)
        if (static_cast<int>(v.size()) != n_)
            throw Error(ErrorKind::DimensionMismatch, "vector dimension differs from form dimension");
    cplx total = 0.0;
    for (const auto& [mask, c] : c_) {
        const auto idx = indices_of(mask);
        CMatrix m(k_, k_);
        for (int r = 0; r < k_; ++r)
            for (int col = 0; col < k_; ++col)
                m(r, col) = vectors[static_cast<std::size_t>(col)][static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
        total += c * (k_ == 0 ? cplx(1.0) : determinant(m));
    }
    return total;
}

FormValue operator+(const FormValue& a, const FormValue& b)
{
    if (a.n_ != b.n_ || a.k_ != b.k_)
        throw Error(ErrorKind::DimensionMismatch, "sum of forms of different shape");
    auto r = a;
    for (const auto& [m, c] : b.c_)
        r.add(m, c);
    return r;
}

FormValue operator-(const FormValue& a, const FormValue& b) { return a + (-1.0) * b; }

FormValue operator*(cplx s, const FormValue& a)
{
    FormValue r(a.n_, a.k_);
    for (const auto& [m, c] : a.c_)
        r.add(m, s * c);
    return r;
}

std::string FormValue::to_string(std::span<const std::string> names) const
{
    if (c_.empty())
        return "0";
    std::string s;
    for (const auto& [m, c] : c_) {
        if (!s.empty())
            s += "; ";
        if (k_ > 0)
            s += differential_text(m, names) + " : ";
        s += format_complex(c);
    }
    return s;
}

FormValue wedge(const FormValue& a, const FormValue& b)
{
    if (a.dim() != b.dim())
        throw Error(ErrorKind::DimensionMismatch, "wedge of forms on different dimensions");
    if (a.degree() + b.degree() > a.dim())
        throw Error(ErrorKind::DimensionMismatch, "wedge degree exceeds the dimension");
    std::map<Mask, std::vector<cplx>> parts;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            const int s = shuffle_sign(ma, mb);
            if (s != 0)
                parts[ma | mb].push_back(static_cast<double>(s) * (ca * cb));
        }
    FormValue r(a.dim(), a.degree() + b.degree());
    for (auto& [m, xs] : parts)
        r.add(m, canonical_sum(xs));
    return r;
}

FormValue interior(const CVec& v, const FormValue& a)
{
    if (static_cast<int>(v.size()) != a.dim())
        throw Error(ErrorKind::DimensionMismatch, "interior product: vector and form dimensions differ");
    if (a.degree() == 0)
        throw Error(ErrorKind::DimensionMismatch, "interior product of a 0-form");
    FormValue r(a.dim(), a.degree() - 1);
    for (const auto& [m, c] : a.terms()) {
        const auto idx = indices_of(m);
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const double sign = pos % 2 ? -1.0 : 1.0;
            r.add(m & ~(Mask{1} << idx[pos]), sign * v[static_cast<std::size_t>(idx[pos])] * c);
        }
    }
    return r;
}

FormValue pullback_value(const CMatrix& j, const FormValue& a)
{
    if (j.rows() != a.dim())
        throw Error(ErrorKind::DimensionMismatch, "pullback: Jacobian rows differ from form dimension");
    const int k = a.degree();
    FormValue r(j.cols(), k);
    if (k > j.cols())
        return r;
    for (Mask target : subsets(j.cols(), k)) {
        const auto cols = indices_of(target);
        std::vector<cplx> xs;
        for (const auto& [m, c] : a.terms()) {
            const auto rows = indices_of(m);
            CMatrix minor(k, k);
            for (int rr = 0; rr < k; ++rr)
                for (int cc = 0; cc < k; ++cc)
                    minor(rr, cc) = j(rows[static_cast<std::size_t>(rr)], cols[static_cast<std::size_t>(cc)]);
            xs.push_back(c * (k == 0 ? cplx(1.0) : determinant(minor)));
        }
        cplx s = 0.0;
        for (const auto& x : xs)
            s += x;
        r.add(target, s);
    }
    return r;
}

// ---------------------------------------------------------------------------
// DiffForm

DiffForm::DiffForm(int n, int k) : n_(n), k_(k) { check_dims(n, k); }

DiffForm DiffForm::function(int n, Expr f)
{
    DiffForm r(n, 0);
    r.add(0, f);
    return r;
}

DiffForm DiffForm::basis(int n, std::vector<int> idx, Expr c)
{
    DiffForm r(n, static_cast<int>(idx.size()));
    Mask m = 0;
    const int s = mask_of(idx, m);
    check_index_range(m, n);
    if (s != 0)
        r.add(m, s > 0 ? c : -c);
    return r;
}

DiffForm DiffForm::one_form(std::vector<Expr> coeffs)
{
    DiffForm r(static_cast<int>(coeffs.size()), 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        r.add(Mask{1} << i, coeffs[i]);
    return r;
}

Expr DiffForm::coeff(Mask m) const
{
    auto it = c_.find(m);
    return it == c_.end() ? Expr() : it->second;
}

void DiffForm::add(Mask m, const Expr& e)
{
    if (degree_of(m) != k_)
        throw Error(ErrorKind::DimensionMismatch, "term degree differs from form degree");
    check_index_range(m, n_);
    if (e.max_var() >= n_)
        throw Error(ErrorKind::ArityMismatch, "coefficient references a variable beyond the form dimension");
    if (e.is_zero())
        return;
    auto [it, fresh] = c_.emplace(m, e);
    if (!fresh) {
        it->second = it->second + e;
        if (it->second.is_zero())
            c_.erase(it);
    }
}

FormValue DiffForm::eval(const CVec& p) const
{
    if (static_cast<int>(p.size()) != n_)
        throw Error(ErrorKind::DimensionMismatch, "form on dimension " + std::to_string(n_) +
                                                      " evaluated at a point of dimension " + std::to_string(p.size()));
    FormValue r(n_, k_);
    for (const auto& [m, e] : c_)
        r.add(m, e.eval(p));
    return r;
}

DiffForm DiffForm::extended(int m) const
{
    if (m < n_)
        throw Error(ErrorKind::DimensionMismatch, "extension to a smaller dimension");
    DiffForm r(m, k_);
    r.c_ = c_;
    return r;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b)
{
    if (a.n_ != b.n_ || a.k_ != b.k_)
        throw Error(ErrorKind::DimensionMismatch, "sum of forms of different shape");
    auto r = a;
    for (const auto& [m, e] : b.c_)
        r.add(m, e);
    return r;
}

DiffForm operator-(const DiffForm& a) { return Expr(-1.0) * a; }

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + (-b); }

DiffForm operator*(const Expr& f, const DiffForm& a)
{
    DiffForm r(a.n_, a.k_);
    for (const auto& [m, e] : a.c_) {
        if (f.is_const() && f.value() == -1.0)
            r.add(m, -e);
        else
            r.add(m, f * e);
    }
    return r;
}

std::string DiffForm::to_string(std::span<const std::string> names) const
{
    if (c_.empty())
        return "0";
    std::string s;
    for (const auto& [m, e] : c_) {
        if (!s.empty())
            s += "; ";
        if (k_ > 0)
            s += differential_text(m, names) + " : ";
        s += e.to_string(names);
    }
    return s;
}

DiffForm exterior_derivative(const DiffForm& a)
{
    if (a.degree() >= a.dim())
        return DiffForm(a.dim(), a.dim());
    DiffForm r(a.dim(), a.degree() + 1);
    for (const auto& [m, e] : a.terms())
        for (int j = 0; j < a.dim(); ++j) {
            const Mask bit = Mask{1} << j;
            if (m & bit)
                continue;
            const auto dj = derive(e, j);
            if (dj.is_zero())
                continue;
            const int below = degree_of(m & (bit - 1));
            r.add(m | bit, below % 2 ? -dj : dj);
        }
    return r;
}

DiffForm differential(int n, const Expr& f) { return exterior_derivative(DiffForm::function(n, f)); }

DiffForm wedge(const DiffForm& a, const DiffForm& b)
{
    if (a.dim() != b.dim())
        throw Error(ErrorKind::DimensionMismatch, "wedge of forms on different dimensions");
    const int k = a.degree() + b.degree();
    if (k > a.dim())
        throw Error(ErrorKind::DimensionMismatch, "wedge degree exceeds the dimension");
    DiffForm r(a.dim(), k);
    for (const auto& [ma, ea] : a.terms())
        for (const auto& [mb, eb] : b.terms()) {
            const int s = shuffle_sign(ma, mb);
            if (s == 0)
                continue;
            r.add(ma | mb, s > 0 ? ea * eb : -(ea * eb));
        }
    return r;
}

DiffForm pullback(const HoloMap& f, const DiffForm& a)
{
    if (f.dim() != a.dim())
        throw Error(ErrorKind::DimensionMismatch, "pullback: map has " + std::to_string(f.dim()) +
                                                      " components, form lives on dimension " + std::to_string(a.dim()));
    const int k = a.degree();
    const int m = f.arity();
    if (k > m)
        return DiffForm(m, m);
    DiffForm r(m, k);
    for (const auto& [mask, e] : a.terms()) {
        const auto composed = substitute(e, f.components());
        const auto rows = indices_of(mask);
        for (Mask target : subsets(m, k)) {
            const auto cols = indices_of(target);
            std::vector<std::vector<Expr>> minor(static_cast<std::size_t>(k), std::vector<Expr>(static_cast<std::size_t>(k)));
            for (int rr = 0; rr < k; ++rr)
                for (int cc = 0; cc < k; ++cc)
                    minor[static_cast<std::size_t>(rr)][static_cast<std::size_t>(cc)] =
                        f.partial(rows[static_cast<std::size_t>(rr)], cols[static_cast<std::size_t>(cc)]);
            const Expr det = leibniz_det<Expr>(
                minor, [](const Expr& x, const Expr& y) { return x * y; },
                [](const Expr& acc, const Expr& t, bool odd) { return odd ? acc - t : acc + t; }, Expr(), Expr(1.0));
            if (det.is_zero())
                continue;
            r.add(target, composed * det);
        }
    }
    return r;
}

FormValue pullback(const HoloMap& f, const DiffForm& a, const CVec& p)
{
    if (f.dim() != a.dim())
        throw Error(ErrorKind::DimensionMismatch, "pullback: map and form dimensions differ");
    return pullback_value(f.jacobian(p), a.eval(f.eval(p)));
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class FormParser {
public:
    FormParser(std::string_view text, const Symbols& sym, int zero_degree)
        : s_(text), sym_(sym), zero_degree_(zero_degree)
    {
    }

    DiffForm run()
    {
        const int n = static_cast<int>(sym_.variables.size());
        std::vector<std::pair<std::size_t, std::size_t>> pieces;
        int depth = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i < s_.size(); ++i) {
            if (s_[i] == '(' || s_[i] == '[')
                ++depth;
            else if (s_[i] == ')' || s_[i] == ']')
                --depth;
            else if (s_[i] == ';' && depth == 0) {
                pieces.emplace_back(start, i);
                start = i + 1;
            }
        }
        pieces.emplace_back(start, s_.size());

        std::vector<std::pair<Mask, Expr>> terms;
        int degree = -1;
        bool only_zero_function = pieces.size() == 1;
        for (const auto& [b, e] : pieces) {
            Mask m = 0;
            int sign = 1;
            std::size_t expr_start = b;
            const std::size_t colon = find_colon(b, e);
            if (colon == std::string_view::npos && starts_with_differential(b, e)) {
                differentials(b, e, m);
                fail_at("expected ':' after the differentials", e);
            }
            if (colon != std::string_view::npos) {
                sign = differentials(b, colon, m);
                expr_start = colon + 1;
                only_zero_function = false;
            }
            Expr coeff;
            try {
                coeff = parse_expr(s_.substr(expr_start, e - expr_start), sym_);
            } catch (const ParseError& err) {
                throw err.relocated(1, static_cast<int>(expr_start));
            }
            const int k = degree_of(m);
            if (degree >= 0 && k != degree)
                fail_at("terms of different degree", b);
            degree = k;
            if (only_zero_function && coeff.is_zero())
                return DiffForm(n, zero_degree_);
            terms.emplace_back(m, sign > 0 ? coeff : -coeff);
        }
        DiffForm r(n, degree);
        for (const auto& [m, c] : terms)
            r.add(m, c);
        return r;
    }

private:
    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const
    {
        std::string tok = at < s_.size() ? std::string(1, s_[at]) : "end of input";
        throw ParseError(what, 1, static_cast<int>(at) + 1, tok);
    }

    std::size_t skip(std::size_t i, std::size_t e) const
    {
        while (i < e && std::isspace(static_cast<unsigned char>(s_[i])))
            ++i;
        return i;
    }

    bool starts_with_differential(std::size_t b, std::size_t e) const
    {
        const std::size_t i = skip(b, e);
        return i + 1 < e && s_[i] == 'd' && skip(i + 1, e) < e && s_[skip(i + 1, e)] == '[';
    }

    std::size_t find_colon(std::size_t b, std::size_t e) const
    {
        int depth = 0;
        for (std::size_t i = b; i < e; ++i) {
            if (s_[i] == '(' || s_[i] == '[')
                ++depth;
            else if (s_[i] == ')' || s_[i] == ']')
                --depth;
            else if (s_[i] == ':' && depth == 0)
                return i;
        }
        return std::string_view::npos;
    }

    // Parses d[a]^d[b]^... between b and e; returns the sorting sign.
    int differentials(std::size_t b, std::size_t e, Mask& mask)
    {
        std::vector<int> idx;
        std::size_t i = skip(b, e);
        for (;;) {
            if (i >= e || s_[i] != 'd')
                fail_at("expected 'd['", i);
            i = skip(i + 1, e);
            if (i >= e || s_[i] != '[')
                fail_at("expected '['", i);
            i = skip(i + 1, e);
            const std::size_t name_start = i;
            while (i < e && (std::isalnum(static_cast<unsigned char>(s_[i])) || s_[i] == '_'))
                ++i;
            const std::string name(s_.substr(name_start, i - name_start));
            const auto it = std::find(sym_.variables.begin(), sym_.variables.end(), name);
            if (it == sym_.variables.end()) {
                if (name.empty())
                    fail_at("expected a variable name", name_start);
                throw ParseError("unknown variable '" + name + "'", 1, static_cast<int>(name_start) + 1, name);
            }
            idx.push_back(static_cast<int>(it - sym_.variables.begin()));
            i = skip(i, e);
            if (i >= e || s_[i] != ']')
                fail_at("expected ']'", i);
            i = skip(i + 1, e);
            if (i >= e)
                break;
            if (s_[i] != '^')
                fail_at("expected '^' or ':'", i);
            i = skip(i + 1, e);
        }
        const int s = mask_of(idx, mask);
        if (s == 0)
            fail_at("repeated differential", b);
        return s;
    }

    std::string_view s_;
    const Symbols& sym_;
    int zero_degree_;
};

} // namespace

DiffForm parse_form(std::string_view text, const Symbols& symbols, int zero_degree)
{
    return FormParser(text, symbols, zero_degree).run();
}

} // namespace hcontact
