#include "hcontact/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <numbers>

namespace hcontact {

namespace {

class Parser {
public:
    Parser(std::string_view text, const Symbols& symbols) : s_(text), sym_(symbols) {}

    Expr run()
    {
        auto e = sum();
        skip_ws();
        if (pos_ < s_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const
    {
        throw ParseError(what, 1, static_cast<int>(at) + 1, token_at(at));
    }

    std::string token_at(std::size_t at) const
    {
        if (at >= s_.size())
            return "end of input";
        const auto c = static_cast<unsigned char>(s_[at]);
        if (std::isalnum(c) || s_[at] == '_' || s_[at] == '.') {
            std::size_t e = at;
            while (e < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_' || s_[e] == '.'))
                ++e;
            return std::string(s_.substr(at, e - at));
        }
        return std::string(1, s_[at]);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    Expr sum()
    {
        auto e = product();
        for (;;) {
            if (accept('+'))
                e = e + product();
            else if (accept('-'))
                e = e - product();
            else
                return e;
        }
    }

    Expr product()
    {
        auto e = unary();
        for (;;) {
            if (accept('*'))
                e = e * unary();
            else if (accept('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary()
    {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Expr power()
    {
        auto base = atom();
        if (accept('^')) {
            int k = 0;
            if (accept('(')) {
                k = integer();
                expect(')');
            } else {
                k = integer();
            }
            return pow(base, k);
        }
        return base;
    }

    int integer()
    {
        skip_ws();
        const std::size_t start = pos_;
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            neg = s_[pos_] == '-';
            ++pos_;
            skip_ws();
        }
        const std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == digits)
            fail_at("expected an integer", digits);
        if (pos_ < s_.size() && (s_[pos_] == '.' || name_char(pos_)))
            fail_at("expected an integer", digits);
        int v = 0;
        const auto res = std::from_chars(s_.data() + digits, s_.data() + pos_, v);
        if (res.ec != std::errc())
            fail_at("integer out of range", start);
        return neg ? -v : v;
    }

    bool name_char(std::size_t at) const
    {
        return at < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[at])) || s_[at] == '_');
    }

    Expr number()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-'))
                ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            }
        }
        const std::string lit(s_.substr(start, pos_ - start));
        if (lit == ".")
            fail_at("malformed number", start);
        char* end = nullptr;
        const double v = std::strtod(lit.c_str(), &end);
        if (end != lit.c_str() + lit.size())
            fail_at("malformed number", start);
        if (pos_ < s_.size() && s_[pos_] == 'i' && !name_char(pos_ + 1)) {
            ++pos_;
            return Expr(cplx(0.0, v));
        }
        if (name_char(pos_))
            fail("unexpected name directly after a number");
        return Expr(v);
    }

    Expr call(const std::string& name, std::size_t at)
    {
        auto arg = sum();
        int branch = 0;
        if (accept(';')) {
            if (name == "exp")
                fail_at("exp takes no branch", pos_ - 1);
            branch = integer();
        }
        expect(')');
        if (name == "exp")
            return exp(arg);
        if (name == "log")
            return log(arg, branch);
        if (branch != 0 && branch != 1)
            fail_at("sqrt branch must be 0 or 1", at);
        return sqrt(arg, branch);
    }

    Expr atom()
    {
        skip_ws();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (c == '(') {
            ++pos_;
            auto e = sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (name_char(pos_))
                ++pos_;
            const std::string name(s_.substr(start, pos_ - start));
            const std::size_t after = pos_;
            if ((name == "exp" || name == "log" || name == "sqrt") && accept('('))
                return call(name, start);
            pos_ = after;
            for (std::size_t k = 0; k < sym_.variables.size(); ++k)
                if (sym_.variables[k] == name)
                    return Expr::var(static_cast<int>(k));
            if (auto it = sym_.constants.find(name); it != sym_.constants.end())
                return Expr(it->second);
            if (name == "i")
                return Expr(cplx(0.0, 1.0));
            if (name == "pi")
                return Expr(std::numbers::pi);
            fail_at("unknown name '" + name + "'", start);
        }
        fail("unexpected character");
    }

    std::string_view s_;
    const Symbols& sym_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expr(std::string_view text, const Symbols& symbols) { return Parser(text, symbols).run(); }

} // namespace hcontact
