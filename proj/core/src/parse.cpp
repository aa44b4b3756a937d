#include <cctype>
#include <string>

#include "wittlab/ring.hpp"

namespace wittlab {

namespace {

struct Parser {
    const RingPtr& R;
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& why) {
        throw config_error("parse error at position " + std::to_string(pos) + ": " + why +
                           " in \"" + s + "\"");
    }

    mpz_class integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (start == pos) fail("expected integer");
        return mpz_class(s.substr(start, pos - start));
    }

    RingElem base() {
        skip_ws();
        if (eat('(')) {
            RingElem e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (peek() == '-') {
            ++pos;
            return r_neg(base());
        }
        if (std::isdigit((unsigned char)peek())) return r_from_int(R, integer());
        if (std::isalpha((unsigned char)peek()) || peek() == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
                ++pos;
            return r_var(R, s.substr(start, pos - start));
        }
        fail("expected term");
    }

    RingElem factor() {
        RingElem e = base();
        while (true) {
            skip_ws();
            if (eat('^')) {
                bool neg = eat('-');
                mpz_class k = integer();
                RingElem p = r_pow(e, k.get_ui());
                e = neg ? r_invert_unit(p) : p;
            } else {
                break;
            }
        }
        return e;
    }

    RingElem term() {
        RingElem e = factor();
        while (true) {
            skip_ws();
            if (eat('*')) {
                e = r_mul(e, factor());
            } else if (eat('/')) {
                skip_ws();
                if (!std::isdigit((unsigned char)peek()))
                    fail("only division by integer literals is supported");
                mpz_class d = integer();
                if (d == 0) fail("division by zero");
                e = r_mul(e, r_from_rational(R, mpq_class(1, d)));
            } else {
                break;
            }
        }
        return e;
    }

    RingElem expr() {
        RingElem e = term();
        while (true) {
            skip_ws();
            if (eat('+'))
                e = r_add(e, term());
            else if (eat('-'))
                e = r_sub(e, term());
            else
                break;
        }
        return e;
    }
};

} // namespace

RingElem r_parse(const RingPtr& R, const std::string& text) {
    Parser p{R, text};
    RingElem e = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    if (R->kind == RingDesc::Kind::poly) ring_check_domain(*R, e.poly());
    return e;
}

} // namespace wittlab
