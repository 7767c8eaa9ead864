#include "tlmt/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "tlmt/util.hpp"

namespace tlmt::syntax {

// ── Constructors ────────────────────────────────────────────────────────────

TermPtr lit(double v) {
    assert(v >= 0.0 && "negative literals are spelled with neg()");
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Literal;
    t->value = v;
    return t;
}

TermPtr ident(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Identifier;
    t->name = std::move(name);
    return t;
}

static TermPtr term_node(TermKind k, TermPtr a, TermPtr b = nullptr) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
}

TermPtr neg(TermPtr t) { return term_node(TermKind::Negate, std::move(t)); }
TermPtr add(TermPtr a, TermPtr b) { return term_node(TermKind::Add, std::move(a), std::move(b)); }
TermPtr sub(TermPtr a, TermPtr b) { return term_node(TermKind::Sub, std::move(a), std::move(b)); }
TermPtr mul(TermPtr a, TermPtr b) { return term_node(TermKind::Mul, std::move(a), std::move(b)); }

TermPtr pow(TermPtr base, std::uint32_t exponent) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Pow;
    t->lhs = std::move(base);
    t->exponent = exponent;
    return t;
}

TermPtr abs(TermPtr t) { return term_node(TermKind::Abs, std::move(t)); }

const char* cmp_text(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Eq: return "=";
        case Cmp::Ne: return "!=";
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
    }
    return "?";
}

LambdaPtr atom(TermPtr lhs, Cmp cmp, TermPtr rhs) {
    auto l = std::make_shared<Lambda>();
    l->kind = LambdaKind::Atom;
    l->atom = Atom{std::move(lhs), cmp, std::move(rhs)};
    return l;
}

LambdaPtr not_atom(TermPtr lhs, Cmp cmp, TermPtr rhs) {
    auto l = std::make_shared<Lambda>();
    l->kind = LambdaKind::NotAtom;
    l->atom = Atom{std::move(lhs), cmp, std::move(rhs)};
    return l;
}

static LambdaPtr lambda_node(LambdaKind k, LambdaPtr a, LambdaPtr b) {
    auto l = std::make_shared<Lambda>();
    l->kind = k;
    l->lhs = std::move(a);
    l->rhs = std::move(b);
    return l;
}

LambdaPtr lambda_and(LambdaPtr a, LambdaPtr b) {
    return lambda_node(LambdaKind::And, std::move(a), std::move(b));
}
LambdaPtr lambda_or(LambdaPtr a, LambdaPtr b) {
    return lambda_node(LambdaKind::Or, std::move(a), std::move(b));
}

static PhiPtr phi_node(PhiKind k, PhiPtr a = nullptr, PhiPtr b = nullptr) {
    auto p = std::make_shared<Phi>();
    p->kind = k;
    p->lhs = std::move(a);
    p->rhs = std::move(b);
    return p;
}

PhiPtr phi_true() { return phi_node(PhiKind::True); }
PhiPtr phi_false() { return phi_node(PhiKind::False); }

PhiPtr phi_lambda(LambdaPtr l) {
    auto p = std::make_shared<Phi>();
    p->kind = PhiKind::Lambda;
    p->lam = std::move(l);
    return p;
}

PhiPtr phi_and(PhiPtr a, PhiPtr b) { return phi_node(PhiKind::And, std::move(a), std::move(b)); }
PhiPtr phi_or(PhiPtr a, PhiPtr b) { return phi_node(PhiKind::Or, std::move(a), std::move(b)); }
PhiPtr phi_next(PhiPtr a) { return phi_node(PhiKind::Next, std::move(a)); }
PhiPtr phi_weak_next(PhiPtr a) { return phi_node(PhiKind::WeakNext, std::move(a)); }
PhiPtr phi_until(PhiPtr a, PhiPtr b) { return phi_node(PhiKind::Until, std::move(a), std::move(b)); }
PhiPtr phi_eventually(PhiPtr a) { return phi_node(PhiKind::Eventually, std::move(a)); }
PhiPtr phi_always(PhiPtr a) { return phi_node(PhiKind::Always, std::move(a)); }

std::unordered_map<std::string, std::uint32_t> Signature::variable_index() const {
    std::unordered_map<std::string, std::uint32_t> m;
    for (std::uint32_t i = 0; i < variables.size(); ++i) m[variables[i]] = i;
    return m;
}

// ── Structural equality ─────────────────────────────────────────────────────

bool equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TermKind::Literal: return a->value == b->value;
        case TermKind::Identifier:
            return a->name == b->name && a->ident == b->ident && a->var_index == b->var_index;
        case TermKind::Negate:
        case TermKind::Abs: return equal(a->lhs, b->lhs);
        case TermKind::Pow: return a->exponent == b->exponent && equal(a->lhs, b->lhs);
        case TermKind::Add:
        case TermKind::Sub:
        case TermKind::Mul: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

bool equal(const Atom& a, const Atom& b) {
    return a.cmp == b.cmp && equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
}

bool equal(const LambdaPtr& a, const LambdaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case LambdaKind::Atom:
        case LambdaKind::NotAtom: return equal(a->atom, b->atom);
        case LambdaKind::And:
        case LambdaKind::Or: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

bool equal(const PhiPtr& a, const PhiPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case PhiKind::True:
        case PhiKind::False: return true;
        case PhiKind::Lambda: return equal(a->lam, b->lam);
        case PhiKind::Next:
        case PhiKind::WeakNext:
        case PhiKind::Eventually:
        case PhiKind::Always: return equal(a->lhs, b->lhs);
        case PhiKind::And:
        case PhiKind::Or:
        case PhiKind::Until: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

// ── Canonical keys ──────────────────────────────────────────────────────────

static std::string key_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

// Collect the leaves of a maximal same-kind commutative chain.
template <typename Ptr, typename KindT>
static void flatten(const Ptr& node, KindT kind, std::vector<Ptr>& out) {
    if (node->kind == kind) {
        flatten(node->lhs, kind, out);
        flatten(node->rhs, kind, out);
    } else {
        out.push_back(node);
    }
}

template <typename Ptr>
static std::string sorted_children_key(const char* tag, const std::vector<Ptr>& children) {
    std::vector<std::string> keys;
    keys.reserve(children.size());
    for (const auto& c : children) keys.push_back(normal_key(c));
    std::sort(keys.begin(), keys.end());
    std::string out = "(";
    out += tag;
    for (const auto& k : keys) {
        out += ' ';
        out += k;
    }
    out += ')';
    return out;
}

std::string normal_key(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Literal: return "L" + key_double(t->value);
        case TermKind::Identifier:
            switch (t->ident) {
                case IdentKind::Unresolved: return "u:" + t->name;
                case IdentKind::Variable: return "v" + std::to_string(t->var_index) + ":" + t->name;
                case IdentKind::Constant: return "c:" + t->name;
            }
            return "?";
        case TermKind::Negate: return "(- " + normal_key(t->lhs) + ")";
        case TermKind::Abs: return "(abs " + normal_key(t->lhs) + ")";
        case TermKind::Pow:
            return "(^ " + normal_key(t->lhs) + " " + std::to_string(t->exponent) + ")";
        case TermKind::Sub: return "(sub " + normal_key(t->lhs) + " " + normal_key(t->rhs) + ")";
        case TermKind::Add: {
            std::vector<TermPtr> ch;
            flatten(t, TermKind::Add, ch);
            return sorted_children_key("+", ch);
        }
        case TermKind::Mul: {
            std::vector<TermPtr> ch;
            flatten(t, TermKind::Mul, ch);
            return sorted_children_key("*", ch);
        }
    }
    return "?";
}

std::string normal_key(const Atom& a) {
    return std::string("(") + cmp_text(a.cmp) + " " + normal_key(a.lhs) + " " + normal_key(a.rhs) +
           ")";
}

std::string normal_key(const LambdaPtr& l) {
    switch (l->kind) {
        case LambdaKind::Atom: return normal_key(l->atom);
        case LambdaKind::NotAtom: return "(! " + normal_key(l->atom) + ")";
        case LambdaKind::And: {
            std::vector<LambdaPtr> ch;
            flatten(l, LambdaKind::And, ch);
            return sorted_children_key("&", ch);
        }
        case LambdaKind::Or: {
            std::vector<LambdaPtr> ch;
            flatten(l, LambdaKind::Or, ch);
            return sorted_children_key("|", ch);
        }
    }
    return "?";
}

std::string normal_key(const PhiPtr& p) {
    switch (p->kind) {
        case PhiKind::True: return "T";
        case PhiKind::False: return "Bot";
        case PhiKind::Lambda: return "(lam " + normal_key(p->lam) + ")";
        case PhiKind::Next: return "(X " + normal_key(p->lhs) + ")";
        case PhiKind::WeakNext: return "(WX " + normal_key(p->lhs) + ")";
        case PhiKind::Eventually: return "(F " + normal_key(p->lhs) + ")";
        case PhiKind::Always: return "(G " + normal_key(p->lhs) + ")";
        case PhiKind::Until: return "(U " + normal_key(p->lhs) + " " + normal_key(p->rhs) + ")";
        case PhiKind::And: {
            std::vector<PhiPtr> ch;
            flatten(p, PhiKind::And, ch);
            return sorted_children_key("AND", ch);
        }
        case PhiKind::Or: {
            std::vector<PhiPtr> ch;
            flatten(p, PhiKind::Or, ch);
            return sorted_children_key("OR", ch);
        }
    }
    return "?";
}

// ── Lexer ───────────────────────────────────────────────────────────────────

namespace {

enum class Tok : std::uint8_t {
    Number,
    Ident,
    LParen,
    RParen,
    AndAnd,
    OrOr,
    Not,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Plus,
    Minus,
    Star,
    Caret,
    End,
};

struct Token {
    Tok tok{};
    std::string text;
    double number = 0.0;
    int line = 1;
    int col = 1;
};

[[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ParseError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ")",
                     line, col);
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok t, std::string s, int l, int c) {
        Token tk;
        tk.tok = t;
        tk.text = std::move(s);
        tk.line = l;
        tk.col = c;
        out.push_back(std::move(tk));
    };
    while (i < text.size()) {
        char c = text[i];
        int tl = line, tc = col;
        auto advance = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k) {
                if (text[i + k] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            i += n;
        };
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            advance(1);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                std::size_t d = k;
                while (d < text.size() && std::isdigit(static_cast<unsigned char>(text[d]))) ++d;
                if (d > k) j = d;
            }
            double v = 0.0;
            auto res = std::from_chars(text.data() + i, text.data() + j, v);
            if (res.ec != std::errc{}) fail("malformed number", tl, tc);
            Token tk;
            tk.tok = Tok::Number;
            tk.text = text.substr(i, j - i);
            tk.number = v;
            tk.line = tl;
            tk.col = tc;
            out.push_back(std::move(tk));
            advance(j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            push(Tok::Ident, text.substr(i, j - i), tl, tc);
            advance(j - i);
            continue;
        }
        switch (c) {
            case '(': push(Tok::LParen, "(", tl, tc); advance(1); continue;
            case ')': push(Tok::RParen, ")", tl, tc); advance(1); continue;
            case '+': push(Tok::Plus, "+", tl, tc); advance(1); continue;
            case '-': push(Tok::Minus, "-", tl, tc); advance(1); continue;
            case '*': push(Tok::Star, "*", tl, tc); advance(1); continue;
            case '^': push(Tok::Caret, "^", tl, tc); advance(1); continue;
            case '&':
                if (i + 1 < text.size() && text[i + 1] == '&') {
                    push(Tok::AndAnd, "&&", tl, tc);
                    advance(2);
                    continue;
                }
                fail("expected '&&'", tl, tc);
            case '|':
                if (i + 1 < text.size() && text[i + 1] == '|') {
                    push(Tok::OrOr, "||", tl, tc);
                    advance(2);
                    continue;
                }
                fail("expected '||'", tl, tc);
            case '!':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    push(Tok::Ne, "!=", tl, tc);
                    advance(2);
                } else {
                    push(Tok::Not, "!", tl, tc);
                    advance(1);
                }
                continue;
            case '<':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    push(Tok::Le, "<=", tl, tc);
                    advance(2);
                } else {
                    push(Tok::Lt, "<", tl, tc);
                    advance(1);
                }
                continue;
            case '>':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    push(Tok::Ge, ">=", tl, tc);
                    advance(2);
                } else {
                    push(Tok::Gt, ">", tl, tc);
                    advance(1);
                }
                continue;
            case '=':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    push(Tok::Eq, "==", tl, tc);
                    advance(2);
                } else {
                    push(Tok::Eq, "=", tl, tc);
                    advance(1);
                }
                continue;
            default: fail(std::string("unexpected character '") + c + "'", tl, tc);
        }
    }
    Token end;
    end.tok = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

bool is_temporal_keyword(const Token& t) {
    return t.tok == Tok::Ident &&
           (t.text == "X" || t.text == "WX" || t.text == "F" || t.text == "G" || t.text == "U");
}

bool is_keyword(const std::string& s) {
    static const std::unordered_set<std::string> kw = {"X",     "WX",    "F",    "G",
                                                       "U",     "true",  "false", "abs",
                                                       "exists", "forall", "next", "wnext"};
    return kw.count(s) != 0;
}

// Recursive-descent parser over the pre-lexed token stream. Backtracking is
// a saved/restored cursor; it is only used to disambiguate '(' between a
// parenthesized term and a parenthesized temporal formula.
class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    PhiPtr parse_phi_toplevel() {
        PhiPtr p = parse_until();
        expect_end();
        return p;
    }

    LambdaPtr parse_lambda_toplevel() {
        PhiPtr p = parse_until();
        expect_end();
        LambdaPtr l = to_lambda(p);
        if (!l) {
            fail("expected a first-order (lambda) formula without temporal operators", 1, 1);
        }
        return l;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n = 1) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    void bump() { ++pos_; }

    [[noreturn]] void fail_here(const std::string& msg) const {
        fail(msg, cur().line, cur().col);
    }

    void expect(Tok t, const char* what) {
        if (cur().tok != t) fail_here(std::string("expected ") + what);
        bump();
    }

    void expect_end() {
        if (cur().tok != Tok::End) fail_here("unexpected trailing input");
    }

    void reject_reserved(const Token& t) const {
        if (t.tok != Tok::Ident) return;
        if (t.text == "exists" || t.text == "forall") {
            fail("quantifiers ('" + t.text + "') are not supported: the fragment is quantifier-free",
                 t.line, t.col);
        }
        if (t.text == "next" || t.text == "wnext") {
            fail("'" + t.text + "' is a lookahead operator and is not part of the lookahead-free fragment",
                 t.line, t.col);
        }
    }

    // φ-layer, loosest first: U, then ||, then &&, then unary temporal.
    PhiPtr parse_until() {
        PhiPtr left = parse_or();
        if (cur().tok == Tok::Ident && cur().text == "U") {
            bump();
            PhiPtr right = parse_until();  // right-associative
            return phi_until(std::move(left), std::move(right));
        }
        return left;
    }

    PhiPtr parse_or() {
        PhiPtr left = parse_and();
        while (cur().tok == Tok::OrOr) {
            bump();
            left = phi_or(std::move(left), parse_and());
        }
        return left;
    }

    PhiPtr parse_and() {
        PhiPtr left = parse_unary();
        while (cur().tok == Tok::AndAnd) {
            bump();
            left = phi_and(std::move(left), parse_unary());
        }
        return left;
    }

    PhiPtr parse_unary() {
        if (cur().tok == Tok::Ident) {
            const std::string& s = cur().text;
            if (s == "X" || s == "WX" || s == "F" || s == "G") {
                bump();
                PhiPtr child = parse_unary();
                if (s == "X") return phi_next(std::move(child));
                if (s == "WX") return phi_weak_next(std::move(child));
                if (s == "F") return phi_eventually(std::move(child));
                return phi_always(std::move(child));
            }
        }
        return parse_atom_or_group();
    }

    PhiPtr parse_atom_or_group() {
        const Token& t = cur();
        reject_reserved(t);
        if (t.tok == Tok::Ident && t.text == "true") {
            bump();
            return phi_true();
        }
        if (t.tok == Tok::Ident && t.text == "false") {
            bump();
            return phi_false();
        }
        if (t.tok == Tok::Not) return phi_lambda(parse_negated_atom());
        if (t.tok == Tok::Ident && t.text == "U") fail_here("'U' is binary; missing left operand");

        if (t.tok == Tok::LParen) {
            // Either "(term) cmp term" or "(phi)". Try the term reading first;
            // anything with temporal content or a comparison inside the
            // parentheses makes it fail, and we reparse as a formula.
            std::size_t saved = pos_;
            bool term_ok = true;
            TermPtr lhs;
            try {
                lhs = parse_term();
            } catch (const ParseError&) {
                term_ok = false;
            }
            if (term_ok && is_comparator(cur().tok)) {
                Cmp c = take_comparator();
                TermPtr rhs = parse_term();
                return phi_lambda(atom(std::move(lhs), c, std::move(rhs)));
            }
            pos_ = saved;
            expect(Tok::LParen, "'('");
            PhiPtr inner = parse_until();
            expect(Tok::RParen, "')'");
            return inner;
        }

        // Bare term: must be the left side of a comparison.
        TermPtr lhs = parse_term();
        if (!is_comparator(cur().tok)) {
            fail_here("expected a comparison operator after term");
        }
        Cmp c = take_comparator();
        TermPtr rhs = parse_term();
        return phi_lambda(atom(std::move(lhs), c, std::move(rhs)));
    }

    LambdaPtr parse_negated_atom() {
        const Token& bang = cur();
        expect(Tok::Not, "'!'");
        const Token& next = cur();
        if (is_temporal_keyword(next) || (next.tok == Tok::Ident &&
                                          (next.text == "true" || next.text == "false"))) {
            fail("negation applies only directly to atoms in this fragment (the temporal layer is negation-free)",
                 bang.line, bang.col);
        }
        bool parens = false;
        if (next.tok == Tok::LParen) {
            if (is_temporal_keyword(peek())) {
                fail("negation applies only directly to atoms in this fragment (the temporal layer is negation-free)",
                     bang.line, bang.col);
            }
            parens = true;
            bump();
        }
        TermPtr lhs = parse_term();
        if (!is_comparator(cur().tok)) {
            fail("negation applies only directly to atoms in this fragment (the temporal layer is negation-free)", bang.line, bang.col);
        }
        Cmp c = take_comparator();
        TermPtr rhs = parse_term();
        if (parens) {
            if (is_temporal_keyword(cur()) || cur().tok == Tok::AndAnd || cur().tok == Tok::OrOr) {
                fail("negation applies only directly to atoms in this fragment (the temporal layer is negation-free)",
                     bang.line, bang.col);
            }
            expect(Tok::RParen, "')'");
        }
        return not_atom(std::move(lhs), c, std::move(rhs));
    }

    static bool is_comparator(Tok t) {
        return t == Tok::Lt || t == Tok::Le || t == Tok::Eq || t == Tok::Ne || t == Tok::Ge ||
               t == Tok::Gt;
    }

    Cmp take_comparator() {
        Tok t = cur().tok;
        bump();
        switch (t) {
            case Tok::Lt: return Cmp::Lt;
            case Tok::Le: return Cmp::Le;
            case Tok::Eq: return Cmp::Eq;
            case Tok::Ne: return Cmp::Ne;
            case Tok::Ge: return Cmp::Ge;
            default: return Cmp::Gt;
        }
    }

    // term layer: additive < multiplicative < unary minus < power < primary
    TermPtr parse_term() {
        TermPtr left = parse_mul();
        while (cur().tok == Tok::Plus || cur().tok == Tok::Minus) {
            bool plus = cur().tok == Tok::Plus;
            bump();
            TermPtr right = parse_mul();
            left = plus ? add(std::move(left), std::move(right))
                        : sub(std::move(left), std::move(right));
        }
        return left;
    }

    TermPtr parse_mul() {
        TermPtr left = parse_term_unary();
        while (cur().tok == Tok::Star) {
            bump();
            left = mul(std::move(left), parse_term_unary());
        }
        return left;
    }

    TermPtr parse_term_unary() {
        if (cur().tok == Tok::Minus) {
            bump();
            return neg(parse_term_unary());
        }
        return parse_power();
    }

    TermPtr parse_power() {
        TermPtr base = parse_primary();
        while (cur().tok == Tok::Caret) {
            bump();
            if (cur().tok != Tok::Number) fail_here("expected an integer exponent after '^'");
            double v = cur().number;
            if (v < 0.0 || v != std::floor(v) || v > 4294967295.0 ||
                cur().text.find('.') != std::string::npos ||
                cur().text.find('e') != std::string::npos ||
                cur().text.find('E') != std::string::npos) {
                fail_here("power exponents must be non-negative integer literals");
            }
            bump();
            base = pow(std::move(base), static_cast<std::uint32_t>(v));
        }
        return base;
    }

    TermPtr parse_primary() {
        const Token& t = cur();
        reject_reserved(t);
        if (t.tok == Tok::Number) {
            double v = t.number;
            bump();
            return lit(v);
        }
        if (t.tok == Tok::Ident) {
            if (t.text == "abs") {
                bump();
                expect(Tok::LParen, "'(' after abs");
                TermPtr inner = parse_term();
                expect(Tok::RParen, "')'");
                return abs(std::move(inner));
            }
            if (is_keyword(t.text)) {
                fail_here("'" + t.text + "' cannot appear inside a term");
            }
            if (peek().tok == Tok::LParen) {
                fail_here("unknown function '" + t.text + "'");
            }
            std::string name = t.text;
            bump();
            return ident(std::move(name));
        }
        if (t.tok == Tok::LParen) {
            bump();
            TermPtr inner = parse_term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        fail_here("expected a term");
    }

    // Lower a purely Boolean formula back to the lambda layer; nullptr if it
    // contains temporal structure.
    static LambdaPtr to_lambda(const PhiPtr& p) {
        switch (p->kind) {
            case PhiKind::Lambda: return p->lam;
            case PhiKind::And: {
                LambdaPtr a = to_lambda(p->lhs), b = to_lambda(p->rhs);
                return (a && b) ? lambda_and(a, b) : nullptr;
            }
            case PhiKind::Or: {
                LambdaPtr a = to_lambda(p->lhs), b = to_lambda(p->rhs);
                return (a && b) ? lambda_or(a, b) : nullptr;
            }
            default: return nullptr;
        }
    }
};

}  // namespace

PhiPtr parse_formula(const std::string& text) {
    Parser p(lex(text));
    return p.parse_phi_toplevel();
}

LambdaPtr parse_lambda(const std::string& text) {
    Parser p(lex(text));
    return p.parse_lambda_toplevel();
}

// ── Resolution ──────────────────────────────────────────────────────────────

namespace {

TermPtr resolve_term(const TermPtr& t, const Signature& sig,
                     const std::unordered_map<std::string, std::uint32_t>& index) {
    switch (t->kind) {
        case TermKind::Literal: return t;
        case TermKind::Identifier: {
            bool is_const = sig.constants.count(t->name) != 0;
            auto it = index.find(t->name);
            bool is_var = it != index.end();
            if (is_const && is_var) {
                throw ResolveError("identifier '" + t->name +
                                   "' is declared both constant and variable");
            }
            if (!is_const && !is_var) {
                throw ResolveError("unresolved identifier '" + t->name +
                                   "': not a declared constant or state variable");
            }
            auto r = std::make_shared<Term>(*t);
            if (is_var) {
                r->ident = IdentKind::Variable;
                r->var_index = it->second;
            } else {
                r->ident = IdentKind::Constant;
            }
            return r;
        }
        default: {
            auto r = std::make_shared<Term>(*t);
            if (t->lhs) r->lhs = resolve_term(t->lhs, sig, index);
            if (t->rhs) r->rhs = resolve_term(t->rhs, sig, index);
            return r;
        }
    }
}

LambdaPtr resolve_lambda_impl(const LambdaPtr& l, const Signature& sig,
                              const std::unordered_map<std::string, std::uint32_t>& index) {
    auto r = std::make_shared<Lambda>(*l);
    switch (l->kind) {
        case LambdaKind::Atom:
        case LambdaKind::NotAtom:
            r->atom.lhs = resolve_term(l->atom.lhs, sig, index);
            r->atom.rhs = resolve_term(l->atom.rhs, sig, index);
            break;
        case LambdaKind::And:
        case LambdaKind::Or:
            r->lhs = resolve_lambda_impl(l->lhs, sig, index);
            r->rhs = resolve_lambda_impl(l->rhs, sig, index);
            break;
    }
    return r;
}

PhiPtr resolve_phi(const PhiPtr& p, const Signature& sig,
                   const std::unordered_map<std::string, std::uint32_t>& index) {
    auto r = std::make_shared<Phi>(*p);
    if (p->lam) r->lam = resolve_lambda_impl(p->lam, sig, index);
    if (p->lhs) r->lhs = resolve_phi(p->lhs, sig, index);
    if (p->rhs) r->rhs = resolve_phi(p->rhs, sig, index);
    return r;
}

}  // namespace

std::pair<PhiPtr, Signature> resolve(const PhiPtr& ast, const std::set<std::string>& constants,
                                     const std::vector<std::string>& variables) {
    Signature sig;
    sig.variables = variables;
    sig.constants = constants;
    {
        std::set<std::string> seen;
        for (const auto& v : variables) {
            if (!seen.insert(v).second) {
                throw ResolveError("duplicate state variable '" + v + "'");
            }
        }
    }
    auto index = sig.variable_index();
    return {resolve_phi(ast, sig, index), sig};
}

LambdaPtr resolve_lambda(const LambdaPtr& l, const Signature& sig) {
    auto index = sig.variable_index();
    return resolve_lambda_impl(l, sig, index);
}

// ── Printing ────────────────────────────────────────────────────────────────

std::string print_term(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Literal: return format_double(t->value);
        case TermKind::Identifier: return t->name;
        case TermKind::Negate: return "(-" + print_term(t->lhs) + ")";
        case TermKind::Add: return "(" + print_term(t->lhs) + " + " + print_term(t->rhs) + ")";
        case TermKind::Sub: return "(" + print_term(t->lhs) + " - " + print_term(t->rhs) + ")";
        case TermKind::Mul: return "(" + print_term(t->lhs) + " * " + print_term(t->rhs) + ")";
        case TermKind::Pow: return print_term(t->lhs) + "^" + std::to_string(t->exponent);
        case TermKind::Abs: {
            std::string inner = print_term(t->lhs);
            if (!inner.empty() && inner.front() == '(') return "abs" + inner;
            return "abs(" + inner + ")";
        }
    }
    return "?";
}

static std::string print_atom(const Atom& a) {
    return "(" + print_term(a.lhs) + " " + cmp_text(a.cmp) + " " + print_term(a.rhs) + ")";
}

std::string print_lambda(const LambdaPtr& l) {
    switch (l->kind) {
        case LambdaKind::Atom: return print_atom(l->atom);
        case LambdaKind::NotAtom: return "!" + print_atom(l->atom);
        case LambdaKind::And: return "(" + print_lambda(l->lhs) + " && " + print_lambda(l->rhs) + ")";
        case LambdaKind::Or: return "(" + print_lambda(l->lhs) + " || " + print_lambda(l->rhs) + ")";
    }
    return "?";
}

std::string print_formula(const PhiPtr& p) {
    switch (p->kind) {
        case PhiKind::True: return "true";
        case PhiKind::False: return "false";
        case PhiKind::Lambda: return print_lambda(p->lam);
        case PhiKind::And: return "(" + print_formula(p->lhs) + " && " + print_formula(p->rhs) + ")";
        case PhiKind::Or: return "(" + print_formula(p->lhs) + " || " + print_formula(p->rhs) + ")";
        case PhiKind::Until:
            return "(" + print_formula(p->lhs) + " U " + print_formula(p->rhs) + ")";
        case PhiKind::Next: return "X " + print_formula(p->lhs);
        case PhiKind::WeakNext: return "WX " + print_formula(p->lhs);
        case PhiKind::Eventually: return "F " + print_formula(p->lhs);
        case PhiKind::Always: return "G " + print_formula(p->lhs);
    }
    return "?";
}

// ── Traversals ──────────────────────────────────────────────────────────────

static void collect_subformulas(const PhiPtr& p, std::vector<PhiPtr>& out,
                                std::unordered_set<std::string>& seen) {
    if (seen.insert(normal_key(p)).second) out.push_back(p);
    if (p->lhs) collect_subformulas(p->lhs, out, seen);
    if (p->rhs) collect_subformulas(p->rhs, out, seen);
}

std::vector<PhiPtr> subformulas(const PhiPtr& ast) {
    std::vector<PhiPtr> out;
    std::unordered_set<std::string> seen;
    collect_subformulas(ast, out, seen);
    return out;
}

namespace {

void collect_idents_term(const TermPtr& t, std::vector<std::string>& out,
                         std::unordered_set<std::string>& seen) {
    if (t->kind == TermKind::Identifier) {
        if (seen.insert(t->name).second) out.push_back(t->name);
        return;
    }
    if (t->lhs) collect_idents_term(t->lhs, out, seen);
    if (t->rhs) collect_idents_term(t->rhs, out, seen);
}

void collect_idents_lambda(const LambdaPtr& l, std::vector<std::string>& out,
                           std::unordered_set<std::string>& seen) {
    switch (l->kind) {
        case LambdaKind::Atom:
        case LambdaKind::NotAtom:
            collect_idents_term(l->atom.lhs, out, seen);
            collect_idents_term(l->atom.rhs, out, seen);
            break;
        default:
            collect_idents_lambda(l->lhs, out, seen);
            collect_idents_lambda(l->rhs, out, seen);
    }
}

void collect_idents_phi(const PhiPtr& p, std::vector<std::string>& out,
                        std::unordered_set<std::string>& seen) {
    if (p->lam) collect_idents_lambda(p->lam, out, seen);
    if (p->lhs) collect_idents_phi(p->lhs, out, seen);
    if (p->rhs) collect_idents_phi(p->rhs, out, seen);
}

bool term_resolved(const TermPtr& t) {
    if (t->kind == TermKind::Identifier) return t->ident != IdentKind::Unresolved;
    if (t->lhs && !term_resolved(t->lhs)) return false;
    if (t->rhs && !term_resolved(t->rhs)) return false;
    return true;
}

bool lambda_resolved(const LambdaPtr& l) {
    switch (l->kind) {
        case LambdaKind::Atom:
        case LambdaKind::NotAtom: return term_resolved(l->atom.lhs) && term_resolved(l->atom.rhs);
        default: return lambda_resolved(l->lhs) && lambda_resolved(l->rhs);
    }
}

}  // namespace

std::vector<std::string> identifiers(const PhiPtr& ast) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    collect_idents_phi(ast, out, seen);
    return out;
}

bool is_resolved(const PhiPtr& ast) {
    if (ast->lam && !lambda_resolved(ast->lam)) return false;
    if (ast->lhs && !is_resolved(ast->lhs)) return false;
    if (ast->rhs && !is_resolved(ast->rhs)) return false;
    return true;
}

}  // namespace tlmt::syntax
