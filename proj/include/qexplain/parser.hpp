#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "qexplain/atom.hpp"
#include "qexplain/constraints.hpp"
#include "qexplain/error.hpp"
#include "qexplain/query.hpp"

namespace qexplain {

/// Everything a source file may contain: query rules plus constraints.
struct Program {
    std::vector<UnionQuery> queries;
    ConstraintSet constraints;
};

namespace detail {

enum class TokKind { Ident, Variable, Anon, String, Number, Implies, Arrow, LParen, RParen, Comma, Period, End };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = TokKind::End;
            return t;
        }
        const char c = src_[pos_];
        if (c == '(') { advance(); t.kind = TokKind::LParen; return t; }
        if (c == ')') { advance(); t.kind = TokKind::RParen; return t; }
        if (c == ',') { advance(); t.kind = TokKind::Comma; return t; }
        if (c == '.') { advance(); t.kind = TokKind::Period; return t; }
        if (c == ':') {
            advance();
            if (pos_ < src_.size() && src_[pos_] == '-') { advance(); t.kind = TokKind::Implies; return t; }
            raise_at(ErrorKind::ParseError, t.line, t.col, "expected ':-'");
        }
        if (c == '-') {
            advance();
            if (pos_ < src_.size() && src_[pos_] == '>') { advance(); t.kind = TokKind::Arrow; return t; }
            raise_at(ErrorKind::ParseError, t.line, t.col, "expected '->'");
        }
        if (c == '"') {
            advance();
            std::string s;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\n')
                    raise_at(ErrorKind::ParseError, t.line, t.col, "unterminated string");
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
                s.push_back(src_[pos_]);
                advance();
            }
            if (pos_ >= src_.size())
                raise_at(ErrorKind::ParseError, t.line, t.col, "unterminated string");
            advance();
            t.kind = TokKind::String;
            t.text = std::move(s);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                s.push_back(src_[pos_]);
                advance();
            }
            // a '.' is a decimal point only when a digit follows, otherwise it
            // terminates the statement
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                s.push_back('.');
                advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    s.push_back(src_[pos_]);
                    advance();
                }
            }
            t.kind = TokKind::Number;
            t.text = std::move(s);
            return t;
        }
        if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() &&
                   (src_[pos_] == '_' || std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
                s.push_back(src_[pos_]);
                advance();
            }
            if (s == "_") {
                t.kind = TokKind::Anon;
            } else if (std::isupper(static_cast<unsigned char>(s[0]))) {
                t.kind = TokKind::Variable;
            } else {
                t.kind = TokKind::Ident;
            }
            t.text = std::move(s);
            return t;
        }
        raise_at(ErrorKind::ParseError, t.line, t.col,
                 std::string("unexpected character '") + c + "'");
    }

private:
    void advance() {
        if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { shift(); }

    Program parse_top() {
        Program prog;
        // head name -> index into prog.queries, to merge same-head rules
        std::map<std::string, std::size_t> heads;
        while (cur_.kind != TokKind::End) {
            if (cur_.kind == TokKind::Implies) {
                shift();
                DenialConstraint dc;
                dc.atoms = parse_atom_list(/*allow_anon=*/false);
                expect(TokKind::Period, "'.'");
                prog.constraints.dcs.push_back(std::move(dc));
            } else if (cur_.kind == TokKind::Ident) {
                const Token name = cur_;
                shift();
                parse_rule(name, prog, heads);
            } else if (cur_.kind == TokKind::Variable) {
                // a statement opening with an uppercase name is an atom,
                // so it must start an inclusion dependency
                prog.constraints.inds.push_back(parse_ind());
            } else {
                raise_at(ErrorKind::ParseError, cur_.line, cur_.col,
                         "expected a rule, denial constraint, or inclusion dependency");
            }
        }
        return prog;
    }

private:
    void shift() { cur_ = lexer_.next(); }

    Token expect(TokKind k, const char* what) {
        if (cur_.kind != k)
            raise_at(ErrorKind::ParseError, cur_.line, cur_.col,
                     std::string("expected ") + what);
        Token t = cur_;
        shift();
        return t;
    }

    void note_arity(const std::string& pred, std::size_t arity, const Token& at) {
        auto [it, inserted] = arities_.emplace(pred, arity);
        if (!inserted && it->second != arity)
            raise_at(ErrorKind::ArityMismatch, at.line, at.col,
                     "predicate " + pred + " used with arity " + std::to_string(arity) +
                         " after arity " + std::to_string(it->second));
    }

    Atom parse_atom(bool allow_anon) {
        Token name = cur_;
        if (cur_.kind != TokKind::Variable && cur_.kind != TokKind::Ident)
            raise_at(ErrorKind::ParseError, cur_.line, cur_.col, "expected predicate name");
        shift();
        expect(TokKind::LParen, "'('");
        Atom a;
        a.predicate = name.text;
        while (true) {
            switch (cur_.kind) {
                case TokKind::Variable: a.terms.push_back(Term::var(cur_.text)); break;
                case TokKind::Ident:
                case TokKind::String:
                case TokKind::Number: a.terms.push_back(Term::constant(cur_.text)); break;
                case TokKind::Anon:
                    if (!allow_anon)
                        raise_at(ErrorKind::ParseError, cur_.line, cur_.col,
                                 "'_' is only allowed on dependency right-hand sides");
                    a.terms.push_back(Term::var("_"));
                    break;
                default:
                    raise_at(ErrorKind::ParseError, cur_.line, cur_.col, "expected a term");
            }
            shift();
            if (cur_.kind == TokKind::Comma) { shift(); continue; }
            break;
        }
        expect(TokKind::RParen, "')'");
        note_arity(a.predicate, a.terms.size(), name);
        return a;
    }

    std::vector<Atom> parse_atom_list(bool allow_anon) {
        std::vector<Atom> atoms;
        atoms.push_back(parse_atom(allow_anon));
        while (cur_.kind == TokKind::Comma) {
            shift();
            atoms.push_back(parse_atom(allow_anon));
        }
        return atoms;
    }

    void parse_rule(const Token& name, Program& prog, std::map<std::string, std::size_t>& heads) {
        ConjunctiveQuery cq;
        if (cur_.kind == TokKind::LParen) {
            shift();
            while (true) {
                const Token t = expect(TokKind::Variable, "head variable");
                cq.head.push_back(t.text);
                if (cur_.kind == TokKind::Comma) { shift(); continue; }
                break;
            }
            expect(TokKind::RParen, "')'");
        }
        expect(TokKind::Implies, "':-'");
        cq.body = parse_atom_list(/*allow_anon=*/false);
        const Token period = expect(TokKind::Period, "'.'");
        const std::vector<std::string> body_vars = atom_variables(cq.body);
        for (const std::string& h : cq.head)
            if (std::find(body_vars.begin(), body_vars.end(), h) == body_vars.end())
                raise_at(ErrorKind::HeadVariableNotInBody, name.line, name.col,
                         "head variable " + h + " does not occur in the body");
        auto it = heads.find(name.text);
        if (it == heads.end()) {
            UnionQuery q;
            q.name = name.text;
            q.disjuncts.push_back(std::move(cq));
            heads.emplace(name.text, prog.queries.size());
            prog.queries.push_back(std::move(q));
        } else {
            UnionQuery& q = prog.queries[it->second];
            if (cq.head.size() != q.head_arity())
                raise_at(ErrorKind::ArityMismatch, name.line, name.col,
                         "rules for " + name.text + " disagree on head arity");
            q.disjuncts.push_back(std::move(cq));
        }
        (void)period;
    }

    InclusionDependency parse_ind() {
        Atom lhs = parse_atom(/*allow_anon=*/false);
        const Token arrow = expect(TokKind::Arrow, "'->'");
        Atom rhs = parse_atom(/*allow_anon=*/true);
        expect(TokKind::Period, "'.'");
        std::vector<std::string> lhs_vars;
        for (const Term& t : lhs.terms)
            if (t.is_variable()) lhs_vars.push_back(t.text);
        for (const Term& t : rhs.terms)
            if (t.is_variable() && t.text != "_" &&
                std::find(lhs_vars.begin(), lhs_vars.end(), t.text) == lhs_vars.end())
                raise_at(ErrorKind::ParseError, arrow.line, arrow.col,
                         "variable " + t.text + " exported without occurring on the left");
        return make_ind(std::move(lhs), std::move(rhs));
    }

    Lexer lexer_;
    Token cur_{TokKind::End, "", 1, 1};
    std::map<std::string, std::size_t> arities_;
};

} // namespace detail

/// Parse a mixed source file (rules, DCs, INDs).
inline Program parse_program(std::string_view src) {
    detail::Parser p(src);
    return p.parse_top();
}

/// Parse source expected to define exactly one query.
inline UnionQuery parse_query(std::string_view src) {
    Program prog = parse_program(src);
    if (!prog.constraints.empty())
        raise(ErrorKind::ParseError, "expected a query, found constraints");
    if (prog.queries.empty()) raise(ErrorKind::ParseError, "no query rules found");
    if (prog.queries.size() > 1)
        raise(ErrorKind::ParseError, "multiple query names found (" + prog.queries[0].name +
                                         ", " + prog.queries[1].name + ")");
    return std::move(prog.queries.front());
}

/// Parse source expected to contain only constraints.
inline ConstraintSet parse_constraints(std::string_view src) {
    Program prog = parse_program(src);
    if (!prog.queries.empty())
        raise(ErrorKind::ParseError, "expected constraints, found query rules");
    return std::move(prog.constraints);
}

} // namespace qexplain
