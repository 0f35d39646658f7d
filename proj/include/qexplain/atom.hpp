#pragma once

#include <string>
#include <vector>

#include "qexplain/util.hpp"

namespace qexplain {

/// A term of an atom: a variable or an opaque constant.
struct Term {
    enum class Kind { Variable, Constant };

    Kind kind = Kind::Constant;
    std::string text;

    static Term var(std::string name) { return Term{Kind::Variable, std::move(name)}; }
    static Term constant(std::string value) { return Term{Kind::Constant, std::move(value)}; }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_constant() const { return kind == Kind::Constant; }

    friend bool operator==(const Term& a, const Term& b) {
        return a.kind == b.kind && a.text == b.text;
    }
};

struct Atom {
    std::string predicate;
    std::vector<Term> terms;

    std::size_t arity() const { return terms.size(); }

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.predicate == b.predicate && a.terms == b.terms;
    }

    std::string to_string() const {
        std::vector<std::string> parts;
        parts.reserve(terms.size());
        for (const Term& t : terms) parts.push_back(t.text);
        return predicate + "(" + join(parts, ", ") + ")";
    }
};

/// Variables appearing in a list of atoms, in first-occurrence order.
inline std::vector<std::string> atom_variables(const std::vector<Atom>& atoms) {
    std::vector<std::string> vars;
    for (const Atom& a : atoms)
        for (const Term& t : a.terms)
            if (t.is_variable() &&
                std::find(vars.begin(), vars.end(), t.text) == vars.end())
                vars.push_back(t.text);
    return vars;
}

} // namespace qexplain
