#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qexplain/atom.hpp"
#include "qexplain/error.hpp"
#include "qexplain/model.hpp"

namespace qexplain::detail {

/// Variable bindings in a deterministic (ordered) map so downstream output
/// is stable.
using Binding = std::map<std::string, std::string>;

/// Tuple indices usable during matching; empty mask = whole database.
using ActiveMask = std::vector<bool>;

inline bool active(const ActiveMask& mask, std::size_t index) {
    return mask.empty() || mask[index];
}

/// Enumerates homomorphisms of a conjunction of atoms into db, nested-loop
/// with early pruning: atoms are matched left to right against candidate
/// tuples, constants and already-bound variables filter immediately.
/// The callback sees the binding and the matched tuple indices (one per atom,
/// repeats possible under self-joins); returning false stops the search.
class Matcher {
public:
    using Callback = std::function<bool(const Binding&, const std::vector<std::size_t>&)>;

    Matcher(const Database& db, std::vector<Atom> atoms, ActiveMask mask)
        : db_(db), atoms_(std::move(atoms)), mask_(std::move(mask)) {
        for (const Atom& a : atoms_) {
            const PredicateDef& def = db_.schema().at(a.predicate);
            if (def.arity() != a.arity())
                raise(ErrorKind::ArityMismatch,
                      a.predicate + " used with arity " + std::to_string(a.arity()) +
                          ", schema says " + std::to_string(def.arity()));
        }
    }

    /// Runs with an initial binding (head instantiation); true if the search
    /// ran to completion, false if the callback stopped it.
    bool run(const Binding& initial, const Callback& cb) const {
        Binding binding = initial;
        std::vector<std::size_t> used(atoms_.size(), 0);
        return match_from(0, binding, used, cb);
    }

private:
    bool match_from(std::size_t atom_index, Binding& binding,
                    std::vector<std::size_t>& used, const Callback& cb) const {
        if (atom_index == atoms_.size()) return cb(binding, used);

        const Atom& atom = atoms_[atom_index];
        for (std::size_t idx : db_.tuples_of(atom.predicate)) {
            if (!active(mask_, idx)) continue;
            const Tuple& fact = db_.tuples()[idx];
            std::vector<std::string> newly_bound;
            bool ok = true;
            for (std::size_t pos = 0; pos < atom.terms.size(); ++pos) {
                const Term& term = atom.terms[pos];
                const std::string& value = fact.values[pos];
                if (term.is_constant()) {
                    if (term.text != value) { ok = false; break; }
                } else {
                    auto it = binding.find(term.text);
                    if (it == binding.end()) {
                        binding[term.text] = value;
                        newly_bound.push_back(term.text);
                    } else if (it->second != value) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                used[atom_index] = idx;
                if (!match_from(atom_index + 1, binding, used, cb)) {
                    for (const auto& v : newly_bound) binding.erase(v);
                    return false;
                }
            }
            for (const auto& v : newly_bound) binding.erase(v);
        }
        return true;
    }

    const Database& db_;
    std::vector<Atom> atoms_;
    ActiveMask mask_;
};

} // namespace qexplain::detail
