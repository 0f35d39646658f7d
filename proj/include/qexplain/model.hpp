#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qexplain/error.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

struct PredicateDef {
    std::string name;
    std::vector<std::string> attrs;

    std::size_t arity() const { return attrs.size(); }
};

/// Relation names with arities and attribute names. The constant domain is
/// implicit: whatever appears in the data.
class Schema {
public:
    Schema() = default;

    explicit Schema(std::vector<PredicateDef> predicates) {
        for (auto& p : predicates) add_predicate(std::move(p));
    }

    void add_predicate(PredicateDef def) {
        if (def.name.empty() || def.arity() == 0)
            raise(ErrorKind::InvalidInput, "predicate needs a name and arity >= 1");
        if (index_.count(def.name))
            raise(ErrorKind::InvalidInput, "duplicate predicate " + def.name);
        for (std::size_t i = 0; i < def.attrs.size(); ++i)
            for (std::size_t j = i + 1; j < def.attrs.size(); ++j)
                if (def.attrs[i] == def.attrs[j])
                    raise(ErrorKind::InvalidInput,
                          "duplicate attribute " + def.attrs[i] + " in " + def.name);
        index_[def.name] = predicates_.size();
        predicates_.push_back(std::move(def));
    }

    const std::vector<PredicateDef>& predicates() const { return predicates_; }

    const PredicateDef* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &predicates_[it->second];
    }

    const PredicateDef& at(const std::string& name) const {
        const PredicateDef* p = find(name);
        if (!p) raise(ErrorKind::UnknownPredicate, name);
        return *p;
    }

private:
    std::vector<PredicateDef> predicates_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// A ground atom with a global tuple identifier.
struct Tuple {
    std::string tid;
    std::string predicate;
    std::vector<std::string> values;

    /// "R(a, b)", used in messages and traces; tids identify tuples everywhere else.
    std::string fact_string() const {
        return predicate + "(" + join(values, ",") + ")";
    }
};

/// One raw input row for validate_database; tid may be left empty.
struct Row {
    std::string predicate;
    std::vector<std::string> values;
    std::string tid; // empty = assign automatically
};

/// Immutable set of identified ground atoms over a schema. Construction goes
/// through validate_database; all operations are read-only afterwards.
class Database {
public:
    Database() = default;

    Database(Schema schema, std::vector<Tuple> tuples)
        : schema_(std::move(schema)), tuples_(std::move(tuples)) {
        rebuild_index();
    }

    const Schema& schema() const { return schema_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }

    bool contains_tid(const std::string& tid) const { return tid_index_.count(tid) != 0; }

    std::size_t index_of(const std::string& tid) const {
        auto it = tid_index_.find(tid);
        if (it == tid_index_.end()) raise(ErrorKind::UnknownTid, tid);
        return it->second;
    }

    const Tuple& tuple(const std::string& tid) const { return tuples_[index_of(tid)]; }

    /// Tuple indices per predicate, in insertion order.
    const std::vector<std::size_t>& tuples_of(const std::string& predicate) const {
        static const std::vector<std::size_t> none;
        auto it = by_predicate_.find(predicate);
        return it == by_predicate_.end() ? none : it->second;
    }

    /// All tids in natural order.
    TidSet tids() const {
        TidSet out;
        out.reserve(tuples_.size());
        for (const Tuple& t : tuples_) out.push_back(t.tid);
        normalize_tids(out);
        return out;
    }

    /// Subinstance D \ removed (same schema, same tids).
    Database without(const TidSet& removed) const {
        std::vector<Tuple> kept;
        kept.reserve(tuples_.size());
        for (const Tuple& t : tuples_)
            if (!tid_set_contains(removed, t.tid)) kept.push_back(t);
        return Database(schema_, std::move(kept));
    }

    /// Subinstance with exactly the given tids.
    Database restricted_to(const TidSet& kept) const {
        std::vector<Tuple> out;
        out.reserve(kept.size());
        for (const Tuple& t : tuples_)
            if (tid_set_contains(kept, t.tid)) out.push_back(t);
        return Database(schema_, std::move(out));
    }

private:
    void rebuild_index() {
        tid_index_.clear();
        by_predicate_.clear();
        for (std::size_t i = 0; i < tuples_.size(); ++i) {
            tid_index_[tuples_[i].tid] = i;
            by_predicate_[tuples_[i].predicate].push_back(i);
        }
    }

    Schema schema_;
    std::vector<Tuple> tuples_;
    std::unordered_map<std::string, std::size_t> tid_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_predicate_;
};

/// Checks rows against the schema and assigns fresh tids "t1","t2",... in
/// input order where none are provided. Duplicate facts collapse to the
/// first occurrence (set semantics).
inline Database validate_database(const Schema& schema, const std::vector<Row>& rows) {
    std::vector<Tuple> tuples;
    std::unordered_map<std::string, std::size_t> seen_tids;
    std::map<std::pair<std::string, std::vector<std::string>>, bool> seen_facts;

    for (const Row& row : rows) {
        const PredicateDef* def = schema.find(row.predicate);
        if (!def) raise(ErrorKind::UnknownPredicate, row.predicate);
        if (row.values.size() != def->arity())
            raise(ErrorKind::ArityMismatch,
                  row.predicate + " expects " + std::to_string(def->arity()) +
                      " values, got " + std::to_string(row.values.size()));
        if (!row.tid.empty() && seen_tids.count(row.tid))
            raise(ErrorKind::DuplicateTid, row.tid);
        if (seen_facts.count({row.predicate, row.values})) {
            if (!row.tid.empty()) seen_tids[row.tid] = tuples.size();
            continue;
        }
        seen_facts[{row.predicate, row.values}] = true;
        Tuple t{row.tid, row.predicate, row.values};
        if (!row.tid.empty()) seen_tids[row.tid] = tuples.size();
        tuples.push_back(std::move(t));
    }

    // Fresh tids fill in afterwards so they can dodge user-provided ones.
    std::size_t next = 1;
    for (Tuple& t : tuples) {
        if (!t.tid.empty()) continue;
        std::string candidate = "t" + std::to_string(next);
        while (seen_tids.count(candidate)) candidate = "t" + std::to_string(++next);
        t.tid = candidate;
        seen_tids[candidate] = 0;
        ++next;
    }

    return Database(schema, std::move(tuples));
}

} // namespace qexplain
