#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qexplain/qexplain.hpp"

namespace {

using namespace qexplain;

struct Options {
    std::string schema;
    std::vector<std::string> data;
    std::string query;
    std::string ics;
    std::string tid;
    std::string answer;
    std::string method = "exact";
    std::string format = "json";
    std::string kind = "s";
    std::string game = "boolean";
    std::size_t agg_pos = 0;
    double epsilon = 0.1;
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::uint64_t samples = 1000000;
    std::size_t max_vars = kDefaultMaxVars;
    std::size_t max_repairs = kDefaultMaxRepairs;
    std::size_t max_exact = kDefaultMaxExact;
    unsigned threads = 0;
};

unsigned resolve_threads(const Options& opt) {
    if (opt.threads > 0) return opt.threads;
    if (const char* env = std::getenv("QEXPLAIN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

std::vector<std::string> split_answer(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

UnionQuery load_query(const Options& opt) {
    if (opt.query.empty()) raise(ErrorKind::InvalidInput, "this command needs --query");
    UnionQuery q = parse_query(read_file(opt.query));
    if (!opt.answer.empty()) q = instantiate(q, split_answer(opt.answer));
    return q;
}

ConstraintSet load_ics(const Options& opt) {
    if (opt.ics.empty()) return {};
    return parse_constraints(read_file(opt.ics));
}

std::string value_cell(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    return num.str() + "/" + den.str() + " (" + decimal_string(r) + ")";
}

void print_table(const std::vector<std::string>& headers,
                 const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::cout << row[c];
            if (c + 1 < row.size())
                std::cout << std::string(width[c] - row[c].size() + 2, ' ');
        }
        std::cout << "\n";
    };
    line(headers);
    std::vector<std::string> rule;
    for (std::size_t c = 0; c < headers.size(); ++c) rule.push_back(std::string(width[c], '-'));
    line(rule);
    for (const auto& row : rows) line(row);
}

void emit(const Options& opt, const json& doc,
          const std::vector<std::string>& headers,
          const std::vector<std::vector<std::string>>& rows) {
    if (opt.format == "json")
        std::cout << doc.dump(2) << "\n";
    else
        print_table(headers, rows);
}

std::string gammas_cell(const std::vector<TidSet>& sets) {
    std::string out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (i) out += " ";
        out += "{" + join(sets[i], ",") + "}";
    }
    return out.empty() ? "-" : out;
}

int cmd_eval(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    json doc;
    doc["command"] = "eval";
    std::vector<std::vector<std::string>> rows;
    if (q.is_boolean()) {
        const bool t = holds(q, db);
        doc["boolean"] = t;
        rows.push_back({t ? "true" : "false"});
        emit(opt, doc, {"boolean"}, rows);
    } else {
        const AnswerSet answers = evaluate(q, db);
        doc["answers"] = answers_json(answers);
        for (const Answer& a : answers) rows.push_back({join(a, ", ")});
        emit(opt, doc, {"answer"}, rows);
    }
    return 0;
}

int cmd_lineage(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    const LineageFormula f = build_lineage(q, db);
    json doc;
    doc["command"] = "lineage";
    doc["formula"] = f.to_string();
    doc["minimal_witnesses"] = tid_sets_json(minimal_witnesses(f));
    std::vector<std::vector<std::string>> rows{{f.to_string()}};
    emit(opt, doc, {"lineage"}, rows);
    return 0;
}

int cmd_causes(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    const ConstraintSet cs = load_ics(opt);
    const std::vector<CauseReport> reports =
        find_causes(db, q, cs.empty() ? nullptr : &cs, opt.max_vars);
    json doc;
    doc["command"] = "causes";
    doc["with_ics"] = !cs.empty();
    doc["causes"] = cause_reports_json(reports);
    std::vector<std::vector<std::string>> rows;
    for (const CauseReport& r : reports)
        rows.push_back({r.tid, r.is_actual ? "yes" : "no", r.is_counterfactual ? "yes" : "no",
                        value_cell(r.responsibility), gammas_cell(r.minimal_contingencies)});
    emit(opt, doc, {"tid", "actual", "counterfactual", "responsibility", "contingencies"}, rows);
    return 0;
}

int cmd_resp(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    const ConstraintSet cs = load_ics(opt);
    const Rational r =
        responsibility(db, q, opt.tid, cs.empty() ? nullptr : &cs, opt.max_vars);
    json doc;
    doc["command"] = "resp";
    doc["tid"] = opt.tid;
    doc["responsibility"] = rational_json(r);
    emit(opt, doc, {"tid", "responsibility"}, {{opt.tid, value_cell(r)}});
    return 0;
}

int cmd_repairs(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const ConstraintSet cs = load_ics(opt);
    const RepairSet rs = opt.kind == "c" ? c_repairs(db, cs.dcs, opt.max_repairs)
                                         : s_repairs(db, cs.dcs, opt.max_repairs);
    const json doc = [&] {
        json d = repairs_json(rs);
        json out;
        out["command"] = "repairs";
        for (auto& [k, v] : d.items()) out[k] = v;
        return out;
    }();
    std::vector<std::vector<std::string>> rows;
    for (const TidSet& removed : rs.removed)
        rows.push_back({removed.empty() ? "-" : join(removed, ",")});
    emit(opt, doc, {"removed"}, rows);
    return 0;
}

int cmd_cqa(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    const ConstraintSet cs = load_ics(opt);
    const RepairKind kind = opt.kind == "c" ? RepairKind::C : RepairKind::S;
    json doc;
    doc["command"] = "cqa";
    doc["kind"] = opt.kind == "c" ? "c" : "s";
    std::vector<std::vector<std::string>> rows;
    if (q.is_boolean()) {
        const AnswerSet answers = consistent_answers(db, cs.dcs, q, kind, opt.max_repairs);
        const bool t = !answers.empty();
        doc["boolean"] = t;
        rows.push_back({t ? "true" : "false"});
        emit(opt, doc, {"boolean"}, rows);
    } else {
        const AnswerSet answers = consistent_answers(db, cs.dcs, q, kind, opt.max_repairs);
        doc["answers"] = answers_json(answers);
        for (const Answer& a : answers) rows.push_back({join(a, ", ")});
        emit(opt, doc, {"answer"}, rows);
    }
    return 0;
}

int cmd_ce(const Options& opt) {
    const Database db = load_database(opt.schema, opt.data);
    const UnionQuery q = load_query(opt);
    const unsigned threads = resolve_threads(opt);
    ScoreReport r;
    r.tid = opt.tid;
    r.score = "ce";
    r.value = causal_effect(db, q, opt.tid, nullptr, opt.max_vars, threads);
    json doc;
    doc["command"] = "ce";
    doc["scores"] = score_reports_json({r});
    emit(opt, doc, {"tid", "score", "value"}, {{r.tid, r.score, value_cell(r.value)}});
    return 0;
}

GameFunction load_game(const Options& opt, const UnionQuery& q) {
    GameKind kind = GameKind::Boolean;
    if (opt.game == "sum") kind = GameKind::Sum;
    else if (opt.game == "min") kind = GameKind::Min;
    else if (opt.game == "max") kind = GameKind::Max;
    else if (opt.game == "avg") kind = GameKind::Avg;
    else if (opt.game != "boolean")
        raise(ErrorKind::InvalidParams, "unknown game kind " + opt.game);
    return make_game(q, kind, opt.agg_pos);
}

int cmd_power(const Options& opt, const std::string& which) {
    const Database db = load_database(opt.schema, opt.data);
    UnionQuery q = parse_query(read_file(opt.query));
    if (!opt.answer.empty()) q = instantiate(q, split_answer(opt.answer));
    const GameFunction g = load_game(opt, q);
    const unsigned threads = resolve_threads(opt);

    std::vector<std::string> tids;
    if (!opt.tid.empty())
        tids.push_back(opt.tid);
    else
        tids = db.tids();

    const bool mc = opt.method == "mc";
    if (mc && which != "shapley")
        raise(ErrorKind::InvalidParams, "monte carlo estimation is available for shapley only");

    std::vector<ScoreReport> reports;
    for (const std::string& tid : tids) {
        ScoreReport r;
        r.tid = tid;
        r.score = which;
        if (mc) {
            ApproxParams params{opt.epsilon, opt.delta, opt.seed, opt.samples};
            const McReport m = shapley_mc(db, g, tid, params);
            r.value = m.estimate;
            r.method = "mc";
            r.samples = m.samples;
            r.converged = m.converged;
        } else if (which == "shapley") {
            r.value = shapley(db, g, tid, opt.max_exact, threads);
        } else {
            r.value = banzhaf(db, g, tid, opt.max_exact, threads);
        }
        reports.push_back(std::move(r));
    }

    json doc;
    doc["command"] = which;
    doc["method"] = mc ? "mc" : "exact";
    if (mc) {
        json params;
        params["bound"] = "empirical-bernstein";
        params["block"] = 64;
        params["epsilon"] = opt.epsilon;
        params["delta"] = opt.delta;
        params["seed"] = opt.seed;
        params["max_samples"] = opt.samples;
        doc["params"] = std::move(params);
    }
    doc["scores"] = score_reports_json(reports);
    std::vector<std::vector<std::string>> rows;
    for (const ScoreReport& r : reports) {
        std::vector<std::string> row{r.tid, value_cell(r.value), r.method};
        if (mc) row.push_back(std::to_string(r.samples));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> headers{"tid", which, "method"};
    if (mc) headers.push_back("samples");
    emit(opt, doc, headers, rows);
    return 0;
}

int cmd_classify(const Options& opt) {
    const UnionQuery q = load_query(opt);
    json doc;
    doc["command"] = "classify";
    std::vector<std::vector<std::string>> rows;
    if (q.disjuncts.size() == 1) {
        const QueryClassification c = classify(q.disjuncts.front());
        const json cj = classification_json(c);
        for (const auto& [k, v] : cj.items()) doc[k] = v;
        rows.push_back({q.name, c.hierarchical ? "yes" : "no", c.self_join_free ? "yes" : "no"});
    } else {
        json arr = json::array();
        for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
            const QueryClassification c = classify(q.disjuncts[i]);
            json entry = classification_json(c);
            entry["disjunct"] = i;
            arr.push_back(std::move(entry));
            rows.push_back({q.name + "#" + std::to_string(i), c.hierarchical ? "yes" : "no",
                            c.self_join_free ? "yes" : "no"});
        }
        doc["disjuncts"] = std::move(arr);
    }
    emit(opt, doc, {"query", "hierarchical", "self_join_free"}, rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score-based explanations for query answers over small databases"};
    app.require_subcommand(1);

    Options opt;

    auto add_data_opts = [&](CLI::App* cmd) {
        cmd->add_option("--schema", opt.schema, "schema JSON file")->required();
        cmd->add_option("--data", opt.data, "relation files (CSV per predicate, or one JSON)")
            ->required()
            ->expected(-1);
        cmd->add_option("--format", opt.format, "output format: json|table")
            ->check(CLI::IsMember({"json", "table"}));
        cmd->add_option("--threads", opt.threads,
                        "worker cap (QEXPLAIN_THREADS as fallback); never changes results");
    };
    auto add_query_opt = [&](CLI::App* cmd) {
        cmd->add_option("--query", opt.query, "query file")->required();
        cmd->add_option("--answer", opt.answer,
                        "answer constants (comma-separated) instantiating an open query");
    };

    CLI::App* eval = app.add_subcommand("eval", "evaluate a query");
    add_data_opts(eval);
    add_query_opt(eval);

    CLI::App* lineage = app.add_subcommand("lineage", "lineage of a Boolean query");
    add_data_opts(lineage);
    add_query_opt(lineage);

    CLI::App* causes = app.add_subcommand("causes", "actual causes and responsibilities");
    add_data_opts(causes);
    add_query_opt(causes);
    causes->add_option("--ics", opt.ics, "integrity constraints file");
    causes->add_option("--max-vars", opt.max_vars, "contingency search cap");

    CLI::App* resp = app.add_subcommand("resp", "responsibility of one tuple");
    add_data_opts(resp);
    add_query_opt(resp);
    resp->add_option("--tid", opt.tid, "tuple identifier")->required();
    resp->add_option("--ics", opt.ics, "integrity constraints file");
    resp->add_option("--max-vars", opt.max_vars, "contingency search cap");

    CLI::App* repairs = app.add_subcommand("repairs", "S- or C-repairs under denial constraints");
    add_data_opts(repairs);
    repairs->add_option("--ics", opt.ics, "integrity constraints file (DCs used)")->required();
    repairs->add_option("--kind", opt.kind, "repair kind: s|c")
        ->check(CLI::IsMember({"s", "c"}));
    repairs->add_option("--max-repairs", opt.max_repairs, "repair enumeration cap");

    CLI::App* cqa = app.add_subcommand("cqa", "consistent query answers");
    add_data_opts(cqa);
    add_query_opt(cqa);
    cqa->add_option("--ics", opt.ics, "integrity constraints file (DCs used)")->required();
    cqa->add_option("--kind", opt.kind, "repair kind: s|c")->check(CLI::IsMember({"s", "c"}));
    cqa->add_option("--max-repairs", opt.max_repairs, "repair enumeration cap");

    CLI::App* ce = app.add_subcommand("ce", "causal effect of one tuple");
    add_data_opts(ce);
    add_query_opt(ce);
    ce->add_option("--tid", opt.tid, "tuple identifier")->required();
    ce->add_option("--max-vars", opt.max_vars, "world enumeration cap");

    CLI::App* shap = app.add_subcommand("shapley", "Shapley values (exact or Monte Carlo)");
    add_data_opts(shap);
    add_query_opt(shap);
    shap->add_option("--tid", opt.tid, "tuple identifier (default: all tuples)");
    shap->add_option("--method", opt.method, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    shap->add_option("--epsilon", opt.epsilon, "relative error target (mc)");
    shap->add_option("--delta", opt.delta, "failure probability (mc)");
    shap->add_option("--seed", opt.seed, "RNG seed (mc)");
    shap->add_option("--samples", opt.samples, "sample cap (mc)");
    shap->add_option("--game", opt.game, "game: boolean|sum|min|max|avg")
        ->check(CLI::IsMember({"boolean", "sum", "min", "max", "avg"}));
    shap->add_option("--agg-pos", opt.agg_pos, "aggregated head position (aggregate games)");
    shap->add_option("--max-exact", opt.max_exact, "exact enumeration cap");

    CLI::App* bz = app.add_subcommand("banzhaf", "Banzhaf indices");
    add_data_opts(bz);
    add_query_opt(bz);
    bz->add_option("--tid", opt.tid, "tuple identifier (default: all tuples)");
    bz->add_option("--game", opt.game, "game: boolean|sum|min|max|avg")
        ->check(CLI::IsMember({"boolean", "sum", "min", "max", "avg"}));
    bz->add_option("--agg-pos", opt.agg_pos, "aggregated head position (aggregate games)");
    bz->add_option("--max-exact", opt.max_exact, "exact enumeration cap");

    CLI::App* cls = app.add_subcommand("classify", "hierarchical/self-join-free classification");
    cls->add_option("--query", opt.query, "query file")->required();
    cls->add_option("--answer", opt.answer,
                    "answer constants (comma-separated) instantiating an open query");
    cls->add_option("--format", opt.format, "output format: json|table")
        ->check(CLI::IsMember({"json", "table"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*eval) return cmd_eval(opt);
        if (*lineage) return cmd_lineage(opt);
        if (*causes) return cmd_causes(opt);
        if (*resp) return cmd_resp(opt);
        if (*repairs) return cmd_repairs(opt);
        if (*cqa) return cmd_cqa(opt);
        if (*ce) return cmd_ce(opt);
        if (*shap) return cmd_power(opt, "shapley");
        if (*bz) return cmd_power(opt, "banzhaf");
        if (*cls) return cmd_classify(opt);
    } catch (const qexplain::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
