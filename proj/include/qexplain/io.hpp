#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qexplain/error.hpp"
#include "qexplain/model.hpp"

namespace qexplain {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::InvalidInput, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// Schema document: {"predicates":[{"name":"R","attrs":["from","to"]}]};
/// "arity" may replace or accompany "attrs" (attributes default to a1..an).
inline Schema parse_schema_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        raise(ErrorKind::ParseError, std::string("schema: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("predicates") || !doc["predicates"].is_array())
        raise(ErrorKind::InvalidInput, "schema document needs a \"predicates\" array");
    Schema schema;
    for (const json& p : doc["predicates"]) {
        if (!p.is_object() || !p.contains("name") || !p["name"].is_string())
            raise(ErrorKind::InvalidInput, "each predicate needs a \"name\"");
        const std::string name = p["name"].get<std::string>();
        std::vector<std::string> attrs;
        if (p.contains("attrs")) {
            if (!p["attrs"].is_array())
                raise(ErrorKind::InvalidInput, name + ": \"attrs\" must be an array");
            for (const json& a : p["attrs"]) {
                if (!a.is_string())
                    raise(ErrorKind::InvalidInput, name + ": attribute names must be strings");
                attrs.push_back(a.get<std::string>());
            }
        }
        if (p.contains("arity")) {
            if (!p["arity"].is_number_unsigned())
                raise(ErrorKind::InvalidInput, name + ": \"arity\" must be a non-negative number");
            const std::size_t arity = p["arity"].get<std::size_t>();
            if (attrs.empty())
                for (std::size_t i = 1; i <= arity; ++i) attrs.push_back("a" + std::to_string(i));
            else if (attrs.size() != arity)
                raise(ErrorKind::ArityMismatch,
                      name + ": arity " + std::to_string(arity) + " but " +
                          std::to_string(attrs.size()) + " attributes");
        }
        if (attrs.empty())
            raise(ErrorKind::InvalidInput, name + ": needs \"attrs\" or \"arity\"");
        schema.add_predicate(PredicateDef{name, std::move(attrs)});
    }
    return schema;
}

inline Schema load_schema(const std::string& path) { return parse_schema_json(read_file(path)); }

namespace detail {

/// One CSV record; fields may be double-quoted with "" escaping. No
/// multi-line fields.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    // strip a trailing carriage return from CRLF files
    const std::size_t end = !line.empty() && line.back() == '\r' ? line.size() - 1 : line.size();
    while (i < end) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < end && line[i + 1] == '"') { cur.push_back('"'); i += 2; continue; }
                quoted = false;
                ++i;
            } else {
                cur.push_back(c);
                ++i;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            ++i;
        } else {
            cur.push_back(c);
            ++i;
        }
    }
    if (quoted)
        raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string file_stem(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t start = slash == std::string::npos ? 0 : slash + 1;
    const std::size_t dot = path.find_last_of('.');
    const std::size_t stop = dot == std::string::npos || dot < start ? path.size() : dot;
    return path.substr(start, stop - start);
}

} // namespace detail

/// One relation per CSV file; the file stem names the predicate. The header
/// row lists the schema's attribute names, optionally preceded by "tid".
inline void read_csv_relation(const Schema& schema, const std::string& path,
                              std::vector<Row>& rows) {
    const std::string predicate = detail::file_stem(path);
    const PredicateDef& def = schema.at(predicate);
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    bool has_tid = false;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line, lineno);
        for (std::string& f : fields) f = detail::trim(f);
        if (!header_seen) {
            header_seen = true;
            has_tid = !fields.empty() && fields.front() == "tid";
            const std::size_t offset = has_tid ? 1 : 0;
            if (fields.size() - offset != def.arity())
                raise(ErrorKind::ArityMismatch,
                      path + ": header has " + std::to_string(fields.size() - offset) +
                          " attribute(s), " + predicate + " has arity " +
                          std::to_string(def.arity()));
            for (std::size_t i = 0; i < def.arity(); ++i)
                if (fields[i + offset] != def.attrs[i])
                    raise(ErrorKind::InvalidInput,
                          path + ": header column '" + fields[i + offset] +
                              "' does not match attribute '" + def.attrs[i] + "'");
            continue;
        }
        Row row;
        row.predicate = predicate;
        if (has_tid) {
            if (fields.empty() || fields.front().empty())
                raise(ErrorKind::InvalidInput,
                      path + ": line " + std::to_string(lineno) + ": empty tid");
            row.tid = fields.front();
            row.values.assign(fields.begin() + 1, fields.end());
        } else {
            row.values = std::move(fields);
        }
        if (row.values.size() != def.arity())
            raise(ErrorKind::ArityMismatch, path + ": line " + std::to_string(lineno) + ": got " +
                                                std::to_string(row.values.size()) +
                                                " value(s) for " + predicate);
        rows.push_back(std::move(row));
    }
}

/// Single-document form: {"R": [["a","b"], ...], "S": [["a"], ...]}.
/// Rows may also be {"tid": "...", "values": [...]} objects.
inline void read_json_relations(const Schema& schema, const std::string& text,
                                std::vector<Row>& rows) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        raise(ErrorKind::ParseError, std::string("data: ") + e.what());
    }
    if (!doc.is_object()) raise(ErrorKind::InvalidInput, "data document must be an object");
    for (const auto& [predicate, rel] : doc.items()) {
        (void)schema.at(predicate); // existence check; arity checked in validate
        if (!rel.is_array())
            raise(ErrorKind::InvalidInput, predicate + ": relation must be an array of rows");
        for (const json& r : rel) {
            Row row;
            row.predicate = predicate;
            const json* values = &r;
            if (r.is_object()) {
                if (r.contains("tid") && r["tid"].is_string())
                    row.tid = r["tid"].get<std::string>();
                if (!r.contains("values"))
                    raise(ErrorKind::InvalidInput, predicate + ": object rows need \"values\"");
                values = &r["values"];
            }
            if (!values->is_array())
                raise(ErrorKind::InvalidInput, predicate + ": each row must be an array");
            for (const json& v : *values) {
                if (v.is_string())
                    row.values.push_back(v.get<std::string>());
                else if (v.is_number_integer())
                    row.values.push_back(std::to_string(v.get<long long>()));
                else if (v.is_number_unsigned())
                    row.values.push_back(std::to_string(v.get<unsigned long long>()));
                else
                    raise(ErrorKind::InvalidInput,
                          predicate + ": row values must be strings or integers");
            }
            rows.push_back(std::move(row));
        }
    }
}

/// Loads a database from a schema file plus data files (CSVs, or one JSON).
inline Database load_database(const std::string& schema_path,
                              const std::vector<std::string>& data_paths) {
    const Schema schema = load_schema(schema_path);
    std::vector<Row> rows;
    for (const std::string& path : data_paths) {
        if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
            read_json_relations(schema, read_file(path), rows);
        else
            read_csv_relation(schema, path, rows);
    }
    return validate_database(schema, rows);
}

} // namespace qexplain
