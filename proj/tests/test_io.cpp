#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "qexplain/qexplain.hpp"

using namespace qexplain;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qexplain_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
};

const std::string schema_text = R"({
  "predicates": [
    {"name": "R", "attrs": ["x", "y"]},
    {"name": "S", "arity": 1}
  ]
})";

} // namespace

TEST_CASE("csv relations load with explicit and assigned tids") {
    TempDir dir;
    const std::string schema = dir.file("schema.json", schema_text);
    const std::string r = dir.file("R.csv", "tid,x,y\nt5,a,b\nt7,c,d\n");
    const std::string s = dir.file("S.csv", "a1\na\nb\n");

    const Database db = load_database(schema, {r, s});
    CHECK(db.size() == 4);
    CHECK(db.tuple("t5").values == std::vector<std::string>{"a", "b"});
    // S rows got fresh tids dodging t5/t7
    CHECK(db.tids() == TidSet{"t1", "t2", "t5", "t7"});
    CHECK(db.tuple("t1").predicate == "S");
}

TEST_CASE("csv quoting handles commas, escaped quotes and crlf") {
    TempDir dir;
    const std::string schema = dir.file("schema.json", schema_text);
    const std::string r =
        dir.file("R.csv", "x,y\r\n\"a,comma\",\"say \"\"hi\"\"\"\r\nplain,b\r\n");
    const Database db = load_database(schema, {r});
    CHECK(db.tuple("t1").values == std::vector<std::string>{"a,comma", "say \"hi\""});
    CHECK(db.tuple("t2").values == std::vector<std::string>{"plain", "b"});

    const std::string bad = dir.file("S.csv", "a1\n\"unterminated\n");
    CHECK_THROWS_AS(load_database(schema, {bad}), Error);
}

TEST_CASE("csv headers must match the schema") {
    TempDir dir;
    const std::string schema = dir.file("schema.json", schema_text);
    const std::string wrong_names = dir.file("R.csv", "x,z\na,b\n");
    CHECK_THROWS_AS(load_database(schema, {wrong_names}), Error);
    const std::string wrong_count = dir.file("R2.csv", "x\na\n");
    // file stem names an unknown predicate
    CHECK_THROWS_AS(load_database(schema, {wrong_count}), Error);
}

TEST_CASE("json relations accept plain rows and tid objects") {
    TempDir dir;
    const std::string schema = dir.file("schema.json", schema_text);
    const std::string data = dir.file("data.json", R"({
      "R": [["a", "b"], {"tid": "k9", "values": ["c", 4]}],
      "S": [["a"]]
    })");
    const Database db = load_database(schema, {data});
    CHECK(db.size() == 3);
    CHECK(db.tuple("k9").values == std::vector<std::string>{"c", "4"});
    CHECK(db.tuples_of("S").size() == 1);
}

TEST_CASE("schema files validate their shape") {
    TempDir dir;
    CHECK_THROWS_AS(
        load_schema(dir.file("s1.json",
                             R"({"predicates": [{"name": "R", "arity": 1},
                                                {"name": "R", "arity": 2}]})")),
        Error);
    CHECK_THROWS_AS(
        load_schema(dir.file("s2.json",
                             R"({"predicates": [{"name": "R", "attrs": ["x"], "arity": 2}]})")),
        Error);
    const Schema ok = load_schema(
        dir.file("s3.json", R"({"predicates": [{"name": "R", "arity": 2}]})"));
    CHECK(ok.at("R").attrs == std::vector<std::string>{"a1", "a2"});
    CHECK_THROWS_AS(load_schema(dir.file("s4.json", "not json")), Error);
    CHECK_THROWS_AS(load_schema((dir.path / "missing.json").string()), Error);
}
