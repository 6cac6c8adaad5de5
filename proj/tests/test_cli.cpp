#include <initializer_list>
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "treecast/cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = treecast::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("infer prints the root bias") {
    const Outcome o = call({"infer", "--b", "2", "--t", "1", "--epsilon", "0.5", "--leaves", "+-"});
    CHECK(o.code == 0);
    CHECK(o.out == "0\n");
    const Outcome p = call({"infer", "--b", "2", "--t", "2", "--epsilon", "0.5", "--leaves", "+++-", "--oracle"});
    CHECK(p.code == 0);
    CHECK(p.out == "0.4\n0.4\n");
}

TEST_CASE("usage errors exit 2") {
    const Outcome o = call({"infer", "--bogus"});
    CHECK(o.code == 2);
    CHECK(o.err.find("Usage") != std::string::npos);
    CHECK(call({}).code == 2);
    CHECK(call({"infer", "--b", "2", "--t", "1", "--epsilon", "0.5", "--leaves", "+-+"}).code == 2);
    CHECK(call({"couple", "--b", "2", "--t", "1", "--epsilon", "0.7", "--leaves", "+-"}).code == 2);
}

TEST_CASE("config errors exit 2 and name the key") {
    const auto dir = std::filesystem::temp_directory_path() / "treecast_cli_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.conf") << "id=ks_threshold\ntrials=10\nepsilon=1.5\n";
    const Outcome o = call({"experiment", "--config", (dir / "bad.conf").string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("experiment.epsilon") != std::string::npos);
}

TEST_CASE("simulate is reproducible") {
    const auto a = call({"simulate", "--b", "3", "--t", "3", "--epsilon", "0.4", "--seed", "5"});
    const auto b = call({"simulate", "--b", "3", "--t", "3", "--epsilon", "0.4", "--seed", "5"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("leaves ") != std::string::npos);
}

TEST_CASE("verify passes") {
    const Outcome o = call({"verify", "--workers", "1"});
    CHECK(o.code == 0);
    CHECK(o.out.find("verify: ok") != std::string::npos);
}
