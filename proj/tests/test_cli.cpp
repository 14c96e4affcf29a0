#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <cli.hpp>

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
    std::vector<json> records() const {
        std::vector<json> r;
        std::istringstream in(out);
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) r.push_back(json::parse(line));
        return r;
    }
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "hecke");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = hecke::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / ("hecke_cli_" + name);
    std::ofstream(p) << body;
    return p.string();
}

}  // namespace

TEST(CliZeta, BothRoutesAgree) {
    auto r = run({"zeta", "--q", "3", "--s", "2,0", "--route", "both"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rec = r.records();
    ASSERT_EQ(rec.size(), 2u);
    EXPECT_EQ(rec[0]["route"], "euler");
    EXPECT_EQ(rec[1]["route"], "fredholm");
    EXPECT_LT(rec[0]["gap"].get<double>(), 1e-6);
    EXPECT_TRUE(rec[0]["bounds"].contains("truncation"));
    EXPECT_TRUE(rec[1]["orders"].contains("order"));
}

TEST(CliZeta, FredholmDefaultAndGrid) {
    auto r = run({"zeta", "--lambda", "2", "--route", "fredholm"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.records().size(), 1u);
    auto g = run({"zeta", "--q", "4", "--grid", "2:3:2,0:1:2", "--order", "24"});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_EQ(g.records().size(), 4u);
}

TEST(CliZeta, ExitCodes) {
    EXPECT_EQ(run({"zeta", "--q", "3", "--s", "0.5,0"}).code, 3);
    EXPECT_EQ(run({"zeta", "--q", "3", "--lambda", "2"}).code, 2);
    EXPECT_EQ(run({"zeta"}).code, 2);
    EXPECT_EQ(run({"zeta", "--q", "3", "--route", "euler", "--s", "0.8,0"}).code, 2);
    EXPECT_EQ(run({"zeta", "--q", "3", "--s", "nonsense"}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
}

TEST(CliZeta, CsvMirror) {
    auto path = (std::filesystem::temp_directory_path() / "hecke_cli_zeta.csv").string();
    auto r = run({"zeta", "--q", "3", "--s", "2,0", "--route", "both", "--csv", path});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    std::string header, l1, l2;
    std::getline(in, header), std::getline(in, l1), std::getline(in, l2);
    EXPECT_EQ(header, "route,s_re,s_im,value_re,value_im,bound,gap");
    EXPECT_EQ(l1.rfind("euler,2,0,", 0), 0u);
    EXPECT_EQ(l2.rfind("fredholm,2,0,", 0), 0u);
}

TEST(CliZeta, ReplayIsBitIdentical) {
    std::vector<std::string> a = {"zeta", "--q", "5", "--s", "2.5,0.5", "--route", "both"};
    EXPECT_EQ(run(a).out, run(a).out);
}

TEST(CliResonances, FindsZeroAtOne) {
    auto r = run({"resonances", "--q", "3", "--region", "0.9:1.1,-0.1:0.1", "--grid", "1x1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rec = r.records();
    ASSERT_EQ(rec.size(), 1u);
    EXPECT_NEAR(rec[0]["zero"][0].get<double>(), 1.0, 1e-8);
    EXPECT_TRUE(rec[0]["stable"].get<bool>());
}

TEST(CliResonances, EmptyAndPoleRegions) {
    auto e = run({"resonances", "--q", "3", "--region", "1.5:2,0.5:1", "--grid", "1x1"});
    EXPECT_EQ(e.code, 0) << e.err;
    EXPECT_TRUE(e.records().empty());
    auto p = run({"resonances", "--q", "3", "--region", "0.4:0.6,-0.1:0.1", "--grid", "1x1"});
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("deflate"), std::string::npos);
    EXPECT_EQ(run({"resonances", "--q", "3"}).code, 2);
}

TEST(CliCheck, Suites) {
    auto t = run({"check", "--suite", "traces", "--q", "3"});
    EXPECT_EQ(t.code, 0) << t.out << t.err;
    for (auto& r : t.records()) EXPECT_TRUE(r["pass"].get<bool>()) << r.dump();
    auto d = run({"check", "--suite", "discs", "--q", "7"});
    EXPECT_EQ(d.code, 0) << d.out << d.err;
    EXPECT_GE(d.records().size(), 10u);
    EXPECT_EQ(run({"check", "--suite", "nope", "--q", "3"}).code, 2);
    EXPECT_EQ(run({"check", "--suite", "converge", "--q", "3"}).code, 2);
}

TEST(CliCheck, FactorizationWithRepFiles) {
    auto a = temp_file("a.json", R"({"dim":1,"S":[[-1,0]],"T":[[1,0]]})");
    auto b = temp_file("b.json", R"({"dim":1,"S":[[[1,0]]],"T":[[[-1,0]]]})");
    auto r = run({"check", "--suite", "factorization", "--lambda", "3", "--rep", a, "--rep", b});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_FALSE(r.records().empty());
}

TEST(CliRepFile, RejectsBrokenRelation) {
    // chi(T) = i breaks (chi(T)chi(S))^3 = I for q = 3.
    auto f = temp_file("bad.json", R"({"dim":1,"S":[[1,0]],"T":[[0,1]]})");
    auto r = run({"zeta", "--q", "3", "--rep", f});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("(chi(T)chi(S))^q = I"), std::string::npos) << r.err;
    auto g = temp_file("garbled.json", R"({"dim":2,"S":[[1,0]]})");
    EXPECT_EQ(run({"zeta", "--q", "3", "--rep", g}).code, 2);
}

TEST(CliRepFile, RoundTrip) {
    auto G = hecke::hecke_group_q(5);
    std::mt19937_64 rng(3);
    auto chi = hecke::random_one_dim_rep(G, rng);
    auto back = hecke::cli::parse_rep(G, hecke::cli::rep_to_json(chi));
    EXPECT_LE((back.S - chi.S).norm(), 1e-15);
    EXPECT_LE((back.T - chi.T).norm(), 1e-15);
}
