#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "nhim/commands.hpp"
#include "nhim/config.hpp"
#include "nhim/errors.hpp"

using namespace nhim;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = NHIM_CONFIG_DIR;

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("nhim_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, ShippedFilesLoad) {
    for (const char* f : {"henon_eps_009_010.ini", "henon_eps0.ini", "mobius.ini", "linear_test.ini"}) {
        EXPECT_NO_THROW(load_config(kConfigs + "/" + f)) << f;
    }
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    EXPECT_EQ(c.model, "rotating_henon");
    EXPECT_EQ(c.params.at("a"), 0.68);
    EXPECT_EQ(c.effective_R(), 0.01);
    EXPECT_EQ(c.sub.n_lambda, 64);
    EXPECT_EQ(c.k_requested, 6);
}

TEST(Config, RoundTrip) {
    for (const char* f : {"henon_eps_009_010.ini", "henon_eps0.ini", "mobius.ini", "linear_test.ini"}) {
        RunConfig a = load_config(kConfigs + "/" + f);
        std::ostringstream out;
        write_config(out, a);
        RunConfig b = parse(out.str());
        EXPECT_TRUE(a == b) << f;
        std::ostringstream again;
        write_config(again, b);
        EXPECT_EQ(out.str(), again.str());
    }
}

TEST(Config, RejectsUnknownKeysAndSections) {
    EXPECT_THROW(parse("[model]\nname = linear_test\n[domain]\nRR = 1\n"), ConfigError);
    EXPECT_THROW(parse("[extra]\nfoo = 1\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nname = linear_test\nwobble = 2\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nname = nope\n"), ConfigError);
    EXPECT_THROW(parse("[rates]\nk_cap = many\n"), ConfigError);
}

TEST(Config, Validation) {
    // L must lie in (2R / R_Lambda, 1).
    EXPECT_THROW(parse("[domain]\nL = 1.0\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nname = rotating_henon\neps_lo = 0\neps_hi = 0.1\n[domain]\nL = 0.3\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nname = rotating_henon\neps_lo = 0.02\neps_hi = 0.01\n"), ConfigError);
    EXPECT_THROW(parse("[subdivision]\nn_lambda = 0\n"), ConfigError);
    EXPECT_THROW(parse("[manifold]\nn_fiber = 1\n"), ConfigError);
    EXPECT_NO_THROW(parse("[model]\nname = rotating_henon\neps_lo = 0\neps_hi = 0.01\n"));
}

TEST(Config, DefaultRadiusFollowsEpsilon) {
    EXPECT_EQ(parse("[model]\nname = rotating_henon\neps_lo = 0.002\neps_hi = 0.003\n").effective_R(), 0.003);
    EXPECT_EQ(parse("[model]\nname = rotating_henon\neps_lo = 0\neps_hi = 0\n").effective_R(), 1e-4);
    EXPECT_EQ(parse("[model]\nname = linear_test\n[domain]\nR = 0.02\n").effective_R(), 0.02);
}

TEST(Partition, Parsing) {
    std::istringstream ok("# comment\n0,0.0001\n\n0.0001, 0.0002\n");
    auto p = parse_partition(ok);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[1].second, 0.0002);
    std::istringstream overlap("0,0.2\n0.1,0.3\n");
    EXPECT_THROW(parse_partition(overlap), ConfigError);
    std::istringstream reversed("0.2,0.1\n");
    EXPECT_THROW(parse_partition(reversed), ConfigError);
    std::istringstream junk("0.1;0.2\n");
    EXPECT_THROW(parse_partition(junk), ConfigError);
    EXPECT_EQ(load_partition(kConfigs + "/eps_partition.txt").size(), 15u);
}

TEST(Sweep, EmptyPartition) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    fs::path dir = scratch("empty_sweep");
    std::ostringstream log;
    EXPECT_EQ(cmd_sweep(c, {}, (dir / "s.csv").string(), log), 0);
    EXPECT_EQ(slurp(dir / "s.csv"), "eps_lo,eps_hi,order,certified,covering,backward_cone,binding,error\n");
}

TEST(Sweep, PublishedPartitionOrders) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    auto rows = sweep(c, load_partition(kConfigs + "/eps_partition.txt"));
    const int expect[] = {737, 368, 245, 184, 147, 73, 36, 24, 17, 14, 11, 9, 8, 7, 6};
    ASSERT_EQ(rows.size(), 15u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].order, expect[i]) << i;
        EXPECT_EQ(rows[i].covering, "true");
        EXPECT_EQ(rows[i].backward_cone, "true");
        EXPECT_TRUE(rows[i].error.empty());
    }
    std::ostringstream table;
    write_sweep_table(table, rows);
    EXPECT_NE(table.str().find("[0.009, 0.01]"), std::string::npos);
}

TEST(Sweep, ZeroCoupling) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    auto rows = sweep(c, {{0.0, 0.0}});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GE(rows[0].order, 737);
    EXPECT_EQ(rows[0].binding, "k_cap");
}

TEST(Sweep, BadIntervalBecomesRow) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    // R = eps_hi = 0.3 breaks L > 2R / R_Lambda.
    auto rows = sweep(c, {{0.009, 0.01}, {0.2, 0.3}});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].error.empty());
    EXPECT_FALSE(rows[1].error.empty());
    EXPECT_FALSE(rows[1].certified);
}

TEST(Certify, ExitStatuses) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    fs::path dir = scratch("certify");
    std::ostringstream log;
    EXPECT_EQ(cmd_certify(c, 6, (dir / "a.json").string(), log), kCertified);
    EXPECT_EQ(cmd_certify(c, 7, (dir / "b.json").string(), log), kNotCertified);
    EXPECT_NE(log.str().find("binding=mu_cs1^(j+1)<xi_u2 at j=7"), std::string::npos) << log.str();
    RunConfig m = load_config(kConfigs + "/mobius.ini");
    std::ostringstream mlog;
    EXPECT_EQ(cmd_certify(m, std::nullopt, (dir / "m.json").string(), mlog), kNotCertified);
    EXPECT_NE(mlog.str().find("cannot certify"), std::string::npos) << mlog.str();
    EXPECT_NE(mlog.str().find("lift degree 2"), std::string::npos) << mlog.str();
}

TEST(Certify, BodyDeterministic) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    auto strip = [](nlohmann::ordered_json j) {
        j.erase("generated_at");
        return j.dump(2);
    };
    fs::path dir = scratch("determinism");
    std::ostringstream log;
    cmd_certify(c, 6, (dir / "a.json").string(), log);
    cmd_certify(c, 6, (dir / "b.json").string(), log);
    auto a = nlohmann::ordered_json::parse(slurp(dir / "a.json"));
    auto b = nlohmann::ordered_json::parse(slurp(dir / "b.json"));
    EXPECT_TRUE(a.contains("generated_at"));
    EXPECT_EQ(strip(a), strip(b));
}

TEST(Manifold, LinearCsvIsFlat) {
    RunConfig c = load_config(kConfigs + "/linear_test.ini");
    fs::path dir = scratch("linear_manifold");
    run_manifold(c, "wcu", std::nullopt, std::nullopt, dir.string());
    std::ifstream in(dir / "wcu.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# model=linear_test target=wcu", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "lambda,x,y");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
    }
    EXPECT_EQ(rows, c.grid.n_lambda * c.grid.n_fiber);
}

TEST(Manifold, UncoupledWcsConstantInLambda) {
    RunConfig c = load_config(kConfigs + "/henon_eps0.ini");
    fs::path dir = scratch("eps0_wcs");
    run_manifold(c, "wcs", std::nullopt, std::nullopt, dir.string());
    std::ifstream in(dir / "wcs.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::map<double, std::pair<double, double>> range;  // y -> (min x, max x)
    while (std::getline(in, line)) {
        double l, x, y;
        char c1, c2;
        std::istringstream is(line);
        is >> l >> c1 >> x >> c2 >> y;
        auto [it, fresh] = range.try_emplace(y, x, x);
        it->second.first = std::min(it->second.first, x);
        it->second.second = std::max(it->second.second, x);
    }
    ASSERT_EQ(range.size(), static_cast<std::size_t>(c.grid.n_fiber));
    for (const auto& [y, r] : range) EXPECT_LE(r.second - r.first, 1e-9) << y;
}

TEST(Manifold, DiagnosticsDeterministicAndChecked) {
    RunConfig c = load_config(kConfigs + "/henon_eps_009_010.ini");
    c.grid = GridSpec{1024, 33};
    fs::path a = scratch("diag_a"), b = scratch("diag_b");
    auto d = run_manifold(c, "lambda_star", std::nullopt, std::nullopt, a.string());
    run_manifold(c, "lambda_star", std::nullopt, std::nullopt, b.string());
    EXPECT_EQ(slurp(a / "lambda_star.csv"), slurp(b / "lambda_star.csv"));
    EXPECT_EQ(slurp(a / "lambda_star_diagnostics.json"), slurp(b / "lambda_star_diagnostics.json"));
    EXPECT_TRUE(d["wcu"]["ratio_ok"].get<bool>());
    EXPECT_TRUE(d["wcs"]["spacing_ok"].get<bool>());
    EXPECT_TRUE(d["lambda_star"]["invariance_ok"].get<bool>());
}

TEST(Manifold, FiberTargetNeedsBasePoint) {
    RunConfig c = load_config(kConfigs + "/linear_test.ini");
    EXPECT_THROW(run_manifold(c, "fiber_u", std::nullopt, std::nullopt, scratch("nofiber").string()), ConfigError);
    EXPECT_THROW(run_manifold(c, "surface", std::nullopt, std::nullopt, scratch("badtarget").string()), ConfigError);
    std::ostringstream log;
    EXPECT_EQ(cmd_manifold(c, "fiber_s", std::nullopt, std::nullopt, scratch("nofiber2").string(), log), kFailure);
}
