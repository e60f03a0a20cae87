#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "rmab/cli.hpp"

using namespace rmab;
using namespace rmab::cli;

namespace {

const std::string data = RMAB_TEST_DATA;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rmab_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(CmdBound, OrExample) {
    BoundArgs a;
    a.p01 = 0.2;
    a.p11 = 0.8;
    a.n = 4;
    a.k = 2;
    a.beta = 1.0;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_bound(a, out, err), kOk);
    EXPECT_NE(out.str().find("0.3125"), std::string::npos);
    EXPECT_NE(out.str().find("condition-not-met"), std::string::npos);
}

TEST(CmdBound, AllButOneIsUnbounded) {
    BoundArgs a;
    a.p01 = 0.2;
    a.p11 = 0.8;
    a.n = 4;
    a.k = 3;
    a.beta = 1.0;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_bound(a, out, err), kOk);
    EXPECT_NE(out.str().find("unbounded"), std::string::npos);
    EXPECT_NE(out.str().find("guaranteed optimal"), std::string::npos);
}

TEST(CmdBound, SumGuaranteedAtBetaOne) {
    BoundArgs a;
    a.p01 = 0.2;
    a.p11 = 0.8;
    a.n = 5;
    a.k = 2;
    a.reward = "sum";
    a.beta = 1.0;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_bound(a, out, err), kOk);
    EXPECT_NE(out.str().find("theorem (greedy guaranteed optimal)"), std::string::npos);
}

TEST(CmdBound, InvalidParametersExitTwo) {
    BoundArgs a;
    a.p01 = 0.8;
    a.p11 = 0.2;
    a.n = 4;
    a.k = 2;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_bound(a, out, err), kInputError);
    EXPECT_FALSE(err.str().empty());
    a.p01 = 0.2;
    a.p11 = 0.8;
    a.reward = data + "/sum_k3.json";
    EXPECT_EQ(cmd_bound(a, out, err), kInputError);  // spec k=3, --k 2
}

TEST(CmdCompare, GoldenOutOfBoxGapExitsZero) {
    CompareArgs a;
    a.p01 = 0.1;
    a.p11 = 0.6;
    a.n = 4;
    a.k = 2;
    a.horizon = 3;
    a.initial = "0.74,0.85,0.47,0.998";
    a.out_dir = scratch_dir("compare").string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_compare(a, out, err), kOk);
    EXPECT_NE(out.str().find("2.55908599496"), std::string::npos);
    EXPECT_NE(out.str().find("2.56136289816"), std::string::npos);
    const std::string csv = slurp(std::filesystem::path(a.out_dir) / "compare.csv");
    EXPECT_EQ(csv.rfind(kCellCsvHeader, 0), 0u);
}

TEST(CmdCompare, SingleChannelAndZeroDiscountHaveNoGap) {
    CompareArgs a;
    a.p01 = 0.2;
    a.p11 = 0.9;
    a.n = 4;
    a.k = 1;
    a.horizon = 4;
    a.initial = "0.3,0.8,0.5,0.6";
    std::ostringstream out, err;
    EXPECT_EQ(cmd_compare(a, out, err), kOk);
    EXPECT_NE(out.str().find("gap             0\n"), std::string::npos) << out.str();
    a.k = 2;
    a.beta = 0.0;
    std::ostringstream out2;
    EXPECT_EQ(cmd_compare(a, out2, err), kOk);
    EXPECT_NE(out2.str().find("gap             0\n"), std::string::npos) << out2.str();
}

TEST(CmdCompare, ErrorsAndCostGuard) {
    CompareArgs a;
    a.p01 = 0.2;
    a.p11 = 0.8;
    a.n = 4;
    a.k = 2;
    a.initial = "0.5,0.5";
    std::ostringstream out, err;
    EXPECT_EQ(cmd_compare(a, out, err), kInputError);
    a.initial = "0.5,abc,0.5,0.5";
    EXPECT_EQ(cmd_compare(a, out, err), kInputError);
    a.n = 30;
    a.k = 10;
    a.horizon = 10;
    a.initial = "stationary";
    EXPECT_EQ(cmd_compare(a, out, err), kCostGuard);
}

TEST(CmdSweep, SmallGridWritesDeterministicOutputs) {
    SweepArgs a;
    a.grid_path = data + "/small_grid.json";
    a.out_dir = scratch_dir("sweep1").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(a, out, err), kOk) << err.str();
    const auto dir = std::filesystem::path(a.out_dir);
    const std::string cells = slurp(dir / "cells.csv");
    const std::string summary = slurp(dir / "summary.json");
    EXPECT_EQ(cells.rfind(kCellCsvHeader, 0), 0u);
    EXPECT_EQ(slurp(dir / "gaps.csv"), std::string(kGapCsvHeader) + "\n");
    EXPECT_TRUE(json::parse(summary)["clean"].get<bool>());

    a.out_dir = scratch_dir("sweep2").string();
    a.threads = 2;
    ASSERT_EQ(cmd_sweep(a, out, err), kOk);
    EXPECT_EQ(slurp(std::filesystem::path(a.out_dir) / "cells.csv"), cells);
    EXPECT_EQ(slurp(std::filesystem::path(a.out_dir) / "summary.json"), summary);
}

TEST(CmdSweep, EmptyGridExitsZeroWithEmptyOutputs) {
    SweepArgs a;
    a.grid_path = data + "/empty_grid.json";
    a.out_dir = scratch_dir("sweep_empty").string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_sweep(a, out, err), kOk);
    EXPECT_EQ(slurp(std::filesystem::path(a.out_dir) / "cells.csv"), std::string(kCellCsvHeader) + "\n");
}

TEST(CmdSweep, AnticorrelatedCellExitsTwoAndNamesIt) {
    SweepArgs a;
    a.grid_path = data + "/anticorrelated_grid.json";
    std::ostringstream out, err;
    EXPECT_EQ(cmd_sweep(a, out, err), kInputError);
    EXPECT_NE(err.str().find("p01=0.7"), std::string::npos) << err.str();
}

TEST(CmdCheckReward, Verdicts) {
    std::ostringstream out, err;
    CheckRewardArgs a;
    a.spec_path = data + "/or_k2.json";
    EXPECT_EQ(cmd_check_reward(a, out, err), kOk);
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos);

    std::ostringstream out2;
    a.spec_path = data + "/nonmonotone.json";
    EXPECT_EQ(cmd_check_reward(a, out2, err), kCheckFailed);
    EXPECT_NE(out2.str().find("monotonicity  FAIL"), std::string::npos);
    EXPECT_NE(out2.str().find("witness"), std::string::npos);

    a.spec_path = data + "/malformed.json";
    EXPECT_EQ(cmd_check_reward(a, out, err), kInputError);
}

TEST(CmdCheckReward, LevelsLengthMismatchExitsTwo) {
    const auto path = std::filesystem::temp_directory_path() / "rmab_test_badlevels.json";
    std::ofstream(path) << R"({"kind":"levels","k":3,"levels":[0,1,2]})";
    CheckRewardArgs a;
    a.spec_path = path.string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_check_reward(a, out, err), kInputError);
}
