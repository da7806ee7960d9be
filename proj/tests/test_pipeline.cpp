#include "bbq/errors.hpp"
#include "bbq/pipeline.hpp"
#include "bbq/serialize.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace bbq;
namespace fs = std::filesystem;

namespace {

std::string fixture_path() { return std::string(BBQ_TEST_DATA_DIR) + "/single_rlc.s1p"; }

fs::path fresh_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    const auto dir = fs::temp_directory_path() / ("bbq_test_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig base_config(const fs::path& out) {
    RunConfig c;
    c.input_path = fixture_path();
    c.e_j_ghz = 20.0;
    c.output_dir = out.string();
    return c;
}

std::size_t file_count(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

} // namespace

TEST(Pipeline, SingleRlcFixtureProducesAllFiles) {
    const auto out = fresh_dir("full");
    const auto names = run_pipeline(base_config(out));
    EXPECT_EQ(names.size(), 5u);
    for (const char* f : {"model.json", "modes.json", "dispersive.json", "fit_report.json", "impedance_compare.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;

    const auto modes = modes_from_json(nlohmann::json::parse(slurp(out / "modes.json")));
    ASSERT_EQ(modes.size(), 1u);
    EXPECT_LT(oracle::rel_err(modes[0].omega, oracle::two_pi() * 5e9), 1e-6);
    EXPECT_LT(oracle::rel_err(modes[0].q_factor, 50.0), 1e-6);
    EXPECT_LT(oracle::rel_err(modes[0].r, 100.0), 1e-6);

    const auto disp = nlohmann::json::parse(slurp(out / "dispersive.json"));
    EXPECT_EQ(disp["perturbative"]["freqs_ghz"].size(), 1u);
    EXPECT_EQ(disp["exact"]["alpha_mhz"].size(), 1u);
    EXPECT_TRUE(disp.contains("relative_deviation"));

    const auto csv = slurp(out / "impedance_compare.csv");
    EXPECT_EQ(csv.rfind("freq_hz,abs_z_data_ohm,abs_z_fit_ohm\n", 0), 0u);
    fs::remove_all(out);
}

TEST(Pipeline, RepeatedRunsAreByteIdentical) {
    const auto a = fresh_dir("det_a");
    const auto b = fresh_dir("det_b");
    run_pipeline(base_config(a));
    run_pipeline(base_config(b));
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, ConflictingJunctionSpecIsRejected) {
    const auto out = fresh_dir("conflict");
    auto c = base_config(out);
    c.i_c_ua = 0.03;
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(e.exit_code(), 0);
    }
    EXPECT_EQ(file_count(out), 0u);
    c.i_c_ua.reset();
    c.e_j_ghz.reset();
    EXPECT_THROW(run_pipeline(c), ConfigError);
    fs::remove_all(out);
}

TEST(Pipeline, FailuresNameTheStageAndLeaveNoFiles) {
    const auto out = fresh_dir("stages");
    auto c = base_config(out);

    c.input_path = (out / "missing.s1p").string();
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("parse"), std::string::npos) << e.what();
    }

    c = base_config(out);
    c.n_pole_pairs = 150;  // more unknowns than the 401 samples support
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Fit);
        EXPECT_NE(std::string(e.what()).find("fit"), std::string::npos) << e.what();
    }

    c = base_config(out);
    c.truncations = {40};
    c.dim_cap = 30;
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Quantization);
        EXPECT_NE(std::string(e.what()).find("quantiz"), std::string::npos) << e.what();
    }
    EXPECT_EQ(file_count(out), 0u);
    fs::remove_all(out);
}

TEST(Pipeline, NonConvergenceIsAFitError) {
    const auto out = fresh_dir("noconv");
    auto c = base_config(out);
    c.fit.max_iters = 1;
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Fit);
        EXPECT_NE(std::string(e.what()).find("convergence"), std::string::npos) << e.what();
    }
    EXPECT_EQ(file_count(out), 0u);
    c.require_convergence = false;
    const auto stage = run_fit_stage(c);
    EXPECT_FALSE(stage.fit.report.converged);
    fs::remove_all(out);
}

TEST(Pipeline, WriteOutputsIsAllOrNothing) {
    const auto out = fresh_dir("atomic");
    // A directory squatting on the second file's name makes its write fail.
    fs::create_directories(out / "b.txt");
    EXPECT_ANY_THROW(write_outputs(out.string(), {{"a.txt", "1"}, {"b.txt", "2"}}));
    EXPECT_FALSE(fs::exists(out / "a.txt"));
    fs::remove_all(out);
}

TEST(RcsjRun, WritesBothBranches) {
    const auto out = fresh_dir("rcsj");
    RcsjRunConfig c;
    c.params = params_for_beta(1e-6, 1e-12, 25.0, 1.0);
    c.params.delta0 = 1e-3 * c.params.i_c * c.params.r_n * oracle::e / 2.0;
    c.i_max = 1.5e-6;
    c.n_points = 6;
    c.sweep.settle_periods = 10;
    c.sweep.average_periods = 30;
    c.trace = true;
    c.output_dir = out.string();
    const auto names = run_rcsj(c);
    EXPECT_EQ(names.size(), 2u);
    const auto iv = slurp(out / "iv.csv");
    EXPECT_EQ(iv.rfind("branch,i_amp,v_volt\n", 0), 0u);
    EXPECT_NE(iv.find("\nup,"), std::string::npos);
    EXPECT_NE(iv.find("\ndown,"), std::string::npos);
    EXPECT_EQ(slurp(out / "trace.csv").rfind("t_s,phi_rad,v_volt\n", 0), 0u);
    fs::remove_all(out);
}

TEST(Serialize, ModelAndModesRoundTrip) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<RLCMode> modes{make_rlc_mode(u(rng) * 200, oracle::two_pi() * u(rng) * 1e10, u(rng) * 1e3)};
        auto model = model_from_modes(modes);
        model.const_term = u(rng);
        model.slope_term = u(rng) * 1e-12;
        const auto back = model_from_json(nlohmann::json::parse(dump_json(model_to_json(model))));
        EXPECT_EQ(back.poles, model.poles);
        EXPECT_EQ(back.residues, model.residues);
        EXPECT_EQ(back.const_term, model.const_term);
        EXPECT_EQ(back.slope_term, model.slope_term);
        const auto mback = modes_from_json(nlohmann::json::parse(dump_json(modes_to_json(modes))));
        EXPECT_EQ(mback[0].omega, modes[0].omega);
        EXPECT_EQ(mback[0].c, modes[0].c);
    }
}

TEST(Serialize, FloatFormatting) {
    EXPECT_EQ(format_double(1.0), "1.0");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(-0.25), "-0.25");
    EXPECT_EQ(format_double(1e20), "1e+20");
    EXPECT_THROW(format_double(std::nan("")), std::exception);
    for (double v : {1.0 / 3.0, 6.02214076e23, -1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
}
