#include <updist/updist.h>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("updist_capi_" + name)).string();
}

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const double lower[2] = {-5.0, 0.0};
    const double upper[2] = {10.0, 15.0};
    points_.resize(12 * 2);
    values_.resize(12);
    ASSERT_EQ(upd_lhs(12, 2, 7, lower, upper, points_.data()), UPD_OK);
    for (std::size_t i = 0; i < 12; ++i) {
      ASSERT_EQ(upd_benchmark_eval("branin", points_.data() + 2 * i, 2, &values_[i]), UPD_OK);
    }
    ASSERT_EQ(upd_dataset_create(points_.data(), values_.data(), 12, 2, lower, upper, &data_), UPD_OK);
  }
  void TearDown() override { upd_dataset_free(data_); }

  std::vector<double> points_;
  std::vector<double> values_;
  upd_dataset* data_ = nullptr;
};

TEST_F(CApiTest, FitPredictAndDescribe) {
  size_t n = 0;
  size_t p = 0;
  ASSERT_EQ(upd_dataset_size(data_, &n, &p), UPD_OK);
  EXPECT_EQ(n, 12u);
  EXPECT_EQ(p, 2u);
  upd_model* model = nullptr;
  ASSERT_EQ(upd_model_fit(data_, "{\"family\":\"kriging\",\"covariance\":\"matern52\"}", &model), UPD_OK)
      << upd_last_error();
  double mean = 0.0;
  double var = -1.0;
  ASSERT_EQ(upd_model_predict(model, points_.data(), &mean, &var), UPD_OK);
  EXPECT_EQ(mean, values_[0]);
  EXPECT_EQ(var, 0.0);
  char* json = nullptr;
  ASSERT_EQ(upd_model_describe(model, &json), UPD_OK);
  EXPECT_NE(std::string(json).find("lengthscales"), std::string::npos);
  upd_string_free(json);
  upd_model_free(model);
}

TEST_F(CApiTest, UpDistributionAndCriteria) {
  upd_model* model = nullptr;
  ASSERT_EQ(upd_model_fit(data_, "kriging", &model), UPD_OK);
  upd_up* up = nullptr;
  ASSERT_EQ(upd_up_create(model, "{\"rho\":\"dbar\"}", &up), UPD_OK) << upd_last_error();
  const double x[2] = {2.0, 7.0};
  double mean = 0.0;
  double var = 0.0;
  std::vector<double> w(12);
  std::vector<double> preds(12);
  ASSERT_EQ(upd_up_eval(up, x, &mean, &var, w.data(), preds.data()), UPD_OK);
  double total = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < 12; ++i) {
    total += w[i];
    m += w[i] * preds[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(m, mean, 1e-12 * (1.0 + std::abs(mean)));
  EXPECT_GE(var, 0.0);
  double kappa = -1.0;
  ASSERT_EQ(upd_criterion_eval(up, "{\"criterion\":\"up_ei\"}", points_.data(), &kappa), UPD_OK);
  EXPECT_EQ(kappa, 0.0);
  double rho = 0.0;
  ASSERT_EQ(upd_up_rho(up, &rho), UPD_OK);
  EXPECT_GT(rho, 0.0);
  EXPECT_EQ(upd_criterion_eval(up, "{\"criterion\":\"nope\"}", x, &kappa), UPD_ERR_CONFIG);
  EXPECT_NE(std::string(upd_last_error()).find("nope"), std::string::npos);
  upd_up_free(up);
  upd_model_free(model);
}

TEST_F(CApiTest, ErrorCodesAndMessages) {
  upd_model* model = nullptr;
  EXPECT_EQ(upd_model_fit(data_, "{\"family\":\"spline\"}", &model), UPD_ERR_CONFIG);
  EXPECT_STRNE(upd_last_error(), "");
  EXPECT_EQ(upd_model_fit(nullptr, nullptr, &model), UPD_ERR_INVALID_ARGUMENT);
  const double lower[1] = {0.0};
  const double upper[1] = {1.0};
  const double pts[2] = {0.5, 0.5};
  const double vals[2] = {1.0, 2.0};
  upd_dataset* dup = nullptr;
  EXPECT_EQ(upd_dataset_create(pts, vals, 2, 1, lower, upper, &dup), UPD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(dup, nullptr);
  double v = 0.0;
  EXPECT_EQ(upd_benchmark_eval("branin", pts, 1, &v), UPD_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(upd_benchmark_eval("branin", points_.data(), 2, &v), UPD_OK);
  EXPECT_STREQ(upd_last_error(), "");
  EXPECT_EQ(upd_validate_file("/nonexistent/trace.csv"), UPD_ERR_IO);
  EXPECT_EQ(upd_run_campaign("refine", "/nonexistent.json", "/tmp", 1, 0, nullptr, nullptr), UPD_ERR_CONFIG);
  EXPECT_EQ(upd_run_campaign("bogus", "/nonexistent.json", "/tmp", 1, 0, nullptr, nullptr), UPD_ERR_CONFIG);
}

TEST_F(CApiTest, CsvRoundTripThroughFiles) {
  const std::string path = temp_path("design.csv");
  ASSERT_EQ(upd_write_design_csv(path.c_str(), points_.data(), values_.data(), 12, 2), UPD_OK);
  upd_dataset* loaded = nullptr;
  ASSERT_EQ(upd_dataset_load_csv(path.c_str(), "-5:10,0:15", &loaded), UPD_OK) << upd_last_error();
  upd_model* a = nullptr;
  upd_model* b = nullptr;
  ASSERT_EQ(upd_model_fit(data_, nullptr, &a), UPD_OK);
  ASSERT_EQ(upd_model_fit(loaded, nullptr, &b), UPD_OK);
  const double x[2] = {1.0, 1.0};
  double ma = 0.0;
  double mb = 0.0;
  upd_model_predict(a, x, &ma, nullptr);
  upd_model_predict(b, x, &mb, nullptr);
  EXPECT_EQ(ma, mb);
  EXPECT_EQ(upd_validate_file(path.c_str()), UPD_OK);
  upd_model_free(a);
  upd_model_free(b);
  upd_dataset_free(loaded);
  std::filesystem::remove(path);
}

TEST(CApiBenchmarkTest, InfoAndVersion) {
  size_t p = 0;
  double lo[6];
  double hi[6];
  ASSERT_EQ(upd_benchmark_info("hartmann6", &p, lo, hi), UPD_OK);
  EXPECT_EQ(p, 6u);
  EXPECT_EQ(lo[0], 0.0);
  EXPECT_EQ(hi[5], 1.0);
  EXPECT_EQ(upd_benchmark_info("nope", &p, nullptr, nullptr), UPD_ERR_CONFIG);
  EXPECT_STREQ(upd_version(), "0.1.0");
}

TEST(CApiCampaignTest, RunsAndReportsCounts) {
  const std::string dir = temp_path("campaign");
  std::filesystem::remove_all(dir);
  const std::string cfg = temp_path("campaign.json");
  std::ofstream(cfg) << R"({"schema_version":1,"objective":"camel","n0":6,"iterations":2,"seed_count":2,"pool_per_dim":50})";
  size_t runs = 0;
  size_t failures = 7;
  ASSERT_EQ(upd_run_campaign("optimize", cfg.c_str(), dir.c_str(), 1, 0, &runs, &failures), UPD_OK)
      << upd_last_error();
  EXPECT_EQ(runs, 4u);
  EXPECT_EQ(failures, 0u);
  EXPECT_EQ(upd_validate_file((dir + "/summary.csv").c_str()), UPD_OK);
  std::filesystem::remove_all(dir);
  std::filesystem::remove(cfg);
}

}  // namespace
