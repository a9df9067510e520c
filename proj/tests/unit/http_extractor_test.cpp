#include <gtest/gtest.h>

#include <atomic>
#include <httplib.h>
#include <thread>

#include "solar/extraction.hpp"

using namespace solar;

namespace {

TBox reference() { return load_tbox(SOLAR_DATA_DIR "/reference_tbox.json"); }

ExtractionResult canned() {
  ExtractionResult r;
  r.abox.tbox_id = "sara-reference";
  r.abox.individuals = {{"Alice", "Taxpayer"}};
  r.abox.assertions = {{"e1", "hasGrossIncomeAmount", {IndividualRef{"Alice"}, Literal::decimal(Decimal::from_integer(42))},
                        Source::Extracted, 0.7, "paid"}};
  return r;
}

class Service : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/ok", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      res.set_content(to_json(canned()).dump(), "application/json");
    });
    server_.Post("/flaky", [this](const httplib::Request&, httplib::Response& res) {
      if (++hits_ < 3) {
        res.status = 503;
        return;
      }
      res.set_content(to_json(canned()).dump(), "application/json");
    });
    server_.Post("/down", [this](const httplib::Request&, httplib::Response& res) {
      ++hits_;
      res.status = 500;
    });
    server_.Post("/reject", [this](const httplib::Request&, httplib::Response& res) {
      ++hits_;
      res.status = 422;
    });
    server_.Post("/garbage", [this](const httplib::Request&, httplib::Response& res) {
      ++hits_;
      res.set_content("{not json", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  HttpExtractor client(std::string path) {
    HttpExtractorOptions o;
    o.url = "http://127.0.0.1:" + std::to_string(port_) + path;
    o.timeout = std::chrono::milliseconds(2000);
    o.initial_backoff = std::chrono::milliseconds(5);
    return HttpExtractor(o);
  }

  ErrorCode failure(const std::string& path) {
    auto c = client(path);
    try {
      c.run({"c", "Alice was paid $42.", "", 2019}, reference());
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::string last_body_;
};

}  // namespace

TEST_F(Service, ReturnsValidatedResult) {
  auto c = client("/ok");
  auto r = extract({"c", "Alice was paid $42.", "How much tax does Alice have to pay in 2019?", 2019}, reference(), c);
  ASSERT_EQ(r.abox.assertions.size(), 1u);
  EXPECT_DOUBLE_EQ(r.abox.assertions[0].confidence, 0.7);
  EXPECT_EQ(hits_, 1);
  Json body = Json::parse(last_body_);
  EXPECT_EQ(body["case"]["id"], "c");
  EXPECT_TRUE(body["vocabulary"].contains("properties"));
}

TEST_F(Service, RetriesServerErrors) {
  auto c = client("/flaky");
  auto r = c.run({"c", "x", "", 2019}, reference());
  EXPECT_EQ(r.abox.assertions.size(), 1u);
  EXPECT_EQ(hits_, 3);
}

TEST_F(Service, GivesUpAfterLastAttempt) {
  EXPECT_EQ(failure("/down"), ErrorCode::BackendUnavailable);
  EXPECT_EQ(hits_, 3);
}

TEST_F(Service, DoesNotRetryClientErrors) {
  EXPECT_EQ(failure("/reject"), ErrorCode::BackendUnavailable);
  EXPECT_EQ(hits_, 1);
}

TEST_F(Service, RejectsMalformedReplies) {
  EXPECT_EQ(failure("/garbage"), ErrorCode::BackendUnavailable);
}

TEST(HttpExtractor, UnreachableHostIsUnavailable) {
  HttpExtractorOptions o;
  o.url = "http://127.0.0.1:1/extract";
  o.attempts = 2;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(200);
  HttpExtractor c(o);
  try {
    c.run({"c", "x", "", 2019}, reference());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackendUnavailable);
  }
}

TEST(HttpExtractor, RejectsBadUrl) {
  HttpExtractorOptions o;
  o.url = "ftp://example";
  EXPECT_THROW(HttpExtractor{o}, Error);
}
