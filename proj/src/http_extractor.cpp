#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "solar/extraction.hpp"

namespace solar {
namespace {

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

HttpExtractorOptions HttpExtractorOptions::from_environment() {
  const char* url = std::getenv("SOLAR_EXTRACTOR_URL");
  if (!url || !*url) throw Error(ErrorCode::BackendUnavailable, "SOLAR_EXTRACTOR_URL is not set");
  HttpExtractorOptions o;
  o.url = url;
  return o;
}

HttpExtractor::HttpExtractor(HttpExtractorOptions options)
    : options_(std::move(options)), slots_(std::max(1, options_.max_parallel)) {
  static const std::regex url_re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.url, m, url_re)) {
    throw Error(ErrorCode::InvalidArgument, "extractor URL must look like http://host[:port]/path: " + options_.url);
  }
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (options_.attempts < 1) options_.attempts = 1;
}

ExtractionResult HttpExtractor::run(const CaseText& text, const TBox& tbox) {
  const std::string body = Json{{"case", to_json(text)}, {"vocabulary", vocabulary_summary(tbox)}}.dump();
  SlotGuard slot(slots_);

  auto seconds = [](std::chrono::milliseconds ms) { return std::make_pair(ms.count() / 1000, (ms.count() % 1000) * 1000); };
  auto [sec, usec] = seconds(options_.timeout);

  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    httplib::Client client(origin_);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    auto res = client.Post(path_, body, "application/json");
    if (res && res->status == 200) {
      Json j;
      try {
        j = Json::parse(res->body);
        return extraction_result_from_json(j, &tbox);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, "extractor returned invalid JSON: " + std::string(e.what()));
      } catch (const Error& e) {
        throw Error(ErrorCode::BackendUnavailable, "extractor response does not match the ABox schema: " + std::string(e.what()));
      }
    }
    if (res && res->status >= 400 && res->status < 500) {
      throw Error(ErrorCode::BackendUnavailable,
                  "extractor rejected the request with HTTP " + std::to_string(res->status));
    }
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < options_.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::BackendUnavailable, "extractor at " + options_.url + " failed after " +
                                                 std::to_string(options_.attempts) + " attempts: " + last_error);
}

}  // namespace solar
