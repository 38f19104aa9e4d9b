#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <regex>

#include "apthunt/report.hpp"

namespace apthunt::report {

using nlohmann::json;

ReplayClient::ReplayClient(std::vector<std::string> responses) : queue_(std::move(responses)) {}
ReplayClient::ReplayClient(std::map<std::string, std::string> by_prompt) : by_prompt_(std::move(by_prompt)) {}

std::string ReplayClient::complete(const std::string& prompt) {
    std::lock_guard lock(mu_);
    ++calls_;
    if (auto it = by_prompt_.find(prompt); it != by_prompt_.end()) return it->second;
    if (next_ < queue_.size()) return queue_[next_++];
    throw ClientError("replay client has no recorded response for this prompt");
}

HttpClient::HttpClient(HttpClientOptions opts) : opts_(std::move(opts)) {}

std::string HttpClient::complete(const std::string& prompt) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(opts_.endpoint, m, url)) throw ClientError("bad endpoint '" + opts_.endpoint + "'");
    const std::string base = m.str(1);
    const std::string path = m[2].matched ? m.str(2) : "/";

    httplib::Client cli(base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);

    json body = {{"model", opts_.model},
                 {"prompt", prompt},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) throw ClientError("request to " + opts_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ClientError("endpoint answered HTTP " + std::to_string(res->status));

    try {
        auto j = json::parse(res->body);
        if (j.contains("text")) return j["text"].get<std::string>();
        if (j.contains("response")) return j["response"].get<std::string>();
        if (j.contains("choices")) {
            const auto& c = j["choices"].at(0);
            if (c.contains("message")) return c["message"].at("content").get<std::string>();
            return c.at("text").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ClientError(std::string("unreadable response body: ") + e.what());
    }
    throw ClientError("response body has no text field");
}

}  // namespace apthunt::report
