#include "n2n/http.hpp"

#include "n2n/errors.hpp"

#include <httplib.h>

#include <regex>

namespace n2n {

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw TransportError("invalid URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

std::string http_post_json(const std::string& url, const std::string& body,
                           const HttpHeaders& headers, std::chrono::milliseconds timeout) {
    auto parsed = split_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (parsed.scheme_host_port.starts_with("https://")) {
        throw TransportError("https is not available in this build: " + url);
    }
#endif
    httplib::Client client(parsed.scheme_host_port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    auto res = client.Post(parsed.path, hdrs, body, "application/json");
    if (!res) {
        throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("POST " + url + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

}  // namespace n2n
