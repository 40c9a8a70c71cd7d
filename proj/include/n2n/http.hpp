#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace n2n {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// POSTs a JSON body to an http:// or https:// URL and returns the response
// body. Throws TransportError on connection failure, timeout, or a non-2xx
// status.
std::string http_post_json(const std::string& url, const std::string& body,
                           const HttpHeaders& headers, std::chrono::milliseconds timeout);

}  // namespace n2n
