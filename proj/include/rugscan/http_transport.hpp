#pragma once

// JSON-RPC over HTTP(S). Kept apart from rpc.hpp so that only code talking
// to a real node pays for cpp-httplib.

#include <chrono>
#include <string>

#include <httplib.h>

#include "rpc.hpp"

namespace rugscan {

class HttpTransport final : public RpcTransport
{
public:
    explicit HttpTransport(std::string url, std::chrono::seconds timeout = std::chrono::seconds(30))
        : timeout_(timeout)
    {
        // split "scheme://host[:port]/path"
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw std::invalid_argument("RPC URL needs a scheme: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        origin_ = url.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    }

    json post(const json& request) override
    {
        // httplib::Client is not safe to share across threads; one per call.
        httplib::Client client(origin_);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        auto res = client.Post(path_, request.dump(), "application/json");
        if (!res) throw transport_error("HTTP request to " + origin_ + " failed: " + httplib::to_string(res.error()));
        if (res->status != 200 && res->status != 400 && res->status != 500)
            throw transport_error("HTTP status " + std::to_string(res->status) + " from " + origin_);
        try {
            return json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw transport_error(std::string("unparseable JSON-RPC body: ") + e.what());
        }
    }

private:
    std::string origin_;
    std::string path_;
    std::chrono::seconds timeout_;
};

} // namespace rugscan
