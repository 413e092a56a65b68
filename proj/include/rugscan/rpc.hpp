#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace rugscan {

using json = nlohmann::json;

/// Connection-level failure: nothing usable came back.
struct transport_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// The node answered with a JSON-RPC error object.
struct rpc_error : std::runtime_error
{
    rpc_error(int code, const std::string& message)
        : std::runtime_error("rpc error " + std::to_string(code) + ": " + message), code(code),
          message(message)
    {
    }
    int code;
    std::string message;
};

class RpcTransport
{
public:
    virtual ~RpcTransport() = default;
    /// Sends one JSON-RPC request object and returns the response object.
    /// Must be safe to call from several threads.
    virtual json post(const json& request) = 0;
};

class JsonRpcClient
{
public:
    explicit JsonRpcClient(std::shared_ptr<RpcTransport> transport) : transport_(std::move(transport))
    {
        if (!transport_) throw std::invalid_argument("JsonRpcClient: null transport");
    }

    json call(const std::string& method, json params)
    {
        json request = {{"jsonrpc", "2.0"},
                        {"id", next_id_.fetch_add(1)},
                        {"method", method},
                        {"params", std::move(params)}};
        json response = transport_->post(request);
        if (!response.is_object()) throw transport_error("malformed JSON-RPC response for " + method);
        if (auto err = response.find("error"); err != response.end() && !err->is_null()) {
            const int code = err->value("code", 0);
            std::string message = err->value("message", std::string{});
            if (auto data = err->find("data"); data != err->end() && data->is_string())
                message += " (" + data->get<std::string>() + ")";
            throw rpc_error(code, message);
        }
        auto result = response.find("result");
        if (result == response.end()) throw transport_error("JSON-RPC response without result for " + method);
        return *result;
    }

private:
    std::shared_ptr<RpcTransport> transport_;
    std::atomic<std::uint64_t> next_id_{1};
};

/// "0x1a" -> 26. Throws on anything that is not a hex quantity.
inline std::uint64_t parse_quantity(const json& v)
{
    if (!v.is_string()) throw std::invalid_argument("expected hex quantity, got " + v.dump());
    const auto& s = v.get_ref<const std::string&>();
    if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        throw std::invalid_argument("expected hex quantity, got " + s);
    std::size_t pos = 0;
    const auto out = std::stoull(s.substr(2), &pos, 16);
    if (pos != s.size() - 2) throw std::invalid_argument("expected hex quantity, got " + s);
    return out;
}

inline std::string quantity(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace rugscan
