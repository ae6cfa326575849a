#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "flbandit/session.hpp"

namespace flbandit {

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

/// Routes one request of the session API:
///
///   POST /api/sessions                        -> 201 session
///   GET  /api/sessions                        -> 200 {"sessions": [...]}
///   GET  /api/sessions/{id}                   -> 200 session
///   GET  /api/sessions/{id}/recommendation    -> 200 recommendation
///   POST /api/sessions/{id}/rounds            -> 200 session
///   POST /api/sessions/{id}/close             -> 200 session
///
/// Errors carry {"error": "..."} with 400 (validation), 404 (unknown session or
/// path), 405 (method), 409 (write to a closed session) or 500 (storage).
[[nodiscard]] HttpResponse route_request(SessionService& service, std::string_view method,
                                         std::string_view path, std::string_view body);

/// Blocking HTTP server around route_request.
class ApiServer {
public:
    explicit ApiServer(SessionService& service);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds host:port; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Returns false if the loop failed.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace flbandit
