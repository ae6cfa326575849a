#include "flbandit/http_api.hpp"

#include <httplib.h>

#include <random>
#include <vector>

#include "flbandit/errors.hpp"
#include "flbandit/json.hpp"

namespace flbandit {
namespace {

using nlohmann::json;

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }
HttpResponse error(int status, std::string_view message) { return reply(status, {{"error", message}}); }

std::vector<std::string_view> segments(std::string_view path) {
    std::vector<std::string_view> out;
    while (!path.empty()) {
        if (path.front() == '/') {
            path.remove_prefix(1);
            continue;
        }
        const auto end = path.find('/');
        out.push_back(path.substr(0, end));
        if (end == std::string_view::npos) break;
        path.remove_prefix(end);
    }
    return out;
}

ArmId arm_from_json(const json& j) {
    try {
        if (j.is_string()) return ArmId::parse(j.get<std::string>());
        if (j.is_object() && j.contains("method") && j.contains("formula")) {
            return ArmId(parse_method(j.at("method").get<std::string>()), j.at("formula").get<std::string>());
        }
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    } catch (const json::exception& e) {
        throw ValidationError(e.what());
    }
    throw ValidationError("arm must be \"method+formula\" or {\"method\", \"formula\"}");
}

HttpResponse create(SessionService& service, std::string_view body) {
    const json request = json::parse(body);
    if (!request.is_object() || !request.contains("arms") || !request.at("arms").is_array()) {
        throw ValidationError("body needs an 'arms' array");
    }
    std::vector<ArmId> arms;
    for (const auto& a : request.at("arms")) arms.push_back(arm_from_json(a));
    json policy = request;
    if (!policy.contains("seed")) policy["seed"] = std::random_device{}();
    return reply(201, session_view(service.create_session(std::move(arms), policy_from_json(policy))));
}

HttpResponse dispatch(SessionService& service, std::string_view method, std::string_view path,
                      std::string_view body) {
    const auto parts = segments(path);
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "sessions" || parts.size() > 4) {
        return error(404, "no such endpoint");
    }
    const bool get = method == "GET";
    const bool post = method == "POST";

    if (parts.size() == 2) {
        if (post) return create(service, body);
        if (!get) return error(405, "method not allowed");
        json list = json::array();
        for (const auto& s : service.list_sessions()) {
            list.push_back({{"id", s.id},
                            {"created_at", s.created_at},
                            {"status", std::string(to_string(s.status))},
                            {"arm_count", s.arm_count},
                            {"rounds_completed", s.rounds_completed}});
        }
        return reply(200, {{"sessions", std::move(list)}});
    }

    const std::string id(parts[2]);
    if (parts.size() == 3) {
        if (!get) return error(405, "method not allowed");
        return reply(200, session_view(service.get_session(id)));
    }

    const std::string_view action = parts[3];
    if (action == "recommendation") {
        if (!get) return error(405, "method not allowed");
        return reply(200, recommendation_to_json(service.recommend(id)));
    }
    if (action == "rounds") {
        if (!post) return error(405, "method not allowed");
        const RoundReport report = round_report_from_json(json::parse(body));
        return reply(200, session_view(service.report_round(id, report)));
    }
    if (action == "close") {
        if (!post) return error(405, "method not allowed");
        return reply(200, session_view(service.close_session(id)));
    }
    return error(404, "no such endpoint");
}

}  // namespace

HttpResponse route_request(SessionService& service, std::string_view method, std::string_view path,
                           std::string_view body) {
    try {
        return dispatch(service, method, path, body);
    } catch (const json::exception& e) {
        return error(400, std::string("invalid JSON: ") + e.what());
    } catch (const ValidationError& e) {
        return error(400, e.what());
    } catch (const DomainError& e) {
        return error(400, e.what());
    } catch (const IncompleteFeedbackError& e) {
        return error(400, e.what());
    } catch (const NotFoundError& e) {
        return error(404, e.what());
    } catch (const StateError& e) {
        return error(409, e.what());
    } catch (const Error& e) {
        return error(500, e.what());
    }
}

struct ApiServer::Impl {
    explicit Impl(SessionService& s) : service(s) {}

    SessionService& service;
    httplib::Server server;
};

ApiServer::ApiServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const HttpResponse r = route_request(impl_->service, req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    auto& s = impl_->server;
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    s.Get(R"(/api/.*)", handler);
    s.Post(R"(/api/.*)", handler);
    s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace flbandit
