#include "httplib.h"
#include "emoconv/service.hpp"

namespace emoconv {

using nlohmann::json;

struct HttpServer::Impl {
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

// Parses a request body; sends 422 and returns nullopt when it is not JSON.
std::optional<json> body_json(const httplib::Request& req, httplib::Response& res) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        reply(res, {422, {{"error", std::string("invalid JSON body: ") + e.what()}}});
        return std::nullopt;
    }
}

}  // namespace

HttpServer::HttpServer(AnnotationService& service, std::string static_dir) : impl_(std::make_unique<Impl>()) {
    auto& s = impl_->server;
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
    s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    s.Get(R"(/batches/([A-Za-z0-9._-]+)/next)", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.next(req.matches[1], req.get_param_value("judge")));
    });
    s.Post("/judgments", [&service](const httplib::Request& req, httplib::Response& res) {
        if (auto body = body_json(req, res)) reply(res, service.post_judgment(*body));
    });
    s.Get(R"(/progress/([A-Za-z0-9._-]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.progress(req.matches[1]));
    });
    s.Post(R"(/submissions/([A-Za-z0-9._-]+)/finalize)",
           [&service](const httplib::Request& req, httplib::Response& res) {
               if (auto body = body_json(req, res)) reply(res, service.finalize(req.matches[1], *body));
           });
    s.Get("/campaign", [&service](const httplib::Request&, httplib::Response& res) { reply(res, service.campaign()); });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        reply(res, {500, {{"error", what}}});
    });
    if (!static_dir.empty()) s.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace emoconv
