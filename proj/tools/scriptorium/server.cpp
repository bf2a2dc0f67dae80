#include "scriptorium/server.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include <httplib.h>

#include "scriptorium/common.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/image_io.hpp"
#include "scriptorium/render.hpp"

namespace scriptorium::cli {

namespace {

bool is_image_name(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm";
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(dump(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::map<std::string, std::string>& fields = {}) {
  nlohmann::json body = {{"error", message}};
  if (!fields.empty()) body["fields"] = fields;
  send_json(res, status, body);
}

}  // namespace

struct ApiServer::Impl {
  std::filesystem::path image_dir;
  std::filesystem::path ui_dir;
  httplib::Server http;
  int port = -1;

  mutable std::shared_mutex params_mutex;
  SegParams current;

  std::vector<std::string> list_images() const {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(image_dir, ec)) {
      if (entry.is_regular_file() && is_image_name(entry.path())) {
        names.push_back(entry.path().filename().string());
      }
    }
    std::sort(names.begin(), names.end());
    return names;
  }

  // Only names from the listing are accepted, which rules out path tricks.
  std::optional<std::filesystem::path> find_image(const std::string& id) const {
    const auto names = list_images();
    if (!std::binary_search(names.begin(), names.end(), id)) return std::nullopt;
    return image_dir / id;
  }

  SegParams snapshot() const {
    std::shared_lock lock(params_mutex);
    return current;
  }

  void routes() {
    http.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    http.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"images", list_images()}});
    });

    http.Get(R"(/api/image/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto path = find_image(req.matches[1]);
      if (!path) return send_error(res, 404, "unknown image");
      const auto png = encode_png(load_image(*path));
      res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
    });

    http.Post("/api/segment", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::exception& e) {
        return send_error(res, 400, std::string("malformed JSON: ") + e.what());
      }
      if (!body.is_object() || !body.contains("image_id") || !body["image_id"].is_string()) {
        return send_error(res, 400, "image_id is required", {{"image_id", "must be a string"}});
      }
      SegParams params = snapshot();
      if (body.contains("params")) {
        std::map<std::string, std::string> errors;
        params = parse_params(body["params"], errors);
        if (!errors.empty()) return send_error(res, 400, "invalid parameters", errors);
      }
      const auto path = find_image(body["image_id"].get<std::string>());
      if (!path) return send_error(res, 404, "unknown image");
      send_json(res, 200, to_json(segment_page(load_page(*path), params)));
    });

    http.Get(R"(/api/overlay/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json doc;
      to_json(doc, snapshot());
      std::map<std::string, std::string> errors;
      for (const auto& [key, value] : req.params) {
        if (key == "reading_order") {
          doc[key] = value;
          continue;
        }
        try {
          std::size_t used = 0;
          const long long v = std::stoll(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
          doc[key] = v;
        } catch (const std::logic_error&) {
          errors[key] = "must be an integer";
        }
      }
      SegParams params;
      if (errors.empty()) params = parse_params(doc, errors);
      if (!errors.empty()) return send_error(res, 400, "invalid parameters", errors);
      const auto path = find_image(req.matches[1]);
      if (!path) return send_error(res, 404, "unknown image");
      const BinaryImage page = load_page(*path);
      const auto png = encode_png(render_overlay(page, segment_page(page, params)));
      res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
    });

    http.Get("/api/params", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json doc;
      to_json(doc, snapshot());
      send_json(res, 200, doc);
    });

    http.Put("/api/params", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::exception& e) {
        return send_error(res, 400, std::string("malformed JSON: ") + e.what());
      }
      std::map<std::string, std::string> errors;
      const SegParams params = parse_params(body, errors);
      if (!errors.empty()) return send_error(res, 400, "invalid parameters", errors);
      {
        std::unique_lock lock(params_mutex);
        current = params;
      }
      nlohmann::json doc;
      to_json(doc, params);
      send_json(res, 200, doc);
    });

    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        const bool input = e.kind() == ErrorKind::Io || e.kind() == ErrorKind::UnsupportedFormat;
        send_error(res, input ? 422 : 500, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    });

    if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir)) {
      http.set_mount_point("/", ui_dir.string());
    }
  }
};

ApiServer::ApiServer(std::filesystem::path image_dir, std::filesystem::path ui_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->image_dir = std::move(image_dir);
  impl_->ui_dir = std::move(ui_dir);
  // httplib's default adds SO_REUSEPORT, which would let a second server
  // share a busy port instead of failing.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->routes();
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else {
    impl_->port = impl_->http.bind_to_port(host, port) ? port : -1;
  }
  return impl_->port > 0;
}

int ApiServer::port() const { return impl_->port; }

bool ApiServer::run() { return impl_->http.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

void ApiServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

SegParams ApiServer::params() const { return impl_->snapshot(); }

}  // namespace scriptorium::cli
