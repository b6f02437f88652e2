#include "server.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <chrono>

#include "httplib.h"
#include "json.hpp"

namespace medchain::tools {

namespace {

using nlohmann::ordered_json;

constexpr const char* kWebSocketGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr unsigned char kOpText = 0x1;
constexpr unsigned char kOpClose = 0x8;
constexpr unsigned char kOpPing = 0x9;

int http_status(medchain_status st) {
  switch (st) {
    case MEDCHAIN_OK: return 200;
    case MEDCHAIN_E_PARSE:
    case MEDCHAIN_E_INVALID_ARGUMENT: return 400;
    case MEDCHAIN_E_UNKNOWN_REQUEST:
    case MEDCHAIN_E_UNKNOWN_ENTITY:
    case MEDCHAIN_E_IO: return 404;
    case MEDCHAIN_E_ILLEGAL_ACTION:
    case MEDCHAIN_E_TERMINAL_STATE:
    case MEDCHAIN_E_NO_SESSION:
    case MEDCHAIN_E_STALE_FIX: return 409;
    case MEDCHAIN_E_VALIDATION:
    case MEDCHAIN_E_INFEASIBLE:
    case MEDCHAIN_E_NO_FEASIBLE_CHAIN:
    case MEDCHAIN_E_UNDEFINED_BEARING: return 422;
    case MEDCHAIN_E_INTERNAL: return 500;
  }
  return 500;
}

void reply_error(httplib::Response& res, medchain_status st, const std::string& message) {
  res.status = http_status(st);
  res.set_content(ordered_json{{"error", medchain_status_name(st)}, {"message", message}}.dump(), "application/json");
}

// Runs a C API call that yields one JSON string and maps it onto the response.
template <class Call>
void respond(httplib::Response& res, Call&& call) {
  char* out = nullptr;
  const medchain_status st = call(&out);
  if (st != MEDCHAIN_OK) {
    reply_error(res, st, medchain_last_error());
  } else {
    res.status = 200;
    res.set_content(out ? out : "{}", "application/json");
  }
  medchain_string_free(out);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool header_has_token(const httplib::Request& req, const char* name, const std::string& token) {
  const std::string v = lower(req.get_header_value(name));
  return v.find(token) != std::string::npos;
}

double query_number(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    std::size_t used = 0;
    const std::string v = req.get_param_value(key);
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(key);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("query parameter '") + key + "' must be a number");
  }
}

}  // namespace

std::string websocket_accept(const std::string& client_key) {
  const std::string material = client_key + kWebSocketGuid;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(material.data()), material.size(), digest);
  unsigned char encoded[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
  const int n = EVP_EncodeBlock(encoded, digest, SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<const char*>(encoded), static_cast<std::size_t>(n));
}

std::string websocket_frame(unsigned char opcode, const std::string& payload) {
  std::string f;
  f.push_back(static_cast<char>(0x80 | opcode));
  const std::uint64_t n = payload.size();
  if (n < 126) {
    f.push_back(static_cast<char>(n));
  } else if (n <= 0xFFFF) {
    f.push_back(static_cast<char>(126));
    f.push_back(static_cast<char>((n >> 8) & 0xFF));
    f.push_back(static_cast<char>(n & 0xFF));
  } else {
    f.push_back(static_cast<char>(127));
    for (int shift = 56; shift >= 0; shift -= 8) f.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  return f + payload;
}

OpsServer::OpsServer() : http_(std::make_unique<httplib::Server>()) {
  // Upgrade responses carry no body headers.
  http_->set_header_writer([](httplib::Stream& strm, httplib::Headers& headers) {
    auto up = headers.find("Upgrade");
    if (up != headers.end() && lower(up->second) == "websocket") {
      headers.erase("Content-Type");
      headers.erase("Keep-Alive");
      headers.erase("Connection");
      headers.emplace("Connection", "Upgrade");
    }
    return httplib::detail::write_headers(strm, headers);
  });
  routes();
}

OpsServer::~OpsServer() {
  stop();
  std::unique_lock lock(session_mu_);
  medchain_session_free(session_);
  session_ = nullptr;
}

void OpsServer::on_broadcast(uint64_t, const char* payload, void* user) {
  static_cast<OpsServer*>(user)->push(payload);
}

void OpsServer::push(const std::string& payload) {
  std::lock_guard lock(streams_mu_);
  for (auto& s : streams_) {
    std::lock_guard sl(s->mu);
    s->queue.push_back(payload);
    s->cv.notify_one();
  }
}

medchain_status OpsServer::open_session(const std::string& scenario, std::string* error) {
  medchain_scenario* sc = nullptr;
  medchain_status st = medchain_scenario_load(scenario.c_str(), &sc);
  medchain_session* fresh = nullptr;
  if (st == MEDCHAIN_OK) st = medchain_session_create(sc, &fresh);
  medchain_scenario_free(sc);
  int token = 0;  // the session dies with its subscriber list
  if (st == MEDCHAIN_OK) st = medchain_session_subscribe(fresh, &OpsServer::on_broadcast, this, &token);
  if (st != MEDCHAIN_OK) {
    if (error) *error = medchain_last_error();
    medchain_session_free(fresh);
    return st;
  }
  char* state = nullptr;
  medchain_session_state(fresh, &state);
  const auto doc = nlohmann::json::parse(state);
  medchain_string_free(state);
  {
    std::unique_lock lock(session_mu_);
    medchain_session_free(session_);
    session_ = fresh;
  }
  // Revisions restart with each session; a "session" document marks the reset.
  push(ordered_json{{"revision", doc.at("revision")},
                    {"clock_ms", doc.at("clock_ms")},
                    {"type", "session"},
                    {"detail", {{"scenario", scenario}}},
                    {"events", ordered_json::array()}}
           .dump());
  return MEDCHAIN_OK;
}

void OpsServer::routes() {
  using httplib::Request;
  using httplib::Response;
  using SessionCall = medchain_status (*)(medchain_session*, const char*, char**);

  auto post = [this](const char* path, SessionCall fn) {
    http_->Post(path, [this, fn](const Request& req, Response& res) {
      std::shared_lock lock(session_mu_);
      respond(res, [&](char** out) { return fn(session_, req.body.c_str(), out); });
    });
  };
  post("/requests", medchain_session_submit_request);
  post("/recommend", medchain_session_recommend);
  post("/whatif", medchain_session_whatif);
  post("/commit", medchain_session_commit);
  post("/positions", medchain_session_ingest_position);
  post("/tick", medchain_session_tick);

  http_->Get("/state", [this](const Request&, Response& res) {
    std::shared_lock lock(session_mu_);
    respond(res, [&](char** out) { return medchain_session_state(session_, out); });
  });

  http_->Get("/zones", [this](const Request& req, Response& res) {
    try {
      const double t0 = query_number(req, "t0_s", 0.0);
      const double t1 = query_number(req, "t1_s", t0 + 24.0 * 3600.0);
      const double dt = query_number(req, "dt_s", 300.0);
      const std::string a = req.get_param_value("a");
      const std::string b = req.get_param_value("b");
      std::shared_lock lock(session_mu_);
      respond(res, [&](char** out) {
        return medchain_session_zones(session_, a.c_str(), b.c_str(), t0, t1, dt, out);
      });
    } catch (const std::invalid_argument& e) {
      reply_error(res, MEDCHAIN_E_VALIDATION, e.what());
    }
  });

  http_->Post("/session", [this](const Request& req, Response& res) {
    std::string scenario;
    try {
      const auto body = nlohmann::json::parse(req.body.empty() ? "{}" : req.body);
      if (!body.is_object() || !body.contains("scenario") || !body.at("scenario").is_string()) {
        reply_error(res, MEDCHAIN_E_VALIDATION, "scenario: expected a scenario id or path");
        return;
      }
      scenario = body.at("scenario").get<std::string>();
    } catch (const nlohmann::json::parse_error& e) {
      reply_error(res, MEDCHAIN_E_PARSE, e.what());
      return;
    }
    std::string error;
    const medchain_status st = open_session(scenario, &error);
    if (st != MEDCHAIN_OK) {
      reply_error(res, st, error);
      return;
    }
    std::shared_lock lock(session_mu_);
    respond(res, [&](char** out) { return medchain_session_state(session_, out); });
  });

  http_->Get("/events", [this](const Request& req, Response& res) {
    const std::string key = req.get_header_value("Sec-WebSocket-Key");
    if (key.empty() || !header_has_token(req, "Upgrade", "websocket") ||
        !header_has_token(req, "Connection", "upgrade")) {
      reply_error(res, MEDCHAIN_E_VALIDATION, "/events requires a WebSocket upgrade");
      return;
    }
    auto stream = std::make_shared<Stream>();
    {
      std::lock_guard lock(streams_mu_);
      streams_.push_back(stream);
    }
    res.status = 101;
    res.set_header("Upgrade", "websocket");
    res.set_header("Sec-WebSocket-Accept", websocket_accept(key));
    auto idle_since = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());
    res.set_content_provider(
        "application/octet-stream",
        [this, stream, idle_since](size_t, httplib::DataSink& sink) {
          std::unique_lock lock(stream->mu);
          stream->cv.wait_for(lock, std::chrono::milliseconds(200),
                              [&] { return !stream->queue.empty() || stream->closed || stopping_.load(); });
          if (stream->closed || stopping_.load()) {
            const std::string bye = websocket_frame(kOpClose, std::string("\x03\xe9", 2));
            sink.write(bye.data(), bye.size());
            // Failing the provider makes httplib drop the connection instead of
            // reading WebSocket frames as the next HTTP request.
            return false;
          }
          if (stream->queue.empty()) {
            // Periodic pings surface dead peers as write failures.
            if (std::chrono::steady_clock::now() - *idle_since > std::chrono::seconds(5)) {
              *idle_since = std::chrono::steady_clock::now();
              const std::string ping = websocket_frame(kOpPing, "");
              return sink.write(ping.data(), ping.size());
            }
            return true;
          }
          std::deque<std::string> batch;
          batch.swap(stream->queue);
          lock.unlock();
          *idle_since = std::chrono::steady_clock::now();
          for (const auto& payload : batch) {
            const std::string frame = websocket_frame(kOpText, payload);
            if (!sink.write(frame.data(), frame.size())) return false;
          }
          return true;
        },
        [this, stream](bool) {
          std::lock_guard lock(streams_mu_);
          std::erase(streams_, stream);
        });
  });
}

int OpsServer::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

bool OpsServer::listen() { return http_->listen_after_bind(); }

void OpsServer::stop() {
  stopping_.store(true);
  {
    std::lock_guard lock(streams_mu_);
    for (auto& s : streams_) {
      std::lock_guard sl(s->mu);
      s->closed = true;
      s->cv.notify_all();
    }
  }
  http_->stop();
}

}  // namespace medchain::tools
