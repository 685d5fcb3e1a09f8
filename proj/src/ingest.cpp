#include "gaitlab/ingest.hpp"

#include <httplib.h>

#include "gaitlab/error.hpp"
#include "gaitlab/hash.hpp"
#include "gaitlab/io.hpp"

namespace gaitlab::ingest {

namespace fs = std::filesystem;

Response accept_capture(std::string_view body, const fs::path& inbox) {
  try {
    io::raw_capture_from(io::parse(body));
  } catch (const SchemaError& e) {
    return {422, {{"error", e.detail}, {"path", e.path}}};
  } catch (const ValidationError& e) {
    return {422, {{"error", e.what()}, {"path", "$"}}};
  }
  const std::string id = sha256_hex(body);
  const std::string name = id + ".json";
  const fs::path target = inbox / name;
  if (fs::exists(target)) return {200, {{"id", id}, {"file", name}}};
  io::write_atomic(target, body);
  return {201, {{"id", id}, {"file", name}}};
}

std::unique_ptr<httplib::Server> make_server(const fs::path& static_dir, const fs::path& inbox) {
  auto server = std::make_unique<httplib::Server>();
  fs::create_directories(inbox);
  if (!static_dir.empty()) {
    if (!server->set_mount_point("/", static_dir.string())) {
      throw ValidationError("static directory not found: " + static_dir.string());
    }
  }
  server->Post("/capture", [inbox](const httplib::Request& req, httplib::Response& res) {
    Response r;
    try {
      r = accept_capture(req.body, inbox);
    } catch (const std::exception& e) {
      r = {500, {{"error", e.what()}}};
    }
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  });
  return server;
}

}  // namespace gaitlab::ingest
