#pragma once

// Capture ingest: validates a POSTed RawCapture and files it in the inbox
// under its content hash. No analysis happens here.

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace gaitlab::ingest {

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// 201 with {"id", "file"} when stored, 200 when the same bytes are already
/// there, 422 with {"error", "path"} when the body fails the schema.
Response accept_capture(std::string_view body, const std::filesystem::path& inbox);

/// Routes: POST /capture, static files from `static_dir` at /.
std::unique_ptr<httplib::Server> make_server(const std::filesystem::path& static_dir,
                                             const std::filesystem::path& inbox);

}  // namespace gaitlab::ingest
