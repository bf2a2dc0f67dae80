#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "scriptorium/segmentation.hpp"

namespace scriptorium::cli {

/// HTTP API over a directory of page images, plus optional static UI assets.
/// Requests own their data; the only shared state is the current parameter
/// document (many readers, one writer).
class ApiServer {
 public:
  ApiServer(std::filesystem::path image_dir, std::filesystem::path ui_dir = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Port 0 picks a free port. Returns false if the socket cannot be bound.
  bool bind(const std::string& host, int port);
  int port() const;
  /// Serves until stop(); requires a successful bind().
  bool run();
  void stop();
  void wait_until_ready() const;

  SegParams params() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scriptorium::cli
