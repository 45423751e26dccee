#ifndef PREFIA_SERVICE_HPP
#define PREFIA_SERVICE_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace prefia {

struct ServiceOptions {
  // Directory served at "/" (the annotation UI build).
  std::optional<std::filesystem::path> static_dir;
  // Append-only per-session journals; existing journals are replayed on
  // startup so sessions survive a restart.
  std::optional<std::filesystem::path> journal_dir;
};

// JSON-over-HTTP service for live annotation sessions and dataset analysis.
//
//   POST /sessions                  {items, mode, strategy, seed}
//   GET  /sessions/{id}/next
//   POST /sessions/{id}/judgments   {left, right, relation}
//   GET  /sessions/{id}/relation
//   GET  /sessions/{id}/stats
//   GET  /sessions/{id}/transcript  [?format=csv]
//   POST /analyze                   [?mode=weak|strict&conflicts=...&format=csv|json]
//   GET  /health
//
// Errors are returned as {"error": <code>, "detail": <message>}. Requests on
// one session are serialized; distinct sessions proceed in parallel.
class Server {
 public:
  explicit Server(ServiceOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds to host:port (port 0 picks a free port). Returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);

  // Serves requests until stop(). Requires a successful bind().
  bool listen();

  void stop();

  // Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prefia

#endif  // PREFIA_SERVICE_HPP
