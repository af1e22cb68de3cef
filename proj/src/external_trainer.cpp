#include "distopt/external_trainer.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "distopt/error.hpp"
#include "distopt/protocol.hpp"
#include "distopt/text_io.hpp"

namespace distopt {
namespace {

std::string tail_of(const std::filesystem::path& path, std::size_t max_bytes) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    return {};
  }
  if (text.size() > max_bytes) text = text.substr(text.size() - max_bytes);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

[[noreturn]] void exec_child(const std::vector<std::string>& argv, const std::filesystem::path& bundle) {
  setpgid(0, 0);
  const std::string out_log = (bundle / "stdout.log").string();
  const std::string err_log = (bundle / "stderr.log").string();
  const int out_fd = ::open(out_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  const int err_fd = ::open(err_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (out_fd >= 0) ::dup2(out_fd, STDOUT_FILENO);
  if (err_fd >= 0) ::dup2(err_fd, STDERR_FILENO);

  std::vector<std::string> args = argv;
  args.push_back(bundle.string());
  std::vector<char*> raw;
  for (auto& a : args) raw.push_back(a.data());
  raw.push_back(nullptr);
  ::execvp(raw[0], raw.data());

  const std::string msg = "exec " + args[0] + " failed: " + std::strerror(errno) + "\n";
  [[maybe_unused]] auto ignored = ::write(STDERR_FILENO, msg.data(), msg.size());
  ::_exit(127);
}

}  // namespace

TrainerResponse invoke_external(const TrainerRequest& request, const SampledManifest& sample,
                                const ExternalCommand& command, const std::filesystem::path& bundle_dir) {
  if (command.argv.empty()) throw Error(ErrorCode::kConfigInvalid, "external trainer command is empty");
  validate_request(request);
  write_request_bundle(bundle_dir, request, sample);
  const auto response_path = bundle_dir / kResponseFile;
  std::filesystem::remove(response_path);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::kNonZeroExit, std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) exec_child(command.argv, bundle_dir);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(command.timeout_seconds));
  int status = 0;
  auto poll = std::chrono::milliseconds(1);
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      throw Error(ErrorCode::kNonZeroExit, std::string("waitpid failed: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw Error(ErrorCode::kTimeout, "trainer exceeded " + format_double(command.timeout_seconds) + " s");
    }
    std::this_thread::sleep_for(poll);
    poll = std::min(poll * 2, std::chrono::milliseconds(50));
  }

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status) ? "exit code " + std::to_string(WEXITSTATUS(status))
                                              : "signal " + std::to_string(WTERMSIG(status));
    throw Error(ErrorCode::kNonZeroExit, "trainer failed with " + how + ": " + tail_of(bundle_dir / "stderr.log", 2048));
  }

  std::string text;
  try {
    text = read_text_file(response_path);
  } catch (const Error&) {
    throw Error(ErrorCode::kMalformedResponse, "trainer exited 0 but wrote no " + std::string(kResponseFile));
  }
  TrainerResponse response = response_from_json(text);
  validate_response(request, response);
  return response;
}

ExternalTrainer::ExternalTrainer(ExternalCommand command, std::filesystem::path work_dir)
    : command_(std::move(command)), work_dir_(std::move(work_dir)) {}

TrainerResponse ExternalTrainer::train(const TrainerRequest& request, const SampledManifest& sample) {
  std::string name = std::to_string(request.iteration);
  name.insert(0, name.size() < 6 ? 6 - name.size() : 0, '0');
  return invoke_external(request, sample, command_, work_dir_ / ("iter_" + name));
}

}  // namespace distopt
