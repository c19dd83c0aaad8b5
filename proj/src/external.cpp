#include "updist/external.hpp"

#include "updist/error.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace updist {

namespace {

struct Outcome {
  enum class Status { kOk, kTimeout, kExitFailure } status = Status::kOk;
  std::string output;
  int exit_code = 0;
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

Outcome run_once(const ExternalCommand& cmd, const std::string& input) {
  int in_pipe[2] = {-1, -1};
  int out_pipe[2] = {-1, -1};
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
    close_fd(in_pipe[0]);
    close_fd(in_pipe[1]);
    fail(ErrorKind::kRun, std::string("external command: pipe failed: ") + std::strerror(errno));
  }

  std::vector<char*> argv;
  for (const auto& a : cmd.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    close_fd(in_pipe[0]);
    close_fd(in_pipe[1]);
    close_fd(out_pipe[0]);
    close_fd(out_pipe[1]);
    fail(ErrorKind::kRun, std::string("external command: fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  close_fd(in_pipe[0]);
  close_fd(out_pipe[1]);

  // Short inputs fit in the pipe buffer; a child that exits early only
  // produces EPIPE here.
  std::signal(SIGPIPE, SIG_IGN);
  [[maybe_unused]] const ssize_t written = ::write(in_pipe[1], input.data(), input.size());
  close_fd(in_pipe[1]);

  Outcome outcome;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(cmd.timeout_s);
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      outcome.status = Outcome::Status::kTimeout;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      outcome.status = Outcome::Status::kTimeout;
      break;
    }
    const ssize_t got = ::read(out_pipe[0], buf, sizeof(buf));
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) break;
    outcome.output.append(buf, static_cast<std::size_t>(got));
  }
  close_fd(out_pipe[0]);

  if (outcome.status == Outcome::Status::kTimeout) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (outcome.status == Outcome::Status::kOk && !(WIFEXITED(status) && WEXITSTATUS(status) == 0)) {
    outcome.status = Outcome::Status::kExitFailure;
    outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
  return outcome;
}

}  // namespace

double evaluate_external(const ExternalCommand& cmd, const Point& x) {
  if (cmd.argv.empty()) fail(ErrorKind::kConfig, "external command is empty");
  std::string input;
  for (Eigen::Index j = 0; j < x.size(); ++j) input += (j ? " " : "") + format_double(x(j));
  input += '\n';

  Outcome last;
  for (std::size_t attempt = 0; attempt <= cmd.retries; ++attempt) {
    last = run_once(cmd, input);
    if (last.status == Outcome::Status::kOk) break;
  }
  if (last.status == Outcome::Status::kTimeout) {
    fail(ErrorKind::kRun, "external command timed out after " + format_double(cmd.timeout_s) + " s (" +
                              std::to_string(cmd.retries + 1) + " attempts)");
  }
  if (last.status == Outcome::Status::kExitFailure) {
    fail(ErrorKind::kRun, "external command exited with status " + std::to_string(last.exit_code));
  }

  const auto b = last.output.find_first_not_of(" \t\r\n");
  const auto e = last.output.find_last_not_of(" \t\r\n");
  const std::string text = b == std::string::npos ? std::string() : last.output.substr(b, e - b + 1);
  double y = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), y);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::kRun, "external command produced non-numeric output '" + text.substr(0, 80) + "'");
  }
  return y;
}

}  // namespace updist
