// Copyright 2026 The msgm-bench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "msgm/error.hpp"
#include "msgm/extforecast.hpp"
#include "msgm/splitting.hpp"

namespace msgm::extforecast {

using Clock = std::chrono::steady_clock;

namespace {

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

}  // namespace

AdapterProcess::AdapterProcess(std::vector<std::string> command)
    : command_(std::move(command)) {
  if (command_.empty()) throw InvalidArgument("adapter: empty command");
  // A dead child must surface as EPIPE, not kill the harness.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw IoError("adapter: pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw IoError("adapter: pipe failed");
  }
  std::vector<char*> argv;
  for (auto& s : command_) argv.push_back(s.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw IoError("adapter: fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    _exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

AdapterProcess::~AdapterProcess() {
  if (pid_ > 0) kill_child();
}

void AdapterProcess::kill_child() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

int AdapterProcess::finish() {
  if (pid_ <= 0) return -1;
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
  return decode_status(status);
}

std::string AdapterProcess::round_trip(const std::string& line,
                                       std::chrono::milliseconds timeout) {
  const auto exited = [&](const std::string& why) {
    int status = 0;
    if (to_child_ >= 0) ::close(to_child_);
    to_child_ = -1;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    const int code = decode_status(status);
    return AdapterExited("adapter '" + join(command_) + "' " + why + " (exit status " +
                             std::to_string(code) + ")",
                         code);
  };
  if (pid_ <= 0) throw AdapterExited("adapter is not running", -1);

  const std::string msg = line + "\n";
  std::size_t sent = 0;
  while (sent < msg.size()) {
    const ssize_t w = ::write(to_child_, msg.data() + sent, msg.size() - sent);
    if (w < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE) throw exited("closed its input");
      throw IoError(std::string("adapter: write failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(w);
  }

  const auto deadline = Clock::now() + timeout;
  char chunk[65536];
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string out = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return out;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      kill_child();
      throw AdapterTimeout("adapter timed out after " + std::to_string(timeout.count()) +
                           " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw IoError("adapter: poll failed");
    }
    if (rc == 0) continue;
    const ssize_t r = ::read(from_child_, chunk, sizeof chunk);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw IoError("adapter: read failed");
    }
    if (r == 0) throw exited("exited before answering");
    buffer_.append(chunk, static_cast<std::size_t>(r));
  }
}

ForecastRequest make_request(const dataio::SeriesFrame& frame, std::size_t start,
                             std::size_t lookback, std::size_t horizon) {
  ForecastRequest r;
  r.id = frame.building_id() + ":" + std::to_string(start);
  r.feature_names = frame.schema().columns();
  r.target_index = frame.target_column();
  r.horizon = horizon;
  r.step_minutes = frame.schema().step_minutes;
  r.context.reserve(lookback);
  for (std::size_t t = start; t < start + lookback; ++t) {
    const auto row = frame.row(t);
    r.context.emplace_back(row.begin(), row.end());
  }
  return r;
}

std::vector<evaluation::BuildingReport> run_adapter(
    const AdapterOptions& options, const std::vector<const dataio::SeriesFrame*>& targets,
    evaluation::EvalMode mode) {
  using splitting::IndexRange;
  constexpr std::size_t L = splitting::kLookback, H = splitting::kHorizon;
  AdapterProcess proc(options.command);
  std::vector<evaluation::BuildingReport> reports;

  for (const auto* frame : targets) {
    std::vector<IndexRange> ranges;
    if (mode == evaluation::EvalMode::kSeasonal) {
      const auto plan = splitting::seasonal_plan(frame->rows(), 0.0);
      for (const auto& seg : plan.segments) ranges.push_back(seg.test);
    } else {
      ranges.push_back({0, frame->rows()});
    }
    std::vector<evaluation::MetricPair> per_range;
    for (const auto& range : ranges) {
      const auto starts = splitting::window_starts(range, 1, L, H);
      CelsiusBlock truth(starts.size(), H), pred(starts.size(), H);
      for (std::size_t i = 0; i < starts.size(); ++i) {
        const ForecastRequest req = make_request(*frame, starts[i], L, H);
        std::string line;
        try {
          line = proc.round_trip(encode(req), options.timeout);
          const ForecastResponse resp = decode_response(line, H);
          if (resp.id != req.id)
            throw ProtocolError("protocol: response id '" + resp.id + "' does not match",
                                line);
          for (std::size_t j = 0; j < H; ++j) {
            pred.at(i, j) = resp.forecast[j];
            truth.at(i, j) = frame->target(starts[i] + L + j);
          }
        } catch (const ProtocolError& e) {
          throw ProtocolError(std::string(e.what()) + " [window " + req.id + "]", e.line());
        } catch (const AdapterTimeout& e) {
          throw AdapterTimeout(std::string(e.what()) + " [window " + req.id + "]");
        } catch (const AdapterExited& e) {
          throw AdapterExited(std::string(e.what()) + " [window " + req.id + "]",
                              e.status());
        }
      }
      per_range.push_back(evaluation::metrics(truth, pred));
    }
    if (mode == evaluation::EvalMode::kSeasonal) {
      std::array<evaluation::MetricPair, 4> s{};
      std::copy(per_range.begin(), per_range.end(), s.begin());
      reports.push_back(evaluation::seasonal_report(frame->building_id(), s));
    } else {
      reports.push_back(evaluation::all_in_one_report(frame->building_id(), per_range[0]));
    }
  }
  const int status = proc.finish();
  if (status != 0)
    throw AdapterExited("adapter '" + join(options.command) + "' exited with status " +
                            std::to_string(status) + " after the last window",
                        status);
  return reports;
}

}  // namespace msgm::extforecast
