#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "cxr/error.hpp"
#include "cxr/trainer.hpp"

namespace cxr {

namespace {

constexpr std::string_view kRunLogHeader = "step,epoch,train_loss,train_acc,val_loss,val_acc";

template <typename T>
T parse_number(std::string_view s, const std::filesystem::path& path, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::MalformedRow,
                fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, s));
  }
  return value;
}

}  // namespace

void write_run_log_csv(const std::filesystem::path& path, const RunLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
  out << kRunLogHeader << '\n';
  for (const RunPoint& p : log.points) {
    out << fmt::format("{},{},{},{},{},{}\n", p.step, p.epoch, p.train_loss, p.train_acc,
                       p.val_loss, p.val_acc);
  }
  if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing {}", path.string()));
}

RunLog read_run_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());

  RunLog log;
  const std::string stem = path.stem().string();
  log.run_id = stem.rfind("run-", 0) == 0 ? stem.substr(4) : stem;

  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunLogHeader) {
    throw Error(ErrorKind::MalformedRow, fmt::format("{}: expected header '{}'", path.string(), kRunLogHeader));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 6) {
      throw Error(ErrorKind::MalformedRow,
                  fmt::format("{}:{}: expected 6 columns, got {}", path.string(), line_no, f.size()));
    }
    RunPoint p;
    p.step = parse_number<std::int64_t>(f[0], path, line_no);
    p.epoch = parse_number<int>(f[1], path, line_no);
    p.train_loss = parse_number<double>(f[2], path, line_no);
    p.train_acc = parse_number<double>(f[3], path, line_no);
    p.val_loss = parse_number<double>(f[4], path, line_no);
    p.val_acc = parse_number<double>(f[5], path, line_no);
    if (!log.points.empty() && p.step <= log.points.back().step) {
      throw Error(ErrorKind::MalformedRow,
                  fmt::format("{}:{}: steps must strictly increase", path.string(), line_no));
    }
    log.points.push_back(p);
  }
  return log;
}

}  // namespace cxr
