#include "state_dir.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "edgeshare/error.hpp"

namespace edgeshare::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kIssuer = "edge-tsa";

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

StateDir::StateDir(fs::path root) : root_(std::move(root)) {}

StateDir::~StateDir() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void StateDir::lock() {
  fs::create_directories(root_);
  lock_fd_ = ::open((root_ / ".lock").c_str(), O_RDWR | O_CREAT, 0600);
  if (lock_fd_ < 0) throw Error(ErrorCode::io_error, "cannot open lock file in " + root_.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    throw Error(ErrorCode::io_error, "state directory is locked by another process");
  }
}

SecureZone& StateDir::zone() {
  if (zone_) return *zone_;
  if (fs::exists(zone_path())) {
    nlohmann::json state;
    try {
      state = nlohmann::json::parse(read_file(zone_path()));
      const auto& t = state.at("tsa");
      tsa_.emplace(t.at("issuer").get<std::string>(), TimestampAuthority::wall_clock(),
                   t.at("last_sequence").get<std::uint64_t>(), t.at("last_epoch").get<std::uint64_t>());
      used_points_ = state.value("used_points", nlohmann::json::object());
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::invalid_state, std::string("corrupted zone state: ") + ex.what());
    }
    zone_.emplace(SecureZone::restore(state.at("zone"), *tsa_));
  } else {
    tsa_.emplace(kIssuer, TimestampAuthority::wall_clock());
    zone_.emplace(*tsa_);
  }
  return *zone_;
}

IdentityLedger StateDir::load_ledger() {
  zone();
  const LedgerReplica parsed = parse_snapshot(read_file(ledger_path()));
  const ChainReport report = parsed.verify();
  if (!report.valid) {
    throw Error(ErrorCode::invalid_state, "edge ledger fails verification at entry " +
                                              std::to_string(*report.first_bad_index));
  }
  WeierstrassCurve curve(parsed.curve);
  PointSet used(curve.coordinate_width());
  if (used_points_.contains(parsed.group_id)) {
    for (const auto& hex : used_points_.at(parsed.group_id)) {
      Bytes raw = from_hex(hex.get<std::string>());
      used.insert_encoded(std::string(raw.begin(), raw.end()));
    }
  }
  auto entries = parsed.entries;
  for (auto& e : entries) e.timestamp.issuer = tsa_->issuer();
  return IdentityLedger::restore(parsed.group_id, std::move(curve), std::move(entries), std::move(used));
}

void StateDir::save_zone(const IdentityLedger* ledger) {
  SecureZone& z = zone();
  if (ledger) {
    nlohmann::json points = nlohmann::json::array();
    std::vector<std::string> sorted;
    for (const auto& raw : ledger->used_points().encoded()) sorted.push_back(to_hex(as_bytes(raw)));
    std::sort(sorted.begin(), sorted.end());
    for (auto& s : sorted) points.push_back(std::move(s));
    used_points_[ledger->group_id()] = std::move(points);
  }
  nlohmann::json state = {
      {"zone", z.persist()},
      {"tsa",
       {{"issuer", tsa_->issuer()}, {"last_sequence", tsa_->last_sequence()}, {"last_epoch", tsa_->last_epoch()}}},
      {"used_points", used_points_}};
  write_file(zone_path(), state.dump(2) + "\n");
  fs::permissions(zone_path(), fs::perms::owner_read | fs::perms::owner_write);

  std::ofstream audit(audit_path(), std::ios::app);
  for (const auto& record : z.audit_log()) audit << record.to_json_line() << '\n';
}

void StateDir::save_ledger(const IdentityLedger& ledger) {
  write_file(ledger_path(), sync_to_cloud(ledger).jsonl);
}

}  // namespace edgeshare::cli
