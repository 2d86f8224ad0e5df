#include "pipeline.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ogc;
using namespace ogc::app;

namespace {

std::string stamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  f << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Orthogonal geodesic chords and brake orbits"};
  cli.require_subcommand(1);
  std::string config_path, out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 0;
  for (const std::string& name : command_names()) {
    CLI::App* sub = cli.add_subcommand(name);
    sub->add_option("--config", config_path, "config document (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized checks");
  }
  CLI11_PARSE(cli, argc, argv);
  const std::string command = cli.get_subcommands().front()->get_name();

  std::vector<std::string> log = {stamp() + " start " + command + " config=" + config_path +
                                  " threads=" + std::to_string(threads) + " seed=" + std::to_string(seed)};
  const auto t0 = std::chrono::steady_clock::now();
  json results;
  std::vector<Artifact> files;
  int code = 0;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("", "cannot read config file " + config_path);
    std::stringstream text;
    text << in.rdbuf();
    const RunConfig cfg = parse_config_text(text.str());
    RunOutput out = run_command(cfg, RunOptions{command, threads, seed});
    results = std::move(out.results);
    files = std::move(out.files);
    for (const auto& l : out.log) log.push_back(stamp() + " " + l);
  } catch (const Error& e) {
    results = error_document(command, e);
    code = exit_code(e);
    log.push_back(stamp() + " error " + e.what());
  } catch (const std::exception& e) {
    results = error_document(command, Error(ErrorCode::Evaluation, e.what()));
    code = 1;
    log.push_back(stamp() + " error " + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log.push_back(stamp() + " finished in " + std::to_string(secs) + " s, exit " + std::to_string(code));

  const std::string doc = results.dump(2) + "\n";
  try {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "results.json", doc);
    for (const auto& f : files) write_file(fs::path(out_dir) / f.name, f.content);
    std::string l;
    for (const auto& line : log) l += line + "\n";
    write_file(fs::path(out_dir) / "run.log", l);
  } catch (const std::exception& e) {
    std::cerr << "ogcflow: " << e.what() << "\n";
    if (code == 0) code = 1;
  }
  if (code != 0) {
    std::cout << doc;
  } else {
    std::cout << command << ": wrote " << files.size() + 1 << " files to " << out_dir << "\n";
  }
  return code;
}
