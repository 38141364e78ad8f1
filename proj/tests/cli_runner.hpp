#pragma once

// Runs the tacf executable in a scratch directory and reads back its files.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace tacf::testing {

class CliRunner {
 public:
  explicit CliRunner(std::string binary) : binary_(std::move(binary)) {
    std::random_device rd;
    dir_ = std::filesystem::temp_directory_path() / ("tacf_cli_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(dir_);
  }
  ~CliRunner() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  CliRunner(const CliRunner&) = delete;
  CliRunner& operator=(const CliRunner&) = delete;

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of `tacf <args>`; stdout and stderr go to the named files.
  int run(const std::string& args, const std::string& out = "stdout.txt", const std::string& err = "stderr.txt",
          const std::string& env = "") const {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + binary_ + "' " + args + " > '" + path(out) +
                            "' 2> '" + path(err) + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

 private:
  std::string binary_;
  std::filesystem::path dir_;
};

}  // namespace tacf::testing
