// Writes the toy chest-radiograph dataset used by the end-to-end tests.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cxr/error.hpp"
#include "cxr/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic image/mask/manifest dataset"};
  std::string dir = "data/mini";
  int count = 8;
  int width = 48;
  int height = 40;
  std::uint64_t seed = 7;
  app.add_option("dir", dir, "output directory");
  app.add_option("--count", count, "number of records")->check(CLI::PositiveNumber);
  app.add_option("--width", width, "base image width")->check(CLI::PositiveNumber);
  app.add_option("--height", height, "base image height")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "generator seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    cxr::synthetic::write_mini_dataset(dir, count, width, height, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
