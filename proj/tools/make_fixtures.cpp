#include <iostream>

#include <CLI11.hpp>

#include "fixtures/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regenerates the synthetic fixture set", "make_fixtures"};
  std::string dir;
  std::uint64_t seed = mslayout::fixtures::kDefaultSeed;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    mslayout::fixtures::write_fixture_set(dir, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
