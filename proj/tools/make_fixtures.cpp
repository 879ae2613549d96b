// Writes the fixture files into the given directory (default: fixtures).

#include <iostream>

#include "fixture_set.hpp"

int main(int argc, char** argv) {
  try {
    fixtures::write_all(argc > 1 ? argv[1] : "fixtures");
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
