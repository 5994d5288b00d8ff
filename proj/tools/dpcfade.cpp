#include "dpcfade_app.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return dpcfade::run_cli(argc, argv, std::cout, std::cerr);
}
