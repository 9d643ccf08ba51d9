#include "bsa/cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  bsa::cli::Environment env;
  if (const char* s = std::getenv("BSA_SEED")) env.seed = s;
  return bsa::cli::run(argc, argv, std::cin, std::cout, std::cerr, env);
}
